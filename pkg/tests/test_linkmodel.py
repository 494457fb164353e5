import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eekit.allocator import allocate_uniform
from eekit.config import ValidationError, db_to_linear
from eekit.linkmodel import (
    ResourceGrid,
    energy_efficiency,
    grid_capacity,
    high_ee_check,
    mimo_capacity,
    normalized_ee,
    shannon_capacity,
)


def test_shannon_reference_values():
    assert shannon_capacity(1e7, 0.0) == 0.0
    assert shannon_capacity(1e7, 1.0) == pytest.approx(1e7, rel=1e-15)
    assert shannon_capacity(1e7, 0.1) == pytest.approx(1.375035237e6, rel=1e-9)
    with pytest.raises(ValidationError):
        shannon_capacity(1e7, -0.1)


def test_mimo_capacity_reference_values():
    assert mimo_capacity(0.3, 4, [0.0, 0.0], 1e6) == 0.0
    # per-mode SNRs 0.2*4/2 = 0.4 and 0.2*1/2 = 0.1
    assert mimo_capacity(0.2, 2, [4.0, 1.0], 1e6) == pytest.approx(6.2293035e5, rel=1e-8)
    assert mimo_capacity(0.7, 1, [1.3], 2e6) == pytest.approx(shannon_capacity(2e6, 0.7 * 1.3))
    with pytest.raises(ValidationError):
        mimo_capacity(0.2, 2, [], 1e6)


def test_grid_capacity_reduction_and_additivity():
    B0, N0 = 1e7, 1e-20
    one = ResourceGrid(gain=[[1.0]], power=[[B0 * N0 * 0.1]], B0=B0, N0=N0)
    assert grid_capacity(one) == pytest.approx(shannon_capacity(B0, 0.1))
    four = ResourceGrid(gain=np.ones((2, 2)), power=np.full((2, 2), B0 * N0 * 0.1), B0=B0, N0=N0)
    assert grid_capacity(four) == pytest.approx(5.50014095e6, rel=1e-8)
    zero = ResourceGrid(gain=np.ones((3, 2)), power=np.zeros((3, 2)), B0=B0, N0=N0)
    assert grid_capacity(zero) == 0.0


@given(st.integers(0, 2**32 - 1))
def test_grid_capacity_permutation_invariant(seed):
    r = np.random.default_rng(seed)
    g = r.exponential(size=(3, 4))
    p = r.uniform(0, 1e-12, size=(3, 4))
    a = ResourceGrid(gain=g, power=p, B0=1e6, N0=1e-20)
    perm = r.permutation(12)
    b = ResourceGrid(gain=g.ravel()[perm].reshape(4, 3), power=p.ravel()[perm].reshape(4, 3), B0=1e6, N0=1e-20)
    assert grid_capacity(a) == pytest.approx(grid_capacity(b), rel=1e-12)


def test_grid_validation():
    with pytest.raises(ValidationError):
        ResourceGrid(gain=np.ones((2, 2)), power=np.ones((2, 3)), B0=1.0, N0=1.0)
    with pytest.raises(ValidationError):
        ResourceGrid(gain=[[-1.0]], power=[[1.0]], B0=1.0, N0=1.0)
    with pytest.raises(ValidationError):
        ResourceGrid(gain=[[1.0]], power=[[1.0]], B0=0.0, N0=1.0)


def test_energy_efficiency():
    assert energy_efficiency(1e6, 1e-3) == pytest.approx(1e9)
    with pytest.raises(ValidationError):
        energy_efficiency(1e6, 0.0)


def test_fig1_ratios_against_plotted_values():
    ee = lambda db: normalized_ee(db_to_linear(db))
    assert ee(-16) == pytest.approx(1.42487343, rel=1e-8)
    assert ee(20) == pytest.approx(0.0665821, rel=1e-4)
    assert ee(-16) / ee(20) == pytest.approx(494996069.090583 / 23130394.8469213, rel=1e-3)
    assert ee(0) / ee(-16) == pytest.approx(347396517.921382 / 494996069.090583, rel=1e-3)
    assert ee(-16) / ee(20) == pytest.approx(21.40, rel=5e-3)
    assert ee(0) / ee(-16) == pytest.approx(0.7018, rel=5e-3)


@given(st.floats(1e-6, 1e3), st.floats(1e-6, 1e3))
def test_ee_decreasing_in_snr(a, b):
    lo, hi = sorted((a, b))
    if hi > lo * (1 + 1e-9):
        assert normalized_ee(lo) > normalized_ee(hi)


def test_ee_limit_at_low_snr():
    assert normalized_ee(1e-9) == pytest.approx(1 / math.log(2), rel=1e-8)


def test_high_ee_boundary_inclusive():
    B0, N0, rho_th = 1e7, 3.981e-21, 0.1
    g = ResourceGrid(gain=[[1.0]], power=[[B0 * N0 * rho_th]], B0=B0, N0=N0)
    assert high_ee_check(g, rho_th).ok
    over = ResourceGrid(gain=[[1.0]], power=[[B0 * N0 * rho_th * 1.001]], B0=B0, N0=N0)
    assert not high_ee_check(over, rho_th).ok


def test_high_ee_modes():
    B0, N0 = 1.0, 1.0
    g = ResourceGrid(gain=[[2.0, 0.5]], power=[[0.08, 0.08]], B0=B0, N0=N0)
    rec = high_ee_check(g, 0.1)
    raw = high_ee_check(g, 0.1, mode="raw")
    assert rec.passed.tolist() == [[False, True]]
    assert raw.ok
    assert high_ee_check(np.array([0.05, 0.2]), 0.1).passed.tolist() == [True, False]


@pytest.mark.parametrize("N,M", [(1, 1), (4, 8), (100, 64)])
def test_uniform_split_check_matches_restatement(N, M):
    B0, N0, rho_th = 1e7, 3.981e-21, 0.1
    for PT in (1e-6, 1e-3, 2e-2):
        grid = allocate_uniform(PT, N, M, B0=B0, N0=N0)
        assert high_ee_check(grid, rho_th).ok == (PT / (N * M * B0 * N0) <= rho_th)
