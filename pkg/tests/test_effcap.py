import csv
import math

import numpy as np
import pytest

from eekit.channel import Deterministic, Discrete, Rayleigh
from eekit.config import ValidationError
from eekit.effcap import (
    ESTIMATE_HEADER,
    PowerPolicy,
    QosSpec,
    beta_of,
    effective_capacity_mc,
    estimate_row,
    optimize_power_policy,
    qos_ee,
    qos_ee_report,
    write_estimates,
)
from eekit.linkmodel import ResourceGrid

LN2 = math.log(2)
T, B0 = 1e-3, 1e7

# E[(1 + 0.1 lam)^-1] = 10 e^10 E1(10) for lam ~ Exp(1), from scipy.special.exp1
RAYLEIGH_CE_RHO01_BETA1 = 0.12715810063911825  # -log2 of the above, per T*B0
RAYLEIGH_ERGODIC_RHO01 = 0.13209796780219232  # E[log2(1 + 0.1 lam)] by quadrature


@pytest.fixture(scope="module")
def rayleigh_1e6():
    return Rayleigh().sample(1_000_000, seed=21)


def test_beta_reference_values():
    assert beta_of(0.0, T, B0) == 0.0
    assert beta_of(LN2 / (T * B0), T, B0) == pytest.approx(1.0, rel=1e-15)
    assert beta_of(0.01, T, B0) == pytest.approx(144.2695, rel=1e-6)
    q = QosSpec.from_beta(2.5, T, B0)
    assert q.beta == pytest.approx(2.5, rel=1e-12)
    with pytest.raises(ValidationError):
        QosSpec(-1.0, T, B0)


@pytest.mark.parametrize("beta", [0.0, 0.3, 1.0, 50.0])
def test_deterministic_channel_is_shannon(beta):
    qos = QosSpec.from_beta(beta, T, B0)
    est = effective_capacity_mc(qos, 0.1, Deterministic(1.0), S=1000)
    assert est.value == pytest.approx(T * B0 * math.log2(1.1), rel=1e-12)


def test_rayleigh_against_exponential_integral(rayleigh_1e6):
    qos = QosSpec.from_beta(1.0, T, B0)
    est = effective_capacity_mc(qos, 0.1, rayleigh_1e6)
    expect = T * B0 * RAYLEIGH_CE_RHO01_BETA1
    assert abs(est.value - expect) < 3 * est.std_error
    assert est.ergodic == pytest.approx(T * B0 * RAYLEIGH_ERGODIC_RHO01, rel=2e-3)


def test_small_theta_tends_to_ergodic(rayleigh_1e6):
    q0 = QosSpec(0.0, T, B0)
    e0 = effective_capacity_mc(q0, 0.1, rayleigh_1e6)
    assert e0.value == e0.ergodic
    tiny = effective_capacity_mc(QosSpec.from_beta(1e-7, T, B0), 0.1, rayleigh_1e6)
    assert tiny.value == pytest.approx(e0.value, rel=1e-6)


def test_jensen_bound_and_theta_monotone(rayleigh_1e6):
    lam = rayleigh_1e6[:100_000]
    vals = []
    for theta in (0.01, 0.1, 1.0):
        est = effective_capacity_mc(QosSpec(theta, T, 1e3), 0.3, lam)
        assert est.value <= est.ergodic
        vals.append(est.value)
    assert vals[0] > vals[1] > vals[2]


def test_large_beta_is_stable(rayleigh_1e6):
    est = effective_capacity_mc(QosSpec.from_beta(5000.0, T, B0), 0.1, rayleigh_1e6[:10_000])
    assert math.isfinite(est.value) and est.value > 0


def test_effcap_rejects_bad_input():
    qos = QosSpec.from_beta(1.0, T, B0)
    with pytest.raises(ValidationError):
        effective_capacity_mc(qos, 0.1, Rayleigh(), S=0)
    with pytest.raises(ValidationError):
        effective_capacity_mc(qos, 0.1, np.array([-1.0, 1.0]))
    with pytest.raises(ValidationError):
        effective_capacity_mc(qos, 0.1, np.ones((3, 2)))


def _one_block(rho, N0=1.0, b0=B0):
    return ResourceGrid(gain=[[1.0]], power=[[rho * b0 * N0]], B0=b0, N0=N0)


def test_qos_ee_deterministic_reduces_to_shannon_ee():
    rho, N0 = 0.05, 4e-21
    qos = QosSpec.from_beta(3.0, T, B0)
    ee = qos_ee(_one_block(rho, N0), qos, Deterministic(1.0), S=10)
    assert ee == pytest.approx(math.log2(1 + rho) / (rho * N0), rel=1e-12)


def test_qos_ee_homogeneous_over_iid_blocks(rayleigh_1e6):
    lam = rayleigh_1e6[:50_000]
    qos = QosSpec.from_beta(1.0, T, B0)
    one = qos_ee(_one_block(0.02), qos, lam)
    p = 0.02 * B0
    grid = ResourceGrid(gain=np.ones((5, 3)), power=np.full((5, 3), p), B0=B0, N0=1.0)
    assert qos_ee(grid, qos, lam) == pytest.approx(one, rel=1e-12)


def test_qos_ee_per_subchannel_laws():
    qos = QosSpec.from_beta(1.0, T, B0)
    x = np.column_stack([np.full(100, 2.0), np.full(100, 1.0)])
    grid = ResourceGrid(gain=np.ones((3, 2)), power=np.full((3, 2), 0.1 * B0), B0=B0, N0=1.0)
    rep = qos_ee_report(grid, qos, x)
    expect = 3 * T * B0 * (math.log2(1.2) + math.log2(1.1))
    assert rep.capacity_bits == pytest.approx(expect, rel=1e-12)
    assert rep.expected_power == pytest.approx(6 * 0.1 * B0)
    with pytest.raises(ValidationError):
        qos_ee_report(grid, qos, np.ones((100, 5)))


def test_qos_ee_near_low_snr_approximation(rayleigh_1e6):
    qos = QosSpec.from_beta(1.0, T, B0)
    ee = qos_ee(_one_block(0.01), qos, rayleigh_1e6)
    assert ee == pytest.approx(1.421055, rel=0.02)


def test_qos_ee_high_ee_gate():
    qos = QosSpec.from_beta(1.0, T, B0)
    with pytest.raises(ValidationError):
        qos_ee(_one_block(0.2), qos, Deterministic(), S=10, rho_th=0.1)
    with pytest.raises(ValidationError):
        qos_ee(_one_block(0.0), qos, Deterministic(), S=10)


def test_power_policy_lookup():
    pol = PowerPolicy("tabulated", edges=[1.0, 2.0], multipliers=[0.5, 1.0, 2.0])
    np.testing.assert_array_equal(pol(np.array([0.5, 1.0, 1.5, 3.0])), [0.5, 0.5, 1.0, 2.0])
    assert PowerPolicy()(np.ones(3)) is None
    with pytest.raises(ValidationError):
        PowerPolicy("tabulated", edges=[1.0], multipliers=[1.0])


def test_optimizer_single_bin_and_degenerate():
    qos = QosSpec.from_beta(2.0, T, B0)
    assert optimize_power_policy(qos, Rayleigh(), 1, 0.1, S=1000).kind == "constant"
    pol = optimize_power_policy(qos, Deterministic(1.0), 4, 0.1, S=1000)
    assert pol(np.ones(5)) is None or np.allclose(pol(np.ones(5)), 1.0)
    with pytest.raises(ValidationError):
        optimize_power_policy(QosSpec(0.0, T, B0), Rayleigh(), 3, 0.1, S=100)


def _toy_ce(mu, gains, beta, rho):
    return -math.log(np.mean((1 + np.asarray(mu) * rho * gains) ** (-beta))) / (beta * LN2)


def test_optimizer_matches_grid_search_on_three_level_toy():
    gains = np.array([0.5, 1.0, 1.5])
    beta, rho = 2.0, 0.1
    best = max(
        _toy_ce((i / 100, j / 100, (300 - i - j) / 100), gains, beta, rho)
        for i in range(301)
        for j in range(301 - i)
    )
    assert best == pytest.approx(0.15584195921509028, rel=1e-12)

    lam = np.repeat(gains, 2000)
    qos = QosSpec.from_beta(beta, T, B0)
    pol = optimize_power_policy(qos, lam, 3, rho)
    assert pol.kind == "tabulated"
    assert np.mean(pol(lam)) == pytest.approx(1.0, abs=1e-9)
    assert np.all(np.diff(pol.multipliers) >= 0)
    got = effective_capacity_mc(qos, rho, lam, policy=pol).value / (T * B0)
    assert abs(got - best) < 1e-3


def test_optimizer_never_worse_than_constant():
    qos = QosSpec.from_beta(1.0, T, B0)
    lam = Rayleigh().sample(50_000, seed=2)
    pol = optimize_power_policy(qos, lam, 8, 0.2)
    const = effective_capacity_mc(qos, 0.2, lam)
    adapt = effective_capacity_mc(qos, 0.2, lam, policy=pol)
    assert adapt.value >= const.value - 2 * const.std_error
    assert pol.mean_multiplier(lam) == pytest.approx(1.0, abs=1e-3)


def test_estimate_dump(tmp_path):
    qos = QosSpec.from_beta(1.0, T, B0)
    rep = qos_ee_report(_one_block(0.01), qos, Rayleigh(), S=1000, seed=7)
    p = tmp_path / "est.csv"
    write_estimates(p, [estimate_row(qos, 0.01, rep)])
    rows = list(csv.reader(open(p)))
    assert rows[0] == ESTIMATE_HEADER
    assert rows[0] == ["theta", "beta", "rho", "samples", "c_e_bits", "std_err", "ee_bits_per_joule", "seed"]
    assert rows[1][3] == "1000" and rows[1][7] == "7"
