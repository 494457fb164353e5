"""Resource planning for frequency-only, spatial-only and two-dimension schemes.

Every block runs at exactly the threshold SNR: per-block capacity increases
with SNR, so the threshold is the best a block can do while staying in the
high-EE area, and the block count needed for a rate target is then fixed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .config import THERMAL_N0, SystemConfig, ValidationError
from .linkmodel import ResourceGrid, energy_efficiency, grid_capacity, shannon_capacity

__all__ = [
    "SCHEMES",
    "AllocationPlan",
    "min_resources",
    "factor_blocks",
    "allocate_uniform",
    "ee_vs_grid_sweep",
    "compare_schemes",
    "SchemeComparison",
    "REPORTED_TABLE1",
]

SCHEMES = ("frequency-only", "spatial-only", "two-dimension")

# Reference rows reported for R = 5e9 bit/s at rho_th = -10 dB, B0 = 10 MHz.
REPORTED_TABLE1 = {
    "frequency-only": {"n_freq": 1200, "m_space": 0, "ee": 1.8e8},
    "spatial-only": {"n_freq": 0, "m_space": 1024, "ee": 2.0e8},
    "two-dimension": {"n_freq": 100, "m_space": 64, "ee": 2.3e8},
}


@dataclass(frozen=True)
class AllocationPlan:
    scheme: str
    n_freq: int
    m_space: int
    per_block_power: float
    total_power: float
    predicted_capacity: float
    predicted_ee: float
    feasible: bool
    blocks_needed: int = 0

    @property
    def blocks(self) -> int:
        return self.n_freq * self.m_space


def _block_count(R: float, per_block: float) -> int:
    c = max(1, math.ceil(R / per_block))
    # guard the float ceil in both directions by direct evaluation
    while c > 1 and (c - 1) * per_block >= R:
        c -= 1
    while c * per_block < R:
        c += 1
    return c


def factor_blocks(c: int, max_n: Optional[int] = None, max_m: Optional[int] = None):
    """Grid ``(N, M)`` with ``N * M >= c`` minimizing ``max(N, M)``.

    Among equally balanced grids the smallest ``N * M`` wins, then the one
    with fewer spatial subchannels.  Returns ``None`` if the caps make ``c``
    unreachable.
    """
    best = None
    n_hi = c if max_n is None else min(c, max_n)
    for n in range(1, n_hi + 1):
        m = -(-c // n)
        if max_m is not None and m > max_m:
            continue
        key = (max(n, m), n * m, m)
        if best is None or key < best[0]:
            best = (key, n, m)
    return None if best is None else (best[1], best[2])


def min_resources(
    R: float,
    B0: float,
    rho_th: float,
    scheme: str,
    mean_gain: float = 1.0,
    N0: float = THERMAL_N0,
    max_freq: Optional[int] = None,
    max_space: Optional[int] = None,
) -> AllocationPlan:
    """Smallest block count reaching rate ``R`` with every block at ``rho_th``.

    Frequency-only plans use ``(c, 1)``, spatial-only plans ``(1, c)`` (``c``
    subchannels, i.e. ``min(Ms, Mr) = c``) and two-dimension plans the grid
    from :func:`factor_blocks`.  Caps that cannot be met give an infeasible
    plan with zero resources.
    """
    if not R > 0:
        raise ValidationError("rate target R must be > 0")
    if not (B0 > 0 and rho_th > 0 and mean_gain > 0 and N0 > 0):
        raise ValidationError("B0, rho_th, mean_gain and N0 must be > 0")
    if scheme not in SCHEMES:
        raise ValidationError(f"unknown scheme {scheme!r}")
    per_block = shannon_capacity(B0, rho_th * mean_gain)
    c = _block_count(R, per_block)
    if scheme == "frequency-only":
        shape = (c, 1) if max_freq is None or c <= max_freq else None
    elif scheme == "spatial-only":
        shape = (1, c) if max_space is None or c <= max_space else None
    else:
        shape = factor_blocks(c, max_freq, max_space)
    if shape is None:
        return AllocationPlan(scheme, 0, 0, 0.0, 0.0, 0.0, 0.0, False, c)
    n, m = shape
    p = rho_th * B0 * N0
    total = p * n * m
    cap = n * m * per_block
    return AllocationPlan(scheme, n, m, p, total, cap, energy_efficiency(cap, total), cap >= R, c)


def allocate_uniform(PT: float, N: int, M: int, gains=None, B0: float = 1e7, N0: float = THERMAL_N0) -> ResourceGrid:
    """Split ``PT`` evenly over the ``N x M`` blocks (unit gains by default)."""
    if N * M < 1:
        raise ValidationError("grid needs at least one block")
    if PT < 0:
        raise ValidationError("PT must be ≥ 0")
    g = np.ones((N, M)) if gains is None else np.broadcast_to(np.asarray(gains, dtype=float), (N, M))
    return ResourceGrid(gain=np.array(g), power=np.full((N, M), PT / (N * M)), B0=B0, N0=N0)


def ee_vs_grid_sweep(PT: float, n_values: Iterable[int], m_values: Iterable[int], config: SystemConfig):
    """EE of uniform allocation over every ``(N, M)`` pair, N-major order.

    Yields dicts with keys ``n_freq, m_space, per_block_snr, capacity_bps,
    ee_bits_per_joule``.
    """
    ns, ms = list(n_values), list(m_values)
    if not ns or not ms:
        raise ValidationError("sweep ranges must be nonempty")
    rows = []
    for n in ns:
        for m in ms:
            grid = allocate_uniform(PT, n, m, B0=config.B0, N0=config.N0)
            cap = grid_capacity(grid)
            rows.append(
                {
                    "n_freq": n,
                    "m_space": m,
                    "per_block_snr": float(grid.snr[0, 0]),
                    "capacity_bps": cap,
                    "ee_bits_per_joule": energy_efficiency(cap, PT),
                }
            )
    return rows


@dataclass(frozen=True)
class SchemeComparison:
    R: float
    rho_th: float
    plans: dict  # scheme -> AllocationPlan
    reported: dict  # scheme -> reference values


def compare_schemes(
    R: float,
    rho_th: float,
    config: SystemConfig,
    mean_gain: float = 1.0,
    max_freq: Optional[int] = None,
    max_space: Optional[int] = None,
) -> SchemeComparison:
    plans = {
        s: min_resources(R, config.B0, rho_th, s, mean_gain, config.N0, max_freq, max_space)
        for s in SCHEMES
    }
    return SchemeComparison(R, rho_th, plans, REPORTED_TABLE1)
