"""Effective capacity under a statistical QoS exponent, estimated by Monte Carlo.

For a block with per-frame rate ``r = T B0 log2(1 + mu rho lam)`` the
effective capacity is ``-(1/theta) ln E[exp(-theta r)]``.  Writing
``beta = theta T B0 / ln 2`` turns the expectation into
``E[(1 + mu rho lam)^(-beta)]``, which is what the kernels evaluate (in log
space, shifted by the largest exponent).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize

from . import kernels
from .config import ValidationError
from .linkmodel import ResourceGrid, high_ee_check

__all__ = [
    "QosSpec",
    "PowerPolicy",
    "EffCapEstimate",
    "EEReport",
    "beta_of",
    "effective_capacity_mc",
    "qos_ee",
    "qos_ee_report",
    "optimize_power_policy",
    "ESTIMATE_HEADER",
    "estimate_row",
    "write_estimates",
]

LN2 = math.log(2.0)


def beta_of(theta: float, T: float, B0: float) -> float:
    """Normalized QoS exponent ``theta * T * B0 / ln 2``."""
    if theta < 0 or not (T > 0 and B0 > 0):
        raise ValidationError("need theta ≥ 0, T > 0, B0 > 0")
    return theta * T * B0 / LN2


@dataclass(frozen=True)
class QosSpec:
    """QoS exponent ``theta`` (1/bit) together with the frame it applies to."""

    theta: float
    T: float
    B0: float

    def __post_init__(self):
        beta_of(self.theta, self.T, self.B0)

    @classmethod
    def from_beta(cls, beta: float, T: float, B0: float) -> "QosSpec":
        if beta < 0:
            raise ValidationError("beta must be ≥ 0")
        return cls(theta=beta * LN2 / (T * B0), T=T, B0=B0)

    @property
    def beta(self) -> float:
        return beta_of(self.theta, self.T, self.B0)

    @property
    def bits_per_nat(self) -> float:
        """Bits delivered per frame per nat of ``ln(1 + snr)``."""
        return self.T * self.B0 / LN2


@dataclass(frozen=True)
class PowerPolicy:
    """Power-adaptation multiplier as a function of the fading gain.

    ``constant`` means ``mu == 1``.  A ``tabulated`` policy maps gain bins to
    multipliers: bin ``b`` holds gains in ``(edges[b-1], edges[b]]``.
    """

    kind: str = "constant"
    edges: np.ndarray = field(default_factory=lambda: np.empty(0))
    multipliers: np.ndarray = field(default_factory=lambda: np.ones(1))
    converged: bool = True

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=float)
        m = np.asarray(self.multipliers, dtype=float)
        if self.kind not in ("constant", "tabulated"):
            raise ValidationError(f"unknown policy kind {self.kind!r}")
        if m.size != e.size + 1 or np.any(m < 0) or np.any(np.diff(e) < 0):
            raise ValidationError("need len(multipliers) == len(edges) + 1, multipliers ≥ 0, sorted edges")
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "multipliers", m)

    def __call__(self, lam) -> Optional[np.ndarray]:
        """Multipliers for gains ``lam``; ``None`` for the constant policy."""
        if self.kind == "constant":
            return None
        return self.multipliers[np.searchsorted(self.edges, lam, side="left")]

    def mean_multiplier(self, lam) -> float:
        mu = self(lam)
        return 1.0 if mu is None else float(np.mean(mu))


@dataclass(frozen=True)
class EffCapEstimate:
    value: float  # bits per frame
    std_error: float
    ergodic: float  # mean of r, the theta -> 0 value
    samples: int
    seed: Optional[int]


def _draw(law, S, seed, threads):
    if isinstance(law, np.ndarray) or isinstance(law, (list, tuple)):
        x = np.asarray(law, dtype=float)
    else:
        if S is None or S < 1:
            raise ValidationError("sample count S must be ≥ 1")
        x = law.sample(S, seed, threads)
    if x.size == 0:
        raise ValidationError("no gain samples")
    if np.any(x < 0):
        raise ValidationError("gains must be nonnegative")
    return x


def _estimate(qos: QosSpec, rho: float, lam: np.ndarray, policy, seed) -> EffCapEstimate:
    if rho < 0:
        raise ValidationError("rho must be ≥ 0")
    mu = None if policy is None else policy(lam)
    try:
        mean_x, var_x, lme, rel_var = kernels.rate_stats(lam, rho, qos.beta, mu)
    except FloatingPointError as e:
        raise ValidationError(str(e)) from None
    n = lam.size
    scale = qos.bits_per_nat
    ergodic = scale * mean_x
    if qos.beta == 0:
        return EffCapEstimate(ergodic, scale * math.sqrt(var_x / n), ergodic, n, seed)
    value = -scale * lme / qos.beta
    se = scale / qos.beta * math.sqrt(rel_var / n)
    return EffCapEstimate(value, se, ergodic, n, seed)


def effective_capacity_mc(
    qos: QosSpec,
    rho: float,
    law,
    S: Optional[int] = None,
    seed: int = 0,
    policy: Optional[PowerPolicy] = None,
    threads: int = 1,
) -> EffCapEstimate:
    """Monte Carlo effective capacity of one block, in bits per frame.

    Parameters
    ----------
    qos : QosSpec
        QoS exponent plus frame duration and block bandwidth.
    rho : float
        Transmit SNR of the block.
    law : gain law or array
        Object with ``sample(S, seed, threads)`` returning 1-D gains, or the
        gain samples themselves.
    S, seed, threads
        Sample count and counter-based stream parameters, used when ``law``
        has to be sampled.
    policy : PowerPolicy, optional
        Power adaptation; constant power when omitted.

    Returns
    -------
    EffCapEstimate
        Estimate with a delta-method standard error.  For ``theta == 0`` the
        value is the ergodic mean rate.
    """
    lam = _draw(law, S, seed, threads)
    if lam.ndim != 1:
        raise ValidationError("effective_capacity_mc needs 1-D gains; select a subchannel column")
    return _estimate(qos, rho, lam, policy, seed)


@dataclass(frozen=True)
class EEReport:
    """QoS-constrained EE of a grid together with its provenance."""

    capacity_bits: float  # summed effective capacity per frame
    std_error_bits: float
    expected_power: float  # W
    ee: float  # bits/J
    ee_std_error: float
    samples: int
    seed: Optional[int]


def qos_ee_report(
    grid: ResourceGrid,
    qos: QosSpec,
    law,
    S: Optional[int] = None,
    seed: int = 0,
    policy: Optional[PowerPolicy] = None,
    threads: int = 1,
    rho_th: Optional[float] = None,
) -> EEReport:
    """Summed effective capacity over ``E{P_T}``, normalized per second.

    The fading seen by block ``(i, j)`` is ``grid.gain[i, j]`` times a draw
    from ``law``.  ``law`` may yield shape ``(S,)`` (one law for all blocks),
    ``(S, M)`` (one law per spatial subchannel, shared by every frequency
    channel) or ``(S, N, M)``.  Blocks with identical law, SNR and gain are
    evaluated once.  With ``rho_th`` set, every block must pass the high-EE
    check first.
    """
    if qos.B0 != grid.B0:
        raise ValidationError(f"qos.B0={qos.B0} differs from grid.B0={grid.B0}")
    if rho_th is not None:
        chk = high_ee_check(grid, rho_th)
        if not chk.ok:
            raise ValidationError(f"{int((~chk.passed).sum())} block(s) outside the high-EE area")
    x = _draw(law, S, seed, threads)
    N, M = grid.N, grid.M
    if x.ndim == 1:
        column = lambda i, j: ("all",)
    elif x.ndim == 2 and x.shape[1] == M:
        column = lambda i, j: ("sub", j)
    elif x.ndim == 3 and x.shape[1:] == (N, M):
        column = lambda i, j: ("blk", i, j)
    else:
        raise ValidationError(f"gain samples of shape {x.shape} do not fit an {N}x{M} grid")

    def col(key):
        if key[0] == "all":
            return x
        if key[0] == "sub":
            return np.ascontiguousarray(x[:, key[1]])
        return np.ascontiguousarray(x[:, key[1], key[2]])

    snr = grid.snr
    groups: dict = {}
    for i in range(N):
        for j in range(M):
            k = (column(i, j), float(snr[i, j]), float(grid.gain[i, j]), float(grid.power[i, j]))
            groups[k] = groups.get(k, 0) + 1

    cap = var = power = 0.0
    for (ck, rho, g, p), count in groups.items():
        lam = g * col(ck)
        est = _estimate(qos, rho, lam, policy, seed)
        cap += count * est.value
        # identical blocks share samples, so their errors add linearly
        var += (count * est.std_error) ** 2
        mu_mean = 1.0 if policy is None else policy.mean_multiplier(lam)
        power += count * mu_mean * p
    if not power > 0:
        raise ValidationError("expected transmit power is zero")
    se = math.sqrt(var)
    denom = qos.T * power
    n = x.shape[0]
    return EEReport(cap, se, power, cap / denom, se / denom, n, seed)


def qos_ee(grid, qos, law, S=None, seed=0, policy=None, threads=1, rho_th=None) -> float:
    """QoS-constrained energy efficiency in bits/J; see :func:`qos_ee_report`."""
    return qos_ee_report(grid, qos, law, S, seed, policy, threads, rho_th).ee


def _bin_assign(lam: np.ndarray, bins: int):
    """Equal-count gain bins: upper edges and the bin index of every sample."""
    srt = np.sort(lam)
    bounds = [srt[min(lam.size - 1, (b * lam.size) // bins - 1)] for b in range(1, bins)]
    edges = np.asarray(bounds, dtype=float)
    return edges, np.searchsorted(edges, lam, side="left")


def optimize_power_policy(
    qos: QosSpec,
    law,
    bins: int,
    rho: float,
    S: Optional[int] = None,
    seed: int = 0,
    threads: int = 1,
    max_iter: int = 200,
) -> PowerPolicy:
    """Tabulated power adaptation maximizing the sample effective capacity.

    Gains are split into ``bins`` equal-count bins.  The multipliers maximize
    the Monte Carlo effective capacity over the drawn samples subject to unit
    mean power, nonnegativity and monotone non-decreasing order in the gain.
    The constant policy is feasible, so the result is never worse than it; if
    the solver stops at its iteration cap the best iterate is returned with
    ``converged=False``.
    """
    if bins < 1:
        raise ValidationError("bins must be ≥ 1")
    if not qos.theta > 0:
        raise ValidationError("theta must be > 0 to optimize a QoS power policy")
    lam = _draw(law, S, seed, threads)
    if lam.ndim != 1:
        raise ValidationError("power policies need 1-D gain samples")
    if bins == 1:
        return PowerPolicy()
    edges, idx = _bin_assign(lam, bins)
    nb = edges.size + 1
    w = np.bincount(idx, minlength=nb) / lam.size
    if np.any(w == 0):
        # degenerate law: fewer distinct gain levels than bins
        keep = np.unique(idx)
        edges = edges[keep[:-1]] if keep.size > 1 else np.empty(0)
        if edges.size == 0:
            return PowerPolicy()
        idx = np.searchsorted(edges, lam, side="left")
        nb = edges.size + 1
        w = np.bincount(idx, minlength=nb) / lam.size
    beta = qos.beta
    u = rho * lam

    def objective(mu):
        # ln E[(1 + mu rho lam)^-beta] / beta; smaller is better
        x = np.log1p(mu[idx] * u)
        z = -beta * x
        zmax = z.max()
        e = np.exp(z - zmax)
        s = e.sum()
        val = (zmax + math.log(s / lam.size)) / beta
        g_s = -(e / s) * u / (1.0 + mu[idx] * u)
        return val, np.bincount(idx, weights=g_s, minlength=nb)

    cons = [{"type": "eq", "fun": lambda m: w @ m - 1.0, "jac": lambda m: w}]
    if nb > 1:
        D = np.diff(np.eye(nb), axis=0)
        cons.append({"type": "ineq", "fun": lambda m: D @ m, "jac": lambda m: D})
    bounds = [(0.0, 1.0 / wb) for wb in w]
    mu0 = np.ones(nb)
    res = optimize.minimize(
        objective, mu0, jac=True, method="SLSQP", bounds=bounds,
        constraints=cons, options={"maxiter": max_iter, "ftol": 1e-14},
    )
    mu = np.clip(res.x, 0.0, None)
    mu = np.maximum.accumulate(mu)
    mu = mu / (w @ mu)
    if objective(mu)[0] > objective(mu0)[0]:
        mu = mu0
    return PowerPolicy("tabulated", edges, mu, converged=bool(res.success))


ESTIMATE_HEADER = ["theta", "beta", "rho", "samples", "c_e_bits", "std_err", "ee_bits_per_joule", "seed"]


def estimate_row(qos: QosSpec, rho: float, report: EEReport, **extra) -> dict:
    """One estimate-dump row (keys of :data:`ESTIMATE_HEADER` plus ``extra``)."""
    row = dict(extra)
    row.update(
        theta=qos.theta, beta=qos.beta, rho=rho, samples=report.samples,
        c_e_bits=report.capacity_bits, std_err=report.std_error_bits,
        ee_bits_per_joule=report.ee, seed=-1 if report.seed is None else report.seed,
    )
    return row


def write_estimates(path, rows) -> None:
    """Write rows from :func:`estimate_row` as an estimate-dump CSV."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ESTIMATE_HEADER)
        for r in rows:
            w.writerow([r[k] if isinstance(r[k], (int, np.integer)) else f"{float(r[k]):.15e}" for k in ESTIMATE_HEADER])
