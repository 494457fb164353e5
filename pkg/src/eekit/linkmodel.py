"""Shannon capacity, energy efficiency and high-EE-area checks.

A resource block pairs frequency channel ``i`` with spatial subchannel ``j``;
its rate is ``B0 * log2(1 + snr_ij * gain_ij)`` with ``snr_ij = p_ij / (B0 N0)``.
Blocks do not interfere, so grid capacity is the plain sum over blocks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ValidationError, noise_power

__all__ = [
    "ResourceGrid",
    "shannon_capacity",
    "mimo_capacity",
    "grid_capacity",
    "energy_efficiency",
    "normalized_ee",
    "high_ee_check",
    "HighEECheck",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class ResourceGrid:
    """``N x M`` blocks with per-block channel gain and transmit power (W)."""

    gain: np.ndarray
    power: np.ndarray
    B0: float
    N0: float

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.gain, dtype=float))
        p = np.atleast_2d(np.asarray(self.power, dtype=float))
        if g.shape != p.shape or g.ndim != 2:
            raise ValidationError(f"gain {g.shape} and power {p.shape} must be equal 2-D shapes")
        if np.any(g < 0) or np.any(p < 0):
            raise ValidationError("gains and powers must be nonnegative")
        noise_power(self.B0, self.N0)
        if not np.all(np.isfinite(p / (self.B0 * self.N0))):
            raise ValidationError("per-block SNR must be finite")
        object.__setattr__(self, "gain", g)
        object.__setattr__(self, "power", p)

    @property
    def N(self) -> int:
        return self.gain.shape[0]

    @property
    def M(self) -> int:
        return self.gain.shape[1]

    @property
    def snr(self) -> np.ndarray:
        """Transmit-side SNR ``p_ij / (B0 N0)`` of every block."""
        return self.power / (self.B0 * self.N0)

    @property
    def total_power(self) -> float:
        return float(self.power.sum())


def shannon_capacity(B, rho):
    """``B * log2(1 + rho)`` in bit/s; vectorizes over numpy inputs."""
    B_ = np.asarray(B, dtype=float)
    r = np.asarray(rho, dtype=float)
    if np.any(B_ < 0) or np.any(r < 0):
        raise ValidationError("bandwidth and SNR must be nonnegative")
    out = B_ * np.log1p(r) / LN2
    return float(out) if out.ndim == 0 else out


def mimo_capacity(rho_D: float, Ms: int, eigs, B0: float) -> float:
    """Capacity with power split evenly over ``Ms`` transmit antennas.

    Each eigenmode ``k`` behaves like a scalar channel with SNR
    ``rho_D * eigs[k] / Ms``.
    """
    e = np.asarray(eigs, dtype=float)
    if e.size == 0:
        raise ValidationError("empty eigenvalue vector")
    if Ms < 1 or np.any(e < 0) or rho_D < 0:
        raise ValidationError("need Ms ≥ 1 and nonnegative rho_D, eigs")
    return float(np.sum(B0 * np.log1p(rho_D * e / Ms)) / LN2)


def grid_capacity(grid: ResourceGrid) -> float:
    return float(np.sum(grid.B0 * np.log1p(grid.snr * grid.gain)) / LN2)


def energy_efficiency(capacity, PT):
    """Bits per joule delivered at transmit power ``PT``."""
    P = np.asarray(PT, dtype=float)
    if np.any(~(P > 0)):
        raise ValidationError("PT must be > 0; the PT -> 0 limit is eekit.approx.ee_limit")
    out = np.asarray(capacity, dtype=float) / P
    return float(out) if out.ndim == 0 else out


def normalized_ee(rho):
    """``EE * N0`` for a link spending exactly ``rho * B * N0`` watts.

    Equals ``log2(1 + rho) / rho``; independent of both bandwidth and N0.
    """
    r = np.asarray(rho, dtype=float)
    if np.any(~(r > 0)):
        raise ValidationError("rho must be > 0")
    out = np.log1p(r) / (LN2 * r)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class HighEECheck:
    passed: np.ndarray  # per-block flags
    snr: np.ndarray  # the SNR compared against the threshold
    rho_th: float
    mode: str

    @property
    def ok(self) -> bool:
        return bool(np.all(self.passed))


def high_ee_check(target, rho_th: float, mode: str = "received") -> HighEECheck:
    """Flag blocks whose SNR stays inside the high-EE area (``snr <= rho_th``).

    ``target`` is a :class:`ResourceGrid` or a (scalar / array) SNR.  In
    ``"received"`` mode a grid is judged on ``snr * gain``; ``"raw"`` mode
    ignores the gain.  Plain SNR inputs are compared as given.
    """
    if not rho_th > 0:
        raise ValidationError("rho_th must be > 0")
    if mode not in ("received", "raw"):
        raise ValidationError(f"unknown mode {mode!r}")
    if isinstance(target, ResourceGrid):
        s = target.snr * target.gain if mode == "received" else target.snr
    else:
        s = np.asarray(target, dtype=float)
    # a few ulps of slack so p = rho_th * B0 * N0 lands inside after division
    limit = rho_th * (1.0 + 4 * np.finfo(float).eps)
    return HighEECheck(passed=np.asarray(s <= limit), snr=s, rho_th=rho_th, mode=mode)
