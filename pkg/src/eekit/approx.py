"""Low-SNR behaviour of the QoS-constrained energy efficiency.

As the per-block SNR goes to zero the EE tends to ``E{lam} / (N0 ln 2)``.
Just below that limit the shortfall is linear in the SNR and depends only
on the first two gain moments.  Two conventions for that linear term are
offered:

``"taylor-corrected"`` (default)
    The second-order Maclaurin coefficient of ``C_e / T`` is ``f''(0) / 2``,
    which gives the gap ``rho/(2 N0 ln2) * ((beta+1) E{lam^2} - beta E{lam}^2)``.
``"paper-literal"``
    The same expression without the factor one half.

:func:`taylor_oracle` measures ``f'(0)`` and ``f''(0)`` numerically from the
Monte Carlo estimator so either convention can be checked directly.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

from .config import ValidationError
from .effcap import QosSpec, effective_capacity_mc

__all__ = [
    "MODES",
    "ApproxInputs",
    "ApproxValidityWarning",
    "TaylorResult",
    "ee_limit",
    "delta_sublinear",
    "approx_ee",
    "ee_beta_derivative",
    "taylor_oracle",
]

LN2 = math.log(2.0)
MODES = ("taylor-corrected", "paper-literal")


class ApproxValidityWarning(UserWarning):
    """The low-SNR approximation went negative: SNR too large for it."""


def _factor(mode: str) -> float:
    if mode == "taylor-corrected":
        return 0.5
    if mode == "paper-literal":
        return 1.0
    raise ValidationError(f"unknown mode {mode!r}; expected one of {MODES}")


@dataclass(frozen=True)
class ApproxInputs:
    rho_th: float
    beta: float
    mean: float
    second: float
    variance: Optional[float] = None
    N0: float = 1.0
    mode: str = "taylor-corrected"

    def __post_init__(self):
        if not self.rho_th >= 0 or self.beta < 0 or not self.N0 > 0:
            raise ValidationError("need rho_th ≥ 0, beta ≥ 0, N0 > 0")
        _factor(self.mode)
        var = self.second - self.mean**2
        if self.variance is None:
            object.__setattr__(self, "variance", var)
        elif abs(self.variance - var) > 1e-9 * max(1.0, abs(self.second)):
            raise ValidationError("variance inconsistent with second - mean**2")

    @classmethod
    def from_moments(cls, m, rho_th, beta, N0=1.0, mode="taylor-corrected"):
        """Build from a :class:`eekit.channel.MomentSummary` or a gain law."""
        return cls(rho_th, beta, m.mean, m.second, None, N0, mode)


def ee_limit(mean: float, N0: float) -> float:
    """EE as the per-block SNR tends to zero: ``E{lam} / (N0 ln 2)``."""
    if not N0 > 0:
        raise ValidationError("N0 must be > 0")
    return mean / (N0 * LN2)


def delta_sublinear(inputs: ApproxInputs) -> float:
    a = inputs
    spread = (a.beta + 1.0) * a.second - a.beta * a.mean**2
    return _factor(a.mode) * a.rho_th / (a.N0 * LN2) * spread


def approx_ee(inputs: ApproxInputs) -> float:
    """Limit minus the sublinear gap.  Warns (but still returns) if negative."""
    val = ee_limit(inputs.mean, inputs.N0) - delta_sublinear(inputs)
    if val < 0:
        warnings.warn(
            f"approximate EE is negative at rho_th={inputs.rho_th}; outside its validity range",
            ApproxValidityWarning,
            stacklevel=2,
        )
    return val


def ee_beta_derivative(rho_th: float, variance: float, N0: float, mode: str = "taylor-corrected") -> float:
    """Slope of the approximate EE in beta; never positive since variance ≥ 0."""
    if variance < 0:
        raise ValidationError("variance must be ≥ 0")
    return -_factor(mode) * rho_th / (N0 * LN2) * variance


@dataclass(frozen=True)
class TaylorResult:
    first: float  # f'(0), bit/s per unit SNR
    second: float  # f''(0)
    h: float
    values: tuple  # f(h), f(2h), f(3h)


def taylor_oracle(
    qos: QosSpec,
    law=None,
    h: float = 1e-3,
    S: int = 1_000_000,
    seed: int = 0,
    evaluator: Optional[Callable[[float], float]] = None,
    threads: int = 1,
    rtol: float = 0.5,
) -> TaylorResult:
    """Numerical first and second derivatives of ``rho -> C_e(rho) / T`` at 0.

    ``f(0) = 0`` exactly, so the stencil is ``{0, h, 2h, 3h}``.  The first
    derivative is the quadratic extrapolation of the difference quotients
    ``f(kh) / (kh)`` to ``k = 0``; the second combines the one-sided second
    differences anchored at 0 and at ``h`` (Richardson, order ``h^2``).

    Unless ``evaluator`` is given, ``law`` is sampled once and the same
    samples serve every stencil point, which makes ``f`` smooth in ``rho``.
    Raises ``ValidationError`` when the stencil is not increasing or the two
    second differences disagree by more than ``rtol``; more samples or a
    larger ``h`` usually cure both.
    """
    if not 1e-5 <= h <= 1e-2:
        raise ValidationError("h must lie in [1e-5, 1e-2]")
    if evaluator is None:
        if law is None:
            raise ValidationError("need a gain law or an evaluator")
        lam = law.sample(S, seed, threads) if not hasattr(law, "shape") else law

        def evaluator(rho):
            return effective_capacity_mc(qos, rho, lam, seed=seed).value

    f1, f2, f3 = (evaluator(k * h) / qos.T for k in (1, 2, 3))
    if not all(map(math.isfinite, (f1, f2, f3))) or not 0 < f1 < f2 < f3:
        raise ValidationError(
            "finite-difference stencil is not monotone; increase the sample count or h"
        )
    first = (3 * f1 - 1.5 * f2 + f3 / 3) / h
    d_at0 = (-2 * f1 + f2) / h**2
    d_ath = (f1 - 2 * f2 + f3) / h**2
    second = 2 * d_at0 - d_ath
    if abs(d_at0 - d_ath) > rtol * abs(second):
        raise ValidationError(
            "second differences disagree beyond tolerance; increase the sample count or h"
        )
    return TaylorResult(first, second, h, (f1, f2, f3))
