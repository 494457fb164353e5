"""Random fading: Rayleigh gains and ordered eigenvalues of central Wishart matrices.

Channel matrices have i.i.d. CN(0, 1) entries.  Eigenvalues are taken from
the Gram matrix of the smaller dimension, which has the same nonzero spectrum
as ``H @ H^H`` and is cheaper to decompose.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import rng as _rng
from .config import ValidationError

__all__ = [
    "ChannelError",
    "ChannelSample",
    "MomentSummary",
    "sample_rayleigh_gain",
    "sample_wishart_eigs",
    "rayleigh_gains",
    "wishart_eigs",
    "marginal_eig_samples",
    "grid_eigs",
    "moments",
    "write_eig_samples",
    "Deterministic",
    "Rayleigh",
    "Discrete",
    "WishartEigs",
]


class ChannelError(RuntimeError):
    """Eigen-decomposition failed even after redrawing."""


@dataclass(frozen=True)
class ChannelSample:
    kind: str  # "scalar" or "mimo"
    gain: Optional[float] = None
    eigs: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind == "scalar":
            if self.gain is None or self.gain < 0:
                raise ValidationError("scalar sample needs a nonnegative gain")
        elif self.kind == "mimo":
            e = np.asarray(self.eigs, dtype=float)
            if e.ndim != 1 or np.any(e < 0) or np.any(np.diff(e) > 0):
                raise ValidationError("mimo eigs must be nonnegative and non-increasing")
        else:
            raise ValidationError(f"unknown sample kind {self.kind!r}")


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    second: float
    variance: float
    count: int


def _cn(gen: np.random.Generator, shape) -> np.ndarray:
    """CN(0, 1) entries: real and imaginary parts each N(0, 1/2)."""
    z = gen.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


def sample_rayleigh_gain(gen: np.random.Generator) -> float:
    """One Rayleigh power gain ``|h|^2``, exponentially distributed with mean 1."""
    z = gen.standard_normal(2)
    return float(0.5 * (z[0] * z[0] + z[1] * z[1]))


def _eigs_of(h: np.ndarray) -> np.ndarray:
    gram = h @ np.conj(np.swapaxes(h, -1, -2))
    w = np.linalg.eigvalsh(gram)
    if not np.all(np.isfinite(w)):
        raise np.linalg.LinAlgError("non-finite eigenvalues")
    # eigvalsh is ascending; tiny negative round-off is clipped to zero
    return np.maximum(w[..., ::-1], 0.0)


def _check_dims(Ms, Mr):
    if int(Ms) != Ms or int(Mr) != Mr or Ms < 1 or Mr < 1:
        raise ValidationError(f"antenna counts must be positive integers, got Ms={Ms}, Mr={Mr}")
    return int(Ms), int(Mr)


def sample_wishart_eigs(Ms: int, Mr: int, gen: np.random.Generator) -> np.ndarray:
    """Eigenvalues of ``H H^H`` for one ``Ms x Mr`` draw, sorted descending.

    A failed decomposition is retried once with a fresh draw from ``gen``.
    """
    Ms, Mr = _check_dims(Ms, Mr)
    small, big = min(Ms, Mr), max(Ms, Mr)
    for _ in range(2):
        try:
            return _eigs_of(_cn(gen, (small, big)))
        except np.linalg.LinAlgError:
            continue
    raise ChannelError(f"eigendecomposition failed twice for Ms={Ms}, Mr={Mr}")


def rayleigh_gains(S: int, seed: int, threads: int = 1) -> np.ndarray:
    """``S`` Rayleigh power gains from the counter-based stream for ``seed``."""

    def draw(gen, n, _b):
        z = gen.standard_normal((n, 2))
        return 0.5 * (z[:, 0] ** 2 + z[:, 1] ** 2)

    return _rng.generate(draw, S, seed, _rng.STREAM_RAYLEIGH, threads)


def wishart_eigs(
    Ms: int, Mr: int, S: int, seed: int, threads: int = 1, stream: int = _rng.STREAM_WISHART
) -> np.ndarray:
    """``S`` independent descending eigenvalue vectors, shape ``(S, min(Ms, Mr))``.

    Sample ``i`` depends only on ``(seed, stream, i)``.
    """
    Ms, Mr = _check_dims(Ms, Mr)
    small, big = min(Ms, Mr), max(Ms, Mr)

    def draw(gen, n, b):
        try:
            return _eigs_of(_cn(gen, (n, small, big)))
        except np.linalg.LinAlgError:
            alt = _rng.block_generator(seed, stream, b, retry=1)
            try:
                return _eigs_of(_cn(alt, (n, small, big)))
            except np.linalg.LinAlgError as e:
                raise ChannelError(f"eigendecomposition failed twice in block {b}") from e

    return _rng.generate(draw, S, seed, stream, threads)


def marginal_eig_samples(Ms: int, Mr: int, j: int, S: int, seed: int, threads: int = 1) -> np.ndarray:
    """``S`` draws of the ``j``-th largest eigenvalue (1-based)."""
    m = min(_check_dims(Ms, Mr))
    if not 1 <= j <= m:
        raise ValidationError(f"subchannel index j={j} outside 1..{m}")
    return np.ascontiguousarray(wishart_eigs(Ms, Mr, S, seed, threads)[:, j - 1])


def grid_eigs(
    N: int, Ms: int, Mr: int, S: int, seed: int, shared: bool = False, threads: int = 1
) -> np.ndarray:
    """Eigenvalues for every frequency channel, shape ``(S, N, min(Ms, Mr))``.

    By default each frequency channel gets its own channel matrix.  With
    ``shared=True`` one draw per frame is reused across all ``N`` channels.
    """
    if N < 1:
        raise ValidationError("N must be ≥ 1")
    if shared:
        e = wishart_eigs(Ms, Mr, S, seed, threads, stream=_rng.STREAM_GRID)
        return np.broadcast_to(e[:, None, :], (S, N, e.shape[1]))
    e = wishart_eigs(Ms, Mr, S * N, seed, threads, stream=_rng.STREAM_GRID)
    return e.reshape(S, N, -1)


def moments(samples) -> MomentSummary:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValidationError("moments of an empty sample")
    mean = float(np.mean(x))
    second = float(np.mean(x * x))
    return MomentSummary(mean=mean, second=second, variance=second - mean * mean, count=x.size)


def write_eig_samples(path, eigs) -> None:
    """Dump eigenvalue samples as ``sample_index,eig_rank,value`` rows (rank is 1-based)."""
    e = np.atleast_2d(np.asarray(eigs, dtype=float))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_index", "eig_rank", "value"])
        for i, row in enumerate(e):
            for k, v in enumerate(row, 1):
                w.writerow([i, k, f"{v:.15e}"])


# Gain laws consumed by the effective-capacity estimators.  Each returns
# samples along axis 0; Wishart laws return one column per subchannel.


@dataclass(frozen=True)
class Deterministic:
    value: float = 1.0
    mean = property(lambda self: self.value)
    second = property(lambda self: self.value ** 2)

    def sample(self, S, seed, threads=1):
        return np.full(S, float(self.value))


@dataclass(frozen=True)
class Rayleigh:
    """Exponential power gain with mean 1."""

    mean = 1.0
    second = 2.0

    def sample(self, S, seed, threads=1):
        return rayleigh_gains(S, seed, threads)


@dataclass(frozen=True)
class Discrete:
    values: tuple
    probs: Optional[tuple] = None

    def _p(self):
        v = np.asarray(self.values, dtype=float)
        if self.probs is None:
            return v, np.full(v.size, 1.0 / v.size)
        p = np.asarray(self.probs, dtype=float)
        return v, p / p.sum()

    @property
    def mean(self):
        v, p = self._p()
        return float(p @ v)

    @property
    def second(self):
        v, p = self._p()
        return float(p @ v**2)

    def sample(self, S, seed, threads=1):
        v, p = self._p()
        cdf = np.cumsum(p)
        cdf[-1] = 1.0

        def draw(gen, n, _b):
            return v[np.searchsorted(cdf, gen.random(n), side="right")]

        return _rng.generate(draw, S, seed, _rng.STREAM_RAYLEIGH, threads)


@dataclass(frozen=True)
class WishartEigs:
    """Ordered Wishart eigenvalues scaled by ``scale``; column ``j`` is subchannel ``j+1``."""

    Ms: int
    Mr: int
    scale: float = 1.0

    def sample(self, S, seed, threads=1):
        return self.scale * wishart_eigs(self.Ms, self.Mr, S, seed, threads)
