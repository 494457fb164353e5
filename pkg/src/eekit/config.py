"""Units, conversions and the validated system configuration.

Everything downstream works in linear SI units; dB only appears when reading
or writing human-facing values.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "ValidationError",
    "ConfigError",
    "SystemConfig",
    "db_to_linear",
    "linear_to_db",
    "dbm_per_hz_to_watts_per_hz",
    "noise_power",
    "config_violations",
    "validate_config",
    "parse_config_text",
    "load_config",
    "apply_overrides",
    "parse_overrides",
    "config_to_text",
    "THERMAL_N0",
]


class ValidationError(ValueError):
    """Invalid argument to one of the numerical routines."""


class ConfigError(ValueError):
    """A configuration violates one or more invariants.

    ``violations`` holds ``(field, reason)`` pairs, one per broken invariant.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        msg = "; ".join(f"{k}: {r}" for k, r in self.violations)
        super().__init__(msg or "invalid configuration")


def db_to_linear(x_db):
    """Convert decibels to a linear power ratio (scalar or array)."""
    x = np.asarray(x_db, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValidationError(f"non-finite dB value: {x_db!r}")
    out = 10.0 ** (x / 10.0)
    return float(out) if out.ndim == 0 else out


def linear_to_db(x):
    """Inverse of :func:`db_to_linear`; requires strictly positive input."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise ValidationError(f"linear ratio must be finite and > 0: {x!r}")
    out = 10.0 * np.log10(x)
    return float(out) if out.ndim == 0 else out


def dbm_per_hz_to_watts_per_hz(x_dbm_hz: float) -> float:
    return db_to_linear(x_dbm_hz) * 1e-3


# -174 dBm/Hz, thermal noise at room temperature.
THERMAL_N0 = dbm_per_hz_to_watts_per_hz(-174.0)


def noise_power(B0: float, N0: float) -> float:
    """Noise power ``B0 * N0`` in watts over one channel of width ``B0``."""
    if not (B0 > 0 and N0 > 0) or not (math.isfinite(B0) and math.isfinite(N0)):
        raise ValidationError(f"B0 and N0 must be positive, got B0={B0!r}, N0={N0!r}")
    return B0 * N0


@dataclass(frozen=True)
class SystemConfig:
    """Physical parameters shared by every experiment.

    Attributes
    ----------
    B0 : float
        Bandwidth of one frequency channel in Hz.
    N0 : float
        One-sided noise spectral density in W/Hz.
    T : float
        Frame duration in seconds.
    PT : float
        Total transmit power in W.
    Ms, Mr : int
        Transmit and receive antenna counts.
    N, M : int
        Number of frequency channels and spatial subchannels.
    rho_th : float
        Linear SNR threshold bounding the high-EE area.
    theta : float
        QoS exponent in 1/bit.
    seed : int
        Root seed of the counter-based sample streams.
    samples : int
        Monte Carlo sample count.
    shared_eigs_across_freq : bool
        Reuse one eigenvalue draw for every frequency channel instead of
        drawing independently per channel.
    """

    B0: float = 1e7
    N0: float = THERMAL_N0
    T: float = 1e-3
    PT: float = 20e-3
    Ms: int = 1024
    Mr: int = 1024
    N: int = 100
    M: int = 64
    rho_th: float = 0.1
    theta: float = 0.01
    seed: int = 0
    samples: int = 100_000
    shared_eigs_across_freq: bool = False

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    @property
    def beta(self) -> float:
        """Normalized QoS exponent ``theta * T * B0 / ln 2``."""
        return self.theta * self.T * self.B0 / math.log(2.0)


_INT_FIELDS = {"Ms", "Mr", "N", "M", "seed", "samples"}
_BOOL_FIELDS = {"shared_eigs_across_freq"}
_FIELD_NAMES = [f.name for f in fields(SystemConfig)]
_ALIASES = {"n_freq": "N", "m_space": "M"}


def config_violations(cfg: SystemConfig) -> list[tuple[str, str]]:
    """Every broken invariant of ``cfg`` as ``(field, reason)`` pairs."""
    out = []
    for name in ("B0", "N0", "T", "PT", "rho_th", "theta"):
        v = getattr(cfg, name)
        if not isinstance(v, (int, float)) or not math.isfinite(v):
            out.append((name, f"{name} must be a finite number"))
    positive = {"B0": cfg.B0, "N0": cfg.N0, "T": cfg.T, "rho_th": cfg.rho_th}
    for name, v in positive.items():
        if (name, f"{name} must be a finite number") not in out and not v > 0:
            out.append((name, f"{name} must be > 0"))
    if math.isfinite(cfg.PT) and cfg.PT < 0:
        out.append(("PT", "PT must be ≥ 0"))
    if math.isfinite(cfg.theta) and cfg.theta < 0:
        out.append(("theta", "theta must be ≥ 0"))
    for name in ("Ms", "Mr", "N", "M"):
        v = getattr(cfg, name)
        if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
            out.append((name, f"{name} must be a positive integer"))
    if not isinstance(cfg.samples, (int, np.integer)) or cfg.samples < 1:
        out.append(("samples", "samples must be ≥ 1"))
    if not isinstance(cfg.seed, (int, np.integer)) or not 0 <= cfg.seed < 2**64:
        out.append(("seed", "seed must be an unsigned 64-bit integer"))
    antennas_ok = all(
        isinstance(getattr(cfg, k), (int, np.integer)) for k in ("Ms", "Mr", "M")
    )
    if antennas_ok and cfg.M > min(cfg.Ms, cfg.Mr):
        out.append(("M", "M exceeds min(Ms,Mr)"))
    return out


def validate_config(raw: SystemConfig) -> SystemConfig:
    """Return ``raw`` unchanged if valid, else raise :class:`ConfigError`.

    Nothing is clamped: each violated invariant is reported individually.
    """
    bad = config_violations(raw)
    if bad:
        raise ConfigError(bad)
    return raw


def _coerce(name: str, value: str):
    value = value.strip()
    if name in _BOOL_FIELDS:
        low = value.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError([(name, f"not a boolean: {value!r}")])
    try:
        if name in _INT_FIELDS:
            try:
                return int(value, 0)
            except ValueError:
                f = float(value)
                if not f.is_integer():
                    raise
                return int(f)
        return float(value)
    except ValueError:
        raise ConfigError([(name, f"cannot parse {value!r}")]) from None


def _normalize(items: Iterable[tuple[str, str]]) -> dict:
    """Map raw key/value strings onto SystemConfig fields, converting dB keys."""
    out = {}
    errors = []
    for key, value in items:
        key = _ALIASES.get(key, key)
        try:
            if key == "rho_th_db":
                out["rho_th"] = db_to_linear(float(value))
            elif key == "n0_dbm_hz":
                out["N0"] = dbm_per_hz_to_watts_per_hz(float(value))
            elif key in _FIELD_NAMES:
                out[key] = _coerce(key, value)
            else:
                errors.append((key, "unknown configuration key"))
        except ConfigError as e:
            errors.extend(e.violations)
        except ValueError:
            errors.append((key, f"cannot parse {value!r}"))
    if errors:
        raise ConfigError(errors)
    return out


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    items = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError([(f"line {lineno}", f"expected key = value, got {line!r}")])
        k, v = line.split("=", 1)
        items.append((k.strip(), v.strip()))
    return _normalize(items)


def parse_overrides(pairs: Iterable[str]) -> dict:
    items = []
    for p in pairs:
        if "=" not in p:
            raise ConfigError([(p, "override must look like key=value")])
        k, v = p.split("=", 1)
        items.append((k.strip(), v.strip()))
    return _normalize(items)


def apply_overrides(cfg: SystemConfig, values: Mapping) -> SystemConfig:
    return dataclasses.replace(cfg, **dict(values))


def load_config(path, base: SystemConfig | None = None) -> SystemConfig:
    base = SystemConfig() if base is None else base
    values = parse_config_text(Path(path).read_text())
    return validate_config(apply_overrides(base, values))


def config_to_text(cfg: SystemConfig) -> str:
    """Serialize ``cfg`` so that :func:`parse_config_text` reproduces it exactly."""
    lines = []
    for name in _FIELD_NAMES:
        v = getattr(cfg, name)
        if isinstance(v, bool):
            s = "true" if v else "false"
        elif isinstance(v, float):
            s = repr(v)
        else:
            s = str(int(v))
        lines.append(f"{name} = {s}")
    return "\n".join(lines) + "\n"
