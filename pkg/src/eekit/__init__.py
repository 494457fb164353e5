"""Energy efficiency of two-dimension (frequency x spatial) resource blocks.

Deterministic capacity and EE formulas, high-EE-area checks, resource
planning, Monte Carlo effective capacity under a QoS exponent and its low-SNR
approximation.
"""
__version__ = "0.1.0"

from .config import (  # noqa: E402
    ConfigError,
    SystemConfig,
    ValidationError,
    db_to_linear,
    linear_to_db,
    noise_power,
    validate_config,
)
from .linkmodel import (  # noqa: E402
    ResourceGrid,
    energy_efficiency,
    grid_capacity,
    high_ee_check,
    mimo_capacity,
    shannon_capacity,
)
from .effcap import QosSpec, PowerPolicy, effective_capacity_mc, qos_ee  # noqa: E402
from .approx import ApproxInputs, approx_ee, delta_sublinear, ee_limit  # noqa: E402
from .channel import Deterministic, Discrete, Rayleigh, WishartEigs, moments, wishart_eigs  # noqa: E402
from .allocator import compare_schemes, min_resources  # noqa: E402
