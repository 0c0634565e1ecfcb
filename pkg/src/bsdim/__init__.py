"""BS covering/packing dimensions, pressure and variational certificates for subshifts of finite type."""

from .caratheodory import (
    CylinderTree,
    SetSpec,
    SumResult,
    build_tree,
    capacity_sum,
    cover_sum,
    critical_exponent,
    pack_sum,
)
from .errors import BSDimError, NumericalError, ValidationError
from .shift_space import Potential, Sft, birkhoff_range, full_shift, validate_sft
from .thermo import (
    MarkovMeasure,
    bowen_root,
    entropy,
    equilibrium_markov,
    integral_u,
    local_dimension_estimate,
    pressure,
    pressure_curve,
)
from .variational import maximize_ratio, random_measure_certificate
from .weighted_frostman import frostman_measure, weighted_cover_value

__version__ = "0.1.0"

__all__ = [
    "BSDimError",
    "CylinderTree",
    "MarkovMeasure",
    "NumericalError",
    "Potential",
    "SetSpec",
    "Sft",
    "SumResult",
    "ValidationError",
    "birkhoff_range",
    "bowen_root",
    "build_tree",
    "capacity_sum",
    "cover_sum",
    "critical_exponent",
    "entropy",
    "equilibrium_markov",
    "frostman_measure",
    "full_shift",
    "integral_u",
    "local_dimension_estimate",
    "maximize_ratio",
    "pack_sum",
    "pressure",
    "pressure_curve",
    "random_measure_certificate",
    "validate_sft",
    "weighted_cover_value",
]
