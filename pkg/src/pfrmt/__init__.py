"""Pfaffian and determinant formulas for partition functions of chiral random matrices."""

__version__ = "0.1.0"

from .bessel import bessel_i, bessel_j, bessel_k
from .ensemble import EnsembleParams, Measure, chiral_measure, real_line_measure
from .errors import (
    AssemblyError,
    ConditioningError,
    ConsistencyError,
    DimensionError,
    DomainError,
    IntegrationError,
    NumericalError,
    PfrmtError,
    SeparationError,
    SingularBlockError,
    UnsupportedError,
    ValidationError,
)
from .flavors import DetSplit, FlavorSet, PartitionResult, valid_splits
from .linalg import berezinian_sqrt, determinant, pfaffian, vandermonde
from .microscopic import (
    convergence_study,
    kernel_I,
    micro_partition_det,
    micro_partition_pf,
    scaled_finite_partition,
)
from .oracles import McConfig, mc_partition, quad_generic, quad_kpoint, quad_partition
from .partition import (
    kpoint_det,
    kpoint_pf,
    partition_det,
    partition_generic_det,
    partition_generic_pf,
    partition_pf,
)
from .polynomials import OrthogonalSystem, build_orthogonal_system, laguerre_system
from .wilson import WilsonParams, continuum_check, continuum_value, z2_wilson, zNf_wilson
