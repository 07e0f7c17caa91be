"""Average sizes of Hecke eigenvalues on S_k(Gamma_0(N)), vertically and horizontally."""

from .arith import divisors, hurwitz_class_number, psi, sigma
from .horizontal import avf_limit, avf_partial, measure_moment, normalize
from .level1 import hecke_matrix, tau_series, victor_miller_basis
from .trace import LevelWeight, dim_cusp, normalized_trace, trace_hecke
from .vertical import av, av_squared, classify_av2_le_1

__version__ = "0.1.0"
