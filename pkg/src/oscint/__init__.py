"""Time-sliced harmonic-oscillator path integral evaluated by tridiagonal recursions."""
from ._accel import BACKEND
from .errors import *  # noqa: F401,F403
from .model import OscillatorParams, SliceGrid, sqrt_reciprocal_i_branch, validate
from .pathdecomp import (ReferencePath, build_path, build_rho, classical_exponent,
                         completed_square_residual, quad_form_T)
from .propagator import (GaussianState, PropagatorValue, convergence_sweep, d_dim_propagator,
                         evolve_gaussian, exact_propagator, finite_n_propagator)
from .tridiag import (ClosedFormParams, DetSequences, SlicedActionMatrix, corner_inverse,
                      det_D_closed, det_sequences, eigenvalues, eigenvector_residual,
                      fluctuation_cosine_error, positivity_bound_t, scaled_det, solve)

__version__ = "0.1.0"
