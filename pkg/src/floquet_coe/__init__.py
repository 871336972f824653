"""Driven many-body chains with circular-orthogonal-ensemble statistics.

Floquet operators of driven disordered Ising and Bose-Hubbard chains, random
matrix references, output-distribution statistics, and an exact mapping from
COE-structured circuits to complex Ising partition functions.
"""

from .errors import (ConfigError, FloquetCOEError, IntegratorError, MappingError,
                     NumericalError, SizeLimitError, SymmetryError)
from .hilbert import FockBasis, enumerate_bose_basis, enumerate_spin_basis
from .models import (DriveEnvelope, DrivenModel, build_bose_hubbard, build_ising, f_envelope,
                     random_initial_state)
from .floquet import (FloquetSpectrum, compute_floquet_operator, converged_floquet_operator,
                      diagonalize_symmetric_unitary, output_probabilities, static_evolution,
                      verify_convergence)
from .seeding import seed_stream

__version__ = "0.1.0"
