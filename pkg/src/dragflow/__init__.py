"""Drag-coupled two-phase compressible flow on the periodic torus.

A finite-difference solver for a two-phase system coupling a
degenerate-viscosity compressible phase (n, v) with a constant-viscosity
compressible phase (rho, u) through the drag force kappa*n*(v-u), together
with a diagnostics suite tracking energy dissipation, entropy boundedness,
conservation laws and relaxation toward the constant equilibrium state.
"""

from .diagnostics import (DiagnosticsRecord, DiagnosticsSuite, EquilibriumState,
                          bd_entropy, conserved, dissipation_rate,
                          distance_to_equilibrium, effective_velocity, energy,
                          equilibrium, integrability, mellet_vasseur,
                          modified_energy, tol_model)
from .generators import (equilibrium as equilibrium_data, make_raw, raw_to_state,
                         random_smooth, regularized_to_state, sine_perturbation,
                         two_bump)
from .grid import (PeriodicGrid, ScalarField, TensorField, VectorField, antisym,
                   deformation, divergence, gradient, integrate, laplacian)
from .initdata import (MollifierKernel, RawInitialData, RegularizedInitialData,
                       build_mollifier, convolve, initial_energy, regularize)
from .integrators import RunResult, StepConfig, run, stable_dt, step
from .model import (ModelParams, State, StateDerivative, drag, pressure,
                    rhs_original, rhs_regularized)

__version__ = "0.1.0"
