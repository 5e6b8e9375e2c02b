"""Nambu-Poisson dynamics: costate extensions, invariant tensors, point
vortices, Nambu flows and reversible discrete maps."""

from ._backend import BACKEND
from .costate import (
    AntisymmetricArray,
    AntisymmetricTensorField,
    CostateState,
    OneForm,
    bracket1,
    extend,
    fj_bracket,
    fj_flow,
    h1,
    mbky_residual,
    wedge,
)
from .discrete import (
    DiscreteSystem,
    ExtendedDiscreteState,
    coherence_check,
    costate_step,
    discrete_hamiltonian,
    reversibility,
)
from .flows import (
    IntegratorConfig,
    Trajectory,
    VectorField,
    divergence_fd,
    integrate,
    jacobian_fd,
)
from .nambu import NambuSystem, bracket3, hamiltonian_drift, nambu_flow
from .qmcheck import RadialGrid, conformal_potential, stationarity_residual
from .vortex import (
    ReducedState,
    VortexConfiguration,
    reduce3,
    reduced_integrals,
    reduced_rhs,
    vortex_hamiltonian,
    vortex_rhs,
)

__version__ = "0.1.0"
