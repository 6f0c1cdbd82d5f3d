from .exact import (  # noqa
    DensityWaveParams,
    ExactSolution,
    FreestreamParams,
    VortexParams,
    density_wave_source,
    exact_density_wave,
    exact_isentropic_vortex,
)
from .fluxes import ale_convective_flux, viscous_flux  # noqa
from .gas import ConservedState, GasModel, GridVelocity, eos_pressure  # noqa
from .riemann import roe_flux  # noqa
