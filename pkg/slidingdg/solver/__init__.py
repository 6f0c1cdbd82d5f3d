from .boundary import BoundaryCondition, apply_boundary, make_boundary  # noqa
from .field import FaceDataArrays, SolutionField, check_positivity  # noqa
from .operator import (  # noqa
    contract_eta,
    contract_xi,
    contravariant,
    face_traces,
    surface_integral,
    volume_integral,
)
from .rank_solver import RankSolver, build_serial_solver  # noqa
from .snapshot import read_snapshot, write_snapshot  # noqa
from .timestepping import CARPENTER_KENNEDY_RK4, RKScheme, compute_dt, rk_step  # noqa
