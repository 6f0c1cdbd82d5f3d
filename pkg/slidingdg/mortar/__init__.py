from .indexing import MortarIndex, moving_index, static_index, sub_index  # noqa
from .operators import (  # noqa
    MortarOperators,
    MortarSide,
    apply_line_operator,
    build_mortar_operators,
    project_flux_to_face,
    transfer_solution_to_mortars,
)
