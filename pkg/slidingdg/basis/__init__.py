from .polybasis import (  # noqa
    BasisOperators,
    NodeKind,
    NodeSet,
    build_basis_operators,
    build_node_set,
    exact_mass_matrix,
    lagrange_eval,
    lagrange_matrix,
)
