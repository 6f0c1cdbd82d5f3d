from .interface import (  # noqa
    DisplacementUpdate,
    SlidingInterface,
    advance_displacement,
    sigma_from_displacement,
)
from .mesh import (  # noqa
    N_SIDES,
    SIDE_ETA_MINUS,
    SIDE_ETA_PLUS,
    SIDE_XI_MINUS,
    SIDE_XI_PLUS,
    BoundaryFaces,
    ConformingFaces,
    ElementMetrics,
    Mesh,
    Subdomain,
    build_mesh,
    compute_metrics,
)
from .spec import BandSpec, BoundaryKind, MeshSpec  # noqa
