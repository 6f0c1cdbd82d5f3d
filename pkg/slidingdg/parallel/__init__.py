from .audit import AuditReport, audit_communication  # noqa
from .pid import measure_pid  # noqa
from .ranks import (  # noqa
    OwnedFace,
    RankAssignment,
    RankMaps,
    assign_ranks,
    exchange_rank_maps,
    motion_groups,
)
from .schedule import (  # noqa
    CONFORMING,
    Descriptor,
    MessageSchedule,
    PendingExchange,
    build_schedule,
    exchange_mortar_data,
)
from .sorting import (  # noqa
    MORTAR_DTYPE,
    LocalFace,
    MappingM,
    build_mapping,
    combine_index_arrays,
    rebuild_index_arrays,
    sort_index_array,
)
from .transport import (  # noqa
    TRACE_COLUMNS,
    Endpoint,
    InProcessNetwork,
    MessageRecord,
    Phase,
    ProcessEndpoint,
    TraceRecorder,
    process_connections,
    trace_frame,
)
