"""Storyline layout engine and renderer for dynamic egocentric networks."""

from .egonet import (
    AlterEntry,
    EgoSnapshot,
    Lifespan,
    build_lifespan_index,
    build_snapshots,
    extract_snapshot,
)
from .errors import (
    ConfigError,
    DataError,
    InstanceTooLargeError,
    LayoutError,
    PipelineError,
    RowError,
    SchemaError,
    StyleError,
)
from .ingest import (
    build_coauthor_events,
    events_to_csv,
    load_config,
    load_schema,
    parse_attributes,
    parse_events,
    read_table,
    validate_config,
)
from .layout import (
    AlignmentPlan,
    Layout,
    OrderedTimeline,
    align_timelines,
    barycenter_sweep,
    compact_straight_line,
    compact_vertical_space,
    generate_layout,
    initialize_order,
)
from .metrics import (
    QualityReport,
    brute_force_min_crossings,
    compute_report,
    count_crossings,
    count_ego_crossings,
    whitespace_area,
    wiggle_sum,
)
from .model import (
    AttributeTable,
    ChartConfig,
    DataSchema,
    EntityAttributes,
    EventRecord,
    TimeAxis,
)
from .render import (
    AffinityView,
    RenderScene,
    build_affinity_view,
    export_scene,
    export_svg,
    parse_scene,
    realize_geometry,
)

__version__ = "0.1.0"

__all__ = [
    "AlterEntry",
    "AffinityView",
    "AlignmentPlan",
    "AttributeTable",
    "ChartConfig",
    "ConfigError",
    "DataError",
    "DataSchema",
    "EgoSnapshot",
    "EntityAttributes",
    "EventRecord",
    "InstanceTooLargeError",
    "Layout",
    "LayoutError",
    "Lifespan",
    "OrderedTimeline",
    "PipelineError",
    "QualityReport",
    "RenderScene",
    "RowError",
    "SchemaError",
    "StyleError",
    "TimeAxis",
    "align_timelines",
    "barycenter_sweep",
    "build_affinity_view",
    "build_coauthor_events",
    "build_lifespan_index",
    "build_snapshots",
    "brute_force_min_crossings",
    "compact_straight_line",
    "compact_vertical_space",
    "compute_report",
    "count_crossings",
    "count_ego_crossings",
    "events_to_csv",
    "export_scene",
    "export_svg",
    "extract_snapshot",
    "generate_layout",
    "initialize_order",
    "load_config",
    "load_schema",
    "parse_attributes",
    "parse_events",
    "parse_scene",
    "read_table",
    "realize_geometry",
    "validate_config",
    "whitespace_area",
    "wiggle_sum",
]
