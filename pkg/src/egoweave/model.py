"""Domain types: event records, column schemas, entity attributes, time axis,
and the chart configuration consumed by the layout and render stages."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, SchemaError

DEFAULT_STATUS = "unknown"

FOCUS_VERTICAL = "vertical-space"
FOCUS_STRAIGHT = "straight-line"

TOP = "top"
BOTTOM = "bottom"

# Three saturated hues, then desaturated companions for overflow identities;
# anything beyond falls back to LINE_OVERFLOW.
LINE_PALETTE = ("#d95f02", "#7570b3", "#1b9e77", "#c8a27c", "#a6a0c6", "#8fbfae")
LINE_OVERFLOW = "#b0b0b0"

# Sequential ramp for node status, light to dark, discretized to at most 7 bins.
NODE_RAMP = ("#f1eef6", "#d0d1e6", "#a6bddb", "#74a9cf", "#3690c0", "#0570b0", "#034e7b")
NODE_UNKNOWN = "#cccccc"


@dataclass(frozen=True)
class EventRecord:
    """One timestamped directed weighted relation between two entities."""

    time: str
    source: str
    target: str
    weight: float = 1.0
    kind: str | None = None


def time_sort_key(labels: Iterable[str]):
    """Return a sort key for timestamp labels.

    Labels sort numerically when every label parses as a number, otherwise
    lexically (ISO dates order correctly under the lexical fallback).
    """
    labels = list(labels)
    try:
        parsed = {lab: float(lab) for lab in labels}
    except ValueError:
        return lambda lab: (lab,)
    return lambda lab: (parsed[lab],)


@dataclass(frozen=True)
class TimeAxis:
    """Ordered distinct timestamps with per-timestamp inclusion flags."""

    labels: tuple[str, ...]
    included: tuple[bool, ...]

    @classmethod
    def from_labels(cls, labels: Iterable[str]) -> "TimeAxis":
        pool = set(labels)
        distinct = sorted(pool, key=time_sort_key(pool))
        return cls(tuple(distinct), tuple(True for _ in distinct))

    def index_of(self, label: str) -> int:
        return self.labels.index(label)

    def with_inclusion(self, flags: Sequence[bool]) -> "TimeAxis":
        if len(flags) != len(self.labels):
            raise ValueError("inclusion flags must match axis length")
        return replace(self, included=tuple(flags))


# Role names as they appear in schema files.
_SCHEMA_ROLES = {
    "time": "time",
    "source": "source",
    "target": "target",
    "weight": "weight",
    "kind": "kind",
    "entity": "entity",
    "lineIdentity": "line_identity",
    "status": "status",
    "contextX": "context_x",
    "contextY": "context_y",
    "name": "name",
}


@dataclass(frozen=True)
class DataSchema:
    """Column-role mapping for the events table and the attributes table.

    ``time``, ``source`` and ``target`` are mandatory for events. The
    attributes table is keyed by the ``entity`` role (default column name
    ``entity``) and may reuse the ``time`` column for per-timestamp values.
    """

    time: str
    source: str
    target: str
    weight: str | None = None
    kind: str | None = None
    entity: str | None = None
    line_identity: str | None = None
    status: str | None = None
    context_x: str | None = None
    context_y: str | None = None
    name: str | None = None

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str]) -> "DataSchema":
        kwargs: dict[str, str] = {}
        for role, value in mapping.items():
            if role not in _SCHEMA_ROLES:
                raise SchemaError(f"unknown schema role {role!r}")
            if value:
                kwargs[_SCHEMA_ROLES[role]] = str(value)
        for mandatory in ("time", "source", "target"):
            if mandatory not in kwargs:
                raise SchemaError(f"schema is missing the mandatory {mandatory!r} role")
        return cls(**kwargs)

    @property
    def entity_column(self) -> str:
        return self.entity or "entity"

    @property
    def has_context(self) -> bool:
        return self.context_x is not None and self.context_y is not None

    def require_event_columns(self, header: Sequence[str]) -> None:
        present = set(header)
        for role, column in (("time", self.time), ("source", self.source), ("target", self.target)):
            if column not in present:
                raise SchemaError(f"events table lacks column {column!r} mapped to role {role!r}")
        for role, column in (("weight", self.weight), ("kind", self.kind)):
            if column is not None and column not in present:
                raise SchemaError(f"events table lacks column {column!r} mapped to role {role!r}")

    def require_attribute_columns(self, header: Sequence[str]) -> None:
        present = set(header)
        if self.entity_column not in present:
            raise SchemaError(
                f"attributes table lacks column {self.entity_column!r} mapped to role 'entity'"
            )
        optional = (
            ("lineIdentity", self.line_identity),
            ("status", self.status),
            ("contextX", self.context_x),
            ("contextY", self.context_y),
            ("name", self.name),
        )
        for role, column in optional:
            if column is not None and column not in present:
                raise SchemaError(
                    f"attributes table lacks column {column!r} mapped to role {role!r}"
                )


@dataclass
class EntityAttributes:
    """Attribute bundle for one entity.

    ``statuses`` and ``contexts`` are keyed by timestamp label; the ``None``
    key holds timestamp-independent values.
    """

    id: str
    display_name: str | None = None
    line_identity: str | None = None
    statuses: dict[str | None, str] = field(default_factory=dict)
    contexts: dict[str | None, tuple[float, float]] = field(default_factory=dict)

    def status_at(self, time: str) -> str:
        if time in self.statuses:
            return self.statuses[time]
        return self.statuses.get(None, DEFAULT_STATUS)

    def context_at(self, time: str) -> tuple[float, float] | None:
        if time in self.contexts:
            return self.contexts[time]
        return self.contexts.get(None)

    def label(self) -> str:
        return self.display_name or self.id


@dataclass
class AttributeTable:
    """Lookup table of entity attributes; unknown entities resolve to defaults."""

    entities: dict[str, EntityAttributes] = field(default_factory=dict)

    @classmethod
    def empty(cls) -> "AttributeTable":
        return cls({})

    def get(self, entity: str) -> EntityAttributes:
        found = self.entities.get(entity)
        return found if found is not None else EntityAttributes(id=entity)

    def identity(self, entity: str) -> str | None:
        return self.get(entity).line_identity

    def status_at(self, entity: str, time: str) -> str:
        return self.get(entity).status_at(time)

    def context_at(self, entity: str, time: str) -> tuple[float, float] | None:
        return self.get(entity).context_at(time)

    def display_name(self, entity: str) -> str:
        return self.get(entity).label()

    @property
    def has_any_context(self) -> bool:
        return any(e.contexts for e in self.entities.values())


SPACE_DIVISION_RULES = ("edge-direction", "lineIdentity", "status")
AFFINITY_MODES = ("coordinates", "node-link")


@dataclass
class ChartConfig:
    """Hyperparameters controlling layout generation and rendering.

    ``ego`` is the only mandatory field. ``affinity_mode`` left as ``None``
    resolves at render time: coordinates when context columns are mapped,
    node-link otherwise.
    """

    ego: str
    focus: str = FOCUS_VERTICAL
    stack_by_identity: bool = False
    time_stretch: dict[str, float] = field(default_factory=dict)
    annotations: dict[str, str] = field(default_factory=dict)
    affinity_mode: str | None = None
    space_division: str = "edge-direction"
    min_gap: float = 14.0
    base_step: float = 120.0
    padding: float = 10.0
    block_width: float = 36.0
    ego_emphasis: float = 1.8
    ego_stroke: float = 4.5
    alter_stroke: float = 2.0
    point_radius: float = 3.5
    affinity_size: float = 220.0
    max_sweeps: int = 10
    seed: int = 0
    line_colors: tuple[str, ...] | dict[str, str] = LINE_PALETTE
    node_colors: tuple[str, ...] | dict[str, str] = NODE_RAMP

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, object]) -> "ChartConfig":
        """Build a config from the file representation (one key per field)."""
        aliases = {
            "ego": "ego",
            "focus": "focus",
            "stackByLineIdentity": "stack_by_identity",
            "timeStretch": "time_stretch",
            "annotations": "annotations",
            "affinityMode": "affinity_mode",
            "spaceDivisionRule": "space_division",
            "minGap": "min_gap",
            "baseStep": "base_step",
            "padding": "padding",
            "blockWidth": "block_width",
            "egoEmphasis": "ego_emphasis",
            "egoStroke": "ego_stroke",
            "alterStroke": "alter_stroke",
            "pointRadius": "point_radius",
            "affinitySize": "affinity_size",
            "maxSweeps": "max_sweeps",
            "seed": "seed",
        }
        kwargs: dict[str, object] = {}
        for key, value in mapping.items():
            if key == "colorScales":
                scales = value if isinstance(value, Mapping) else {}
                if "line" in scales:
                    line = scales["line"]
                    kwargs["line_colors"] = (
                        dict(line) if isinstance(line, Mapping) else tuple(line)
                    )
                if "node" in scales:
                    node = scales["node"]
                    kwargs["node_colors"] = (
                        dict(node) if isinstance(node, Mapping) else tuple(node)
                    )
                continue
            if key not in aliases:
                raise ConfigError(f"unknown config field {key!r}")
            kwargs[aliases[key]] = value
        if "ego" not in kwargs or not kwargs["ego"]:
            raise ConfigError("config must name an ego entity")
        kwargs["ego"] = str(kwargs["ego"])
        if "time_stretch" in kwargs:
            kwargs["time_stretch"] = {
                str(k): float(v) for k, v in dict(kwargs["time_stretch"]).items()  # type: ignore[arg-type]
            }
        if "annotations" in kwargs:
            kwargs["annotations"] = {
                str(k): str(v) for k, v in dict(kwargs["annotations"]).items()  # type: ignore[arg-type]
            }
        return cls(**kwargs)  # type: ignore[arg-type]

    def stretch(self, label: str) -> float:
        return self.time_stretch.get(label, 1.0)

    @property
    def region_gap_slots(self) -> int:
        """Whole slots kept free between a secondary block and the primary block."""
        import math

        return max(2, math.ceil(2.0 * self.padding / self.min_gap) + 1)
