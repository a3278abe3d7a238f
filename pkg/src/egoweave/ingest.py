"""Ingestion: delimited/structured tables in, validated records out."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, RowError, SchemaError
from .model import (
    AFFINITY_MODES,
    FOCUS_STRAIGHT,
    FOCUS_VERTICAL,
    SPACE_DIVISION_RULES,
    AttributeTable,
    ChartConfig,
    DataSchema,
    EntityAttributes,
    EventRecord,
    TimeAxis,
    time_sort_key,
)

Row = Mapping[str, object]


def read_table(path: str | Path) -> tuple[list[str], list[dict[str, object]]]:
    """Read a CSV file (header row) or a JSON records file into header + rows."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        payload = json.loads(text)
        if not isinstance(payload, list):
            raise SchemaError(f"{path}: a records file must hold a list of objects")
        rows = [dict(item) for item in payload]
        header: list[str] = []
        for row in rows:
            for key in row:
                if key not in header:
                    header.append(key)
        return header, rows
    reader = csv.DictReader(io.StringIO(text))
    header = list(reader.fieldnames or [])
    return header, [dict(row) for row in reader]


def load_schema(path: str | Path) -> DataSchema:
    """Load a schema file: ``role=column`` lines, or a JSON object by suffix."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return DataSchema.from_mapping(json.loads(text))
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SchemaError(f"{path}:{lineno}: expected 'role=column', got {line!r}")
        role, _, column = line.partition("=")
        mapping[role.strip()] = column.strip()
    return DataSchema.from_mapping(mapping)


def load_config(path: str | Path) -> ChartConfig:
    """Load a JSON config file mirroring the ChartConfig fields."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(payload, Mapping):
        raise ConfigError(f"{path}: config file must hold a JSON object")
    return ChartConfig.from_mapping(payload)


def _cell(row: Row, column: str | None) -> str:
    if column is None:
        return ""
    value = row.get(column, "")
    if value is None:
        return ""
    return str(value).strip()


def parse_events(rows: Iterable[Row], schema: DataSchema) -> list[EventRecord]:
    """Parse event rows into records sorted by (time, source, target).

    Duplicate (time, source, target) rows merge by weight summation; the
    first non-empty edge kind wins. Row numbers in errors are 1-based over
    data rows.
    """
    rows = list(rows)
    if rows:
        header = set()
        for row in rows:
            header.update(row.keys())
        schema.require_event_columns(sorted(header))
    records: list[EventRecord] = []
    for index, row in enumerate(rows, start=1):
        time = _cell(row, schema.time)
        if not time:
            raise RowError(index, "missing or unparseable timestamp")
        source = _cell(row, schema.source)
        target = _cell(row, schema.target)
        if not source or not target:
            raise RowError(index, "missing source or target entity")
        if source == target:
            raise RowError(index, f"self relation on entity {source!r}")
        weight = 1.0
        if schema.weight is not None:
            raw = _cell(row, schema.weight)
            if raw:
                try:
                    weight = float(raw)
                except ValueError:
                    raise RowError(index, f"unparseable weight {raw!r}") from None
                if not math.isfinite(weight):
                    raise RowError(index, f"non-finite weight {raw!r}")
                if weight < 0:
                    raise RowError(index, f"negative weight {weight}")
        kind = _cell(row, schema.kind) or None
        records.append(EventRecord(time, source, target, weight, kind))
    key = time_sort_key(r.time for r in records)
    records.sort(key=lambda r: (key(r.time), r.source, r.target))
    merged: list[EventRecord] = []
    for record in records:
        if merged and (merged[-1].time, merged[-1].source, merged[-1].target) == (
            record.time,
            record.source,
            record.target,
        ):
            last = merged[-1]
            merged[-1] = EventRecord(
                last.time,
                last.source,
                last.target,
                last.weight + record.weight,
                last.kind if last.kind is not None else record.kind,
            )
        else:
            merged.append(record)
    return merged


EVENT_COLUMNS = ("time", "source", "target", "weight", "kind")


def events_to_csv(records: Sequence[EventRecord]) -> str:
    """Serialize records to canonical CSV; parsing it back is a no-op."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(EVENT_COLUMNS)
    for r in records:
        writer.writerow([r.time, r.source, r.target, repr(r.weight), r.kind or ""])
    return out.getvalue()


CANONICAL_EVENT_SCHEMA = DataSchema(
    time="time", source="source", target="target", weight="weight", kind="kind"
)

# Canonical column names recognized when no schema file is given.
_CANONICAL_COLUMNS = {
    "weight": "weight",
    "kind": "kind",
    "entity": "entity",
    "lineIdentity": "identity",
    "status": "status",
    "contextX": "cx",
    "contextY": "cy",
    "name": "name",
}


def infer_schema(
    event_header: Sequence[str], attribute_header: Sequence[str] | None = None
) -> DataSchema:
    """Derive a schema from canonical column names.

    ``time``, ``source`` and ``target`` must appear in the events header;
    optional roles are mapped only where their canonical column exists in
    the respective table.
    """
    events = set(event_header)
    for column in ("time", "source", "target"):
        if column not in events:
            raise SchemaError(
                f"events table lacks canonical column {column!r}; pass a schema file"
            )
    mapping = {"time": "time", "source": "source", "target": "target"}
    for role, column in (("weight", "weight"), ("kind", "kind")):
        if column in events:
            mapping[role] = column
    attributes = set(attribute_header or [])
    for role, column in _CANONICAL_COLUMNS.items():
        if role in ("weight", "kind"):
            continue
        if column in attributes:
            mapping[role] = column
    return DataSchema.from_mapping(mapping)


def parse_attributes(rows: Iterable[Row], schema: DataSchema) -> AttributeTable:
    """Parse an attributes table keyed by the entity role.

    Rows without a timestamp provide timestamp-independent values. The line
    identity is fixed by the entity's earliest row carrying one.
    """
    rows = list(rows)
    if rows:
        header = set()
        for row in rows:
            header.update(row.keys())
        schema.require_attribute_columns(sorted(header))
    table: dict[str, EntityAttributes] = {}
    identity_candidates: dict[str, list[tuple[tuple, int, str]]] = {}
    times_seen: list[str] = []
    parsed: list[tuple[int, str, str | None, Row]] = []
    for index, row in enumerate(rows, start=1):
        entity = _cell(row, schema.entity_column)
        if not entity:
            raise RowError(index, "missing entity id")
        time = _cell(row, schema.time) or None
        if time is not None:
            times_seen.append(time)
        parsed.append((index, entity, time, row))
    time_key = time_sort_key(times_seen)
    for index, entity, time, row in parsed:
        attrs = table.setdefault(entity, EntityAttributes(id=entity))
        if schema.name is not None:
            name = _cell(row, schema.name)
            if name and attrs.display_name is None:
                attrs.display_name = name
        if schema.line_identity is not None:
            identity = _cell(row, schema.line_identity)
            if identity:
                order = (0,) if time is None else (1,) + time_key(time)
                identity_candidates.setdefault(entity, []).append((order, index, identity))
        if schema.status is not None:
            status = _cell(row, schema.status)
            if status:
                attrs.statuses[time] = status
        if schema.has_context:
            raw_x = _cell(row, schema.context_x)
            raw_y = _cell(row, schema.context_y)
            if raw_x or raw_y:
                try:
                    fx, fy = float(raw_x), float(raw_y)
                except ValueError:
                    raise RowError(index, "unparseable context coordinate") from None
                if not (math.isfinite(fx) and math.isfinite(fy)):
                    raise RowError(index, "non-finite context coordinate")
                attrs.contexts[time] = (fx, fy)
    for entity, candidates in identity_candidates.items():
        candidates.sort(key=lambda c: (c[0], c[1]))
        table[entity].line_identity = candidates[0][2]
    return AttributeTable(table)


def build_coauthor_events(
    publications: Sequence[Mapping[str, object]],
) -> tuple[list[EventRecord], AttributeTable]:
    """Turn a publication list into first-author-outward events.

    Each publication contributes one edge from its first author to every
    other author at the publication year. The attribute side-table carries
    the affiliation at first appearance as the line identity and the yearly
    citation total as the status.
    """
    records: list[EventRecord] = []
    table: dict[str, EntityAttributes] = {}
    citations: dict[tuple[str, str], float] = {}
    first_seen: dict[str, tuple] = {}
    year_labels = [str(pub.get("year", "")) for pub in publications]
    year_key = time_sort_key(lab for lab in year_labels if lab)
    for index, pub in enumerate(publications, start=1):
        authors = [str(a) for a in pub.get("authors", [])]
        if not authors:
            raise RowError(index, "publication has no authors")
        year = str(pub.get("year", "")).strip()
        if not year:
            raise RowError(index, "publication has no year")
        affiliations = [str(a) for a in pub.get("affiliations", [])]
        cited = float(pub.get("citations", 0) or 0)
        first = authors[0]
        for position, author in enumerate(authors):
            attrs = table.setdefault(author, EntityAttributes(id=author, display_name=author))
            affiliation = affiliations[position] if position < len(affiliations) else None
            stamp = year_key(year)
            if affiliation and (author not in first_seen or stamp < first_seen[author]):
                first_seen[author] = stamp
                attrs.line_identity = affiliation
            citations[(author, year)] = citations.get((author, year), 0.0) + cited
        for coauthor in authors[1:]:
            if coauthor == first:
                continue
            records.append(EventRecord(year, first, coauthor, 1.0, kind="coauthor"))
    for (author, year), total in citations.items():
        table[author].statuses[year] = str(int(total))
    return records, AttributeTable(table)


def validate_config(config: ChartConfig, events: Sequence[EventRecord]) -> ChartConfig:
    """Check the config against the data; defaults are already in place."""
    if not config.ego:
        raise ConfigError("config must name an ego entity")
    participants = {r.source for r in events} | {r.target for r in events}
    if config.ego not in participants:
        raise ConfigError(f"ego {config.ego!r} does not appear in any event")
    if config.focus not in (FOCUS_VERTICAL, FOCUS_STRAIGHT):
        raise ConfigError(f"unknown focus {config.focus!r}")
    if config.space_division not in SPACE_DIVISION_RULES:
        raise ConfigError(f"unknown space division rule {config.space_division!r}")
    if config.affinity_mode is not None and config.affinity_mode not in AFFINITY_MODES:
        raise ConfigError(f"unknown affinity mode {config.affinity_mode!r}")
    if config.min_gap <= 0:
        raise ConfigError("minGap must be positive")
    if config.base_step <= 0:
        raise ConfigError("baseStep must be positive")
    if config.padding < 0:
        raise ConfigError("padding must be non-negative")
    if config.block_width <= 0:
        raise ConfigError("blockWidth must be positive")
    if config.ego_emphasis <= 1:
        raise ConfigError("egoEmphasis must exceed 1")
    if config.ego_stroke <= config.alter_stroke:
        raise ConfigError("ego stroke width must exceed the alter stroke width")
    if config.max_sweeps < 0:
        raise ConfigError("maxSweeps must be non-negative")
    axis = TimeAxis.from_labels(r.time for r in events)
    known = set(axis.labels)
    for label, factor in config.time_stretch.items():
        if label not in known:
            raise ConfigError(f"stretch names unknown timestamp {label!r}")
        if factor <= 0:
            raise ConfigError(f"stretch factor for {label!r} must be positive")
    for label in config.annotations:
        if label not in known:
            raise ConfigError(f"annotation names unknown timestamp {label!r}")
    return config
