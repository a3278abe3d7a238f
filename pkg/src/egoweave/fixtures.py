"""Built-in fixtures and seeded synthetic instance generators."""

from __future__ import annotations

import csv
import io
import json
import random
from pathlib import Path

from .model import AttributeTable, ChartConfig, DataSchema, EntityAttributes, EventRecord

DEMO_EGO = "SI"

DEMO_SCHEMA = DataSchema(
    time="time",
    source="sender",
    target="receiver",
    weight="animals",
    entity="entity",
    line_identity="role",
    status="health",
    context_x="geo_x",
    context_y="geo_y",
    name="label",
)

# A six-farm trade network over two timepoints. At time 1 farms A and B trade
# directly with the ego (A sends, B receives) while C, D, E only reach it
# through them; at time 2 farm D turns into the heaviest direct sender.
DEMO_EVENT_ROWS = [
    {"time": "1", "sender": "A", "receiver": "SI", "animals": "2"},
    {"time": "1", "sender": "SI", "receiver": "B", "animals": "1"},
    {"time": "1", "sender": "C", "receiver": "A", "animals": "1"},
    {"time": "1", "sender": "D", "receiver": "B", "animals": "1"},
    {"time": "1", "sender": "E", "receiver": "B", "animals": "1"},
    {"time": "2", "sender": "A", "receiver": "SI", "animals": "1"},
    {"time": "2", "sender": "D", "receiver": "SI", "animals": "3"},
    {"time": "2", "sender": "SI", "receiver": "B", "animals": "2"},
    {"time": "2", "sender": "C", "receiver": "A", "animals": "1"},
    {"time": "2", "sender": "E", "receiver": "B", "animals": "1"},
]

DEMO_ATTRIBUTE_ROWS = [
    {"entity": "SI", "time": "1", "role": "finisher", "health": "good", "geo_x": "45", "geo_y": "52", "label": "Farm SI"},
    {"entity": "SI", "time": "2", "role": "finisher", "health": "poor", "geo_x": "45", "geo_y": "52", "label": "Farm SI"},
    {"entity": "A", "time": "1", "role": "producer", "health": "good", "geo_x": "12", "geo_y": "80", "label": "Farm A"},
    {"entity": "A", "time": "2", "role": "producer", "health": "fair", "geo_x": "12", "geo_y": "80", "label": "Farm A"},
    {"entity": "B", "time": "1", "role": "nursery", "health": "fair", "geo_x": "70", "geo_y": "30", "label": "Farm B"},
    {"entity": "B", "time": "2", "role": "nursery", "health": "fair", "geo_x": "70", "geo_y": "30", "label": "Farm B"},
    {"entity": "C", "time": "1", "role": "producer", "health": "good", "geo_x": "20", "geo_y": "95", "label": "Farm C"},
    {"entity": "C", "time": "2", "role": "producer", "health": "good", "geo_x": "20", "geo_y": "95", "label": "Farm C"},
    {"entity": "D", "time": "1", "role": "producer", "health": "poor", "geo_x": "85", "geo_y": "75", "label": "Farm D"},
    {"entity": "D", "time": "2", "role": "producer", "health": "fair", "geo_x": "85", "geo_y": "75", "label": "Farm D"},
    {"entity": "E", "time": "1", "role": "nursery", "health": "good", "geo_x": "60", "geo_y": "10", "label": "Farm E"},
    {"entity": "E", "time": "2", "role": "nursery", "health": "good", "geo_x": "60", "geo_y": "10", "label": "Farm E"},
]


def demo_config() -> ChartConfig:
    return ChartConfig(ego=DEMO_EGO, annotations={"2": "outbreak"})


def demo_events() -> list[EventRecord]:
    from .ingest import parse_events

    return parse_events(DEMO_EVENT_ROWS, DEMO_SCHEMA)


def demo_attributes() -> AttributeTable:
    from .ingest import parse_attributes

    return parse_attributes(DEMO_ATTRIBUTE_ROWS, DEMO_SCHEMA)


def sweep_demo_events() -> list[EventRecord]:
    """A two-timestep instance whose single secondary group starts crossed.

    At time 1, P and Q are direct partners with distinct weights, so their
    order is forced. At time 2 both reach the ego only through X and form one
    permutable secondary group; one barycenter sweep removes the crossing,
    which is the exhaustive minimum.
    """
    return [
        EventRecord("1", "P", "S", 5.0),
        EventRecord("1", "Q", "S", 3.0),
        EventRecord("2", "X", "S", 4.0),
        EventRecord("2", "P", "X", 1.0),
        EventRecord("2", "Q", "X", 1.0),
    ]


IDENTITIES = ("carrier", "broker", "outpost")
STATUSES = ("very-low", "low", "mid", "high", "very-high")


def synthetic_instance(
    seed: int,
    n_entities: int = 12,
    n_times: int = 6,
    ego: str = "E000",
    ego_gap_probability: float = 0.1,
) -> tuple[list[EventRecord], AttributeTable]:
    """Generate a seeded random instance with attributes and coordinates.

    Instances carry the temporal coherence real egocentric data has: each
    entity keeps a base interaction weight and a preferred direction, and
    direct partners persist across timestamps with some churn. Every entity
    appears somewhere, the ego is present at most timestamps, and the shared
    base weights collide often enough to produce permutable groups.
    """
    rng = random.Random(seed)
    pool = [f"E{k:03d}" for k in range(1, n_entities)]
    times = [f"{t + 1:02d}" for t in range(n_times)]
    base_weight = {e: rng.randint(1, 6) for e in pool}
    sends_to_ego = {e: rng.random() < 0.55 for e in pool}
    preferred_anchor: dict[str, str] = {}
    events: list[EventRecord] = []
    used: set[str] = set()
    target = max(1, min(7, len(pool) // 2))
    active: list[str] = sorted(rng.sample(pool, rng.randint(1, target)))
    distants: list[str] = sorted(
        rng.sample([e for e in pool if e not in active], min(target, max(0, len(pool) - target)))
    )
    for index, time in enumerate(times):
        if index > 0:
            active = [e for e in active if rng.random() > 0.2]
            candidates = [e for e in pool if e not in active]
            while len(active) < max(1, target + rng.randint(-1, 1)) and candidates:
                active.append(candidates.pop(rng.randrange(len(candidates))))
            active.sort()
            distants = [e for e in distants if e not in active and rng.random() > 0.2]
            candidates = [e for e in pool if e not in active and e not in distants]
            while len(distants) < target and candidates:
                distants.append(candidates.pop(rng.randrange(len(candidates))))
            distants.sort()
        if index > 0 and rng.random() < ego_gap_probability:
            continue
        for alter in active:
            used.add(alter)
            toward = sends_to_ego[alter]
            if rng.random() < 0.03:
                toward = not toward
            weight = float(base_weight[alter])
            if toward:
                events.append(EventRecord(time, alter, ego, weight))
            else:
                events.append(EventRecord(time, ego, alter, weight))
        for distant in distants:
            used.add(distant)
            anchor = preferred_anchor.get(distant)
            if anchor not in active:
                anchor = rng.choice(active)
                preferred_anchor[distant] = anchor
            weight = float(min(base_weight[distant], 4))
            if rng.random() < 0.5:
                events.append(EventRecord(time, distant, anchor, weight))
            else:
                events.append(EventRecord(time, anchor, distant, weight))
    for entity in pool:
        if entity not in used:
            time = rng.choice(times)
            events.append(EventRecord(time, entity, ego, float(base_weight[entity])))
            used.add(entity)
    table: dict[str, EntityAttributes] = {}
    for entity in sorted(used | {ego}):
        attrs = EntityAttributes(id=entity, display_name=entity)
        attrs.line_identity = rng.choice(IDENTITIES)
        for time in times:
            attrs.statuses[time] = rng.choice(STATUSES)
            attrs.contexts[time] = (
                round(rng.uniform(0.0, 100.0), 3),
                round(rng.uniform(0.0, 100.0), 3),
            )
        table[entity] = attrs
    from .ingest import parse_events

    rows = [
        {"time": e.time, "source": e.source, "target": e.target, "weight": repr(e.weight)}
        for e in events
    ]
    schema = DataSchema(time="time", source="source", target="target", weight="weight")
    return parse_events(rows, schema), AttributeTable(table)


DISCUSSION_EGO = "verdict"
DISCUSSION_ENTITY_COUNT = 49
DISCUSSION_RELATION_COUNT = 178

_DISCUSSION_IDENTITIES = ("fact", "opinion", "person", "group")
_DISCUSSION_STATUSES = ("positive", "negative", "controversial", "neutral")


def discussion_corpus() -> tuple[list[dict[str, str]], list[dict[str, str]], DataSchema]:
    """A synthetic public-discussion corpus at a documented scale.

    Deterministic; exactly 49 distinct entities joined by exactly 178 unique
    (day, source, target) relations over 13 days, with the ego engaged daily.
    """
    rng = random.Random(20230907)
    topics = [f"topic-{k:02d}" for k in range(1, DISCUSSION_ENTITY_COUNT)]
    days = [f"2023-09-{d:02d}" for d in range(7, 20)]
    triples: set[tuple[str, str, str]] = set()
    rows: list[dict[str, str]] = []

    def add(day: str, source: str, target: str) -> bool:
        if source == target or (day, source, target) in triples:
            return False
        triples.add((day, source, target))
        rows.append(
            {
                "day": day,
                "from": source,
                "to": target,
                "mentions": str(rng.randint(1, 4)),
                "stance": rng.choice(("support", "oppose")),
            }
        )
        return True

    used: set[str] = {DISCUSSION_EGO}
    for day in days:
        for topic in rng.sample(topics, rng.randint(2, 5)):
            used.add(topic)
            if rng.random() < 0.5:
                add(day, topic, DISCUSSION_EGO)
            else:
                add(day, DISCUSSION_EGO, topic)
    for topic in topics:
        while topic not in used:
            day = rng.choice(days)
            partner = rng.choice(sorted(used - {topic}))
            if add(day, topic, partner):
                used.add(topic)
    entities = sorted(used)
    while len(triples) < DISCUSSION_RELATION_COUNT:
        day = rng.choice(days)
        a, b = rng.sample(entities, 2)
        add(day, a, b)
    attribute_rows = [
        {
            "entity": entity,
            "day": day,
            "category": rng.choice(_DISCUSSION_IDENTITIES),
            "reception": rng.choice(_DISCUSSION_STATUSES),
        }
        for entity in entities
        for day in days
    ]
    schema = DataSchema(
        time="day",
        source="from",
        target="to",
        weight="mentions",
        kind="stance",
        entity="entity",
        line_identity="category",
        status="reception",
    )
    return rows, attribute_rows, schema


def _write_csv(path: Path, header: list[str], rows: list[dict[str, str]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def _schema_text(schema: DataSchema) -> str:
    lines = []
    pairs = (
        ("time", schema.time),
        ("source", schema.source),
        ("target", schema.target),
        ("weight", schema.weight),
        ("kind", schema.kind),
        ("entity", schema.entity),
        ("lineIdentity", schema.line_identity),
        ("status", schema.status),
        ("contextX", schema.context_x),
        ("contextY", schema.context_y),
        ("name", schema.name),
    )
    for role, column in pairs:
        if column is not None:
            lines.append(f"{role}={column}")
    return "\n".join(lines) + "\n"


def write_demo_fixture(out_dir: str | Path) -> list[Path]:
    """Write the farm-trade demo: events, attributes, schema, and config."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    events_path = out / "farm_trade_events.csv"
    attrs_path = out / "farm_trade_attributes.csv"
    schema_path = out / "farm_trade_schema.txt"
    config_path = out / "farm_trade_config.json"
    _write_csv(events_path, ["time", "sender", "receiver", "animals"], DEMO_EVENT_ROWS)
    _write_csv(
        attrs_path,
        ["entity", "time", "role", "health", "geo_x", "geo_y", "label"],
        DEMO_ATTRIBUTE_ROWS,
    )
    schema_path.write_text(_schema_text(DEMO_SCHEMA), encoding="utf-8")
    config_path.write_text(
        json.dumps({"ego": DEMO_EGO, "annotations": {"2": "outbreak"}}, indent=2) + "\n",
        encoding="utf-8",
    )
    return [events_path, attrs_path, schema_path, config_path]


def write_discussion_fixture(out_dir: str | Path) -> list[Path]:
    """Write the discussion-topics corpus: events, attributes, schema, config."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows, attribute_rows, schema = discussion_corpus()
    events_path = out / "discussion_relations.csv"
    attrs_path = out / "discussion_attributes.csv"
    schema_path = out / "discussion_schema.txt"
    config_path = out / "discussion_config.json"
    _write_csv(events_path, ["day", "from", "to", "mentions", "stance"], rows)
    _write_csv(attrs_path, ["entity", "day", "category", "reception"], attribute_rows)
    schema_path.write_text(_schema_text(schema), encoding="utf-8")
    config_path.write_text(
        json.dumps({"ego": DISCUSSION_EGO, "stackByLineIdentity": True}, indent=2) + "\n",
        encoding="utf-8",
    )
    return [events_path, attrs_path, schema_path, config_path]


def write_synthetic_fixture(
    out_dir: str | Path, seed: int, n_entities: int, n_times: int
) -> list[Path]:
    """Write one seeded synthetic instance as canonical event/attribute CSVs."""
    from .ingest import events_to_csv

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    events, attributes = synthetic_instance(seed, n_entities, n_times)
    events_path = out / f"synthetic_{seed}_events.csv"
    attrs_path = out / f"synthetic_{seed}_attributes.csv"
    events_path.write_text(events_to_csv(events), encoding="utf-8")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["entity", "time", "identity", "status", "cx", "cy"])
    for entity in sorted(attributes.entities):
        attrs = attributes.entities[entity]
        for time in sorted(attrs.statuses):
            cx, cy = attrs.contexts[time]
            writer.writerow([entity, time, attrs.line_identity, attrs.statuses[time], cx, cy])
    attrs_path.write_text(buffer.getvalue(), encoding="utf-8")
    return [events_path, attrs_path]
