"""Per-timestamp 2-level egocentric networks: extraction, edge-direction
resolution, compartment assignment, and strength-based proximity ranks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError
from .model import BOTTOM, TOP, AttributeTable, ChartConfig, EventRecord, TimeAxis

TO_EGO = "to-ego"
FROM_EGO = "from-ego"


@dataclass
class AlterEntry:
    """One non-ego entity in a snapshot.

    ``agg_weight`` sums the ego edges for level 1 and the edges to the chosen
    primary anchor for level 2 (used only for deterministic tie-breaks there).
    """

    id: str
    level: int
    agg_weight: float = 0.0
    in_weight: float = 0.0
    out_weight: float = 0.0
    anchors: tuple[str, ...] = ()
    anchor: str | None = None
    direction: str | None = None
    compartment: str | None = None
    rank: int | None = None


@dataclass
class EgoSnapshot:
    """The 2-level egocentric network at one timestamp."""

    time: str
    ego: str
    ego_present: bool
    alters: list[AlterEntry] = field(default_factory=list)
    # Merged edges among present entities (ego included), for the affinity view.
    edges: tuple[tuple[str, str, float], ...] = ()

    def level1(self) -> list[AlterEntry]:
        return [a for a in self.alters if a.level == 1]

    def level2(self) -> list[AlterEntry]:
        return [a for a in self.alters if a.level == 2]

    def find(self, entity: str) -> AlterEntry | None:
        for alter in self.alters:
            if alter.id == entity:
                return alter
        return None

    def present_ids(self) -> list[str]:
        ids = [a.id for a in self.alters]
        if self.ego_present:
            ids.append(self.ego)
        return sorted(ids)


def extract_snapshot(events: Iterable[EventRecord], ego: str, time: str) -> EgoSnapshot:
    """Extract the 2-level egocentric network at one timestamp.

    Level 1 holds entities sharing an edge with the ego at ``time`` in either
    direction; level 2 holds entities sharing an edge with a level-1 alter
    but none with the ego. Everything else is excluded.
    """
    return _snapshot_from_edges([e for e in events if e.time == time], ego, time)


def _snapshot_from_edges(edges: Sequence[EventRecord], ego: str, time: str) -> EgoSnapshot:
    level1: dict[str, AlterEntry] = {}
    for edge in edges:
        if edge.source == ego:
            entry = level1.setdefault(edge.target, AlterEntry(edge.target, level=1))
            entry.out_weight += edge.weight
        elif edge.target == ego:
            entry = level1.setdefault(edge.source, AlterEntry(edge.source, level=1))
            entry.in_weight += edge.weight
    for entry in level1.values():
        entry.agg_weight = entry.in_weight + entry.out_weight
    anchor_weights: dict[str, dict[str, float]] = {}
    for edge in edges:
        for this, other in ((edge.source, edge.target), (edge.target, edge.source)):
            if other in level1 and this != ego and this not in level1:
                weights = anchor_weights.setdefault(this, {})
                weights[other] = weights.get(other, 0.0) + edge.weight
    alters = [level1[key] for key in sorted(level1)]
    for entity in sorted(anchor_weights):
        weights = anchor_weights[entity]
        anchor = min(weights, key=lambda a: (-weights[a], a))
        alters.append(
            AlterEntry(
                entity,
                level=2,
                agg_weight=weights[anchor],
                anchors=tuple(sorted(weights)),
                anchor=anchor,
            )
        )
    ego_present = bool(level1)
    members = {a.id for a in alters}
    if ego_present:
        members.add(ego)
    merged: dict[tuple[str, str], float] = {}
    for edge in edges:
        if edge.source in members and edge.target in members:
            key = (edge.source, edge.target)
            merged[key] = merged.get(key, 0.0) + edge.weight
    snapshot_edges = tuple((s, t, merged[(s, t)]) for s, t in sorted(merged))
    return EgoSnapshot(time, ego, ego_present, alters, snapshot_edges)


def resolve_directions(
    snapshot: EgoSnapshot, previous_compartments: Mapping[str, str] | None = None
) -> None:
    """Set the dominant edge direction for each level-1 alter.

    The direction with the strictly higher summed weight wins. On equal
    weights the alter's most recent compartment is retained when known,
    otherwise to-ego; this is a deterministic stand-in for picking whichever
    direction lays out better.
    """
    previous = previous_compartments or {}
    for alter in snapshot.level1():
        if alter.in_weight > alter.out_weight:
            alter.direction = TO_EGO
        elif alter.out_weight > alter.in_weight:
            alter.direction = FROM_EGO
        else:
            held = previous.get(alter.id)
            alter.direction = FROM_EGO if held == BOTTOM else TO_EGO


def categorical_compartment_map(
    snapshots: Sequence[EgoSnapshot], config: ChartConfig, attributes: AttributeTable
) -> dict[str, str]:
    """Map the observed categories of the space-division attribute to sides.

    At most two categories may occur among level-1 alters; the
    lexicographically smaller category takes the top compartment.
    """
    observed: set[str] = set()
    for snapshot in snapshots:
        for alter in snapshot.level1():
            observed.add(_division_value(alter.id, snapshot.time, config, attributes))
    if len(observed) > 2:
        raise ConfigError(
            "space division by "
            f"{config.space_division!r} found more than two categories: "
            + ", ".join(sorted(observed))
        )
    ordered = sorted(observed)
    mapping = {}
    if ordered:
        mapping[ordered[0]] = TOP
    if len(ordered) == 2:
        mapping[ordered[1]] = BOTTOM
    return mapping


def _division_value(
    entity: str, time: str, config: ChartConfig, attributes: AttributeTable
) -> str:
    if config.space_division == "lineIdentity":
        return attributes.identity(entity) or "unknown"
    return attributes.status_at(entity, time)


def assign_compartments(
    snapshot: EgoSnapshot,
    config: ChartConfig,
    attributes: AttributeTable | None = None,
    category_map: Mapping[str, str] | None = None,
) -> None:
    """Assign top/bottom compartments.

    Under edge-direction, senders toward the ego sit on top and receivers
    below. Under a categorical rule the configured binary attribute decides.
    Level-2 alters always inherit the compartment of their primary anchor,
    regardless of relationship direction.
    """
    for alter in snapshot.level1():
        if config.space_division == "edge-direction":
            alter.compartment = TOP if alter.direction == TO_EGO else BOTTOM
        else:
            if attributes is None or category_map is None:
                raise ConfigError("categorical space division needs attributes")
            value = _division_value(alter.id, snapshot.time, config, attributes)
            alter.compartment = category_map.get(value, TOP)
    anchored = {a.id: a for a in snapshot.level1()}
    for alter in snapshot.level2():
        primary = anchored.get(alter.anchor or "")
        alter.compartment = primary.compartment if primary is not None else TOP


def rank_alters(snapshot: EgoSnapshot) -> None:
    """Assign proximity ranks to level-1 alters within each compartment.

    Rank 0 is adjacent to the ego; descending aggregate weight, entity id as
    the deterministic tie-break. Equal weights form a permutable group that
    the barycenter sweeps may reorder. Level-2 alters carry no rank.
    """
    for compartment in (TOP, BOTTOM):
        members = [a for a in snapshot.level1() if a.compartment == compartment]
        members.sort(key=lambda a: (-a.agg_weight, a.id))
        for rank, alter in enumerate(members):
            alter.rank = rank


def build_snapshots(
    events: Sequence[EventRecord], config: ChartConfig, attributes: AttributeTable
) -> list[EgoSnapshot]:
    """Run extraction, direction, compartment, and rank passes in time order.

    Only timestamps where the ego is present are rendered; the rest are
    dropped from the timeline.
    """
    axis = TimeAxis.from_labels(r.time for r in events)
    by_time: dict[str, list[EventRecord]] = {label: [] for label in axis.labels}
    for record in events:
        by_time[record.time].append(record)
    snapshots = [
        _snapshot_from_edges(by_time[label], config.ego, label) for label in axis.labels
    ]
    rendered = [s for s in snapshots if s.ego_present]
    category_map: dict[str, str] | None = None
    if config.space_division != "edge-direction":
        category_map = categorical_compartment_map(rendered, config, attributes)
    held_compartments: dict[str, str] = {}
    for snapshot in rendered:
        resolve_directions(snapshot, held_compartments)
        assign_compartments(snapshot, config, attributes, category_map)
        rank_alters(snapshot)
        for alter in snapshot.alters:
            if alter.compartment is not None:
                held_compartments[alter.id] = alter.compartment
    return rendered


@dataclass(frozen=True)
class Lifespan:
    """Presence summary for one entity over the rendered timeline."""

    first_time: str
    last_time: str
    first_index: int
    last_index: int
    presence_count: int
    ego_crossing_count: int

    @property
    def span(self) -> int:
        return self.last_index - self.first_index + 1


def build_lifespan_index(snapshots: Sequence[EgoSnapshot]) -> dict[str, Lifespan]:
    """Tally first/last presence, presence counts, and compartment switches."""
    presences: dict[str, list[tuple[int, str, str | None]]] = {}
    for index, snapshot in enumerate(snapshots):
        if snapshot.ego_present:
            presences.setdefault(snapshot.ego, []).append((index, snapshot.time, None))
        for alter in snapshot.alters:
            presences.setdefault(alter.id, []).append(
                (index, snapshot.time, alter.compartment)
            )
    result: dict[str, Lifespan] = {}
    for entity in sorted(presences):
        spots = presences[entity]
        crossings = 0
        for (_, _, before), (_, _, after) in zip(spots, spots[1:]):
            if before is not None and after is not None and before != after:
                crossings += 1
        result[entity] = Lifespan(
            first_time=spots[0][1],
            last_time=spots[-1][1],
            first_index=spots[0][0],
            last_index=spots[-1][0],
            presence_count=len(spots),
            ego_crossing_count=crossings,
        )
    return result
