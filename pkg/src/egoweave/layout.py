"""Three-stage constrained storyline optimization.

Ordering seeds each timestamp with strength ranks and sweeps barycenters over
the permutable groups; alignment commits entities to equal heights across
consecutive timestamps via reward-maximal common substrings; compaction
realizes integer slots under one of two focuses, keeping the ego line
straight at slot zero throughout.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .egonet import EgoSnapshot, build_snapshots
from .errors import LayoutError
from .ingest import validate_config
from .metrics import order_crossings
from .model import (
    BOTTOM,
    FOCUS_STRAIGHT,
    FOCUS_VERTICAL,
    TOP,
    AttributeTable,
    ChartConfig,
    EventRecord,
)

REGION_ORDER = ("top_secondary", "top_level1", "bottom_level1", "bottom_secondary")

_EGO_REWARD = sys.maxsize


@dataclass
class TimeSlice:
    """Total vertical order at one timestamp, split into regions.

    Region lists run top-to-bottom; the ego sits between the two level-1
    regions. ``groups`` lists the (region, start, stop) runs whose internal
    order the barycenter sweeps may permute.
    """

    time: str
    regions: dict[str, list[str]]
    groups: list[tuple[str, int, int]] = field(default_factory=list)

    def sequence(self, ego: str) -> list[str]:
        return (
            list(self.regions["top_secondary"])
            + list(self.regions["top_level1"])
            + [ego]
            + list(self.regions["bottom_level1"])
            + list(self.regions["bottom_secondary"])
        )

    def copy(self) -> "TimeSlice":
        return TimeSlice(
            self.time,
            {name: list(ids) for name, ids in self.regions.items()},
            list(self.groups),
        )


@dataclass
class OrderedTimeline:
    """Per-timestamp total orders plus the snapshots they were derived from."""

    ego: str
    slices: list[TimeSlice]
    snapshots: list[EgoSnapshot]

    def sequences(self) -> list[list[str]]:
        return [s.sequence(self.ego) for s in self.slices]


@dataclass(frozen=True)
class AlignmentPlan:
    """Entities committed to equal height, per consecutive timestamp pair."""

    pairs: tuple[frozenset[str], ...]


@dataclass(frozen=True)
class Placement:
    """Realized position of one present entity at one timestamp."""

    slot: int
    y: float
    level: int
    compartment: str | None
    rank: int | None
    agg_weight: float


@dataclass(frozen=True)
class BlockRect:
    """Vertical extent of a block at one timestamp, in y units."""

    t_index: int
    kind: str  # "primary" | "top-secondary" | "bottom-secondary"
    y0: float
    y1: float
    members: tuple[str, ...]


@dataclass(frozen=True)
class IdleRun:
    """An absence gap between two presences of one entity.

    ``start`` and ``end`` are the bracketing presence timestamp indices.
    Circumvent runs route at ``level_y`` outside every block they span;
    traverse runs hold the height of the last presence straight through.
    """

    entity: str
    start: int
    end: int
    side: str
    mode: str  # "circumvent" | "traverse"
    level_y: float


@dataclass
class Layout:
    """Realized slots, block rectangles, and idle routing per entity."""

    ego: str
    times: tuple[str, ...]
    focus: str
    min_gap: float
    padding: float
    region_gap_slots: int
    placements: dict[str, dict[int, Placement]]
    blocks: list[BlockRect]
    idle_runs: list[IdleRun]
    orders: tuple[tuple[str, ...], ...]
    snapshots: list[EgoSnapshot]
    plan: AlignmentPlan
    dropped_alignments: tuple[tuple[int, str], ...]
    _idle_y: dict[str, dict[int, float]] = field(default_factory=dict, repr=False)

    def entities(self) -> list[str]:
        return sorted(self.placements)

    def present(self, entity: str, t_index: int) -> bool:
        return t_index in self.placements.get(entity, {})

    def placement(self, entity: str, t_index: int) -> Placement:
        return self.placements[entity][t_index]

    def y(self, entity: str, t_index: int) -> float:
        return self.placements[entity][t_index].y

    def presence_indices(self, entity: str) -> list[int]:
        return sorted(self.placements.get(entity, {}))

    def span(self, entity: str) -> tuple[int, int]:
        indices = self.presence_indices(entity)
        return indices[0], indices[-1]

    def line_y(self, entity: str, t_index: int) -> float | None:
        """Height of the entity's line at a timestamp, or None outside its span.

        Idle timestamps report the routing height (circumvent level or held
        traverse height).
        """
        spot = self.placements.get(entity, {}).get(t_index)
        if spot is not None:
            return spot.y
        return self._idle_y.get(entity, {}).get(t_index)

    def blocks_at(self, t_index: int) -> list[BlockRect]:
        return [b for b in self.blocks if b.t_index == t_index]


def initialize_order(
    snapshots: Sequence[EgoSnapshot],
    config: ChartConfig,
    attributes: AttributeTable | None = None,
) -> OrderedTimeline:
    """Seed per-timestamp orders from proximity ranks.

    Level-1 regions run outward from the ego by rank; equal weights start in
    entity-id order and form permutable groups. Secondary blocks start in
    entity-id order and are permutable as a whole. With identity stacking on,
    the level-1 sort key becomes (identity group, rank), groups ordered by
    first appearance on the rendered timeline.
    """
    attributes = attributes or AttributeTable.empty()
    group_order: dict[str, int] = {}
    if config.stack_by_identity:
        for snapshot in snapshots:
            for alter in sorted(snapshot.alters, key=lambda a: a.id):
                identity = attributes.identity(alter.id) or "unknown"
                if identity not in group_order:
                    group_order[identity] = len(group_order)

    def sort_key(alter):
        if config.stack_by_identity:
            identity = attributes.identity(alter.id) or "unknown"
            return (group_order[identity], -alter.agg_weight, alter.id)
        return (-alter.agg_weight, alter.id)

    def tie_key(alter):
        if config.stack_by_identity:
            identity = attributes.identity(alter.id) or "unknown"
            return (group_order[identity], alter.agg_weight)
        return alter.agg_weight

    slices: list[TimeSlice] = []
    for snapshot in snapshots:
        regions: dict[str, list[str]] = {name: [] for name in REGION_ORDER}
        groups: list[tuple[str, int, int]] = []
        for compartment, l1_name, sec_name in (
            (TOP, "top_level1", "top_secondary"),
            (BOTTOM, "bottom_level1", "bottom_secondary"),
        ):
            inner_first = sorted(
                (a for a in snapshot.level1() if a.compartment == compartment),
                key=sort_key,
            )
            ids = [a.id for a in inner_first]
            n = len(ids)
            if compartment == TOP:
                regions[l1_name] = list(reversed(ids))
            else:
                regions[l1_name] = list(ids)
            start = 0
            while start < n:
                stop = start
                while stop < n and tie_key(inner_first[stop]) == tie_key(inner_first[start]):
                    stop += 1
                if stop - start >= 2:
                    if compartment == TOP:
                        groups.append((l1_name, n - stop, n - start))
                    else:
                        groups.append((l1_name, start, stop))
                start = stop
            secondary = sorted(a.id for a in snapshot.level2() if a.compartment == compartment)
            regions[sec_name] = secondary
            if len(secondary) >= 2:
                groups.append((sec_name, 0, len(secondary)))
        slices.append(TimeSlice(snapshot.time, regions, groups))
    return OrderedTimeline(snapshots[0].ego, slices, list(snapshots))


def _reorder_slice(slc: TimeSlice, ref_pos: Mapping[str, int], ego: str) -> bool:
    changed = False
    index = {entity: k for k, entity in enumerate(slc.sequence(ego))}
    for region_name, start, stop in slc.groups:
        region = slc.regions[region_name]
        members = region[start:stop]
        if len(members) < 2:
            continue
        keyed = sorted(members, key=lambda e: (ref_pos.get(e, index[e]), e))
        if keyed != members:
            region[start:stop] = keyed
            changed = True
    return changed


def barycenter_sweep(timeline: OrderedTimeline, max_sweeps: int = 10) -> OrderedTimeline:
    """Reduce crossings by barycenter sorting inside permutable groups.

    Forward and backward sweeps key each entity on its position at the
    adjacent timestamp (entities absent there keep their current position as
    the key; entity id breaks ties). The best ordering seen, the initial one
    included, is returned, so the result never crosses more than the input.
    """
    slices = [s.copy() for s in timeline.slices]
    ego = timeline.ego

    def sequences() -> list[list[str]]:
        return [s.sequence(ego) for s in slices]

    best_cost = order_crossings(sequences())
    best = [s.copy() for s in slices]
    for _ in range(max_sweeps):
        changed = False
        for ti in range(1, len(slices)):
            ref = {e: k for k, e in enumerate(slices[ti - 1].sequence(ego))}
            changed |= _reorder_slice(slices[ti], ref, ego)
        for ti in range(len(slices) - 2, -1, -1):
            ref = {e: k for k, e in enumerate(slices[ti + 1].sequence(ego))}
            changed |= _reorder_slice(slices[ti], ref, ego)
        cost = order_crossings(sequences())
        if cost < best_cost:
            best_cost = cost
            best = [s.copy() for s in slices]
        if not changed:
            break
    return OrderedTimeline(ego, best, timeline.snapshots)


def _best_common_run(
    left: Sequence[str], right: Sequence[str], rewards: Mapping[str, int]
) -> tuple[int, int, int] | None:
    """Find the contiguous run shared by both sequences with maximal reward.

    Ties prefer longer runs, then the leftmost occurrence in ``left`` and
    then in ``right``. Returns (end_i, end_j, length) or None.
    """
    best: tuple[int, int, int, int] | None = None
    found: tuple[int, int, int] | None = None
    prev_len = [0] * (len(right) + 1)
    prev_rew = [0] * (len(right) + 1)
    for i in range(1, len(left) + 1):
        cur_len = [0] * (len(right) + 1)
        cur_rew = [0] * (len(right) + 1)
        item = left[i - 1]
        gain = rewards.get(item, 1)
        for j in range(1, len(right) + 1):
            if item == right[j - 1]:
                cur_len[j] = prev_len[j - 1] + 1
                cur_rew[j] = prev_rew[j - 1] + gain
                candidate = (cur_rew[j], cur_len[j], -i, -j)
                if best is None or candidate > best:
                    best = candidate
                    found = (i, j, cur_len[j])
        prev_len, prev_rew = cur_len, cur_rew
    return found


def _chain_runs(
    left: Sequence[str], right: Sequence[str], rewards: Mapping[str, int]
) -> list[str]:
    if not left or not right:
        return []
    found = _best_common_run(left, right, rewards)
    if found is None:
        return []
    i, j, length = found
    run = list(left[i - length : i])
    return (
        _chain_runs(left[: i - length], right[: j - length], rewards)
        + run
        + _chain_runs(left[i:], right[j:], rewards)
    )


def align_timelines(timeline: OrderedTimeline) -> AlignmentPlan:
    """Commit entities to equal heights across consecutive timestamps.

    Each pair is matched by chaining contiguous common runs, committing the
    reward-maximal run first and recursing on the flanks. Every matched
    entity is worth 1 except the ego, whose maximum-integer reward forces it
    into every solution.
    """
    rewards = {timeline.ego: _EGO_REWARD}
    sequences = timeline.sequences()
    pairs = [
        frozenset(_chain_runs(a, b, rewards))
        for a, b in zip(sequences, sequences[1:])
    ]
    return AlignmentPlan(tuple(pairs))


def _outward_chain(slc: TimeSlice, side: str, region_gap: int) -> Iterable[tuple[str, int]]:
    """Entities on one side from the ego outward, with slot separations."""
    if side == TOP:
        level1 = list(reversed(slc.regions["top_level1"]))
        secondary = list(reversed(slc.regions["top_secondary"]))
    else:
        level1 = list(slc.regions["bottom_level1"])
        secondary = list(slc.regions["bottom_secondary"])
    for entity in level1:
        yield entity, 1
    for k, entity in enumerate(secondary):
        yield entity, (region_gap if k == 0 else 1)


def _compact_slots(slc: TimeSlice, ego: str, region_gap: int) -> dict[str, int]:
    slots = {ego: 0}
    for side, sign in ((TOP, -1), (BOTTOM, 1)):
        bound = 0
        for entity, sep in _outward_chain(slc, side, region_gap):
            bound += sign * sep
            slots[entity] = bound
    return slots


def _straight_slots(
    slc: TimeSlice,
    ego: str,
    region_gap: int,
    last_slot: Mapping[str, int],
    occupied_by_traverse: set[int],
) -> dict[str, int]:
    """One timestamp of straight-line compaction.

    Entities are placed from the ego outward and keep the slot of their most
    recent presence whenever the order constraints permit. A hold is granted
    only up to the point where it still leaves room for every hold further
    out on the same side; without that guard one entity re-entering the
    order close to the ego at a stale far-out height would cascade every
    outer entity beyond it. New entities sit compactly against the previous
    entity, skipping rows held by lines traversing an absence gap.
    """
    slots = {ego: 0}
    infinity = float("inf")
    for side, sign in ((TOP, -1), (BOTTOM, 1)):
        chain = list(_outward_chain(slc, side, region_gap))
        # q-space: outward positive regardless of side
        desired = [
            (sign * last_slot[e] if e in last_slot else None) for e, _ in chain
        ]
        # room[i]: largest q the i-th entity may take while every hold
        # outside it stays reachable; desires on the wrong side of the ego
        # can never be held and reserve nothing
        room = [infinity] * len(chain)
        for i in range(len(chain) - 2, -1, -1):
            sep_out = chain[i + 1][1]
            outer = room[i + 1]
            if desired[i + 1] is not None and desired[i + 1] >= 1:
                outer = min(outer, desired[i + 1])
            room[i] = outer - sep_out
        bound = 0
        for i, (entity, sep) in enumerate(chain):
            lower = bound + sep
            want = desired[i]
            if want is not None:
                if want <= lower:
                    q = lower
                elif want <= room[i]:
                    q = want
                else:
                    q = max(lower, room[i])
            else:
                q = lower
                while (sign * q) in occupied_by_traverse and q + 1 <= room[i]:
                    q += 1
            slots[entity] = sign * q
            bound = q
    return slots


def _build_blocks(
    timeline: OrderedTimeline,
    slots_per_slice: Sequence[Mapping[str, int]],
    config: ChartConfig,
) -> list[BlockRect]:
    blocks: list[BlockRect] = []
    gap = config.min_gap
    pad = config.padding
    for ti, slc in enumerate(timeline.slices):
        slots = slots_per_slice[ti]
        primary = (
            list(slc.regions["top_level1"]) + [timeline.ego] + list(slc.regions["bottom_level1"])
        )
        spans = [
            ("primary", primary),
            ("top-secondary", list(slc.regions["top_secondary"])),
            ("bottom-secondary", list(slc.regions["bottom_secondary"])),
        ]
        for kind, members in spans:
            if not members:
                continue
            ys = [slots[m] * gap for m in members]
            blocks.append(BlockRect(ti, kind, min(ys) - pad, max(ys) + pad, tuple(members)))
    return blocks


def _presence_table(snapshots: Sequence[EgoSnapshot]) -> dict[str, list[int]]:
    presences: dict[str, list[int]] = {}
    for ti, snapshot in enumerate(snapshots):
        for entity in snapshot.present_ids():
            presences.setdefault(entity, []).append(ti)
    return presences


def _idle_gaps(presences: Mapping[str, list[int]]) -> list[tuple[str, int, int]]:
    gaps = []
    for entity in sorted(presences):
        spots = presences[entity]
        for a, b in zip(spots, spots[1:]):
            if b > a + 1:
                gaps.append((entity, a, b))
    return gaps


def _circumvent_runs(
    gaps: Sequence[tuple[str, int, int]],
    placements: Mapping[str, Mapping[int, Placement]],
    blocks: Sequence[BlockRect],
    n_times: int,
    min_gap: float,
) -> list[IdleRun]:
    """Route each gap at one level outside every block it spans.

    The first run on a side sits one gap beyond the farthest block edge over
    its (inclusive) column range; runs whose idle columns overlap are pushed
    a further gap out, so no two idle lines coincide.
    """
    top_edge = [0.0] * n_times
    bottom_edge = [0.0] * n_times
    for block in blocks:
        top_edge[block.t_index] = min(top_edge[block.t_index], block.y0)
        bottom_edge[block.t_index] = max(bottom_edge[block.t_index], block.y1)
    runs: list[IdleRun] = []
    for entity, a, b in gaps:
        side = placements[entity][a].compartment or TOP
        if side == TOP:
            level = min(top_edge[t] for t in range(a, b + 1)) - min_gap
        else:
            level = max(bottom_edge[t] for t in range(a, b + 1)) + min_gap
        taken = [
            run.level_y
            for run in runs
            if run.side == side and min(run.end, b) - max(run.start, a) >= 2
        ]
        step = -min_gap if side == TOP else min_gap
        while any(abs(level - other) < min_gap / 2 for other in taken):
            level += step
        runs.append(IdleRun(entity, a, b, side, "circumvent", level))
    return runs


def _alignment_outcome(
    plan: AlignmentPlan, slots_per_slice: Sequence[Mapping[str, int]]
) -> tuple[tuple[int, str], ...]:
    dropped: list[tuple[int, str]] = []
    for ti, committed in enumerate(plan.pairs):
        for entity in sorted(committed):
            if slots_per_slice[ti][entity] != slots_per_slice[ti + 1][entity]:
                dropped.append((ti, entity))
    return tuple(dropped)


def _assemble(
    timeline: OrderedTimeline,
    plan: AlignmentPlan,
    slots_per_slice: Sequence[Mapping[str, int]],
    focus: str,
    config: ChartConfig,
) -> Layout:
    gap = config.min_gap
    placements: dict[str, dict[int, Placement]] = {}
    for ti, snapshot in enumerate(timeline.snapshots):
        slots = slots_per_slice[ti]
        placements.setdefault(timeline.ego, {})[ti] = Placement(
            slot=0, y=0.0, level=0, compartment=None, rank=None, agg_weight=0.0
        )
        for alter in snapshot.alters:
            slot = slots[alter.id]
            placements.setdefault(alter.id, {})[ti] = Placement(
                slot=slot,
                y=slot * gap,
                level=alter.level,
                compartment=alter.compartment,
                rank=alter.rank,
                agg_weight=alter.agg_weight,
            )
    blocks = _build_blocks(timeline, slots_per_slice, config)
    presences = _presence_table(timeline.snapshots)
    gaps = _idle_gaps(presences)
    if focus == FOCUS_STRAIGHT:
        idle_runs = [
            IdleRun(
                entity,
                a,
                b,
                placements[entity][a].compartment or TOP,
                "traverse",
                placements[entity][a].y,
            )
            for entity, a, b in gaps
        ]
    else:
        idle_runs = _circumvent_runs(
            gaps, placements, blocks, len(timeline.slices), gap
        )
    idle_y: dict[str, dict[int, float]] = {}
    for run in idle_runs:
        per_entity = idle_y.setdefault(run.entity, {})
        for t in range(run.start + 1, run.end):
            per_entity[t] = run.level_y
    return Layout(
        ego=timeline.ego,
        times=tuple(s.time for s in timeline.slices),
        focus=focus,
        min_gap=gap,
        padding=config.padding,
        region_gap_slots=config.region_gap_slots,
        placements=placements,
        blocks=blocks,
        idle_runs=idle_runs,
        orders=tuple(tuple(seq) for seq in timeline.sequences()),
        snapshots=list(timeline.snapshots),
        plan=plan,
        dropped_alignments=_alignment_outcome(plan, slots_per_slice),
        _idle_y=idle_y,
    )


def compact_vertical_space(
    timeline: OrderedTimeline, plan: AlignmentPlan, config: ChartConfig
) -> Layout:
    """Compact every timestamp to minimal distances.

    Present entities take consecutive slots inside their regions with fixed
    inter-region padding, so block heights stay minimal. The ego holds slot
    zero; alignment commitments survive only where they coincide with the
    compact positions (the rest are recorded as dropped). Idle lines
    circumvent the blocks on the side of their most recent compartment.
    """
    region_gap = config.region_gap_slots
    slots = [
        _compact_slots(slc, timeline.ego, region_gap) for slc in timeline.slices
    ]
    return _assemble(timeline, plan, slots, FOCUS_VERTICAL, config)


def compact_straight_line(
    timeline: OrderedTimeline, plan: AlignmentPlan, config: ChartConfig
) -> Layout:
    """Keep entities at their previous heights wherever order permits.

    Entities are placed from the ego outward; each keeps the slot of its most
    recent presence unless the entity placed just inside forces it further
    out. Slots may be sparse. Idle lines traverse the blocks at their held
    height with no presence points.
    """
    region_gap = config.region_gap_slots
    presences = _presence_table(timeline.snapshots)
    first = {e: spots[0] for e, spots in presences.items()}
    last = {e: spots[-1] for e, spots in presences.items()}
    present_sets = [set(s.present_ids()) for s in timeline.snapshots]
    last_slot: dict[str, int] = {}
    slots_per_slice: list[dict[str, int]] = []
    for ti, slc in enumerate(timeline.slices):
        traversing = {
            last_slot[e]
            for e in last_slot
            if first[e] < ti < last[e] and e not in present_sets[ti]
        }
        slots = _straight_slots(slc, timeline.ego, region_gap, last_slot, traversing)
        slots_per_slice.append(slots)
        for entity, slot in slots.items():
            last_slot[entity] = slot
    return _assemble(timeline, plan, slots_per_slice, FOCUS_STRAIGHT, config)


def generate_layout(
    events: Sequence[EventRecord],
    attributes: AttributeTable | None,
    config: ChartConfig,
) -> Layout:
    """Run the full pipeline: extract, rank, order, sweep, align, compact."""
    attributes = attributes or AttributeTable.empty()
    config = validate_config(config, events)
    snapshots = build_snapshots(events, config, attributes)
    if not snapshots:
        raise LayoutError(
            f"no rendered timestamps: ego {config.ego!r} shares no edge anywhere"
        )
    timeline = initialize_order(snapshots, config, attributes)
    timeline = barycenter_sweep(timeline, config.max_sweeps)
    plan = align_timelines(timeline)
    if config.focus == FOCUS_STRAIGHT:
        return compact_straight_line(timeline, plan, config)
    return compact_vertical_space(timeline, plan, config)
