"""Layout quality: crossings, ego crossings, wiggles, and whitespace.

Crossing counts compare slot order between consecutive timestamps; because
inter-timestep curves are monotone in x, an order inversion exactly
characterizes an intersection. A line participates at every timestamp its
span covers, idle routing included, so lines crossing the ego across an
absence gap are counted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .errors import InstanceTooLargeError

if TYPE_CHECKING:  # pragma: no cover
    from .layout import Layout, OrderedTimeline

# Exhaustive search bounds for brute_force_min_crossings.
DEFAULT_GROUP_LIMIT = 8
VARIANT_LIMIT = 50_000


@dataclass(frozen=True)
class QualityReport:
    """The three storyline quality metrics plus ego-specific crossings."""

    crossings: int
    ego_crossings: int
    wiggle_sum: float
    whitespace: float

    def as_dict(self) -> dict[str, float]:
        return {
            "crossings": self.crossings,
            "egoCrossings": self.ego_crossings,
            "wiggleSum": self.wiggle_sum,
            "whitespace": self.whitespace,
        }


def count_inversions(values: Sequence[int]) -> int:
    """Number of out-of-order pairs, by merge counting."""
    items = list(values)
    if len(items) < 2:
        return 0

    def sort(chunk: list[int]) -> tuple[list[int], int]:
        if len(chunk) <= 1:
            return chunk, 0
        mid = len(chunk) // 2
        left, a = sort(chunk[:mid])
        right, b = sort(chunk[mid:])
        merged: list[int] = []
        count = a + b
        i = j = 0
        while i < len(left) and j < len(right):
            if left[i] <= right[j]:
                merged.append(left[i])
                i += 1
            else:
                merged.append(right[j])
                count += len(left) - i
                j += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged, count

    return sort(items)[1]


def order_crossings(orders: Sequence[Sequence[str]]) -> int:
    """Crossings implied by per-timestamp total orders of present entities."""
    total = 0
    for current, following in zip(orders, orders[1:]):
        position = {entity: k for k, entity in enumerate(following)}
        ranks = [position[entity] for entity in current if entity in position]
        total += count_inversions(ranks)
    return total


def count_crossings(layout: "Layout") -> int:
    """Count order inversions of line heights between consecutive timestamps."""
    total = 0
    entities = layout.entities()
    for ti in range(len(layout.times) - 1):
        rows: list[tuple[float, float]] = []
        for entity in entities:
            y0 = layout.line_y(entity, ti)
            y1 = layout.line_y(entity, ti + 1)
            if y0 is not None and y1 is not None:
                rows.append((y0, y1))
        rows.sort()
        total += count_inversions(_dense_ranks([after for _, after in rows]))
    return total


def _dense_ranks(values: Sequence[float]) -> list[int]:
    ordered = sorted(set(values))
    rank = {v: k for k, v in enumerate(ordered)}
    return [rank[v] for v in values]


def count_ego_crossings(layout: "Layout", snapshots=None) -> int:
    """Count compartment switches between consecutive presences of each entity."""
    total = 0
    for entity in layout.entities():
        if entity == layout.ego:
            continue
        indices = layout.presence_indices(entity)
        for a, b in zip(indices, indices[1:]):
            before = layout.placement(entity, a).compartment
            after = layout.placement(entity, b).compartment
            if before is not None and after is not None and before != after:
                total += 1
    return total


def wiggle_sum(layout: "Layout") -> float:
    """Total vertical displacement between consecutive presences, in slot units."""
    total = 0.0
    for entity in layout.entities():
        indices = layout.presence_indices(entity)
        for a, b in zip(indices, indices[1:]):
            total += abs(layout.placement(entity, b).slot - layout.placement(entity, a).slot)
    return total


def whitespace_area(layout: "Layout") -> float:
    """Unoccupied slots inside the global envelope, summed over timestamps."""
    slots = [
        placement.slot
        for spots in layout.placements.values()
        for placement in spots.values()
    ]
    if not slots:
        return 0.0
    span = max(slots) - min(slots) + 1
    total = 0.0
    for ti in range(len(layout.times)):
        occupied = sum(1 for e in layout.placements if ti in layout.placements[e])
        total += span - occupied
    return total


def compute_report(layout: "Layout") -> QualityReport:
    return QualityReport(
        crossings=count_crossings(layout),
        ego_crossings=count_ego_crossings(layout),
        wiggle_sum=wiggle_sum(layout),
        whitespace=whitespace_area(layout),
    )


def brute_force_min_crossings(
    timeline: "OrderedTimeline", group_limit: int = DEFAULT_GROUP_LIMIT
) -> int:
    """Minimum crossings achievable by permuting the permutable groups.

    Exhaustive: every per-timestamp variant is enumerated and the best chain
    is found by dynamic programming over consecutive pairs. Raises
    InstanceTooLargeError when a group exceeds ``group_limit`` or a timestamp
    has more than VARIANT_LIMIT order variants.
    """
    if not timeline.slices:
        return 0
    variants_per_slice: list[list[list[str]]] = []
    for slc in timeline.slices:
        group_perms: list[list[tuple[str, ...]]] = []
        count = 1
        for region_name, start, stop in slc.groups:
            members = slc.regions[region_name][start:stop]
            if len(members) > group_limit:
                raise InstanceTooLargeError(
                    f"permutable group of {len(members)} exceeds the limit {group_limit}"
                )
            perms = [tuple(p) for p in itertools.permutations(members)]
            group_perms.append(perms)
            count *= len(perms)
        if count > VARIANT_LIMIT:
            raise InstanceTooLargeError(
                f"{count} order variants at timestamp {slc.time!r} exceed {VARIANT_LIMIT}"
            )
        variants: list[list[str]] = []
        for combo in itertools.product(*group_perms) if group_perms else [()]:
            candidate = slc.copy()
            for (region_name, start, stop), perm in zip(slc.groups, combo):
                candidate.regions[region_name][start:stop] = list(perm)
            variants.append(candidate.sequence(timeline.ego))
        variants_per_slice.append(variants)
    costs = [0] * len(variants_per_slice[0])
    for ti in range(1, len(variants_per_slice)):
        previous = variants_per_slice[ti - 1]
        current = variants_per_slice[ti]
        next_costs = []
        for seq in current:
            best = min(
                costs[k] + order_crossings([previous[k], seq])
                for k in range(len(previous))
            )
            next_costs.append(best)
        costs = next_costs
    return min(costs)
