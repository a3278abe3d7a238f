"""Ordering, barycenter sweeps, alignment, and both compaction focuses."""

import pytest

from egoweave import (
    AttributeTable,
    ChartConfig,
    EntityAttributes,
    EventRecord,
    LayoutError,
    align_timelines,
    barycenter_sweep,
    build_snapshots,
    compact_straight_line,
    compact_vertical_space,
    generate_layout,
    initialize_order,
)
from egoweave import fixtures
from egoweave.egonet import EgoSnapshot
from egoweave.layout import AlignmentPlan, OrderedTimeline, TimeSlice, _chain_runs, _EGO_REWARD
from egoweave.metrics import order_crossings
from egoweave.render import realize_geometry

from _geometry import circumvent_violations, ego_line_violations
from _oracles import all_common_chains_best, pairwise_order_crossings


def demo_timeline():
    events = fixtures.demo_events()
    config = fixtures.demo_config()
    attributes = fixtures.demo_attributes()
    snapshots = build_snapshots(events, config, attributes)
    return initialize_order(snapshots, config, attributes), config


def test_demo_order_places_strongest_adjacent_to_ego():
    timeline, _ = demo_timeline()
    second = timeline.slices[1]
    assert second.regions["top_level1"] == ["A", "D"]  # D adjacent to the ego
    assert second.sequence("SI").index("D") == second.sequence("SI").index("SI") - 1


def test_ego_only_snapshot_orders_to_single_entry():
    snapshot = EgoSnapshot("1", "ego", True, [])
    timeline = initialize_order([snapshot], ChartConfig(ego="ego"))
    assert timeline.slices[0].sequence("ego") == ["ego"]


def test_stacking_groups_identities_contiguously():
    events = [
        EventRecord("1", "r1", "ego", 3.0),
        EventRecord("2", "r1", "ego", 3.0),
        EventRecord("2", "b1", "ego", 4.0),
        EventRecord("2", "r2", "ego", 1.0),
        EventRecord("2", "b2", "ego", 2.0),
    ]
    table = AttributeTable.empty()
    for entity in ("r1", "r2"):
        table.entities[entity] = EntityAttributes(id=entity, line_identity="red")
    for entity in ("b1", "b2"):
        table.entities[entity] = EntityAttributes(id=entity, line_identity="blue")
    config = ChartConfig(ego="ego", stack_by_identity=True)
    snapshots = build_snapshots(events, config, table)
    timeline = initialize_order(snapshots, config, table)
    second = timeline.slices[1].regions["top_level1"]
    identities = ["red" if e.startswith("r") else "blue" for e in second]
    # red joined first, so red lines sit adjacent to the ego as one contiguous run
    assert identities == ["blue", "blue", "red", "red"]
    # within each identity run the heavier line still sits closer to the ego
    assert second == ["b2", "b1", "r2", "r1"]


def test_singleton_groups_never_move():
    timeline, config = demo_timeline()
    before = timeline.sequences()
    swept = barycenter_sweep(timeline, config.max_sweeps)
    # demo level-1 weights are all distinct; only secondary groups may permute
    for slice_before, slice_after in zip(timeline.slices, swept.slices):
        assert slice_before.regions["top_level1"] == slice_after.regions["top_level1"]
        assert slice_before.regions["bottom_level1"] == slice_after.regions["bottom_level1"]
    assert order_crossings(swept.sequences()) <= order_crossings(before)


def sweep_fixture_timeline():
    events = fixtures.sweep_demo_events()
    config = ChartConfig(ego="S")
    snapshots = build_snapshots(events, config, AttributeTable.empty())
    return initialize_order(snapshots, config, AttributeTable.empty()), config


def test_one_sweep_removes_the_constructed_crossing():
    timeline, config = sweep_fixture_timeline()
    before = timeline.sequences()
    assert pairwise_order_crossings(before) == 1
    swept = barycenter_sweep(timeline, config.max_sweeps)
    after = swept.sequences()
    assert pairwise_order_crossings(after) == 0


def test_sweep_never_increases_crossings_on_seeded_corpus():
    for seed in range(100):
        events, _ = fixtures.synthetic_instance(seed, n_entities=10, n_times=5)
        config = ChartConfig(ego="E000")
        snapshots = build_snapshots(events, config, AttributeTable.empty())
        timeline = initialize_order(snapshots, config, AttributeTable.empty())
        before = pairwise_order_crossings(timeline.sequences())
        swept = barycenter_sweep(timeline, config.max_sweeps)
        after = pairwise_order_crossings(swept.sequences())
        assert after <= before


def test_sweep_keeps_entities_inside_their_groups():
    for seed in (3, 11, 42):
        events, _ = fixtures.synthetic_instance(seed, n_entities=12, n_times=6)
        config = ChartConfig(ego="E000")
        snapshots = build_snapshots(events, config, AttributeTable.empty())
        timeline = initialize_order(snapshots, config, AttributeTable.empty())
        swept = barycenter_sweep(timeline, config.max_sweeps)
        for original, after in zip(timeline.slices, swept.slices):
            assert original.groups == after.groups
            for region_name, start, stop in original.groups:
                assert set(original.regions[region_name][start:stop]) == set(
                    after.regions[region_name][start:stop]
                )
            # outside every group the order is untouched
            for region_name in original.regions:
                ranges = [
                    (s, e) for (name, s, e) in original.groups if name == region_name
                ]
                for k, entity in enumerate(original.regions[region_name]):
                    if not any(s <= k < e for s, e in ranges):
                        assert after.regions[region_name][k] == entity


def test_alignment_of_identical_sequences_keeps_all_entities():
    seqs = [["c", "a", "ego", "b"], ["c", "a", "ego", "b"]]
    plan = _chain_runs(seqs[0], seqs[1], {"ego": _EGO_REWARD})
    assert set(plan) == {"c", "a", "ego", "b"}


def test_alignment_with_only_ego_shared():
    plan = _chain_runs(["x", "ego"], ["ego", "y"], {"ego": _EGO_REWARD})
    assert set(plan) == {"ego"}


def test_alignment_example_matches_exhaustive_oracle():
    left = ["C", "A", "ego", "B"]
    right = ["A", "ego", "B", "D"]
    got = set(_chain_runs(left, right, {"ego": _EGO_REWARD}))
    best = all_common_chains_best(left, right, "ego")
    assert got in best
    assert got == {"A", "ego", "B"}


def test_alignment_chain_is_reward_maximal_on_small_random_orders():
    import random

    rng = random.Random(9)
    pool = ["ego", "a", "b", "c", "d", "e"]
    for _ in range(40):
        left = rng.sample(pool, rng.randint(1, len(pool)))
        if "ego" not in left:
            left.append("ego")
        right = rng.sample(pool, rng.randint(1, len(pool)))
        if "ego" not in right:
            right.append("ego")
        got = frozenset(_chain_runs(left, right, {"ego": _EGO_REWARD}))
        assert got in all_common_chains_best(left, right, "ego")


def test_plan_always_contains_ego():
    events, _ = fixtures.synthetic_instance(17, n_entities=12, n_times=6)
    config = ChartConfig(ego="E000")
    snapshots = build_snapshots(events, config, AttributeTable.empty())
    timeline = barycenter_sweep(
        initialize_order(snapshots, config, AttributeTable.empty()), 10
    )
    plan = align_timelines(timeline)
    assert len(plan.pairs) == len(timeline.slices) - 1
    sequences = timeline.sequences()
    for ti, committed in enumerate(plan.pairs):
        assert "E000" in committed
        assert committed <= set(sequences[ti]) & set(sequences[ti + 1])


def vertical_layout(events, config=None, attributes=None):
    config = config or ChartConfig(ego="E000")
    attributes = attributes or AttributeTable.empty()
    snapshots = build_snapshots(events, config, attributes)
    timeline = barycenter_sweep(
        initialize_order(snapshots, config, attributes), config.max_sweeps
    )
    plan = align_timelines(timeline)
    return compact_vertical_space(timeline, plan, config)


def straight_layout(events, config=None, attributes=None):
    config = config or ChartConfig(ego="E000", focus="straight-line")
    attributes = attributes or AttributeTable.empty()
    snapshots = build_snapshots(events, config, attributes)
    timeline = barycenter_sweep(
        initialize_order(snapshots, config, attributes), config.max_sweeps
    )
    plan = align_timelines(timeline)
    return compact_straight_line(timeline, plan, config)


def test_block_height_is_arithmetic_in_member_count():
    events = fixtures.demo_events()
    config = fixtures.demo_config()
    layout = vertical_layout(events, config, fixtures.demo_attributes())
    for block in layout.blocks:
        k = len(block.members)
        assert block.y1 - block.y0 == pytest.approx(
            (k - 1) * config.min_gap + 2 * config.padding
        )


def test_vertical_space_slots_are_consecutive_in_regions():
    events, _ = fixtures.synthetic_instance(23, n_entities=12, n_times=6)
    layout = vertical_layout(events)
    for ti, order in enumerate(layout.orders):
        slots = [
            layout.placement(entity, ti).slot
            for entity in order
            if layout.present(entity, ti)
        ]
        assert slots == sorted(slots)
        # within one block every adjacent pair differs by exactly one slot
    for block in layout.blocks:
        member_slots = sorted(
            layout.placement(m, block.t_index).slot for m in block.members
        )
        assert member_slots == list(range(member_slots[0], member_slots[0] + len(member_slots)))


def test_ego_is_straight_and_orders_respected_in_both_focuses():
    for seed in (1, 7, 19):
        events, _ = fixtures.synthetic_instance(seed, n_entities=14, n_times=7)
        for builder in (vertical_layout, straight_layout):
            layout = builder(events)
            ego_ys = {layout.y("E000", ti) for ti in layout.presence_indices("E000")}
            assert ego_ys == {0.0}
            for ti, order in enumerate(layout.orders):
                ys = [
                    layout.y(entity, ti)
                    for entity in order
                    if layout.present(entity, ti)
                ]
                assert ys == sorted(ys)
                assert len(set(ys)) == len(ys)


def test_no_ego_crossing_invariants_hold():
    for seed in (2, 5, 8):
        events, _ = fixtures.synthetic_instance(seed, n_entities=14, n_times=7)
        for builder in (vertical_layout, straight_layout):
            layout = builder(events)
            assert ego_line_violations(layout) == []


def test_straight_line_keeps_heights_when_order_permits():
    events = [
        EventRecord("1", "a", "ego", 5.0),
        EventRecord("1", "b", "ego", 3.0),
        EventRecord("2", "a", "ego", 5.0),
        EventRecord("2", "b", "ego", 3.0),
    ]
    layout = straight_layout(events, ChartConfig(ego="ego", focus="straight-line"))
    for entity in ("a", "b", "ego"):
        assert layout.y(entity, 0) == layout.y(entity, 1)


def test_straight_line_allows_sparse_slots():
    events = [
        EventRecord("1", "a", "ego", 5.0),
        EventRecord("1", "b", "ego", 3.0),
        EventRecord("2", "b", "ego", 3.0),
    ]
    layout = straight_layout(events, ChartConfig(ego="ego", focus="straight-line"))
    # b holds its outer slot even though a left a gap next to the ego
    assert layout.placement("b", 1).slot == layout.placement("b", 0).slot == -2


def test_traverse_runs_hold_height_and_have_no_presence():
    events = [
        EventRecord("1", "a", "ego", 2.0),
        EventRecord("1", "b", "ego", 1.0),
        EventRecord("2", "b", "ego", 1.0),
        EventRecord("3", "a", "ego", 2.0),
        EventRecord("3", "b", "ego", 1.0),
    ]
    layout = straight_layout(events, ChartConfig(ego="ego", focus="straight-line"))
    run = next(r for r in layout.idle_runs if r.entity == "a")
    assert run.mode == "traverse"
    assert run.level_y == layout.y("a", 0)
    assert not layout.present("a", 1)
    assert layout.line_y("a", 1) == run.level_y


def test_circumvent_routes_stay_outside_blocks():
    for seed in (4, 13, 29):
        events, attributes = fixtures.synthetic_instance(seed, n_entities=14, n_times=7)
        config = ChartConfig(ego="E000")
        layout = vertical_layout(events, config, attributes)
        scene = realize_geometry(layout, attributes, config)
        assert circumvent_violations(layout, scene) == []


def test_whitespace_ordering_between_focuses():
    from egoweave import whitespace_area

    for seed in (6, 14, 21):
        events, _ = fixtures.synthetic_instance(seed, n_entities=12, n_times=6)
        vertical = vertical_layout(events)
        straight = straight_layout(events)
        assert whitespace_area(vertical) <= whitespace_area(straight)


def test_empty_event_list_raises():
    from egoweave.errors import ConfigError

    with pytest.raises((LayoutError, ConfigError)):
        generate_layout([], None, ChartConfig(ego="a"))


def test_absent_ego_raises_config_error():
    from egoweave.errors import ConfigError

    events = [EventRecord("1", "a", "b", 1.0), EventRecord("2", "b", "c", 1.0)]
    with pytest.raises(ConfigError):
        generate_layout(events, None, ChartConfig(ego="zz"))


def test_generate_layout_is_deterministic():
    events, attributes = fixtures.synthetic_instance(33, n_entities=16, n_times=8)
    config = ChartConfig(ego="E000")
    first = generate_layout(events, attributes, config)
    second = generate_layout(events, attributes, config)
    assert first.orders == second.orders
    assert first.placements == second.placements
    assert first.blocks == second.blocks
    assert first.idle_runs == second.idle_runs


def test_dropped_alignments_are_recorded_under_compactness():
    events, _ = fixtures.synthetic_instance(40, n_entities=12, n_times=6)
    layout = vertical_layout(events)
    for ti, entity in layout.dropped_alignments:
        assert entity in layout.plan.pairs[ti]
        assert layout.placement(entity, ti).slot != layout.placement(entity, ti + 1).slot
