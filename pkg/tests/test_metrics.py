"""Quality metrics against brute-force oracles, plus the exhaustive minimum."""

import itertools

import pytest

from egoweave import (
    AttributeTable,
    ChartConfig,
    EventRecord,
    InstanceTooLargeError,
    brute_force_min_crossings,
    build_snapshots,
    compute_report,
    count_crossings,
    count_ego_crossings,
    generate_layout,
    whitespace_area,
    wiggle_sum,
)
from egoweave import fixtures
from egoweave.layout import barycenter_sweep, initialize_order
from egoweave.metrics import count_inversions, order_crossings

from _oracles import (
    direct_wiggle,
    geometric_ego_bracket_count,
    pairwise_crossings,
    pairwise_order_crossings,
    raster_whitespace,
)


def layout_for(events, focus="vertical-space", ego="ego"):
    return generate_layout(events, None, ChartConfig(ego=ego, focus=focus))


def test_two_parallel_lines_have_zero_crossings():
    events = [
        EventRecord("1", "a", "ego", 2.0),
        EventRecord("2", "a", "ego", 2.0),
    ]
    assert count_crossings(layout_for(events)) == 0


def test_two_lines_swapping_once_cross_once():
    events = [
        EventRecord("1", "a", "ego", 5.0),
        EventRecord("1", "b", "ego", 3.0),
        EventRecord("2", "a", "ego", 3.0),
        EventRecord("2", "b", "ego", 5.0),
    ]
    assert count_crossings(layout_for(events)) == 1


def test_compartment_switch_counts_one_ego_crossing():
    events = [
        EventRecord("1", "a", "ego", 1.0),
        EventRecord("2", "ego", "a", 1.0),
        EventRecord("2", "b", "ego", 1.0),
    ]
    layout = layout_for(events)
    assert count_ego_crossings(layout) == 1


def test_no_switches_no_ego_crossings():
    events = [
        EventRecord("1", "a", "ego", 1.0),
        EventRecord("2", "a", "ego", 1.0),
    ]
    assert count_ego_crossings(layout_for(events)) == 0


def test_all_straight_layout_has_zero_wiggle():
    events = [
        EventRecord("1", "a", "ego", 5.0),
        EventRecord("1", "b", "ego", 3.0),
        EventRecord("2", "a", "ego", 5.0),
        EventRecord("2", "b", "ego", 3.0),
    ]
    assert wiggle_sum(layout_for(events, focus="straight-line")) == 0.0


def test_single_move_of_two_slots_wiggles_two():
    events = [
        EventRecord("1", "a", "ego", 1.0),
        EventRecord("2", "a", "ego", 1.0),
        EventRecord("2", "b", "ego", 5.0),
        EventRecord("2", "c", "ego", 4.0),
    ]
    assert wiggle_sum(layout_for(events)) == 2.0


def test_full_envelope_has_zero_whitespace():
    events = [
        EventRecord("1", "a", "ego", 1.0),
        EventRecord("1", "ego", "b", 1.0),
        EventRecord("2", "a", "ego", 1.0),
        EventRecord("2", "ego", "b", 1.0),
    ]
    assert whitespace_area(layout_for(events)) == 0.0


def test_one_timestamp_with_gaps_counts_them():
    events = [
        EventRecord("1", "a", "ego", 1.0),
        EventRecord("1", "ego", "b", 1.0),
        EventRecord("2", "a", "ego", 1.0),
    ]
    assert whitespace_area(layout_for(events)) == 1.0


def random_layouts(count, max_entities=8, max_times=5):
    for seed in range(count):
        n = 4 + seed % (max_entities - 3)
        t = 2 + seed % (max_times - 1)
        events, _ = fixtures.synthetic_instance(seed, n_entities=n, n_times=t)
        focus = "straight-line" if seed % 2 else "vertical-space"
        yield generate_layout(events, None, ChartConfig(ego="E000", focus=focus))


def test_crossings_match_quadratic_oracle_on_random_layouts():
    for layout in random_layouts(100):
        assert count_crossings(layout) == pairwise_crossings(layout)


def test_wiggle_matches_direct_summation():
    for layout in random_layouts(40):
        assert wiggle_sum(layout) == pytest.approx(direct_wiggle(layout))


def test_whitespace_matches_raster_scan():
    for layout in random_layouts(40):
        assert whitespace_area(layout) == raster_whitespace(layout)


def test_ego_crossings_match_geometric_bracket_scan():
    for layout in random_layouts(60):
        assert count_ego_crossings(layout) == geometric_ego_bracket_count(layout)


def test_ego_crossings_never_exceed_crossings():
    for layout in random_layouts(60):
        report = compute_report(layout)
        assert report.ego_crossings <= report.crossings


def mirrored(layout):
    import copy

    flipped = copy.deepcopy(layout)
    for entity, spots in flipped.placements.items():
        for ti, placement in spots.items():
            spots[ti] = type(placement)(
                slot=-placement.slot,
                y=-placement.y,
                level=placement.level,
                compartment=placement.compartment,
                rank=placement.rank,
                agg_weight=placement.agg_weight,
            )
    flipped._idle_y = {
        entity: {ti: -y for ti, y in spots.items()}
        for entity, spots in flipped._idle_y.items()
    }
    return flipped


def test_crossings_symmetric_under_vertical_mirror():
    for layout in random_layouts(30):
        assert count_crossings(layout) == count_crossings(mirrored(layout))


def test_order_crossings_matches_pairwise_oracle():
    for seed in range(30):
        events, _ = fixtures.synthetic_instance(seed, n_entities=10, n_times=5)
        snapshots = build_snapshots(events, ChartConfig(ego="E000"), AttributeTable.empty())
        timeline = initialize_order(snapshots, ChartConfig(ego="E000"), AttributeTable.empty())
        seqs = timeline.sequences()
        assert order_crossings(seqs) == pairwise_order_crossings(seqs)


def test_count_inversions_small_cases():
    assert count_inversions([]) == 0
    assert count_inversions([1, 2, 3]) == 0
    assert count_inversions([3, 2, 1]) == 3
    assert count_inversions([2, 1, 3]) == 1


def singleton_timeline():
    events = [
        EventRecord("1", "a", "ego", 5.0),
        EventRecord("1", "b", "ego", 3.0),
        EventRecord("2", "a", "ego", 3.0),
        EventRecord("2", "b", "ego", 5.0),
    ]
    config = ChartConfig(ego="ego")
    snapshots = build_snapshots(events, config, AttributeTable.empty())
    return initialize_order(snapshots, config, AttributeTable.empty())


def test_brute_force_on_singleton_groups_equals_plain_count():
    timeline = singleton_timeline()
    assert timeline.slices[0].groups == [] and timeline.slices[1].groups == []
    assert brute_force_min_crossings(timeline) == order_crossings(timeline.sequences())


def test_brute_force_equals_minimum_over_explicit_permutations():
    # three equal-weight alters form one permutable group at each timestamp
    events = [EventRecord("1", e, "ego", 2.0) for e in ("a", "b", "c")]
    events += [EventRecord("2", e, "ego", 3.0) for e in ("a", "b", "c")]
    config = ChartConfig(ego="ego")
    snapshots = build_snapshots(events, config, AttributeTable.empty())
    timeline = initialize_order(snapshots, config, AttributeTable.empty())
    got = brute_force_min_crossings(timeline)
    best = None
    for first in itertools.permutations(["a", "b", "c"]):
        for second in itertools.permutations(["a", "b", "c"]):
            seqs = [list(first) + ["ego"], list(second) + ["ego"]]
            cost = pairwise_order_crossings(seqs)
            best = cost if best is None else min(best, cost)
    assert got == best == 0


def test_barycenter_reaches_the_exhaustive_minimum_on_the_shipped_fixture():
    events = fixtures.sweep_demo_events()
    config = ChartConfig(ego="S")
    snapshots = build_snapshots(events, config, AttributeTable.empty())
    timeline = initialize_order(snapshots, config, AttributeTable.empty())
    swept = barycenter_sweep(timeline, config.max_sweeps)
    assert order_crossings(swept.sequences()) == brute_force_min_crossings(timeline)


def test_oversized_group_raises():
    events = [EventRecord("1", f"e{k}", "ego", 2.0) for k in range(9)]
    events += [EventRecord("2", f"e{k}", "ego", 2.0) for k in range(9)]
    config = ChartConfig(ego="ego")
    snapshots = build_snapshots(events, config, AttributeTable.empty())
    timeline = initialize_order(snapshots, config, AttributeTable.empty())
    with pytest.raises(InstanceTooLargeError):
        brute_force_min_crossings(timeline, group_limit=8)


def test_brute_force_is_a_lower_bound_for_the_heuristic():
    for seed in (0, 9, 27):
        events, _ = fixtures.synthetic_instance(seed, n_entities=8, n_times=4)
        config = ChartConfig(ego="E000")
        snapshots = build_snapshots(events, config, AttributeTable.empty())
        timeline = initialize_order(snapshots, config, AttributeTable.empty())
        swept = barycenter_sweep(timeline, config.max_sweeps)
        try:
            floor = brute_force_min_crossings(timeline)
        except InstanceTooLargeError:
            continue
        assert floor <= order_crossings(swept.sequences())
