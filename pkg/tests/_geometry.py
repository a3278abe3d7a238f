"""Exact geometric checks shared by the layout and acceptance tests."""

from __future__ import annotations

from egoweave import Layout, RenderScene


def _segment_hits_open_rect(p1, p2, rect, eps=1e-9) -> bool:
    """Whether an x-monotone segment crosses the open interior of a rect."""
    (x1, y1), (x2, y2) = p1, p2
    rx0, ry0, rx1, ry1 = rect
    lo = max(min(x1, x2), rx0)
    hi = min(max(x1, x2), rx1)
    if hi - lo <= eps:
        return False
    if x2 == x1:
        ya, yb = y1, y2
    else:
        ya = y1 + (y2 - y1) * (lo - x1) / (x2 - x1)
        yb = y1 + (y2 - y1) * (hi - x1) / (x2 - x1)
    seg_lo, seg_hi = min(ya, yb), max(ya, yb)
    return max(seg_lo, ry0) < min(seg_hi, ry1) - eps


def circumvent_violations(layout: Layout, scene: RenderScene) -> list[str]:
    """Circumvent idle lines that touch a block interior.

    Checks route levels at every spanned column and every path segment
    clipped to the x-range strictly between the bracketing presence columns'
    block bands.
    """
    problems: list[str] = []
    xs = scene.xs
    half = scene.block_width / 2
    paths = {p.entity: p.points for p in scene.paths}
    for run in layout.idle_runs:
        if run.mode != "circumvent":
            continue
        for t in range(run.start, run.end + 1):
            for block in layout.blocks_at(t):
                if block.y0 < run.level_y < block.y1:
                    problems.append(
                        f"{run.entity} level {run.level_y} inside {block.kind}@{t}"
                    )
        clip_lo = xs[run.start] + half
        clip_hi = xs[run.end] - half
        points = [(x, y) for kind, x, y in paths[run.entity]]
        rects = [
            (
                xs[block.t_index] - half,
                block.y0,
                xs[block.t_index] + half,
                block.y1,
            )
            for t in range(run.start, run.end + 1)
            for block in layout.blocks_at(t)
        ]
        for p1, p2 in zip(points, points[1:]):
            a = (max(p1[0], clip_lo), _y_at(p1, p2, max(p1[0], clip_lo)))
            b = (min(p2[0], clip_hi), _y_at(p1, p2, min(p2[0], clip_hi)))
            if b[0] - a[0] <= 1e-9:
                continue
            for rect in rects:
                if _segment_hits_open_rect(a, b, rect):
                    problems.append(
                        f"{run.entity} segment {a}->{b} crosses block {rect}"
                    )
    return problems


def _y_at(p1, p2, x):
    (x1, y1), (x2, y2) = p1, p2
    if x2 == x1:
        return y1
    return y1 + (y2 - y1) * (x - x1) / (x2 - x1)


def ego_line_violations(layout: Layout) -> list[str]:
    """Segments that disagree with the compartment rule around the ego line.

    Same-compartment consecutive segments must keep the ego height outside
    their y-interval; compartment switches must bracket it.
    """
    problems: list[str] = []
    for entity in layout.entities():
        if entity == layout.ego:
            continue
        spots = layout.presence_indices(entity)
        for a, b in zip(spots, spots[1:]):
            pa, pb = layout.placement(entity, a), layout.placement(entity, b)
            lo, hi = min(pa.y, pb.y), max(pa.y, pb.y)
            if pa.compartment == pb.compartment:
                if lo <= 0.0 <= hi:
                    problems.append(f"{entity} {a}->{b} same side but spans ego height")
            else:
                if not (lo < 0.0 < hi):
                    problems.append(f"{entity} {a}->{b} switched sides without bracketing")
    return problems
