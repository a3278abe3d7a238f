"""Geometry realization, contextual affinity views, and SVG/scene export."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import svg
from .egonet import EgoSnapshot, Lifespan, build_lifespan_index
from .errors import DataError, StyleError
from .layout import Layout
from .metrics import QualityReport, compute_report
from .model import (
    DEFAULT_STATUS,
    LINE_OVERFLOW,
    NODE_UNKNOWN,
    AttributeTable,
    ChartConfig,
)

SCHEMA_VERSION = 1

NODE = "node"  # control point at a timestamp column, curve-connected
BEND = "bend"  # detour point of a circumvent route, line-connected


@dataclass(frozen=True)
class ScenePath:
    entity: str
    name: str
    identity: str
    color: str
    width: float
    points: tuple[tuple[str, float, float], ...]


@dataclass(frozen=True)
class ScenePoint:
    entity: str
    t_index: int
    time: str
    x: float
    y: float
    status: str
    color: str
    level: int
    compartment: str | None
    agg_weight: float


@dataclass(frozen=True)
class SceneMarker:
    entity: str
    kind: str  # "first" | "last"
    t_index: int
    x: float
    y: float
    color: str


@dataclass(frozen=True)
class SceneBlock:
    t_index: int
    kind: str
    x0: float
    y0: float
    x1: float
    y1: float
    members: tuple[str, ...]


@dataclass(frozen=True)
class SceneConnector:
    t_index: int
    x: float
    y0: float
    y1: float


@dataclass(frozen=True)
class SceneLabel:
    kind: str  # "time" | "annotation"
    t_index: int
    x: float
    y: float
    text: str


@dataclass(frozen=True)
class AffinityView:
    """Expanded-block payload repositioning one timestamp's entities."""

    time: str
    t_index: int
    mode: str
    ego_emphasis: float
    width: float
    height: float
    positions: dict[str, tuple[float, float]]
    edges: tuple[tuple[str, str, float], ...] = ()


@dataclass
class RenderScene:
    """Resolved geometry and styles, ready for SVG or scene-document export."""

    ego: str
    focus: str
    times: tuple[str, ...]
    xs: tuple[float, ...]
    min_gap: float
    block_width: float
    point_radius: float
    ego_stroke: float
    alter_stroke: float
    annotations: dict[str, str]
    paths: list[ScenePath] = field(default_factory=list)
    points: list[ScenePoint] = field(default_factory=list)
    markers: list[SceneMarker] = field(default_factory=list)
    blocks: list[SceneBlock] = field(default_factory=list)
    connectors: list[SceneConnector] = field(default_factory=list)
    labels: list[SceneLabel] = field(default_factory=list)
    affinities: list[AffinityView] = field(default_factory=list)
    y_min: float = 0.0
    y_max: float = 0.0
    width: float = 0.0
    quality: QualityReport | None = None
    lifespans: dict[str, Lifespan] = field(default_factory=dict)


def _identity_colors(
    layout: Layout, attributes: AttributeTable, config: ChartConfig
) -> dict[str, str]:
    """Map observed line identities to colors, first appearance first."""
    order: list[str] = []
    for snapshot in layout.snapshots:
        for entity in snapshot.present_ids():
            identity = attributes.identity(entity) or "unknown"
            if identity not in order:
                order.append(identity)
    if isinstance(config.line_colors, dict):
        missing = [ident for ident in order if ident not in config.line_colors]
        if missing:
            raise StyleError(
                "line color scale lacks categories: " + ", ".join(sorted(missing))
            )
        return {ident: config.line_colors[ident] for ident in order}
    palette = tuple(config.line_colors)
    return {
        ident: (palette[k] if k < len(palette) else LINE_OVERFLOW)
        for k, ident in enumerate(order)
    }


def _status_colors(
    layout: Layout, attributes: AttributeTable, config: ChartConfig
) -> dict[str, str]:
    """Discretize the sequential node ramp over the observed status categories."""
    observed: set[str] = set()
    for ti, time in enumerate(layout.times):
        for entity in layout.placements:
            if layout.present(entity, ti):
                observed.add(attributes.status_at(entity, time))
    observed.discard(DEFAULT_STATUS)
    ordered = sorted(observed)
    if isinstance(config.node_colors, dict):
        missing = [status for status in ordered if status not in config.node_colors]
        if missing:
            raise StyleError(
                "node color scale lacks categories: " + ", ".join(sorted(missing))
            )
        colors = {status: config.node_colors[status] for status in ordered}
    else:
        ramp = tuple(config.node_colors)
        colors = {}
        if len(ordered) == 1:
            colors[ordered[0]] = ramp[len(ramp) // 2]
        else:
            for k, status in enumerate(ordered):
                position = round(k * (len(ramp) - 1) / (len(ordered) - 1))
                colors[status] = ramp[position]
    colors[DEFAULT_STATUS] = NODE_UNKNOWN
    return colors


def _entity_path(
    layout: Layout, entity: str, xs: Sequence[float], config: ChartConfig
) -> tuple[tuple[str, float, float], ...]:
    """Control points spanning first to last presence, idle routing included."""
    first, last = layout.span(entity)
    runs = {run.start: run for run in layout.idle_runs if run.entity == entity}
    bw = config.block_width
    points: list[tuple[str, float, float]] = []
    ti = first
    while ti <= last:
        y = layout.y(entity, ti)
        points.append((NODE, xs[ti], y))
        run = runs.get(ti)
        if run is None:
            ti += 1
            continue
        if run.mode == "traverse":
            for t in range(run.start + 1, run.end):
                points.append((NODE, xs[t], run.level_y))
        else:
            level = run.level_y
            y_in = layout.y(entity, run.end)
            points.append((BEND, xs[run.start] + bw / 2, y))
            points.append((BEND, (xs[run.start] + xs[run.start + 1]) / 2, level))
            for t in range(run.start + 1, run.end):
                points.append((BEND, xs[t], level))
            points.append((BEND, (xs[run.end - 1] + xs[run.end]) / 2, level))
            points.append((BEND, xs[run.end] - bw / 2, y_in))
        ti = run.end
    return tuple(points)


def realize_geometry(
    layout: Layout, attributes: AttributeTable | None, config: ChartConfig
) -> RenderScene:
    """Resolve x positions, styles, markers, blocks, and affinity payloads."""
    attributes = attributes or AttributeTable.empty()
    xs: list[float] = []
    for ti, time in enumerate(layout.times):
        if ti == 0:
            xs.append(0.0)
        else:
            xs.append(xs[-1] + config.base_step * config.stretch(time))
    identity_colors = _identity_colors(layout, attributes, config)
    status_colors = _status_colors(layout, attributes, config)
    scene = RenderScene(
        ego=layout.ego,
        focus=layout.focus,
        times=layout.times,
        xs=tuple(xs),
        min_gap=layout.min_gap,
        block_width=config.block_width,
        point_radius=config.point_radius,
        ego_stroke=config.ego_stroke,
        alter_stroke=config.alter_stroke,
        annotations={t: config.annotations[t] for t in layout.times if t in config.annotations},
    )
    alters = [e for e in layout.entities() if e != layout.ego]
    for entity in alters + [layout.ego]:
        identity = attributes.identity(entity) or "unknown"
        scene.paths.append(
            ScenePath(
                entity=entity,
                name=attributes.display_name(entity),
                identity=identity,
                color=identity_colors[identity],
                width=config.ego_stroke if entity == layout.ego else config.alter_stroke,
                points=_entity_path(layout, entity, xs, config),
            )
        )
    for ti, time in enumerate(layout.times):
        for entity in layout.entities():
            if not layout.present(entity, ti):
                continue
            placement = layout.placement(entity, ti)
            status = attributes.status_at(entity, time)
            scene.points.append(
                ScenePoint(
                    entity=entity,
                    t_index=ti,
                    time=time,
                    x=xs[ti],
                    y=placement.y,
                    status=status,
                    color=status_colors[status],
                    level=placement.level,
                    compartment=placement.compartment,
                    agg_weight=placement.agg_weight,
                )
            )
    for entity in layout.entities():
        first, last = layout.span(entity)
        identity = attributes.identity(entity) or "unknown"
        color = identity_colors[identity]
        r = config.point_radius
        scene.markers.append(
            SceneMarker(entity, "first", first, xs[first] - 2.4 * r, layout.y(entity, first), color)
        )
        scene.markers.append(
            SceneMarker(entity, "last", last, xs[last] + 2.4 * r, layout.y(entity, last), color)
        )
    for block in layout.blocks:
        scene.blocks.append(
            SceneBlock(
                t_index=block.t_index,
                kind=block.kind,
                x0=xs[block.t_index] - config.block_width / 2,
                y0=block.y0,
                x1=xs[block.t_index] + config.block_width / 2,
                y1=block.y1,
                members=block.members,
            )
        )
    for ti in range(len(layout.times)):
        here = [b for b in layout.blocks if b.t_index == ti]
        primary = next((b for b in here if b.kind == "primary"), None)
        if primary is None:
            continue
        for other in here:
            if other.kind == "top-secondary":
                scene.connectors.append(SceneConnector(ti, xs[ti], other.y1, primary.y0))
            elif other.kind == "bottom-secondary":
                scene.connectors.append(SceneConnector(ti, xs[ti], primary.y1, other.y0))
    ys: list[float] = [0.0]
    for spots in layout.placements.values():
        ys.extend(p.y for p in spots.values())
    for block in layout.blocks:
        ys.extend((block.y0, block.y1))
    for run in layout.idle_runs:
        ys.append(run.level_y)
    scene.y_min = min(ys)
    scene.y_max = max(ys)
    scene.width = xs[-1] if xs else 0.0
    label_y = scene.y_max + 28.0
    annotation_y = scene.y_min - 22.0
    for ti, time in enumerate(layout.times):
        scene.labels.append(SceneLabel("time", ti, xs[ti], label_y, time))
        if time in scene.annotations:
            scene.labels.append(
                SceneLabel("annotation", ti, xs[ti], annotation_y, scene.annotations[time])
            )
    scene.y_max = label_y
    scene.y_min = annotation_y if scene.annotations else scene.y_min
    for ti, snapshot in enumerate(layout.snapshots):
        scene.affinities.append(build_affinity_view(snapshot, attributes, config, ti))
    scene.quality = compute_report(layout)
    scene.lifespans = build_lifespan_index(layout.snapshots)
    return scene


def _normalize(
    raw: Mapping[str, tuple[float, float]], width: float, height: float, margin: float
) -> dict[str, tuple[float, float]]:
    """Min-max scale positions into the view rectangle, rank order preserved."""
    out: dict[str, tuple[float, float]] = {}
    xs = [p[0] for p in raw.values()]
    ys = [p[1] for p in raw.values()]
    x_span = max(xs) - min(xs)
    y_span = max(ys) - min(ys)
    for entity, (px, py) in raw.items():
        if x_span == 0:
            nx = width / 2
        else:
            nx = margin + (px - min(xs)) / x_span * (width - 2 * margin)
        if y_span == 0:
            ny = height / 2
        else:
            ny = margin + (py - min(ys)) / y_span * (height - 2 * margin)
        out[entity] = (nx, ny)
    return out


def _force_positions(
    nodes: Sequence[str],
    edges: Sequence[tuple[str, str, float]],
    seed_token: str,
) -> dict[str, tuple[float, float]]:
    """Deterministic seeded force-directed positions in the unit square."""
    rng = random.Random(seed_token)
    n = len(nodes)
    pos: dict[str, list[float]] = {}
    for k, node in enumerate(nodes):
        angle = 2 * math.pi * k / max(n, 1) + rng.uniform(-0.15, 0.15)
        radius = 0.35 + rng.uniform(0.0, 0.08)
        pos[node] = [0.5 + radius * math.cos(angle), 0.5 + radius * math.sin(angle)]
    if n <= 1:
        return {node: (p[0], p[1]) for node, p in pos.items()}
    k_const = math.sqrt(1.0 / n)
    temperature = 0.12
    for _ in range(120):
        disp = {node: [0.0, 0.0] for node in nodes}
        for i, a in enumerate(nodes):
            for b in nodes[i + 1 :]:
                dx = pos[a][0] - pos[b][0]
                dy = pos[a][1] - pos[b][1]
                dist = math.hypot(dx, dy) or 1e-9
                force = k_const * k_const / dist
                disp[a][0] += dx / dist * force
                disp[a][1] += dy / dist * force
                disp[b][0] -= dx / dist * force
                disp[b][1] -= dy / dist * force
        for a, b, weight in edges:
            dx = pos[a][0] - pos[b][0]
            dy = pos[a][1] - pos[b][1]
            dist = math.hypot(dx, dy) or 1e-9
            force = dist * dist / k_const * math.log1p(weight)
            disp[a][0] -= dx / dist * force
            disp[a][1] -= dy / dist * force
            disp[b][0] += dx / dist * force
            disp[b][1] += dy / dist * force
        for node in nodes:
            dx, dy = disp[node]
            magnitude = math.hypot(dx, dy) or 1e-9
            step = min(magnitude, temperature)
            pos[node][0] += dx / magnitude * step
            pos[node][1] += dy / magnitude * step
        temperature *= 0.97
    return {node: (p[0], p[1]) for node, p in pos.items()}


def build_affinity_view(
    snapshot: EgoSnapshot,
    attributes: AttributeTable | None,
    config: ChartConfig,
    t_index: int = 0,
) -> AffinityView:
    """Position one timestamp's entities inside the expanded-block rectangle.

    Coordinates mode min-max normalizes the contextual coordinates; node-link
    mode runs a seeded force-directed pass over the snapshot subgraph and
    carries its edge list. The ego is always flagged for emphasized size.
    """
    attributes = attributes or AttributeTable.empty()
    mode = config.affinity_mode
    if mode is None:
        mode = "coordinates" if attributes.has_any_context else "node-link"
    nodes = snapshot.present_ids()
    size = config.affinity_size
    margin = 18.0
    if mode == "coordinates":
        raw: dict[str, tuple[float, float]] = {}
        for entity in nodes:
            position = attributes.context_at(entity, snapshot.time)
            if position is None:
                raise DataError(
                    f"entity {entity!r} has no context coordinates at {snapshot.time!r}"
                )
            raw[entity] = position
        positions = _normalize(raw, size, size, margin) if raw else {}
        edges: tuple[tuple[str, str, float], ...] = ()
    else:
        unit = _force_positions(nodes, snapshot.edges, f"{config.seed}:{snapshot.time}")
        positions = _normalize(unit, size, size, margin) if unit else {}
        edges = snapshot.edges
    return AffinityView(
        time=snapshot.time,
        t_index=t_index,
        mode=mode,
        ego_emphasis=config.ego_emphasis,
        width=size,
        height=size,
        positions=positions,
        edges=edges,
    )


def _path_d(points: Sequence[tuple[str, float, float]], ox: float, oy: float) -> str:
    """Path data: cubic segments with horizontal tangents between column
    points, straight lines through circumvent detours."""
    kind0, x0, y0 = points[0]
    parts = [f"M {svg.fmt(x0 + ox)} {svg.fmt(y0 + oy)}"]
    previous = (kind0, x0 + ox, y0 + oy)
    for kind, x, y in points[1:]:
        px, py = previous[1], previous[2]
        cx, cy = x + ox, y + oy
        if kind == NODE and previous[0] == NODE:
            mid = (px + cx) / 2
            parts.append(
                f"C {svg.fmt(mid)} {svg.fmt(py)} {svg.fmt(mid)} {svg.fmt(cy)} "
                f"{svg.fmt(cx)} {svg.fmt(cy)}"
            )
        else:
            parts.append(f"L {svg.fmt(cx)} {svg.fmt(cy)}")
        previous = (kind, cx, cy)
    return " ".join(parts)


MARGIN_X = 60.0
MARGIN_Y = 36.0


def export_svg(scene: RenderScene) -> str:
    """Serialize the scene as standalone SVG.

    Element order is blocks, connectors, lines, points, triangles, labels;
    output is byte-deterministic for identical scenes.
    """
    ox = MARGIN_X
    oy = MARGIN_Y - scene.y_min
    width = scene.width + 2 * MARGIN_X
    height = (scene.y_max - scene.y_min) + 2 * MARGIN_Y
    blocks = [
        svg.tag(
            "rect",
            {
                "class": f"block {b.kind}",
                "x": b.x0 + ox,
                "y": b.y0 + oy,
                "width": b.x1 - b.x0,
                "height": b.y1 - b.y0,
                "rx": 6.0,
                "fill": "#eceff4",
                "stroke": "#b9c4ca",
                "stroke-width": 1.0,
            },
        )
        for b in scene.blocks
    ]
    connectors = [
        svg.tag(
            "rect",
            {
                "class": "connector",
                "x": c.x + ox - 2.0,
                "y": c.y0 + oy,
                "width": 4.0,
                "height": c.y1 - c.y0,
                "fill": "#d4dade",
            },
        )
        for c in scene.connectors
    ]
    lines = [
        svg.tag(
            "path",
            {
                "class": "entity-line",
                "data-entity": p.entity,
                "d": _path_d(p.points, ox, oy),
                "fill": "none",
                "stroke": p.color,
                "stroke-width": p.width,
                "stroke-linecap": "round",
            },
        )
        for p in scene.paths
    ]
    points = [
        svg.tag(
            "circle",
            {
                "class": "presence-point",
                "data-entity": p.entity,
                "cx": p.x + ox,
                "cy": p.y + oy,
                "r": scene.point_radius,
                "fill": p.color,
                "stroke": "#ffffff",
                "stroke-width": 0.8,
            },
        )
        for p in scene.points
    ]
    triangles = []
    r = scene.point_radius
    for m in scene.markers:
        x, y = m.x + ox, m.y + oy
        if m.kind == "first":
            shape = f"{svg.fmt(x - r)},{svg.fmt(y - r)} {svg.fmt(x - r)},{svg.fmt(y + r)} {svg.fmt(x + r)},{svg.fmt(y)}"
        else:
            shape = f"{svg.fmt(x + r)},{svg.fmt(y - r)} {svg.fmt(x + r)},{svg.fmt(y + r)} {svg.fmt(x - r)},{svg.fmt(y)}"
        triangles.append(
            svg.tag(
                "polygon",
                {"class": f"marker {m.kind}", "points": shape, "fill": m.color},
            )
        )
    labels = [
        svg.tag(
            "text",
            {
                "class": f"label {label.kind}",
                "x": label.x + ox,
                "y": label.y + oy,
                "text-anchor": "middle",
                "font-family": "sans-serif",
                "font-size": 12.0,
                "fill": "#444444",
            },
            text=label.text,
        )
        for label in scene.labels
    ]
    children = [
        svg.group("blocks", blocks),
        svg.group("connectors", connectors),
        svg.group("lines", lines),
        svg.group("points", points),
        svg.group("triangles", triangles),
        svg.group("labels", labels),
    ]
    return svg.document(width, height, children)


def _r(value: float) -> float:
    rounded = round(value, 4)
    return 0.0 if rounded == 0 else rounded


def scene_document(scene: RenderScene) -> dict:
    """The scene as plain JSON types; the single contract the viewer consumes."""
    quality = scene.quality.as_dict() if scene.quality else {}
    doc = {
        "schemaVersion": SCHEMA_VERSION,
        "ego": scene.ego,
        "focus": scene.focus,
        "minGap": _r(scene.min_gap),
        "blockWidth": _r(scene.block_width),
        "pointRadius": _r(scene.point_radius),
        "bounds": {
            "yMin": _r(scene.y_min),
            "yMax": _r(scene.y_max),
            "width": _r(scene.width),
        },
        "times": [
            {
                "label": time,
                "x": _r(scene.xs[ti]),
                "annotation": scene.annotations.get(time),
            }
            for ti, time in enumerate(scene.times)
        ],
        "entities": [
            {
                "id": p.entity,
                "name": p.name,
                "identity": p.identity,
                "color": p.color,
                "strokeWidth": _r(p.width),
                "isEgo": p.entity == scene.ego,
                "path": [
                    {"kind": kind, "x": _r(x), "y": _r(y)} for kind, x, y in p.points
                ],
                "lifespan": _lifespan_doc(scene.lifespans.get(p.entity)),
            }
            for p in sorted(scene.paths, key=lambda p: p.entity)
        ],
        "points": [
            {
                "entity": p.entity,
                "t": p.t_index,
                "time": p.time,
                "x": _r(p.x),
                "y": _r(p.y),
                "status": p.status,
                "color": p.color,
                "level": p.level,
                "compartment": p.compartment,
                "aggWeight": _r(p.agg_weight),
            }
            for p in scene.points
        ],
        "markers": [
            {
                "entity": m.entity,
                "kind": m.kind,
                "t": m.t_index,
                "x": _r(m.x),
                "y": _r(m.y),
                "color": m.color,
            }
            for m in scene.markers
        ],
        "blocks": [
            {
                "t": b.t_index,
                "kind": b.kind,
                "x0": _r(b.x0),
                "y0": _r(b.y0),
                "x1": _r(b.x1),
                "y1": _r(b.y1),
                "members": list(b.members),
            }
            for b in scene.blocks
        ],
        "connectors": [
            {"t": c.t_index, "x": _r(c.x), "y0": _r(c.y0), "y1": _r(c.y1)}
            for c in scene.connectors
        ],
        "labels": [
            {
                "kind": label.kind,
                "t": label.t_index,
                "x": _r(label.x),
                "y": _r(label.y),
                "text": label.text,
            }
            for label in scene.labels
        ],
        "affinity": [
            {
                "time": view.time,
                "t": view.t_index,
                "mode": view.mode,
                "egoEmphasis": _r(view.ego_emphasis),
                "width": _r(view.width),
                "height": _r(view.height),
                "positions": {
                    entity: [_r(x), _r(y)]
                    for entity, (x, y) in sorted(view.positions.items())
                },
                "edges": [[a, b, _r(w)] for a, b, w in view.edges],
            }
            for view in scene.affinities
        ],
        "quality": quality,
    }
    return doc


def _lifespan_doc(lifespan: Lifespan | None) -> dict | None:
    if lifespan is None:
        return None
    return {
        "firstTime": lifespan.first_time,
        "lastTime": lifespan.last_time,
        "firstIndex": lifespan.first_index,
        "lastIndex": lifespan.last_index,
        "presenceCount": lifespan.presence_count,
        "egoCrossings": lifespan.ego_crossing_count,
        "span": lifespan.span,
    }


def export_scene(scene: RenderScene) -> str:
    """Serialize the scene document as UTF-8 JSON, byte-deterministic."""
    return json.dumps(scene_document(scene), indent=2, sort_keys=True) + "\n"


def parse_scene(text: str) -> dict:
    """Parse a scene document, checking the schema version."""
    doc = json.loads(text)
    if doc.get("schemaVersion") != SCHEMA_VERSION:
        raise DataError(
            f"unsupported scene schema version {doc.get('schemaVersion')!r}"
        )
    return doc
