"""Compound nested layout: ontology compartments with member grids inside.

Compartments are arranged by the flow layout over the compartment-quotient
graph; members sit in a per-compartment grid with node area scaling with
statement count (square-root side scaling, clamped), so heavily evidenced
concepts read as large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..search import NestedProjection
from .flow import Spacing, adaptive_spacing, flow_layout
from .routing import Box, Route, layout_route

__all__ = ["NestedLayoutResult", "nested_layout", "member_side"]

Pair = tuple[str, str]

MIN_SIDE = 24
MAX_SIDE = 160
SIZE_SCALE = 12.0
MEMBER_GAP = 20
COMPARTMENT_PADDING = 20
TITLE_STRIP = 20


def member_side(statement_count: int, scale: float = SIZE_SCALE) -> int:
    """Side length for a member node: sqrt-of-count scaling, clamped."""
    side = scale * math.sqrt(max(statement_count, 0))
    return int(min(MAX_SIDE, max(MIN_SIDE, round(side))))


@dataclass(frozen=True)
class NestedLayoutResult:
    compartment_boxes: dict[str, Box]
    node_boxes: dict[str, Box]
    edge_routes: dict[Pair, Route] | None
    suppressed_edge_count: int | None
    canvas: Box

    @property
    def suppressed(self) -> bool:
        return self.edge_routes is None

    def to_dict(self) -> dict:
        out: dict = {
            "compartments": {c: b.to_dict() for c, b in self.compartment_boxes.items()},
            "nodes": {n: b.to_dict() for n, b in self.node_boxes.items()},
            "canvas": self.canvas.to_dict(),
        }
        if self.suppressed:
            out["edges"] = "SUPPRESSED"
            out["suppressed_edge_count"] = self.suppressed_edge_count
        else:
            out["edges"] = [
                {"subj": s, "obj": o, **route.to_dict()}
                for (s, o), route in (self.edge_routes or {}).items()
            ]
        return out


def nested_layout(
    projection: NestedProjection,
    grid_step: int = 10,
    turn_penalty: int = 2,
    size_scale: float = SIZE_SCALE,
) -> NestedLayoutResult:
    """Two-level layout of a nested search projection."""
    if not projection.compartments:
        return NestedLayoutResult({}, {}, None if projection.suppressed else {}, projection.suppressed_edge_count, Box(0, 0, 0, 0))

    member_rel: dict[str, tuple[str, Box]] = {}  # concept -> (compartment, relative box)
    comp_sizes: dict[str, tuple[int, int]] = {}
    for parent in sorted(projection.compartments):
        members = sorted(projection.compartments[parent])
        sides = {concept: member_side(count, size_scale) for concept, count in members}
        largest = max(sides.values())
        cell = largest + MEMBER_GAP
        cols = math.ceil(math.sqrt(len(members)))
        rows = math.ceil(len(members) / cols)
        width = 2 * COMPARTMENT_PADDING + cols * cell - MEMBER_GAP
        height = TITLE_STRIP + 2 * COMPARTMENT_PADDING + rows * cell - MEMBER_GAP
        comp_sizes[parent] = (width, height)
        for idx, (concept, _) in enumerate(members):
            row, col = divmod(idx, cols)
            side = sides[concept]
            cx = COMPARTMENT_PADDING + col * cell + largest / 2
            cy = TITLE_STRIP + COMPARTMENT_PADDING + row * cell + largest / 2
            member_rel[concept] = (
                parent,
                Box(round(cx - side / 2), round(cy - side / 2), side, side),
            )

    compartment_of = {concept: parent for concept, (parent, _) in member_rel.items()}
    quotient_edges: list[Pair] = []
    seen: set[Pair] = set()
    for edge in projection.edges or []:
        ca = compartment_of.get(edge.subject)
        cb = compartment_of.get(edge.object)
        if ca is None or cb is None or ca == cb:
            continue
        if (ca, cb) not in seen:
            seen.add((ca, cb))
            quotient_edges.append((ca, cb))

    comp_layout = flow_layout(
        comp_sizes,
        quotient_edges,
        spacing=Spacing(adaptive_spacing(len(comp_sizes)).layer_gap, 40),
        grid_step=grid_step,
        route_edges=False,
    )
    compartment_boxes = comp_layout.node_boxes

    node_boxes: dict[str, Box] = {}
    for concept, (parent, rel) in member_rel.items():
        origin = compartment_boxes[parent]
        node_boxes[concept] = Box(origin.x + rel.x, origin.y + rel.y, rel.width, rel.height)

    routes: dict[Pair, Route] | None
    if projection.suppressed:
        routes = None
    else:
        routes = {}
        obstacles_all = node_boxes
        for edge in projection.edges or []:
            pair = (edge.subject, edge.object)
            if pair[0] not in node_boxes or pair[1] not in node_boxes:
                continue
            obstacles = [b for n, b in obstacles_all.items() if n not in pair]
            routes[pair] = layout_route(
                node_boxes[pair[0]],
                node_boxes[pair[1]],
                obstacles,
                grid_step=grid_step,
                turn_penalty=turn_penalty,
            )

    xs = [b.x for b in compartment_boxes.values()]
    ys = [b.y for b in compartment_boxes.values()]
    xe = [b.right for b in compartment_boxes.values()]
    ye = [b.bottom for b in compartment_boxes.values()]
    for route in (routes or {}).values():
        xs += [p[0] for p in route.points]
        ys += [p[1] for p in route.points]
        xe += [p[0] for p in route.points]
        ye += [p[1] for p in route.points]
    canvas = Box(min(xs) - 20, min(ys) - 20, max(xe) - min(xs) + 40, max(ye) - min(ys) + 40)
    return NestedLayoutResult(
        compartment_boxes=compartment_boxes,
        node_boxes=node_boxes,
        edge_routes=routes,
        suppressed_edge_count=projection.suppressed_edge_count,
        canvas=canvas,
    )
