"""Layered left-to-right flow layout.

Staged pipeline: greedy feedback-arc breaking for cyclic inputs, longest-path
layering, barycenter crossing reduction with virtual nodes on long edges,
then y assignment that pulls each node toward the mean of its neighbors
while preserving order and gaps. All geometry is integral and deterministic
for a given input ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .routing import Box, Route, layout_route

__all__ = [
    "Spacing",
    "LayoutResult",
    "adaptive_spacing",
    "flow_layout",
    "size_for_label",
    "LayerState",
    "build_layers",
    "sweep_orders",
    "crossing_count",
]

Pair = tuple[str, str]

BASE_LAYER_GAP = 120
BASE_NODE_GAP = 40
LARGE_GRAPH_THRESHOLD = 50
REDUCTION_FACTOR = 0.25
MARGIN = 20


@dataclass(frozen=True)
class Spacing:
    layer_gap: int
    node_gap: int


def adaptive_spacing(node_count: int) -> Spacing:
    """Base gaps up to the threshold, 25% tighter beyond it."""
    if node_count < 0:
        raise ValueError("node_count must be >= 0")
    if node_count <= LARGE_GRAPH_THRESHOLD:
        return Spacing(BASE_LAYER_GAP, BASE_NODE_GAP)
    return Spacing(
        int(BASE_LAYER_GAP * (1 - REDUCTION_FACTOR)),
        int(BASE_NODE_GAP * (1 - REDUCTION_FACTOR)),
    )


def size_for_label(label: str) -> tuple[int, int]:
    """Default node box for a display label (8px per char plus padding)."""
    width = min(240, max(60, 8 * len(label) + 24))
    return (width + 9) // 10 * 10, 40


@dataclass(frozen=True)
class LayoutResult:
    node_boxes: dict[str, Box]
    edge_routes: dict[Pair, Route]
    canvas: Box
    feedback_edges: frozenset[Pair] = frozenset()

    def to_dict(self) -> dict:
        return {
            "nodes": {n: b.to_dict() for n, b in self.node_boxes.items()},
            "edges": [
                {"subj": s, "obj": o, **route.to_dict()}
                for (s, o), route in self.edge_routes.items()
            ],
            "canvas": self.canvas.to_dict(),
        }


# ------------------------------------------------------------ cycle breaking


def break_cycles(nodes: Sequence[str], edges: Sequence[Pair]) -> tuple[list[Pair], set[Pair]]:
    """Greedy feedback-arc heuristic (Eades et al. style).

    Returns the edge list with feedback edges reversed, plus the set of
    original pairs that were reversed.
    """
    out_adj: dict[str, set[str]] = {n: set() for n in nodes}
    in_adj: dict[str, set[str]] = {n: set() for n in nodes}
    for a, b in edges:
        if a != b:
            out_adj[a].add(b)
            in_adj[b].add(a)
    left: list[str] = []
    right: list[str] = []
    remaining = list(nodes)
    present = set(remaining)

    def detach(node: str) -> None:
        present.discard(node)
        for other in out_adj[node]:
            in_adj[other].discard(node)
        for other in in_adj[node]:
            out_adj[other].discard(node)

    while present:
        progressed = True
        while progressed:
            progressed = False
            for node in [n for n in remaining if n in present]:
                if not (out_adj[node] & present):
                    right.append(node)
                    detach(node)
                    progressed = True
            for node in [n for n in remaining if n in present]:
                if not (in_adj[node] & present):
                    left.append(node)
                    detach(node)
                    progressed = True
        if present:
            pick = max(
                (n for n in remaining if n in present),
                key=lambda n: (len(out_adj[n] & present) - len(in_adj[n] & present), n),
            )
            left.append(pick)
            detach(pick)
    sequence = left + list(reversed(right))
    position = {n: i for i, n in enumerate(sequence)}
    oriented: list[Pair] = []
    reversed_pairs: set[Pair] = set()
    for a, b in edges:
        if a == b:
            continue
        if position[a] < position[b]:
            oriented.append((a, b))
        else:
            oriented.append((b, a))
            reversed_pairs.add((a, b))
    return oriented, reversed_pairs


# ----------------------------------------------------------------- layering


@dataclass
class LayerState:
    """Intermediate layering: real nodes plus virtual nodes on long edges."""

    layer_of: dict[str, int]
    orders: list[list[str]]  # per layer, includes virtual node names
    segments: list[tuple[str, str]]  # unit-length segments between adjacent layers
    virtual: set[str] = field(default_factory=set)


def build_layers(nodes: Sequence[str], dag_edges: Sequence[Pair]) -> LayerState:
    """Longest-path layering with virtual chains for multi-layer edges."""
    layer_of: dict[str, int] = {}
    out_adj: dict[str, list[str]] = {n: [] for n in nodes}
    indeg: dict[str, int] = {n: 0 for n in nodes}
    for a, b in dag_edges:
        out_adj[a].append(b)
        indeg[b] += 1
    ready = [n for n in nodes if indeg[n] == 0]
    order: list[str] = []
    queue = list(ready)
    seen_indeg = dict(indeg)
    while queue:
        node = queue.pop(0)
        order.append(node)
        for nxt in out_adj[node]:
            seen_indeg[nxt] -= 1
            if seen_indeg[nxt] == 0:
                queue.append(nxt)
    for n in nodes:
        layer_of.setdefault(n, 0)
    for node in order:
        for nxt in out_adj[node]:
            layer_of[nxt] = max(layer_of[nxt], layer_of[node] + 1)

    n_layers = max(layer_of.values(), default=-1) + 1
    orders: list[list[str]] = [[] for _ in range(n_layers)]
    for node in nodes:  # input order is the initial order
        orders[layer_of[node]].append(node)

    segments: list[tuple[str, str]] = []
    virtual: set[str] = set()
    for i, (a, b) in enumerate(dag_edges):
        la, lb = layer_of[a], layer_of[b]
        if lb - la == 1:
            segments.append((a, b))
            continue
        prev = a
        for layer in range(la + 1, lb):
            v = f"__v{i}_{layer}"
            virtual.add(v)
            layer_of[v] = layer
            orders[layer].append(v)
            segments.append((prev, v))
            prev = v
        segments.append((prev, b))
    return LayerState(layer_of=layer_of, orders=orders, segments=segments, virtual=virtual)


def crossing_count(state: LayerState) -> int:
    """Pairwise segment crossings between every adjacent layer pair."""
    position = {
        node: idx for layer in state.orders for idx, node in enumerate(layer)
    }
    by_layer: dict[int, list[tuple[int, int]]] = {}
    for a, b in state.segments:
        by_layer.setdefault(state.layer_of[a], []).append((position[a], position[b]))
    total = 0
    for spans in by_layer.values():
        for i in range(len(spans)):
            for j in range(i + 1, len(spans)):
                (a1, b1), (a2, b2) = spans[i], spans[j]
                if (a1 - a2) * (b1 - b2) < 0:
                    total += 1
    return total


def sweep_orders(state: LayerState, sweeps: int = 4) -> None:
    """Barycenter ordering sweeps, alternating downstream and upstream."""
    down_neighbors: dict[str, list[str]] = {}
    up_neighbors: dict[str, list[str]] = {}
    for a, b in state.segments:
        down_neighbors.setdefault(b, []).append(a)
        up_neighbors.setdefault(a, []).append(b)

    def reorder(layer_idx: int, neighbors: dict[str, list[str]]) -> None:
        layer = state.orders[layer_idx]
        position: dict[str, int] = {}
        for other_layer in state.orders:
            for idx, node in enumerate(other_layer):
                position[node] = idx
        keyed = []
        for idx, node in enumerate(layer):
            linked = neighbors.get(node, ())
            if linked:
                bary = sum(position[n] for n in linked) / len(linked)
            else:
                bary = float(idx)
            keyed.append((bary, idx, node))
        keyed.sort(key=lambda t: (t[0], t[1]))
        state.orders[layer_idx] = [node for _, _, node in keyed]

    for sweep in range(sweeps):
        if sweep % 2 == 0:
            for layer_idx in range(1, len(state.orders)):
                reorder(layer_idx, down_neighbors)
        else:
            for layer_idx in range(len(state.orders) - 2, -1, -1):
                reorder(layer_idx, up_neighbors)


# -------------------------------------------------------------- coordinates


def _assign_y(
    state: LayerState,
    heights: Mapping[str, int],
    node_gap: int,
    rounds: int = 3,
) -> dict[str, float]:
    down_neighbors: dict[str, list[str]] = {}
    up_neighbors: dict[str, list[str]] = {}
    for a, b in state.segments:
        down_neighbors.setdefault(b, []).append(a)
        up_neighbors.setdefault(a, []).append(b)

    centers: dict[str, float] = {}
    for layer in state.orders:
        cursor = 0.0
        for node in layer:
            h = heights[node]
            centers[node] = cursor + h / 2
            cursor += h + node_gap

    def relax(layer: list[str], neighbors: dict[str, list[str]]) -> None:
        desired = []
        for node in layer:
            linked = neighbors.get(node, ())
            if linked:
                desired.append(sum(centers[n] for n in linked) / len(linked))
            else:
                desired.append(centers[node])
        placed = list(desired)
        for i in range(1, len(layer)):
            min_gap = (heights[layer[i - 1]] + heights[layer[i]]) / 2 + node_gap
            placed[i] = max(placed[i], placed[i - 1] + min_gap)
        if placed:
            drift = (sum(desired) - sum(placed)) / len(placed)
            placed = [p + drift for p in placed]
            for i in range(1, len(layer)):  # recentering may squeeze: re-enforce
                min_gap = (heights[layer[i - 1]] + heights[layer[i]]) / 2 + node_gap
                placed[i] = max(placed[i], placed[i - 1] + min_gap)
        for node, y in zip(layer, placed):
            centers[node] = y

    for _ in range(rounds):
        for layer in state.orders:
            relax(layer, down_neighbors)
        for layer in reversed(state.orders):
            relax(layer, up_neighbors)
    return centers


def flow_layout(
    nodes: Mapping[str, tuple[int, int]],
    edges: Iterable[Pair],
    spacing: Spacing | None = None,
    grid_step: int = 10,
    turn_penalty: int = 2,
    crossing_sweeps: int = 4,
    route_edges: bool = True,
) -> LayoutResult:
    """Arrange sized nodes left to right and route their edges.

    For acyclic inputs every edge flows strictly rightward; cyclic inputs
    get greedy feedback-arc breaking and the reversed edges are reported in
    ``feedback_edges`` (and exempt from the flow constraint).
    """
    node_list = list(nodes)
    edge_list: list[Pair] = []
    seen: set[Pair] = set()
    for pair in edges:
        if pair not in seen and pair[0] in nodes and pair[1] in nodes:
            seen.add(pair)
            edge_list.append(pair)
    if not node_list:
        return LayoutResult({}, {}, Box(0, 0, 0, 0))

    spacing = spacing or adaptive_spacing(len(node_list))
    oriented, reversed_pairs = break_cycles(node_list, edge_list)
    state = build_layers(node_list, oriented)
    sweep_orders(state, crossing_sweeps)

    heights = {n: nodes[n][1] for n in node_list}
    for v in state.virtual:
        heights[v] = 0
    centers = _assign_y(state, heights, spacing.node_gap)

    layer_x: list[int] = []
    cursor = MARGIN
    for layer in state.orders:
        layer_x.append(cursor)
        real_widths = [nodes[n][0] for n in layer if n not in state.virtual]
        cursor += (max(real_widths) if real_widths else 0) + spacing.layer_gap

    min_center = min(
        (centers[n] - heights[n] / 2 for n in node_list), default=0.0
    )
    boxes: dict[str, Box] = {}
    for node in node_list:
        width, height = nodes[node]
        x = layer_x[state.layer_of[node]]
        top = centers[node] - height / 2 - min_center + MARGIN
        boxes[node] = Box(x, round(top / grid_step) * grid_step, width, height)

    routes: dict[Pair, Route] = {}
    if route_edges:
        for a, b in edge_list:
            obstacles = [box for n, box in boxes.items() if n not in (a, b)]
            routes[(a, b)] = layout_route(
                boxes[a], boxes[b], obstacles, grid_step=grid_step, turn_penalty=turn_penalty
            )

    xs = [b.x for b in boxes.values()] + [p[0] for r in routes.values() for p in r.points]
    ys = [b.y for b in boxes.values()] + [p[1] for r in routes.values() for p in r.points]
    xe = [b.right for b in boxes.values()] + [p[0] for r in routes.values() for p in r.points]
    ye = [b.bottom for b in boxes.values()] + [p[1] for r in routes.values() for p in r.points]
    canvas = Box(
        min(xs) - MARGIN,
        min(ys) - MARGIN,
        (max(xe) - min(xs)) + 2 * MARGIN,
        (max(ye) - min(ys)) + 2 * MARGIN,
    )
    return LayoutResult(
        node_boxes=boxes,
        edge_routes=routes,
        canvas=canvas,
        feedback_edges=frozenset(reversed_pairs),
    )
