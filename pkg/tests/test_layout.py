"""Layout geometry invariants and the routing optimality oracle."""

from __future__ import annotations

import random

import pytest

from cagkit.aggregate import aggregate_edge
from cagkit.errors import DegenerateBoxes
from cagkit.layout import (
    Box,
    adaptive_spacing,
    astar,
    build_grid,
    dijkstra_cost,
    flow_layout,
    member_side,
    nested_layout,
    route_edge,
    size_for_label,
)
from cagkit.layout.flow import build_layers, break_cycles, crossing_count, sweep_orders
from cagkit.model import AggregatePolarity
from cagkit.search import NestedProjection


def random_dag(rng: random.Random, n: int, density: float = 0.12):
    names = [f"n{i:03d}" for i in range(n)]
    nodes = {name: size_for_label(name) for name in names}
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                edges.append((names[i], names[j]))
    return nodes, edges


def boxes_disjoint(boxes):
    items = list(boxes.values())
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i].overlaps_strict(items[j]):
                return False
    return True


def segments_axis_aligned(route):
    return all(
        ax == bx or ay == by for (ax, ay), (bx, by) in zip(route.points, route.points[1:])
    )


def segment_hits_box(a, b, box: Box) -> bool:
    """Does the axis-aligned segment pass through the box's strict interior?"""
    (ax, ay), (bx, by) = a, b
    if ax == bx:
        lo, hi = sorted((ay, by))
        return box.x < ax < box.right and lo < box.bottom and hi > box.y and (
            max(lo, box.y) < min(hi, box.bottom)
        )
    lo, hi = sorted((ax, bx))
    return box.y < ay < box.bottom and max(lo, box.x) < min(hi, box.right)


# ------------------------------------------------------------ flow layout


def test_chain_layers_left_to_right():
    nodes = {c: (80, 40) for c in "abc"}
    layout = flow_layout(nodes, [("a", "b"), ("b", "c")])
    xs = [layout.node_boxes[c].x for c in "abc"]
    assert xs[0] < xs[1] < xs[2]
    assert layout.node_boxes["a"].right <= layout.node_boxes["b"].x


def test_single_node_layout():
    layout = flow_layout({"solo": (100, 40)}, [])
    assert set(layout.node_boxes) == {"solo"}
    assert layout.edge_routes == {}


def test_empty_graph_is_empty_result_not_error():
    layout = flow_layout({}, [])
    assert layout.node_boxes == {}
    assert layout.canvas == Box(0, 0, 0, 0)


def test_random_dags_satisfy_invariants():
    rng = random.Random(2024)
    for trial in range(12):
        n = rng.randint(5, 40)
        nodes, edges = random_dag(rng, n)
        layout = flow_layout(nodes, edges)
        assert boxes_disjoint(layout.node_boxes), f"overlap in trial {trial}"
        for (a, b), route in layout.edge_routes.items():
            if (a, b) not in layout.feedback_edges:
                assert (
                    layout.node_boxes[a].right <= layout.node_boxes[b].x
                ), f"flow violated {a}->{b}"
            if not route.clipped:
                assert segments_axis_aligned(route)
                for other, box in layout.node_boxes.items():
                    if other in (a, b):
                        continue
                    for p, q in zip(route.points, route.points[1:]):
                        assert not segment_hits_box(p, q, box), (
                            f"route {a}->{b} cuts {other} in trial {trial}"
                        )


def test_layout_deterministic():
    rng = random.Random(7)
    nodes, edges = random_dag(rng, 25)
    a = flow_layout(nodes, edges)
    b = flow_layout(nodes, edges)
    assert a == b


def test_cyclic_input_breaks_feedback_edges():
    nodes = {c: (80, 40) for c in "abc"}
    layout = flow_layout(nodes, [("a", "b"), ("b", "c"), ("c", "a")])
    assert len(layout.feedback_edges) == 1
    assert boxes_disjoint(layout.node_boxes)


def test_crossing_sweeps_never_hurt():
    rng = random.Random(99)
    for _ in range(10):
        names = [f"n{i}" for i in range(rng.randint(8, 30))]
        edges = []
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                if rng.random() < 0.15:
                    edges.append((a, b))
        oriented, _ = break_cycles(names, edges)
        unswept = build_layers(names, oriented)
        before = crossing_count(unswept)
        swept = build_layers(names, oriented)
        sweep_orders(swept, 4)
        after = crossing_count(swept)
        assert after <= before


# ------------------------------------------------------- adaptive spacing


def test_spacing_constants():
    assert adaptive_spacing(10) == adaptive_spacing(50)
    assert adaptive_spacing(10).layer_gap == 120
    assert adaptive_spacing(10).node_gap == 40
    assert adaptive_spacing(51).layer_gap == 90
    assert adaptive_spacing(51).node_gap == 30


def test_spacing_monotone_over_range():
    previous = adaptive_spacing(0)
    for n in range(1, 501):
        current = adaptive_spacing(n)
        assert current.layer_gap <= previous.layer_gap
        assert current.node_gap <= previous.node_gap
        previous = current


# ------------------------------------------------------------- edge routing


def test_straight_route_no_obstacles():
    route = route_edge(Box(0, 0, 100, 40), Box(300, 0, 100, 40), [])
    assert route.points == ((100, 20), (300, 20))
    assert not route.clipped


def test_route_detours_around_obstacle():
    source, target = Box(0, 0, 100, 40), Box(400, 0, 100, 40)
    obstacle = Box(200, -60, 60, 160)
    route = route_edge(source, target, [obstacle])
    assert not route.clipped
    assert segments_axis_aligned(route)
    inflated = obstacle.inflated(10)
    for x, y in route.points:
        assert not inflated.contains_strict(x, y)
    for p, q in zip(route.points, route.points[1:]):
        assert not segment_hits_box(p, q, obstacle)


def test_degenerate_boxes_rejected():
    with pytest.raises(DegenerateBoxes):
        route_edge(Box(0, 0, 0, 40), Box(100, 0, 50, 40), [])


def test_clipped_fallback_when_walled_off():
    source, target = Box(0, 0, 60, 40), Box(400, 0, 60, 40)
    wall = Box(200, -380, 20, 800)  # taller than the search bounds
    route = route_edge(source, target, [wall])
    assert route.clipped
    assert route.points == ((60, 20), (400, 20))


def test_astar_equals_dijkstra_on_random_fields():
    rng = random.Random(4242)
    mismatches = 0
    for trial in range(60):
        source = Box(0, rng.randrange(-40, 40, 10), 80, 40)
        target = Box(rng.randrange(360, 520, 10), rng.randrange(-40, 40, 10), 80, 40)
        obstacles = []
        for _ in range(rng.randint(3, 20)):
            w = rng.randrange(20, 90, 10)
            h = rng.randrange(20, 90, 10)
            x = rng.randrange(100, 340, 10)
            y = rng.randrange(-150, 150, 10)
            box = Box(x, y, w, h)
            if not (box.overlaps_strict(source) or box.overlaps_strict(target)):
                obstacles.append(box)
        grid = build_grid(source, target, obstacles)
        found = astar(grid)
        oracle = dijkstra_cost(grid)
        if found is None:
            assert oracle is None
            continue
        assert found[1] == oracle, f"trial {trial}"
    # guard against the loop silently skipping everything
    assert mismatches == 0


# ------------------------------------------------------------ nested layout


def fake_edge(subject, obj):
    return aggregate_edge(subject, obj, [])


def test_member_side_scaling():
    assert member_side(4) == 24
    assert member_side(0) == 24
    assert member_side(1000) == 160  # clamped
    small, big = member_side(4), member_side(40)
    assert big * big >= 5 * small * small


def test_nested_two_compartments():
    projection = NestedProjection(
        compartments={
            "wm/agriculture": [("wm/agriculture/crops", 4), ("wm/agriculture/livestock", 9), ("wm/agriculture/pests", 1)],
            "wm/health": [("wm/health/disease", 16), ("wm/health/mortality", 4), ("wm/health/clinics", 2)],
        },
        edges=[fake_edge("wm/agriculture/pests", "wm/health/disease")],
    )
    layout = nested_layout(projection)
    assert len(layout.compartment_boxes) == 2
    assert len(layout.node_boxes) == 6
    a, b = layout.compartment_boxes.values()
    assert not a.overlaps_strict(b)
    for concept, box in layout.node_boxes.items():
        parent = concept.rsplit("/", 1)[0]
        comp = layout.compartment_boxes[parent]
        assert comp.x < box.x and box.right < comp.right
        assert comp.y < box.y and box.bottom < comp.bottom
    assert not layout.suppressed
    assert len(layout.edge_routes) == 1


def test_nested_node_area_tracks_statement_count():
    projection = NestedProjection(
        compartments={
            "wm/env": [("wm/env/drought", 40), ("wm/env/flood", 4), ("wm/env/rain", 4)],
        },
        edges=[],
    )
    layout = nested_layout(projection)
    drought = layout.node_boxes["wm/env/drought"]
    flood = layout.node_boxes["wm/env/flood"]
    assert drought.width * drought.height >= 5 * flood.width * flood.height


def test_nested_suppressed_skips_routing():
    projection = NestedProjection(
        compartments={"wm/env": [("wm/env/drought", 3)]},
        edges=None,
        suppressed_edge_count=2001,
    )
    layout = nested_layout(projection)
    assert layout.suppressed
    assert layout.edge_routes is None
    assert layout.suppressed_edge_count == 2001
    assert layout.to_dict()["edges"] == "SUPPRESSED"
