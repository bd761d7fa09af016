"""On-the-fly orthogonal edge routing over a uniform grid.

Paths are searched with A* on (point, heading) states: a step costs 1 and
every change of heading adds a fixed turn penalty, which keeps routes
orthogonal and visually calm. Node boxes are inflated by one grid cell and
their strict interiors are blocked; route points may touch an inflation
boundary but never enter it.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterator, Sequence

from ..errors import DegenerateBoxes

__all__ = ["Box", "Route", "RoutingGrid", "build_grid", "route_edge", "astar", "dijkstra_cost"]

Point = tuple[int, int]
State = tuple[int, int, int]  # x, y, heading index

DIRS: tuple[Point, ...] = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass(frozen=True)
class Box:
    x: float
    y: float
    width: float
    height: float

    @property
    def right(self) -> float:
        return self.x + self.width

    @property
    def bottom(self) -> float:
        return self.y + self.height

    @property
    def cx(self) -> float:
        return self.x + self.width / 2

    @property
    def cy(self) -> float:
        return self.y + self.height / 2

    def inflated(self, margin: float) -> "Box":
        return Box(self.x - margin, self.y - margin, self.width + 2 * margin, self.height + 2 * margin)

    def contains_strict(self, px: float, py: float) -> bool:
        return self.x < px < self.right and self.y < py < self.bottom

    def overlaps_strict(self, other: "Box") -> bool:
        return (
            self.x < other.right
            and other.x < self.right
            and self.y < other.bottom
            and other.y < self.bottom
        )

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "width": self.width, "height": self.height}


@dataclass(frozen=True)
class Route:
    points: tuple[Point, ...]
    clipped: bool = False

    def cost(self) -> float:
        return sum(
            abs(bx - ax) + abs(by - ay)
            for (ax, ay), (bx, by) in zip(self.points, self.points[1:])
        )

    def to_dict(self) -> dict:
        return {"points": [list(p) for p in self.points], "clipped": self.clipped}


def _snap_within(lo: float, hi: float, preferred: float, step: int) -> int:
    """Nearest multiple of ``step`` to ``preferred`` inside [lo, hi]."""
    candidate = round(preferred / step) * step
    low = -(-lo // step) * step  # ceil to lattice
    high = (hi // step) * step  # floor to lattice
    if low > high:
        return int(round(preferred))
    return int(min(max(candidate, low), high))


@dataclass
class RoutingGrid:
    """Search domain shared by the A* router and any oracle shortest-path."""

    start: Point
    goal: Point
    start_heading: int
    attach_source: Point
    attach_target: Point
    bounds: tuple[int, int, int, int]  # x0, y0, x1, y1 inclusive
    obstacles: list[Box]  # already inflated
    step: int
    turn_penalty: int

    def blocked(self, x: int, y: int) -> bool:
        x0, y0, x1, y1 = self.bounds
        if not (x0 <= x <= x1 and y0 <= y <= y1):
            return True
        return any(o.contains_strict(x, y) for o in self.obstacles)

    def successors(self, state: State) -> Iterator[tuple[State, int]]:
        x, y, heading = state
        for idx, (dx, dy) in enumerate(DIRS):
            nx, ny = x + dx * self.step, y + dy * self.step
            if self.blocked(nx, ny):
                continue
            cost = 1 + (self.turn_penalty if idx != heading else 0)
            yield (nx, ny, idx), cost

    def heuristic(self, state: State) -> int:
        return (abs(state[0] - self.goal[0]) + abs(state[1] - self.goal[1])) // self.step


def _attach_points(
    source: Box, target: Box, step: int
) -> tuple[Point, Point, Point, Point, int]:
    """Pick facing sides and lattice-aligned stub points for both boxes.

    Returns (attach_source, start, attach_target, goal, start_heading).
    """
    dx = target.cx - source.cx
    dy = target.cy - source.cy
    # prefer the axis along which the boxes are cleanly separated, so stub
    # corridors exist; fall back to the dominant center delta
    x_disjoint = target.x >= source.right or source.x >= target.right
    y_disjoint = target.y >= source.bottom or source.y >= target.bottom
    if x_disjoint or (not y_disjoint and abs(dx) >= abs(dy)):
        ay = _snap_within(source.y, source.bottom, source.cy, step)
        ty = _snap_within(target.y, target.bottom, target.cy, step)
        if dx >= 0:  # source right side -> target left side
            attach_s = (int(round(source.right)), ay)
            start = (int(-(-(source.right + step) // step) * step), ay)
            attach_t = (int(round(target.x)), ty)
            goal = (int((target.x - step) // step * step), ty)
            heading = 0
        else:
            attach_s = (int(round(source.x)), ay)
            start = (int((source.x - step) // step * step), ay)
            attach_t = (int(round(target.right)), ty)
            goal = (int(-(-(target.right + step) // step) * step), ty)
            heading = 1
    else:
        ax = _snap_within(source.x, source.right, source.cx, step)
        tx = _snap_within(target.x, target.right, target.cx, step)
        if dy >= 0:  # source bottom side -> target top side
            attach_s = (ax, int(round(source.bottom)))
            start = (ax, int(-(-(source.bottom + step) // step) * step))
            attach_t = (tx, int(round(target.y)))
            goal = (tx, int((target.y - step) // step * step))
            heading = 2
        else:
            attach_s = (ax, int(round(source.y)))
            start = (ax, int((source.y - step) // step * step))
            attach_t = (tx, int(round(target.bottom)))
            goal = (tx, int(-(-(target.bottom + step) // step) * step))
            heading = 3
    return attach_s, start, attach_t, goal, heading


def build_grid(
    source: Box,
    target: Box,
    obstacles: Sequence[Box],
    grid_step: int = 10,
    turn_penalty: int = 2,
    margin_cells: int = 30,
) -> RoutingGrid:
    """Routing domain for one edge: attach stubs, bounds, inflated obstacles.

    Obstacles that cannot intersect the search window are dropped up front.
    """
    for box in (source, target):
        if box.width <= 0 or box.height <= 0:
            raise DegenerateBoxes(f"zero-area box: {box}")
    attach_s, start, attach_t, goal, heading = _attach_points(source, target, grid_step)
    margin = margin_cells * grid_step
    x0 = int(min(source.x, target.x) - margin)
    y0 = int(min(source.y, target.y) - margin)
    x1 = int(max(source.right, target.right) + margin)
    y1 = int(max(target.bottom, source.bottom) + margin)
    window = Box(x0, y0, x1 - x0, y1 - y0)
    inflated = [b.inflated(grid_step) for b in (source, target)]
    inflated += [
        infl
        for b in obstacles
        if b not in (source, target) and (infl := b.inflated(grid_step)).overlaps_strict(window)
    ]
    return RoutingGrid(
        start=start,
        goal=goal,
        start_heading=heading,
        attach_source=attach_s,
        attach_target=attach_t,
        bounds=(x0, y0, x1, y1),
        obstacles=inflated,
        step=grid_step,
        turn_penalty=turn_penalty,
    )


def astar(grid: RoutingGrid, max_states: int | None = None) -> tuple[list[Point], int] | None:
    """Optimal grid path from start to goal, or None; cost includes turns.

    ``max_states`` caps settled states as a latency guard; hitting the cap
    reads as "no path" and callers fall back to a clipped straight line.
    """
    if grid.blocked(*grid.start) or grid.blocked(*grid.goal):
        return None
    start_state: State = (*grid.start, grid.start_heading)
    if grid.start == grid.goal:
        return [grid.start], 0
    counter = 0
    open_heap: list[tuple[int, int, State]] = [(grid.heuristic(start_state), 0, start_state)]
    g_cost: dict[State, int] = {start_state: 0}
    came: dict[State, State] = {}
    settled: set[State] = set()
    while open_heap:
        if max_states is not None and len(settled) > max_states:
            return None
        _, _, state = heapq.heappop(open_heap)
        if state in settled:
            continue
        settled.add(state)
        if (state[0], state[1]) == grid.goal:
            total = g_cost[state]
            points = [(state[0], state[1])]
            while state in came:
                state = came[state]
                points.append((state[0], state[1]))
            points.reverse()
            return points, total
        for nxt, cost in grid.successors(state):
            tentative = g_cost[state] + cost
            if tentative < g_cost.get(nxt, 1 << 60):
                g_cost[nxt] = tentative
                came[nxt] = state
                counter += 1
                heapq.heappush(open_heap, (tentative + grid.heuristic(nxt), counter, nxt))
    return None


def dijkstra_cost(grid: RoutingGrid) -> int | None:
    """Oracle shortest-path cost over the same state space, no heuristic."""
    if grid.blocked(*grid.start) or grid.blocked(*grid.goal):
        return None
    start_state: State = (*grid.start, grid.start_heading)
    if grid.start == grid.goal:
        return 0
    counter = 0
    open_heap: list[tuple[int, int, State]] = [(0, 0, start_state)]
    dist: dict[State, int] = {start_state: 0}
    settled: set[State] = set()
    while open_heap:
        d, _, state = heapq.heappop(open_heap)
        if state in settled:
            continue
        settled.add(state)
        if (state[0], state[1]) == grid.goal:
            return d
        for nxt, cost in grid.successors(state):
            tentative = d + cost
            if tentative < dist.get(nxt, 1 << 60):
                dist[nxt] = tentative
                counter += 1
                heapq.heappush(open_heap, (tentative, counter, nxt))
    return None


def simplify(points: Sequence[Point]) -> tuple[Point, ...]:
    """Collapse collinear runs to corner points, dropping duplicates."""
    cleaned: list[Point] = []
    for p in points:
        if not cleaned or p != cleaned[-1]:
            cleaned.append(p)
    if len(cleaned) <= 2:
        return tuple(cleaned)
    out = [cleaned[0]]
    for prev, cur, nxt in zip(cleaned, cleaned[1:], cleaned[2:]):
        collinear = (prev[0] == cur[0] == nxt[0]) or (prev[1] == cur[1] == nxt[1])
        if not collinear:
            out.append(cur)
    out.append(cleaned[-1])
    return tuple(out)


def route_edge(
    source: Box,
    target: Box,
    obstacles: Sequence[Box],
    grid_step: int = 10,
    turn_penalty: int = 2,
    max_states: int | None = None,
) -> Route:
    """Orthogonal route between two box boundaries avoiding inflated obstacles.

    Falls back to a straight (clipped) segment when the grid search finds
    no path, so callers always get something drawable.
    """
    grid = build_grid(source, target, obstacles, grid_step, turn_penalty)
    found = astar(grid, max_states=max_states)
    if found is None:
        return Route(points=(grid.attach_source, grid.attach_target), clipped=True)
    path, _ = found
    points = [grid.attach_source, *path, grid.attach_target]
    return Route(points=simplify(points))


# ------------------------------------------------------------- fast routing


def _segment_clear(p: Point, q: Point, blocks: Sequence[Box]) -> bool:
    """Axis-aligned segment never enters any box's strict interior."""
    (ax, ay), (bx, by) = p, q
    if ax == bx:
        lo, hi = sorted((ay, by))
        for box in blocks:
            if box.x < ax < box.right and max(lo, box.y) < min(hi, box.bottom):
                return False
        return True
    lo, hi = sorted((ax, bx))
    for box in blocks:
        if box.y < ay < box.bottom and max(lo, box.x) < min(hi, box.right):
            return False
    return True


def _polyline_clear(points: Sequence[Point], blocks: Sequence[Box]) -> bool:
    return all(_segment_clear(p, q, blocks) for p, q in zip(points, points[1:]))


def fast_route(
    source: Box,
    target: Box,
    obstacles: Sequence[Box],
    grid_step: int = 10,
) -> Route | None:
    """Deterministic shortcut router for layout pipelines.

    Tries a straight run, a mid-corridor dog-leg, and two around-the-field
    detours, validating each against the inflated obstacle set, and gives up
    (returns None) when none is clear so the caller can fall back to the
    grid search. Produced routes satisfy the same invariants as searched
    ones: axis-aligned, boundary-attached, outside inflated obstacles.
    """
    attach_s, start, attach_t, goal, heading = _attach_points(source, target, grid_step)
    blocks = [
        infl
        for b in obstacles
        if b not in (source, target)
        for infl in (b.inflated(grid_step),)
    ]
    step = grid_step
    horizontal = heading in (0, 1)

    def ok(points: list[Point]) -> Route | None:
        if _polyline_clear(points, blocks):
            return Route(points=simplify(points))
        return None

    sx, sy = attach_s
    tx, ty = attach_t
    if horizontal:
        if sy == ty:
            route = ok([attach_s, attach_t])
            if route:
                return route
        mid = round(((start[0] + goal[0]) / 2) / step) * step
        route = ok([attach_s, (mid, sy), (mid, ty), attach_t])
        if route:
            return route
        # around the field: find clear vertical channels near each box, then
        # run along a lane above (or below) everything in the window
        relevant = blocks + [source.inflated(step), target.inflated(step)]
        lane_top = int(min(b.y for b in relevant) // step - 1) * step
        lane_bottom = int(-(-max(b.bottom for b in relevant) // step) + 1) * step
        direction = 1 if goal[0] >= start[0] else -1
        for lane in (lane_top, lane_bottom):
            for i in range(48):
                v1x = start[0] + direction * i * step
                if _segment_clear((v1x, sy), (v1x, lane), blocks) and _segment_clear(
                    attach_s, (v1x, sy), blocks
                ):
                    break
            else:
                continue
            for j in range(48):
                v2x = goal[0] - direction * j * step
                if _segment_clear((v2x, ty), (v2x, lane), blocks) and _segment_clear(
                    (v2x, ty), attach_t, blocks
                ):
                    break
            else:
                continue
            route = ok([attach_s, (v1x, sy), (v1x, lane), (v2x, lane), (v2x, ty), attach_t])
            if route:
                return route
        return None

    # vertical attachment: same shapes rotated
    if sx == tx:
        route = ok([attach_s, attach_t])
        if route:
            return route
    mid = round(((start[1] + goal[1]) / 2) / step) * step
    route = ok([attach_s, (sx, mid), (tx, mid), attach_t])
    if route:
        return route
    relevant = blocks + [source.inflated(step), target.inflated(step)]
    lane_left = int(min(b.x for b in relevant) // step - 1) * step
    lane_right = int(-(-max(b.right for b in relevant) // step) + 1) * step
    direction = 1 if goal[1] >= start[1] else -1
    for lane in (lane_left, lane_right):
        for i in range(48):
            v1y = start[1] + direction * i * step
            if _segment_clear((sx, v1y), (lane, v1y), blocks) and _segment_clear(
                attach_s, (sx, v1y), blocks
            ):
                break
        else:
            continue
        for j in range(48):
            v2y = goal[1] - direction * j * step
            if _segment_clear((tx, v2y), (lane, v2y), blocks) and _segment_clear(
                (tx, v2y), attach_t, blocks
            ):
                break
        else:
            continue
        route = ok([attach_s, (sx, v1y), (lane, v1y), (lane, v2y), (tx, v2y), attach_t])
        if route:
            return route
    return None


def layout_route(
    source: Box,
    target: Box,
    obstacles: Sequence[Box],
    grid_step: int = 10,
    turn_penalty: int = 2,
    max_states: int = 60_000,
) -> Route:
    """Routing entry point for layout pipelines: shortcut first, then A*."""
    shortcut = fast_route(source, target, obstacles, grid_step)
    if shortcut is not None:
        return shortcut
    return route_edge(
        source, target, obstacles, grid_step, turn_penalty, max_states=max_states
    )
