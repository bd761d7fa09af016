"""Geometry: layered flow layout, grid edge routing, nested compartments, SVG."""

from .flow import (
    LayoutResult,
    Spacing,
    adaptive_spacing,
    flow_layout,
    size_for_label,
)
from .nested import NestedLayoutResult, member_side, nested_layout
from .routing import Box, Route, astar, build_grid, dijkstra_cost, route_edge
from .svg import POLARITY_COLORS, layout_to_svg, nested_layout_to_svg

__all__ = [
    "Box",
    "Route",
    "LayoutResult",
    "NestedLayoutResult",
    "Spacing",
    "adaptive_spacing",
    "astar",
    "build_grid",
    "dijkstra_cost",
    "flow_layout",
    "layout_to_svg",
    "member_side",
    "nested_layout",
    "nested_layout_to_svg",
    "route_edge",
    "size_for_label",
    "POLARITY_COLORS",
]
