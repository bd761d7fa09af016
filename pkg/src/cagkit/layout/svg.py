"""Standalone SVG 1.1 rendering of layouts for headless inspection."""

from __future__ import annotations

from xml.sax.saxutils import escape

from ..model import AggregatePolarity
from .flow import LayoutResult
from .nested import NestedLayoutResult
from .routing import Box, Route

__all__ = ["POLARITY_COLORS", "layout_to_svg", "nested_layout_to_svg"]

# color-blind-safe pairing: blue for same, red for opposite, gray ambiguous
POLARITY_COLORS = {
    AggregatePolarity.SAME: "#2166ac",
    AggregatePolarity.OPPOSITE: "#b2182b",
    AggregatePolarity.AMBIGUOUS: "#8c8c8c",
    AggregatePolarity.NO_EVIDENCE: "#000000",
}

EdgeStyle = tuple[AggregatePolarity, float]  # polarity, aggregate belief


def _svg_header(canvas: Box) -> str:
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{canvas.x:g} {canvas.y:g} {canvas.width:g} {canvas.height:g}" '
        f'width="{canvas.width:g}" height="{canvas.height:g}">\n'
    )


def _edge_svg(route: Route, style: EdgeStyle | None) -> str:
    polarity, belief = style if style else (AggregatePolarity.NO_EVIDENCE, 0.0)
    color = POLARITY_COLORS[polarity]
    opacity = 0.35 + 0.65 * max(0.0, min(1.0, belief))
    dash = ' stroke-dasharray="6,4"' if polarity is AggregatePolarity.NO_EVIDENCE else ""
    points = " ".join(f"{x:g},{y:g}" for x, y in route.points)
    return (
        f'  <polyline points="{points}" fill="none" stroke="{color}" '
        f'stroke-width="2" stroke-opacity="{opacity:.3f}"{dash}/>\n'
    )


def _node_svg(box: Box, label: str, fill: str = "#f5f7fa") -> str:
    text_x = box.cx
    text_y = box.cy + 4
    return (
        f'  <rect x="{box.x:g}" y="{box.y:g}" width="{box.width:g}" height="{box.height:g}" '
        f'rx="6" fill="{fill}" stroke="#47546a"/>\n'
        f'  <text x="{text_x:g}" y="{text_y:g}" font-size="12" text-anchor="middle" '
        f'font-family="sans-serif">{escape(label)}</text>\n'
    )


def layout_to_svg(
    layout: LayoutResult,
    labels: dict[str, str] | None = None,
    edge_styles: dict[tuple[str, str], EdgeStyle] | None = None,
) -> str:
    labels = labels or {}
    edge_styles = edge_styles or {}
    parts = [_svg_header(layout.canvas)]
    for pair, route in layout.edge_routes.items():
        parts.append(_edge_svg(route, edge_styles.get(pair)))
    for node, box in layout.node_boxes.items():
        parts.append(_node_svg(box, labels.get(node, node)))
    parts.append("</svg>\n")
    return "".join(parts)


def nested_layout_to_svg(
    layout: NestedLayoutResult,
    labels: dict[str, str] | None = None,
    edge_styles: dict[tuple[str, str], EdgeStyle] | None = None,
) -> str:
    labels = labels or {}
    edge_styles = edge_styles or {}
    parts = [_svg_header(layout.canvas)]
    for parent, box in layout.compartment_boxes.items():
        parts.append(
            f'  <rect x="{box.x:g}" y="{box.y:g}" width="{box.width:g}" height="{box.height:g}" '
            f'fill="#eef1f6" stroke="#9aa7bd" stroke-dasharray="2,3"/>\n'
            f'  <text x="{box.x + 6:g}" y="{box.y + 14:g}" font-size="11" '
            f'font-family="sans-serif" fill="#47546a">{escape(parent)}</text>\n'
        )
    if layout.suppressed:
        parts.append(
            f'  <text x="{layout.canvas.cx:g}" y="{layout.canvas.y + 16:g}" font-size="13" '
            f'text-anchor="middle" font-family="sans-serif" fill="#b2182b">'
            f"edges hidden ({layout.suppressed_edge_count})</text>\n"
        )
    else:
        for pair, route in (layout.edge_routes or {}).items():
            parts.append(_edge_svg(route, edge_styles.get(pair)))
    for node, box in layout.node_boxes.items():
        parts.append(_node_svg(box, labels.get(node, node.rsplit("/", 1)[-1]), fill="#ffffff"))
    parts.append("</svg>\n")
    return "".join(parts)
