"""Minimal SVG 1.1 document builder."""

from xml.sax.saxutils import escape, quoteattr


def _attrs(attributes: dict) -> str:
    parts = []
    for key, value in attributes.items():
        if value is None:
            continue
        if isinstance(value, float):
            value = f"{value:.2f}"
        parts.append(f"{key.rstrip('_').replace('_', '-')}={quoteattr(str(value))}")
    return " ".join(parts)


class SvgDocument:
    """Accumulates SVG elements; output bytes depend only on the calls made."""

    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self._parts: list[str] = []

    def comment(self, text: str) -> None:
        self._parts.append(f"<!-- {escape(text.replace('--', '- -'))} -->")

    def group_start(self, **attributes) -> None:
        self._parts.append(f"<g {_attrs(attributes)}>")

    def group_end(self) -> None:
        self._parts.append("</g>")

    def rect(self, x: float, y: float, width: float, height: float, **attributes) -> None:
        self._parts.append(
            f"<rect {_attrs({'x': x, 'y': y, 'width': width, 'height': height, **attributes})}/>"
        )

    def circle(self, cx: float, cy: float, r: float, **attributes) -> None:
        self._parts.append(f"<circle {_attrs({'cx': cx, 'cy': cy, 'r': r, **attributes})}/>")

    def line(self, x1: float, y1: float, x2: float, y2: float, **attributes) -> None:
        self._parts.append(
            f"<line {_attrs({'x1': x1, 'y1': y1, 'x2': x2, 'y2': y2, **attributes})}/>"
        )

    def polyline(self, points: list[tuple[float, float]], **attributes) -> None:
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self._parts.append(f"<polyline {_attrs({'points': coords, **attributes})}/>")

    def text(self, x: float, y: float, content: str, **attributes) -> None:
        self._parts.append(f"<text {_attrs({'x': x, 'y': y, **attributes})}>{escape(content)}</text>")

    def render(self) -> str:
        header = (
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
            '<svg version="1.1" xmlns="http://www.w3.org/2000/svg" '
            f'width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">'
        )
        return "\n".join([header, *self._parts, "</svg>"]) + "\n"
