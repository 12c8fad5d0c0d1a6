"""
Minimal SVG emitter.

Elements take data coordinates. The figure's viewBox is the data window with
the y axis flipped (SVG y grows downward), and strokes do not scale with the
view so line widths stay in pixels.
"""

from html import escape
from typing import Optional, Sequence

import numpy as np

NS_SVG = "http://www.w3.org/2000/svg"


def demangle(key: str) -> str:
    return key.rstrip("_").replace("_", "-")


def number_repr(value) -> str:
    if isinstance(value, (bool, str)):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    text = f"{float(value):.6g}"
    return "0" if text == "-0" else text


def props_repr(attrs: dict) -> str:
    return " ".join(
        f'{demangle(k)}="{escape(v) if isinstance(v, str) else number_repr(v)}"'
        for k, v in attrs.items()
        if v is not None
    )


def points_repr(points: np.ndarray) -> str:
    return " ".join(f"{number_repr(x)},{number_repr(-y)}" for x, y in np.asarray(points))


class Element:
    def __init__(self, tag: str, **attr):
        self.tag = tag
        self.attr = attr

    def props(self) -> dict:
        return self.attr

    def inner(self) -> Optional[str]:
        return None

    def svg(self) -> str:
        props = props_repr(self.props())
        pre = " " if props else ""
        inner = self.inner()
        if inner is None:
            return f"<{self.tag}{pre}{props} />"
        return f"<{self.tag}{pre}{props}>{inner}</{self.tag}>"


class Polyline(Element):
    def __init__(self, points: Sequence[Sequence[float]], stroke="black", stroke_width=1.5, **attr):
        super().__init__("polyline", fill="none", stroke=stroke, stroke_width=stroke_width,
                         vector_effect="non-scaling-stroke", **attr)
        self.points = np.asarray(points, dtype=float).reshape(-1, 2)

    def props(self) -> dict:
        return {"points": points_repr(self.points), **self.attr}


class Polygon(Polyline):
    def __init__(self, points, fill="none", stroke="black", stroke_width=1.5, **attr):
        super().__init__(points, stroke=stroke, stroke_width=stroke_width, **attr)
        self.tag = "polygon"
        self.attr["fill"] = fill


class Rect(Element):
    def __init__(self, x: float, y: float, width: float, height: float, fill="gray", **attr):
        super().__init__("rect", x=x, y=-(y + height), width=width, height=height, fill=fill, **attr)


class Circle(Element):
    def __init__(self, x: float, y: float, r: float, fill="black", **attr):
        super().__init__("circle", cx=x, cy=-y, r=r, fill=fill, **attr)


class Text(Element):
    def __init__(self, x: float, y: float, text: str, size: float, fill="black", **attr):
        super().__init__("text", x=x, y=-y, font_size=size, fill=fill, **attr)
        self.text = text

    def inner(self) -> str:
        return escape(self.text)


class Group(Element):
    def __init__(self, children: Optional[list[Element]] = None, **attr):
        super().__init__("g", **attr)
        self.children = list(children or [])

    def add(self, *children: Element) -> "Group":
        self.children.extend(children)
        return self

    def inner(self) -> str:
        inside = "\n".join(c.svg() for c in self.children)
        return f"\n{inside}\n"


class Figure(Group):
    """
    Root <svg> element over the data box [lower, upper].

    Args:
        lower: (x, y) of the lower-left corner in data units
        upper: (x, y) of the upper-right corner in data units
        width: Pixel width; height follows the data aspect ratio
    """

    def __init__(self, lower: Sequence[float], upper: Sequence[float], width: int = 640, **attr):
        super().__init__(**attr)
        self.tag = "svg"
        self.lower = tuple(float(v) for v in lower)
        self.upper = tuple(float(v) for v in upper)
        span_x, span_y = self.upper[0] - self.lower[0], self.upper[1] - self.lower[1]
        if span_x <= 0 or span_y <= 0:
            raise ValueError("figure box must have positive extent")
        self.width = int(width)
        self.height = max(1, int(round(width * span_y / span_x)))

    @property
    def unit(self) -> float:
        """Data length of one pixel."""
        return (self.upper[0] - self.lower[0]) / self.width

    def props(self) -> dict:
        x0, y1 = self.lower[0], self.upper[1]
        w, h = self.upper[0] - self.lower[0], self.upper[1] - self.lower[1]
        return {
            "xmlns": NS_SVG,
            "width": self.width,
            "height": self.height,
            "viewBox": f"{number_repr(x0)} {number_repr(-y1)} {number_repr(w)} {number_repr(h)}",
            **self.attr,
        }

    def frame(self, stroke="#444") -> Polygon:
        (x0, y0), (x1, y1) = self.lower, self.upper
        return Polygon([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], stroke=stroke, stroke_width=1)

    def label(self, x: float, y: float, text: str, pixels: float = 12, **attr) -> Text:
        return Text(x, y, text, size=pixels * self.unit, **attr)

    def svg(self) -> str:
        return '<?xml version="1.0" encoding="UTF-8"?>\n' + super().svg() + "\n"


def sample_curve(func, start: float, stop: float, n: int = 512) -> np.ndarray:
    """Points (x, func(x)) at n >= 512 evenly spaced abscissae."""
    xs = np.linspace(start, stop, max(n, 512))
    return np.column_stack([xs, [func(x) for x in xs]])
