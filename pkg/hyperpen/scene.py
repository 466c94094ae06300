"""Plain SVG 1.1 drawings of planar scenes in the upper half-plane.

Only the real slice is drawn: bodies and geodesics with non-real data are
skipped with a warning.
"""
import math
from typing import List, Optional, Sequence, Tuple

import attr
import structlog

from .entities import INFINITY, Body, Geodesic, Horoball, Tube
from .exceptions import UnsupportedError

logger = structlog.get_logger()

PLANAR_TOL = 1e-12
SVG_HEADER = (
    '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
    'width="{w}" height="{h}" viewBox="0 0 {w} {h}">'
)


def _is_real(z) -> bool:
    return z is INFINITY or abs(complex(z).imag) <= PLANAR_TOL


@attr.attrs
class Scene(object):
    """Collects shapes in half-plane coordinates and renders them to pixels.

    ``window`` is the visible real interval and ``top`` the largest visible height.
    """

    window: Tuple[float, float] = attr.attrib()
    top: float = attr.attrib(default=1.5)
    width: int = attr.attrib(default=800)
    shapes: List[str] = attr.attrib(factory=list)

    @window.validator
    def _check_window(self, attribute, value):
        if not value[0] < value[1]:
            raise ValueError("window must be an increasing interval")

    @property
    def scale(self) -> float:
        return self.width / (self.window[1] - self.window[0])

    @property
    def height(self) -> int:
        return int(math.ceil(self.top * self.scale))

    def _x(self, x: float) -> float:
        return (x - self.window[0]) * self.scale

    def _y(self, y: float) -> float:
        return self.height - y * self.scale

    def add_body(self, body: Body, color: str = "#4a7ab5") -> None:
        if isinstance(body, Tube):
            raise UnsupportedError("tubes are not drawn")
        if isinstance(body, Horoball):
            if not _is_real(body.center):
                logger.warning("scene_skip", kind="horoball", center=body.center)
                return
            if body.center is INFINITY:
                y = self._y(body.size)
                self.shapes.append(
                    '<line x1="0" y1="{y:.3f}" x2="{w}" y2="{y:.3f}" stroke="{c}" '
                    'fill="none"/>'.format(y=y, w=self.width, c=color)
                )
                return
            cx, r = complex(body.center).real, body.size / 2
            self._circle(cx, r, r, color)
            return
        c = body.center
        if not _is_real(c.base):
            logger.warning("scene_skip", kind="ball", center=c.base)
            return
        self._circle(c.base.real, c.height * math.cosh(body.radius), c.height * math.sinh(body.radius), color)

    def _circle(self, cx: float, cy: float, r: float, color: str) -> None:
        self.shapes.append(
            '<circle cx="{:.3f}" cy="{:.3f}" r="{:.3f}" stroke="{}" fill="none"/>'.format(
                self._x(cx), self._y(cy), r * self.scale, color
            )
        )

    def add_geodesic(self, g: Geodesic, color: str = "#c0392b", width: float = 1.5) -> None:
        a, b = g.xi_minus, g.xi_plus
        if not (_is_real(a) and _is_real(b)):
            logger.warning("scene_skip", kind="geodesic")
            return
        start = g.anchor if g.is_ray else None
        if a is INFINITY or b is INFINITY:
            x = complex(b if a is INFINITY else a).real
            y0 = self.top if start is None else start.height
            y1 = 0.0 if (a is INFINITY or start is None) else self.top
            self.shapes.append(
                '<line x1="{x:.3f}" y1="{:.3f}" x2="{x:.3f}" y2="{:.3f}" stroke="{c}" '
                'stroke-width="{sw}" fill="none"/>'.format(
                    self._y(y0), self._y(y1), x=self._x(x), c=color, sw=width
                )
            )
            return
        ra, rb = complex(a).real, complex(b).real
        radius = abs(rb - ra) / 2
        x0 = ra if start is None else complex(start.base).real
        y0 = 0.0 if start is None else start.height
        # sweep flag 1 draws clockwise on screen, the upper arc when going left to right
        sweep = 1 if rb > x0 else 0
        self.shapes.append(
            '<path d="M {:.3f} {:.3f} A {r:.3f} {r:.3f} 0 0 {s} {:.3f} {:.3f}" stroke="{c}" '
            'stroke-width="{sw}" fill="none"/>'.format(
                self._x(x0),
                self._y(y0),
                self._x(rb),
                self._y(0.0),
                r=radius * self.scale,
                s=sweep,
                c=color,
                sw=width,
            )
        )

    def to_svg(self) -> str:
        parts = [SVG_HEADER.format(w=self.width, h=self.height)]
        parts.append('<rect width="100%" height="100%" fill="white"/>')
        parts.extend(self.shapes)
        parts.append(
            '<line x1="0" y1="{y}" x2="{w}" y2="{y}" stroke="black" stroke-width="1"/>'.format(
                y=self.height, w=self.width
            )
        )
        parts.append("</svg>")
        return "\n".join(parts) + "\n"


def render(
    bodies: Sequence[Body],
    geodesics: Sequence[Geodesic],
    window: Tuple[float, float],
    top: Optional[float] = None,
    width: int = 800,
) -> str:
    """SVG of the bodies (thin) and the geodesics (thick, last one highlighted)."""
    if top is None:
        top = 1.1 * max(
            [b.size for b in bodies if isinstance(b, Horoball) and b.center is INFINITY] + [1.0]
        )
    scene = Scene(window=window, top=top, width=width)
    for body in bodies:
        if not isinstance(body, Tube):
            scene.add_body(body)
    for i, g in enumerate(geodesics):
        last = i == len(geodesics) - 1
        scene.add_geodesic(g, color="#c0392b" if last else "#bbbbbb", width=2.0 if last else 0.75)
    return scene.to_svg()
