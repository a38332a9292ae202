"""Affine transforms, path flattening and bounding boxes.

Paths are stored as lists of subpaths; each subpath is a list of absolute
segments:

    ("L", x0, y0, x1, y1)
    ("C", x0, y0, c1x, c1y, c2x, c2y, x1, y1)
    ("Q", x0, y0, cx, cy, x1, y1)
    ("A", x0, y0, cx, cy, rx, ry, phi, t0, dt, x1, y1)   # center form

Arc segments keep their endpoint coordinates alongside the center
parameterization so flattening and bboxing never re-derive them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import DegeneratePath

DEFAULT_CURVE_SAMPLES = 8


class Affine(NamedTuple):
    """2x3 matrix in SVG order: x' = a x + c y + e, y' = b x + d y + f."""

    a: float = 1.0
    b: float = 0.0
    c: float = 0.0
    d: float = 1.0
    e: float = 0.0
    f: float = 0.0

    @staticmethod
    def identity() -> "Affine":
        return Affine()

    @staticmethod
    def translate(tx: float, ty: float) -> "Affine":
        return Affine(1, 0, 0, 1, tx, ty)

    @staticmethod
    def scale(sx: float, sy: float | None = None) -> "Affine":
        sy = sx if sy is None else sy
        return Affine(sx, 0, 0, sy, 0, 0)

    @staticmethod
    def rotate(deg: float, cx: float = 0.0, cy: float = 0.0) -> "Affine":
        t = math.radians(deg)
        ct, st = math.cos(t), math.sin(t)
        rot = Affine(ct, st, -st, ct, 0, 0)
        if cx or cy:
            return Affine.translate(cx, cy) @ rot @ Affine.translate(-cx, -cy)
        return rot

    @staticmethod
    def skew_x(deg: float) -> "Affine":
        return Affine(1, 0, math.tan(math.radians(deg)), 1, 0, 0)

    @staticmethod
    def skew_y(deg: float) -> "Affine":
        return Affine(1, math.tan(math.radians(deg)), 0, 1, 0, 0)

    def __matmul__(self, o: "Affine") -> "Affine":
        return Affine(
            self.a * o.a + self.c * o.b,
            self.b * o.a + self.d * o.b,
            self.a * o.c + self.c * o.d,
            self.b * o.c + self.d * o.d,
            self.a * o.e + self.c * o.f + self.e,
            self.b * o.e + self.d * o.f + self.f,
        )

    def apply(self, x: float, y: float) -> tuple[float, float]:
        return (self.a * x + self.c * y + self.e, self.b * x + self.d * y + self.f)

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "Affine":
        det = self.det()
        return Affine(
            self.d / det,
            -self.b / det,
            -self.c / det,
            self.a / det,
            (self.c * self.f - self.d * self.e) / det,
            (self.b * self.e - self.a * self.f) / det,
        )

    def is_identity(self, tol: float = 0.0) -> bool:
        ref = (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)
        return all(abs(v - r) <= tol for v, r in zip(self, ref))

    def scale_factor(self) -> float:
        """Uniform length scale: sqrt(|det|). Used for stroke widths."""
        return math.sqrt(abs(self.det()))

    def decompose_similarity(self) -> tuple[float, float] | None:
        """(scale, rotation degrees) if this is scale*rotation(+translation)."""
        sx = math.hypot(self.a, self.b)
        sy = math.hypot(self.c, self.d)
        if sx < 1e-12 or abs(sx - sy) > 1e-6 * max(sx, sy):
            return None
        # columns must be orthogonal for a similarity
        if abs(self.a * self.c + self.b * self.d) > 1e-6 * sx * sy:
            return None
        if self.det() < 0:  # reflection: not a rotation
            return None
        return (sx, math.degrees(math.atan2(self.b, self.a)) % 360.0)


@dataclass
class Polygon:
    vertices: list[tuple[float, float]]
    closed: bool = True

    def __post_init__(self) -> None:
        for x, y in self.vertices:
            if math.isnan(x) or math.isnan(y):
                raise DegeneratePath("NaN coordinate in polygon")
        if self.closed and len(self.vertices) < 3:
            raise DegeneratePath("closed polygon needs >= 3 vertices")

    def area(self) -> float:
        """Absolute shoelace area."""
        s = 0.0
        pts = self.vertices
        n = len(pts)
        for i in range(n):
            x0, y0 = pts[i]
            x1, y1 = pts[(i + 1) % n]
            s += x0 * y1 - x1 * y0
        return abs(s) / 2.0

    def centroid(self) -> tuple[float, float]:
        """Arithmetic mean of vertices (not the area centroid)."""
        n = len(self.vertices)
        return (
            sum(p[0] for p in self.vertices) / n,
            sum(p[1] for p in self.vertices) / n,
        )

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [p[0] for p in self.vertices]
        ys = [p[1] for p in self.vertices]
        return (min(xs), min(ys), max(xs), max(ys))


def _cubic_point(p0, c1, c2, p1, t: float) -> tuple[float, float]:
    mt = 1.0 - t
    w0 = mt * mt * mt
    w1 = 3 * mt * mt * t
    w2 = 3 * mt * t * t
    w3 = t * t * t
    return (
        w0 * p0[0] + w1 * c1[0] + w2 * c2[0] + w3 * p1[0],
        w0 * p0[1] + w1 * c1[1] + w2 * c2[1] + w3 * p1[1],
    )


def _quad_point(p0, c, p1, t: float) -> tuple[float, float]:
    mt = 1.0 - t
    return (
        mt * mt * p0[0] + 2 * mt * t * c[0] + t * t * p1[0],
        mt * mt * p0[1] + 2 * mt * t * c[1] + t * t * p1[1],
    )


def _arc_point(cx, cy, rx, ry, phi, theta) -> tuple[float, float]:
    cp, sp = math.cos(phi), math.sin(phi)
    x = rx * math.cos(theta)
    y = ry * math.sin(theta)
    return (cx + cp * x - sp * y, cy + sp * x + cp * y)


def flatten_segments(
    segments: list[tuple],
    samples_per_curve: int = DEFAULT_CURVE_SAMPLES,
) -> list[tuple[float, float]]:
    """Replace curved segments by ``samples_per_curve`` chord points spanning
    t in [0, 1] (endpoints included); line segments stay verbatim.

    Returns the vertex chain; consecutive duplicates closer than 1e-9 merge,
    so shared segment endpoints appear once.
    """
    if samples_per_curve < 2:
        raise ValueError("samples_per_curve must be >= 2")
    pts: list[tuple[float, float]] = []
    steps = samples_per_curve - 1

    def push(p: tuple[float, float]) -> None:
        if pts and math.hypot(p[0] - pts[-1][0], p[1] - pts[-1][1]) < 1e-9:
            return
        pts.append(p)

    for seg in segments:
        kind = seg[0]
        if kind == "L":
            _, x0, y0, x1, y1 = seg
            push((x0, y0))
            push((x1, y1))
        elif kind == "C":
            _, x0, y0, c1x, c1y, c2x, c2y, x1, y1 = seg
            push((x0, y0))
            for k in range(1, steps):
                push(_cubic_point((x0, y0), (c1x, c1y), (c2x, c2y), (x1, y1), k / steps))
            push((x1, y1))
        elif kind == "Q":
            _, x0, y0, cx, cy, x1, y1 = seg
            push((x0, y0))
            for k in range(1, steps):
                push(_quad_point((x0, y0), (cx, cy), (x1, y1), k / steps))
            push((x1, y1))
        elif kind == "A":
            _, x0, y0, cx, cy, rx, ry, phi, t0, dt, x1, y1 = seg
            push((x0, y0))
            for k in range(1, steps):
                push(_arc_point(cx, cy, rx, ry, phi, t0 + dt * k / steps))
            push((x1, y1))  # exact endpoint, avoids drift
        else:
            raise ValueError(f"unknown segment kind {kind!r}")
    return pts


def flatten_subpath(
    subpath: "SubPath",
    transform: Affine = Affine.identity(),
    samples_per_curve: int = DEFAULT_CURVE_SAMPLES,
) -> Polygon:
    pts = flatten_segments(subpath.segments, samples_per_curve)
    pts = [transform.apply(x, y) for x, y in pts]
    # drop the repeated closing vertex of closed subpaths
    if subpath.closed and len(pts) > 1:
        if math.hypot(pts[0][0] - pts[-1][0], pts[0][1] - pts[-1][1]) < 1e-9:
            pts = pts[:-1]
    if len({(round(x, 9), round(y, 9)) for x, y in pts}) < 2:
        raise DegeneratePath("all vertices coincident")
    return Polygon(pts, closed=subpath.closed)


@dataclass
class SubPath:
    segments: list[tuple] = field(default_factory=list)
    closed: bool = False

    def start_point(self) -> tuple[float, float]:
        s = self.segments[0]
        return (s[1], s[2])

    def end_point(self) -> tuple[float, float]:
        s = self.segments[-1]
        return (s[-2], s[-1])


def arc_endpoint_to_center(
    x0, y0, rx, ry, phi_deg, large_arc, sweep, x1, y1
) -> tuple | None:
    """SVG endpoint arc parameters -> center form (cx, cy, rx, ry, phi, t0, dt).

    Returns None for the degenerate zero-radius case (caller draws a line).
    """
    rx, ry = abs(rx), abs(ry)
    if rx < 1e-12 or ry < 1e-12:
        return None
    phi = math.radians(phi_deg)
    cp, sp = math.cos(phi), math.sin(phi)
    dx, dy = (x0 - x1) / 2.0, (y0 - y1) / 2.0
    x1p = cp * dx + sp * dy
    y1p = -sp * dx + cp * dy
    lam = (x1p / rx) ** 2 + (y1p / ry) ** 2
    if lam > 1:
        s = math.sqrt(lam)
        rx *= s
        ry *= s
    num = rx**2 * ry**2 - rx**2 * y1p**2 - ry**2 * x1p**2
    den = rx**2 * y1p**2 + ry**2 * x1p**2
    co = math.sqrt(max(num / den, 0.0)) if den > 0 else 0.0
    if large_arc == sweep:
        co = -co
    cxp = co * rx * y1p / ry
    cyp = -co * ry * x1p / rx
    cx = cp * cxp - sp * cyp + (x0 + x1) / 2.0
    cy = sp * cxp + cp * cyp + (y0 + y1) / 2.0

    def angle(ux, uy, vx, vy):
        dot = ux * vx + uy * vy
        n = math.hypot(ux, uy) * math.hypot(vx, vy)
        a = math.acos(min(max(dot / n, -1.0), 1.0))
        if ux * vy - uy * vx < 0:
            a = -a
        return a

    t0 = angle(1, 0, (x1p - cxp) / rx, (y1p - cyp) / ry)
    dt = angle((x1p - cxp) / rx, (y1p - cyp) / ry, (-x1p - cxp) / rx, (-y1p - cyp) / ry)
    if not sweep and dt > 0:
        dt -= 2 * math.pi
    elif sweep and dt < 0:
        dt += 2 * math.pi
    return (cx, cy, rx, ry, phi, t0, dt)


def bbox_union(boxes: list[tuple[float, float, float, float]]) -> tuple[float, float, float, float]:
    x0 = min(b[0] for b in boxes)
    y0 = min(b[1] for b in boxes)
    x1 = max(b[2] for b in boxes)
    y1 = max(b[3] for b in boxes)
    return (x0, y0, x1, y1)
