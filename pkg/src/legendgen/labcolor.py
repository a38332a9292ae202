"""sRGB <-> CIELAB conversion (D65, 2 degree observer) and WCAG luminance."""

from __future__ import annotations

import math
from dataclasses import dataclass

# D65 reference white
_XN, _YN, _ZN = 95.047, 100.0, 108.883


@dataclass(frozen=True)
class LabColor:
    L: float
    a: float
    b: float

    def to_tuple(self) -> tuple[float, float, float]:
        return (self.L, self.a, self.b)


def _srgb_to_linear(c: float) -> float:
    c = c / 255.0
    if c > 0.04045:
        return ((c + 0.055) / 1.055) ** 2.4
    return c / 12.92


def _linear_to_srgb(c: float) -> float:
    if c > 0.0031308:
        v = 1.055 * c ** (1.0 / 2.4) - 0.055
    else:
        v = 12.92 * c
    return min(max(v, 0.0), 1.0) * 255.0


def rgb_to_lab(rgb: tuple[float, float, float]) -> LabColor:
    """Convert an sRGB triple (0..255 per channel) to CIELAB."""
    r = _srgb_to_linear(rgb[0])
    g = _srgb_to_linear(rgb[1])
    b = _srgb_to_linear(rgb[2])
    x = (r * 0.4124564 + g * 0.3575761 + b * 0.1804375) * 100.0
    y = (r * 0.2126729 + g * 0.7151522 + b * 0.0721750) * 100.0
    z = (r * 0.0193339 + g * 0.1191920 + b * 0.9503041) * 100.0

    def f(t: float) -> float:
        if t > 0.008856451679035631:  # (6/29)^3
            return t ** (1.0 / 3.0)
        return t / (3 * (6.0 / 29.0) ** 2) + 4.0 / 29.0

    fx, fy, fz = f(x / _XN), f(y / _YN), f(z / _ZN)
    return LabColor(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))


def lab_to_rgb(lab: LabColor) -> tuple[int, int, int]:
    """CIELAB back to sRGB, clamping out-of-gamut values."""
    fy = (lab.L + 16.0) / 116.0
    fx = fy + lab.a / 500.0
    fz = fy - lab.b / 200.0

    def finv(t: float) -> float:
        if t > 6.0 / 29.0:
            return t ** 3
        return 3 * (6.0 / 29.0) ** 2 * (t - 4.0 / 29.0)

    x = finv(fx) * _XN / 100.0
    y = finv(fy) * _YN / 100.0
    z = finv(fz) * _ZN / 100.0
    r = x * 3.2404542 + y * -1.5371385 + z * -0.4985314
    g = x * -0.9692660 + y * 1.8760108 + z * 0.0415560
    b = x * 0.0556434 + y * -0.2040259 + z * 1.0572252
    return (
        int(round(_linear_to_srgb(r))),
        int(round(_linear_to_srgb(g))),
        int(round(_linear_to_srgb(b))),
    )


def lab_distance(a: LabColor, b: LabColor) -> float:
    return math.sqrt((a.L - b.L) ** 2 + (a.a - b.a) ** 2 + (a.b - b.b) ** 2)


def hue_angle_deg(lab: LabColor) -> float:
    """Hue angle in degrees, [0, 360)."""
    return math.degrees(math.atan2(lab.b, lab.a)) % 360.0


def chroma(lab: LabColor) -> float:
    return math.hypot(lab.a, lab.b)


def relative_luminance(rgb: tuple[float, float, float]) -> float:
    """WCAG 2.0 relative luminance of an sRGB color (0..1)."""
    def lin(c: float) -> float:
        c = c / 255.0
        if c <= 0.03928:
            return c / 12.92
        return ((c + 0.055) / 1.055) ** 2.4

    return 0.2126 * lin(rgb[0]) + 0.7152 * lin(rgb[1]) + 0.0722 * lin(rgb[2])
