"""Deterministic SVG chart generators used as the extraction and
preference-learning corpus: bar, stacked bar, scatter, choropleth,
node-link, wind, and stacked area charts."""

from __future__ import annotations

import math
import random

PALETTES = [
    ["#4e79a7", "#f28e2b", "#59a14f", "#e15759"],
    ["#76b7b2", "#edc948", "#b07aa1", "#ff9da7"],
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"],
    ["#66c2a5", "#fc8d62", "#8da0cb", "#e78ac3"],
]


def _axes(x0: float, y0: float, x1: float, y1: float) -> str:
    return (
        f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="#333333"/>'
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#333333"/>'
    )


def _tick_texts(x0: float, x1: float, y: float, n: int) -> str:
    parts = []
    for i in range(n):
        x = x0 + (x1 - x0) * (i + 0.5) / n
        parts.append(f'<text x="{x:.1f}" y="{y:.1f}" font-size="8" text-anchor="middle">t{i}</text>')
    return "".join(parts)


def bar_chart(seed: int = 0, width: int = 360, height: int = 240) -> str:
    rng = random.Random(1000 + seed)
    palette = PALETTES[seed % len(PALETTES)][:3]
    n = 12
    x0, y1 = 40, height - 30
    plot_w = width - 70
    bw = plot_w / n * 0.62
    parts = [f'<svg width="{width}" height="{height}">']
    parts.append(f'<text x="{width / 2:.0f}" y="16" font-size="11" text-anchor="middle">bars {seed}</text>')
    parts.append(_axes(x0, 24, x0 + plot_w, y1))
    for i in range(n):
        h = 24 + rng.random() * (y1 - 60)
        x = x0 + 8 + i * plot_w / n
        color = palette[i // (n // 3)]
        parts.append(
            f'<rect x="{x:.2f}" y="{y1 - h:.2f}" width="{bw:.2f}" height="{h:.2f}" fill="{color}"/>'
        )
    parts.append(_tick_texts(x0, x0 + plot_w, y1 + 12, 6))
    parts.append("</svg>")
    return "".join(parts)


def stacked_bar_chart(seed: int = 0, width: int = 380, height: int = 260) -> str:
    rng = random.Random(2000 + seed)
    palette = PALETTES[seed % len(PALETTES)]
    bars, series = 3, 4
    x0, y1 = 44, height - 32
    plot_w = width - 84
    bw = plot_w / bars * 0.5
    parts = [f'<svg width="{width}" height="{height}">']
    parts.append(f'<text x="{width / 2:.0f}" y="15" font-size="11" text-anchor="middle">stacked {seed}</text>')
    parts.append(_axes(x0, 24, x0 + plot_w, y1))
    for b in range(bars):
        x = x0 + 14 + b * plot_w / bars
        y = y1
        for s in range(series):
            h = 18 + rng.random() * 36
            y -= h
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{bw:.2f}" height="{h:.2f}" fill="{palette[s]}"/>'
            )
    parts.append(_tick_texts(x0, x0 + plot_w, y1 + 12, bars))
    parts.append("</svg>")
    return "".join(parts)


def scatter_chart(seed: int = 0, width: int = 360, height: int = 280) -> str:
    rng = random.Random(3000 + seed)
    palette = PALETTES[seed % len(PALETTES)]
    x0, y1 = 40, height - 30
    plot_w, plot_h = width - 76, y1 - 30
    parts = [f'<svg width="{width}" height="{height}">']
    parts.append(_axes(x0, y1 - plot_h, x0 + plot_w, y1))
    # clustered groups so category order correlates with x position
    for g in range(4):
        gx = x0 + plot_w * (g + 0.5) / 4
        for _ in range(6):
            cx = gx + (rng.random() - 0.5) * plot_w / 5
            cy = y1 - 14 - rng.random() * (plot_h - 22)
            parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="4.5" fill="{palette[g]}"/>')
    parts.append(_tick_texts(x0, x0 + plot_w, y1 + 12, 5))
    parts.append("</svg>")
    return "".join(parts)


def _blob(cx: float, cy: float, rx: float, ry: float, phase: float) -> str:
    """Irregular region outline; the wobble pattern is a smooth function of
    the phase so region features stay on a dense curve for shape clustering."""
    pts = []
    n = 12
    for k in range(n):
        a = 2 * math.pi * k / n
        w = 1.0 + 0.12 * math.sin(3 * a + phase)
        pts.append((cx + rx * w * math.cos(a), cy + ry * w * math.sin(a)))
    return "M " + " L ".join(f"{x:.3f} {y:.3f}" for x, y in pts) + " Z"


def _ramp_hex(t: float, scheme: int) -> str:
    """Smooth colormap sample; scheme 0 = blues, 1 = warm multi-hue."""
    t = min(max(t, 0.0), 1.0)
    if scheme == 0:
        r = 235 - 200 * t
        g = 243 - 180 * t
        b = 255 - 120 * t
    else:
        r = 60 + 195 * t
        g = 40 + 140 * math.sin(math.pi * t * 0.9)
        b = 160 - 140 * t
    return "#%02x%02x%02x" % (int(round(r)), int(round(g)), int(round(b)))


def choropleth_chart(seed: int = 0, width: int = 420, height: int = 300) -> str:
    rng = random.Random(4000 + seed)
    cols, rows = 8, 5
    n = cols * rows
    parts = [f'<svg width="{width}" height="{height}">']
    parts.append(f'<text x="{width / 2:.0f}" y="14" font-size="11" text-anchor="middle">regions {seed}</text>')
    order = list(range(n))
    rng.shuffle(order)
    cell_w = (width - 40) / cols
    cell_h = (height - 50) / rows
    phase0 = rng.random() * math.pi
    for idx, cell in enumerate(order):
        t = idx / (n - 1)
        cx = 20 + (cell % cols + 0.5) * cell_w
        cy = 28 + (cell // cols + 0.5) * cell_h
        r = min(cell_w, cell_h) * 0.33 * (0.8 + 0.5 * t)
        ry = r * (0.65 + 0.55 * t)
        d = _blob(cx, cy, r, ry, phase0 + 5.0 * t)
        parts.append(f'<path d="{d}" fill="{_ramp_hex(t, scheme=0)}" stroke="#ffffff" stroke-width="0.6"/>')
    parts.append("</svg>")
    return "".join(parts)


def node_link_chart(seed: int = 0, width: int = 360, height: int = 300) -> str:
    rng = random.Random(5000 + seed)
    palette = PALETTES[seed % len(PALETTES)][:3]
    n = 12
    nodes = []
    for i in range(n):
        nodes.append((
            40 + rng.random() * (width - 90),
            40 + rng.random() * (height - 80),
        ))
    parts = [f'<svg width="{width}" height="{height}">']
    edges = set()
    while len(edges) < 16:
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            edges.add((min(a, b), max(a, b)))
    for a, b in sorted(edges):
        parts.append(
            f'<line x1="{nodes[a][0]:.2f}" y1="{nodes[a][1]:.2f}" '
            f'x2="{nodes[b][0]:.2f}" y2="{nodes[b][1]:.2f}" stroke="#9a9a9a" stroke-width="1.2"/>'
        )
    for i, (x, y) in enumerate(nodes):
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="7" fill="{palette[i % 3]}"/>')
    parts.append("</svg>")
    return "".join(parts)


def _arrow_points(cx: float, cy: float, size: float, deg: float):
    base = [(-5, -1.2), (1.5, -1.2), (1.5, -3.2), (5.5, 0), (1.5, 3.2), (1.5, 1.2), (-5, 1.2)]
    rad = math.radians(deg)
    c, s = math.cos(rad), math.sin(rad)
    out = []
    for x, y in base:
        x, y = x * size / 5.5, y * size / 5.5
        out.append((cx + c * x - s * y, cy + s * x + c * y))
    return out


def wind_chart(seed: int = 0, width: int = 400, height: int = 280) -> str:
    rng = random.Random(6000 + seed)
    cols, rows = 8, 5
    phase = rng.random() * 18.0
    top = 330.0
    parts = [f'<svg width="{width}" height="{height}">']
    parts.append(f'<text x="{width / 2:.0f}" y="14" font-size="11" text-anchor="middle">field {seed}</text>')
    for j in range(rows):
        for i in range(cols):
            cx = 30 + (i + 0.5) * (width - 60) / cols
            cy = 34 + (j + 0.5) * (height - 64) / rows
            k = j * cols + i
            deg = phase + (top - phase) * k / (cols * rows - 1)
            pts = _arrow_points(cx, cy, 9.0, deg)
            d = "M " + " L ".join(f"{x:.3f} {y:.3f}" for x, y in pts) + " Z"
            parts.append(f'<path d="{d}" fill="{_ramp_hex(deg / top, scheme=1)}"/>')
    parts.append("</svg>")
    return "".join(parts)


def area_chart(seed: int = 0, width: int = 380, height: int = 260) -> str:
    rng = random.Random(7000 + seed)
    palette = PALETTES[seed % len(PALETTES)]
    x0, y1 = 40, height - 30
    plot_w = width - 80
    n_pts = 14
    amp = 9 + rng.random() * 4
    ys = [amp * math.sin(k / 2.1 + seed) + amp * 1.4 for k in range(n_pts)]
    band_h = (y1 - 60) / 12
    pts = []
    for k in range(n_pts):
        pts.append((x0 + k * plot_w / (n_pts - 1), -ys[k]))
    top = " L ".join(f"{x:.2f} {y:.2f}" for x, y in pts)
    bottom = " L ".join(f"{x:.2f} {y + band_h:.2f}" for x, y in reversed(pts))
    band = f"M {top} L {bottom} Z"
    parts = [f'<svg width="{width}" height="{height}">']
    parts.append(_axes(x0, 24, x0 + plot_w, y1))
    for b in range(12):
        dy = y1 - 12 - b * band_h
        parts.append(
            f'<path d="{band}" transform="translate(0,{dy:.2f})" fill="{palette[b % 4]}"/>'
        )
    parts.append(_tick_texts(x0, x0 + plot_w, y1 + 12, 6))
    parts.append("</svg>")
    return "".join(parts)


FAMILIES = {
    "bar": bar_chart,
    "stacked_bar": stacked_bar_chart,
    "scatter": scatter_chart,
    "choropleth": choropleth_chart,
    "node_link": node_link_chart,
    "wind": wind_chart,
}

LABELED_FIXTURES = tuple(FAMILIES)


def labeled_fixture(name: str, seed: int = 0) -> str:
    return FAMILIES[name](seed)


def fixture_corpus() -> list[tuple[str, str]]:
    """24 charts: four seeded variants per family. Variant 3 of each family is
    the held-out set for preference evaluation."""
    out = []
    for name, fn in FAMILIES.items():
        for seed in range(4):
            out.append((f"{name}-{seed}", fn(seed)))
    return out


def corpus_split() -> tuple[list[tuple[str, str]], list[tuple[str, str]]]:
    """(training 18, heldout 6) split of the corpus."""
    train, heldout = [], []
    for name, text in fixture_corpus():
        (heldout if name.endswith("-3") else train).append((name, text))
    return train, heldout
