"""SVG subset parser: scene graph of flattened visual elements.

Supported: rect, circle, ellipse, line, path, text, g (transform / paint
inheritance), plus linear/radial gradient defs which resolve to their mean
stop color. Group transforms are composed down into each leaf element, so a
parsed scene is a flat paint-ordered list.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from xml.etree import ElementTree

from .csscolors import NAMED_COLORS
from .errors import MalformedDocument
from .geometry import Affine, SubPath, arc_endpoint_to_center

RGBA = tuple[int, int, int, float]

DRAWABLE_KINDS = ("rect", "circle", "ellipse", "line", "path", "text")


@dataclass
class VisualElement:
    id: str
    kind: str
    geometry: dict
    fill: RGBA | None = None
    stroke: RGBA | None = None
    stroke_width: float = 1.0
    transform: Affine = Affine.identity()
    text_content: str | None = None
    font_size: float = 11.0
    text_anchor: str = "start"
    opacity: float = 1.0
    fill_rule: str = "nonzero"

    def copy(self) -> "VisualElement":
        geo = dict(self.geometry)
        if self.kind == "path":
            geo["subpaths"] = [SubPath(list(sp.segments), sp.closed) for sp in geo["subpaths"]]
        return replace(self, geometry=geo)


@dataclass
class SceneGraph:
    canvas_width: float
    canvas_height: float
    elements: list[VisualElement] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.canvas_width <= 0 or self.canvas_height <= 0:
            raise MalformedDocument("canvas dimensions must be positive")
        ids = [e.id for e in self.elements]
        if len(ids) != len(set(ids)):
            raise MalformedDocument("duplicate element ids")

    def element_by_id(self, eid: str) -> VisualElement | None:
        for e in self.elements:
            if e.id == eid:
                return e
        return None

    def copy(self) -> "SceneGraph":
        return SceneGraph(
            self.canvas_width,
            self.canvas_height,
            [e.copy() for e in self.elements],
            list(self.warnings),
        )


# --------------------------------------------------------------------------
# attribute parsing

_NUM_RE = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")
_TRANSFORM_RE = re.compile(r"(matrix|translate|scale|rotate|skewX|skewY)\s*\(([^)]*)\)")


def _floats(text: str) -> list[float]:
    return [float(m) for m in _NUM_RE.findall(text)]


def parse_transform(text: str | None) -> Affine:
    t = Affine.identity()
    if not text:
        return t
    for name, args in _TRANSFORM_RE.findall(text):
        v = _floats(args)
        if name == "matrix" and len(v) == 6:
            t = t @ Affine(*v)
        elif name == "translate":
            t = t @ Affine.translate(v[0], v[1] if len(v) > 1 else 0.0)
        elif name == "scale":
            t = t @ Affine.scale(v[0], v[1] if len(v) > 1 else None)
        elif name == "rotate":
            if len(v) == 3:
                t = t @ Affine.rotate(v[0], v[1], v[2])
            else:
                t = t @ Affine.rotate(v[0])
        elif name == "skewX":
            t = t @ Affine.skew_x(v[0])
        elif name == "skewY":
            t = t @ Affine.skew_y(v[0])
    return t


def parse_color(text: str | None) -> RGBA | None | str:
    """Returns an RGBA tuple, None for 'none', or 'unsupported'."""
    if text is None:
        return "unsupported"
    s = text.strip().lower()
    if s in ("none", "transparent"):
        return None
    if s.startswith("#"):
        h = s[1:]
        if len(h) == 3:
            try:
                return (int(h[0] * 2, 16), int(h[1] * 2, 16), int(h[2] * 2, 16), 1.0)
            except ValueError:
                return "unsupported"
        if len(h) == 6:
            try:
                return (int(h[0:2], 16), int(h[2:4], 16), int(h[4:6], 16), 1.0)
            except ValueError:
                return "unsupported"
        return "unsupported"
    if s.startswith("rgb(") or s.startswith("rgba("):
        v = _floats(s)
        if len(v) >= 3:
            def chan(x: float) -> int:
                if "%" in s:
                    x = x * 255.0 / 100.0
                return max(0, min(255, int(round(x))))
            a = float(v[3]) if len(v) >= 4 else 1.0
            return (chan(v[0]), chan(v[1]), chan(v[2]), max(0.0, min(1.0, a)))
        return "unsupported"
    if s in NAMED_COLORS:
        r, g, b = NAMED_COLORS[s]
        return (r, g, b, 1.0)
    return "unsupported"


def _parse_style(style: str | None) -> dict[str, str]:
    out: dict[str, str] = {}
    if not style:
        return out
    for part in style.split(";"):
        if ":" in part:
            k, v = part.split(":", 1)
            out[k.strip()] = v.strip()
    return out


_PATH_TOKEN_RE = re.compile(r"([MmLlHhVvCcQqAaZzSsTt])|" + _NUM_RE.pattern)


def parse_path_data(d: str) -> list[SubPath]:
    """Parse a path `d` string into absolute-coordinate subpaths.

    Handles M, L, H, V, C, Q, A, Z and their relative forms, with implicit
    command repetition. S/T smooth shorthands resolve to full C/Q segments.
    """
    tokens: list[str] = []
    for m in _PATH_TOKEN_RE.finditer(d):
        tokens.append(m.group(0))
    pos = 0

    def take(n: int) -> list[float]:
        nonlocal pos
        vals = [float(t) for t in tokens[pos:pos + n]]
        if len(vals) < n:
            raise MalformedDocument(f"truncated path data: {d[:40]!r}")
        pos += n
        return vals

    subpaths: list[SubPath] = []
    cur: SubPath | None = None
    cx = cy = 0.0            # current point
    sx = sy = 0.0            # subpath start
    prev_cmd = ""
    prev_ctrl: tuple[float, float] | None = None
    cmd = ""

    while pos < len(tokens):
        tok = tokens[pos]
        if tok.isalpha():
            cmd = tok
            pos += 1
        elif not cmd:
            raise MalformedDocument("path data must start with a command")
        # implicit repetition: M repeats as L
        run = cmd
        if cmd in "Mm" and prev_cmd in "Mm" and not tok.isalpha():
            run = "L" if cmd == "M" else "l"
        rel = run.islower()
        op = run.upper()

        if op == "M":
            x, y = take(2)
            if rel:
                x, y = cx + x, cy + y
            if cur is not None and cur.segments:
                subpaths.append(cur)
            cur = SubPath()
            cx, cy, sx, sy = x, y, x, y
            prev_ctrl = None
        elif op == "Z":
            if cur is not None:
                if (abs(cx - sx) > 1e-12 or abs(cy - sy) > 1e-12) and cur.segments:
                    cur.segments.append(("L", cx, cy, sx, sy))
                cur.closed = True
                subpaths.append(cur)
                cur = None
            cx, cy = sx, sy
            prev_ctrl = None
        elif op in ("L", "H", "V"):
            if op == "L":
                x, y = take(2)
                if rel:
                    x, y = cx + x, cy + y
            elif op == "H":
                (x,) = take(1)
                if rel:
                    x = cx + x
                y = cy
            else:
                (y,) = take(1)
                if rel:
                    y = cy + y
                x = cx
            if cur is None:
                cur = SubPath()
                sx, sy = cx, cy
            cur.segments.append(("L", cx, cy, x, y))
            cx, cy = x, y
            prev_ctrl = None
        elif op in ("C", "S"):
            if op == "C":
                x1, y1, x2, y2, x, y = take(6)
            else:
                x2, y2, x, y = take(4)
                if prev_cmd.upper() in ("C", "S") and prev_ctrl is not None:
                    x1, y1 = 2 * cx - prev_ctrl[0], 2 * cy - prev_ctrl[1]
                    if rel:
                        x1, y1 = x1 - cx, y1 - cy
                else:
                    x1, y1 = (0.0, 0.0) if rel else (cx, cy)
            if rel:
                x1, y1, x2, y2, x, y = x1 + cx, y1 + cy, x2 + cx, y2 + cy, x + cx, y + cy
            if cur is None:
                cur = SubPath()
                sx, sy = cx, cy
            cur.segments.append(("C", cx, cy, x1, y1, x2, y2, x, y))
            prev_ctrl = (x2, y2)
            cx, cy = x, y
        elif op in ("Q", "T"):
            if op == "Q":
                x1, y1, x, y = take(4)
            else:
                x, y = take(2)
                if prev_cmd.upper() in ("Q", "T") and prev_ctrl is not None:
                    x1, y1 = 2 * cx - prev_ctrl[0], 2 * cy - prev_ctrl[1]
                    if rel:
                        x1, y1 = x1 - cx, y1 - cy
                else:
                    x1, y1 = (0.0, 0.0) if rel else (cx, cy)
            if rel:
                x1, y1, x, y = x1 + cx, y1 + cy, x + cx, y + cy
            if cur is None:
                cur = SubPath()
                sx, sy = cx, cy
            cur.segments.append(("Q", cx, cy, x1, y1, x, y))
            prev_ctrl = (x1, y1)
            cx, cy = x, y
        elif op == "A":
            rx, ry, rot, laf, swf, x, y = take(7)
            if rel:
                x, y = cx + x, cy + y
            if cur is None:
                cur = SubPath()
                sx, sy = cx, cy
            center = arc_endpoint_to_center(cx, cy, rx, ry, rot, bool(laf), bool(swf), x, y)
            if center is None:
                cur.segments.append(("L", cx, cy, x, y))
            else:
                acx, acy, arx, ary, phi, t0, dt = center
                cur.segments.append(("A", cx, cy, acx, acy, arx, ary, phi, t0, dt, x, y))
            cx, cy = x, y
            prev_ctrl = None
        else:
            raise MalformedDocument(f"unsupported path command {run!r}")
        prev_cmd = run

    if cur is not None and cur.segments:
        subpaths.append(cur)
    return subpaths


# --------------------------------------------------------------------------
# document walking

_SKIP_TAGS = {"title", "desc", "metadata", "style", "script", "clipPath", "mask",
              "filter", "marker", "pattern", "symbol", "use", "image", "foreignObject"}


def _strip_ns(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _collect_gradients(root: ElementTree.Element) -> dict[str, RGBA]:
    """Mean stop color per gradient id; gradient fills degrade to solids."""
    out: dict[str, RGBA] = {}
    for node in root.iter():
        tag = _strip_ns(node.tag)
        if tag not in ("linearGradient", "radialGradient"):
            continue
        gid = node.get("id")
        if not gid:
            continue
        stops = []
        for stop in node:
            if _strip_ns(stop.tag) != "stop":
                continue
            style = _parse_style(stop.get("style"))
            col = stop.get("stop-color") or style.get("stop-color")
            parsed = parse_color(col)
            if isinstance(parsed, tuple):
                stops.append(parsed)
        if stops:
            r = sum(s[0] for s in stops) / len(stops)
            g = sum(s[1] for s in stops) / len(stops)
            b = sum(s[2] for s in stops) / len(stops)
            a = sum(s[3] for s in stops) / len(stops)
            out[gid] = (int(round(r)), int(round(g)), int(round(b)), a)
    return out


_URL_RE = re.compile(r"url\(\s*#([^)\s]+)\s*\)")


def parse_svg(text: str) -> SceneGraph:
    """Parse SVG text into a flat scene graph in document paint order."""
    try:
        root = ElementTree.fromstring(text)
    except ElementTree.ParseError as exc:
        raise MalformedDocument(str(exc)) from exc
    if _strip_ns(root.tag) != "svg":
        raise MalformedDocument("root element is not <svg>")

    width = root.get("width")
    height = root.get("height")
    viewbox = root.get("viewBox")
    base = Affine.identity()
    if viewbox:
        vb = _floats(viewbox)
        if len(vb) != 4 or vb[2] <= 0 or vb[3] <= 0:
            raise MalformedDocument("bad viewBox")
        if width and height:
            try:
                w = float(_NUM_RE.search(width).group(0))
                h = float(_NUM_RE.search(height).group(0))
            except (AttributeError, ValueError) as exc:
                raise MalformedDocument("bad width/height") from exc
            base = Affine.scale(w / vb[2], h / vb[3]) @ Affine.translate(-vb[0], -vb[1])
        else:
            w, h = vb[2], vb[3]
            base = Affine.translate(-vb[0], -vb[1])
    elif width and height:
        try:
            w = float(_NUM_RE.search(width).group(0))
            h = float(_NUM_RE.search(height).group(0))
        except (AttributeError, ValueError) as exc:
            raise MalformedDocument("bad width/height") from exc
    else:
        raise MalformedDocument("svg needs width/height or viewBox")

    gradients = _collect_gradients(root)
    warnings: list[str] = []
    elements: list[VisualElement] = []
    used_ids: set[str] = set()
    counter = [0]

    def fresh_id(preferred: str | None) -> str:
        if preferred and preferred not in used_ids:
            used_ids.add(preferred)
            return preferred
        while True:
            counter[0] += 1
            candidate = f"e{counter[0]}"
            if candidate not in used_ids:
                used_ids.add(candidate)
                return candidate

    def resolve_paint(raw: str | None, inherited: RGBA | None, default: RGBA | None) -> RGBA | None:
        if raw is None:
            return inherited if inherited != "unset" else default
        m = _URL_RE.match(raw.strip())
        if m:
            grad = gradients.get(m.group(1))
            if grad is None:
                warnings.append(f"unresolved paint reference {raw!r}")
                return default
            return grad
        parsed = parse_color(raw)
        if parsed == "unsupported":
            warnings.append(f"unsupported color {raw!r}")
            return default
        return parsed

    def walk(node: ElementTree.Element, ctm: Affine, inh: dict) -> None:
        tag = _strip_ns(node.tag)
        if tag in _SKIP_TAGS or tag in ("linearGradient", "radialGradient"):
            if tag in ("use", "image", "filter", "foreignObject"):
                warnings.append(f"skipped unsupported element <{tag}>")
            return
        style = _parse_style(node.get("style"))

        def attr(name: str) -> str | None:
            return style.get(name, node.get(name))

        transform = ctm @ parse_transform(attr("transform"))
        fill_raw = attr("fill")
        stroke_raw = attr("stroke")
        sw_raw = attr("stroke-width")
        op_raw = attr("opacity")
        fs_raw = attr("font-size")
        anchor = attr("text-anchor") or inh.get("text_anchor", "start")
        # inheritance: attribute > inherited > default
        if fill_raw is not None:
            fill = resolve_paint(fill_raw, None, None)
        else:
            fill = inh.get("fill", "unset")
        if stroke_raw is not None:
            stroke = resolve_paint(stroke_raw, None, None)
        else:
            stroke = inh.get("stroke", "unset")
        stroke_width = float(sw_raw) if sw_raw is not None else inh.get("stroke_width", 1.0)
        opacity = float(op_raw) if op_raw is not None else inh.get("opacity", 1.0)
        font_size = float(_NUM_RE.search(fs_raw).group(0)) if fs_raw else inh.get("font_size", 11.0)
        scope = {
            "fill": fill,
            "stroke": stroke,
            "stroke_width": stroke_width,
            "opacity": opacity,
            "font_size": font_size,
            "text_anchor": anchor,
        }

        if tag in ("svg", "g", "defs"):
            if tag == "defs":
                return
            for child in node:
                walk(child, transform, scope)
            return

        if tag not in DRAWABLE_KINDS:
            warnings.append(f"skipped unsupported element <{tag}>")
            return

        eff_fill = fill if fill != "unset" else (0, 0, 0, 1.0)  # SVG default paint
        eff_stroke = stroke if stroke != "unset" else None
        eid = fresh_id(node.get("id"))

        def add(kind: str, geometry: dict, text: str | None = None) -> None:
            if kind != "text" and eff_fill is None and eff_stroke is None:
                warnings.append(f"element {eid} has no paint; skipped")
                return
            elements.append(VisualElement(
                id=eid,
                kind=kind,
                geometry=geometry,
                fill=eff_fill,
                stroke=eff_stroke,
                stroke_width=stroke_width,
                transform=transform,
                text_content=text,
                font_size=font_size,
                text_anchor=anchor,
                opacity=opacity,
            ))

        def fattr(name: str, default: float = 0.0) -> float:
            v = attr(name)
            return float(v) if v is not None else default

        if tag == "rect":
            geo = {"x": fattr("x"), "y": fattr("y"),
                   "width": fattr("width"), "height": fattr("height")}
            if geo["width"] <= 0 or geo["height"] <= 0:
                warnings.append(f"rect {eid} has non-positive size; skipped")
                return
            add("rect", geo)
        elif tag == "circle":
            geo = {"cx": fattr("cx"), "cy": fattr("cy"), "r": fattr("r")}
            if geo["r"] <= 0:
                warnings.append(f"circle {eid} has non-positive radius; skipped")
                return
            add("circle", geo)
        elif tag == "ellipse":
            geo = {"cx": fattr("cx"), "cy": fattr("cy"),
                   "rx": fattr("rx"), "ry": fattr("ry")}
            if geo["rx"] <= 0 or geo["ry"] <= 0:
                warnings.append(f"ellipse {eid} has non-positive radius; skipped")
                return
            add("ellipse", geo)
        elif tag == "line":
            geo = {"x1": fattr("x1"), "y1": fattr("y1"),
                   "x2": fattr("x2"), "y2": fattr("y2")}
            el_stroke = eff_stroke if eff_stroke is not None else (0, 0, 0, 1.0)
            elements.append(VisualElement(
                id=eid, kind="line", geometry=geo, fill=None, stroke=el_stroke,
                stroke_width=stroke_width, transform=transform, opacity=opacity,
            ))
        elif tag == "path":
            d = attr("d")
            if not d:
                warnings.append(f"path {eid} missing d; skipped")
                return
            subpaths = parse_path_data(d)
            if not subpaths:
                warnings.append(f"path {eid} empty; skipped")
                return
            geo = {"subpaths": subpaths}
            fr = attr("fill-rule")
            el = None
            if eff_fill is None and eff_stroke is None:
                warnings.append(f"path {eid} has no paint; skipped")
                return
            elements.append(VisualElement(
                id=eid, kind="path", geometry=geo, fill=eff_fill, stroke=eff_stroke,
                stroke_width=stroke_width, transform=transform, opacity=opacity,
                fill_rule=fr if fr in ("nonzero", "evenodd") else "nonzero",
            ))
        elif tag == "text":
            content = "".join(node.itertext()).strip()
            geo = {"x": fattr("x"), "y": fattr("y")}
            text_fill = eff_fill if eff_fill is not None else (0, 0, 0, 1.0)
            elements.append(VisualElement(
                id=eid, kind="text", geometry=geo, fill=text_fill, stroke=None,
                stroke_width=0.0, transform=transform, text_content=content,
                font_size=font_size, text_anchor=anchor, opacity=opacity,
            ))

    for child in root:
        walk(child, base, {})

    scene = SceneGraph(w, h, elements, warnings)
    return scene


# --------------------------------------------------------------------------
# serialization

def fmt_num(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return format(x, ".9g")


def _rgba_svg(c: RGBA) -> tuple[str, float]:
    return (f"#{c[0]:02x}{c[1]:02x}{c[2]:02x}", c[3])


def _transform_svg(t: Affine) -> str | None:
    if t.is_identity():
        return None
    return "matrix(" + " ".join(fmt_num(v) for v in t) + ")"


def element_to_svg(el: VisualElement) -> str:
    attrs: list[tuple[str, str]] = [("id", el.id)]
    g = el.geometry
    if el.kind == "rect":
        for k in ("x", "y", "width", "height"):
            attrs.append((k, fmt_num(g[k])))
    elif el.kind == "circle":
        for k in ("cx", "cy", "r"):
            attrs.append((k, fmt_num(g[k])))
    elif el.kind == "ellipse":
        for k in ("cx", "cy", "rx", "ry"):
            attrs.append((k, fmt_num(g[k])))
    elif el.kind == "line":
        for k in ("x1", "y1", "x2", "y2"):
            attrs.append((k, fmt_num(g[k])))
    elif el.kind == "path":
        attrs.append(("d", path_data_to_svg(g["subpaths"])))
        if el.fill_rule != "nonzero":
            attrs.append(("fill-rule", el.fill_rule))
    elif el.kind == "text":
        attrs.append(("x", fmt_num(g["x"])))
        attrs.append(("y", fmt_num(g["y"])))
        attrs.append(("font-size", fmt_num(el.font_size)))
        if el.text_anchor != "start":
            attrs.append(("text-anchor", el.text_anchor))

    if el.kind == "text":
        hexv, a = _rgba_svg(el.fill) if el.fill else ("none", 1.0)
        attrs.append(("fill", hexv))
        if a != 1.0:
            attrs.append(("fill-opacity", fmt_num(a)))
    else:
        if el.fill is not None:
            hexv, a = _rgba_svg(el.fill)
            attrs.append(("fill", hexv))
            if a != 1.0:
                attrs.append(("fill-opacity", fmt_num(a)))
        else:
            attrs.append(("fill", "none"))
        if el.stroke is not None:
            hexv, a = _rgba_svg(el.stroke)
            attrs.append(("stroke", hexv))
            if a != 1.0:
                attrs.append(("stroke-opacity", fmt_num(a)))
            attrs.append(("stroke-width", fmt_num(el.stroke_width)))
    if el.opacity != 1.0:
        attrs.append(("opacity", fmt_num(el.opacity)))
    tr = _transform_svg(el.transform)
    if tr:
        attrs.append(("transform", tr))

    attr_text = " ".join(f'{k}="{v}"' for k, v in attrs)
    if el.kind == "text":
        content = (el.text_content or "").replace("&", "&amp;").replace("<", "&lt;")
        return f"<text {attr_text}>{content}</text>"
    return f"<{el.kind} {attr_text}/>"


def path_data_to_svg(subpaths: list[SubPath]) -> str:
    parts: list[str] = []
    for sp in subpaths:
        if not sp.segments:
            continue
        x0, y0 = sp.start_point()
        parts.append(f"M {fmt_num(x0)} {fmt_num(y0)}")
        for seg in sp.segments:
            kind = seg[0]
            if kind == "L":
                parts.append(f"L {fmt_num(seg[3])} {fmt_num(seg[4])}")
            elif kind == "C":
                parts.append("C " + " ".join(fmt_num(v) for v in seg[3:]))
            elif kind == "Q":
                parts.append("Q " + " ".join(fmt_num(v) for v in seg[3:]))
            elif kind == "A":
                # re-derive endpoint form from center parameters
                _, _, _, cx, cy, rx, ry, phi, t0, dt, x1, y1 = seg
                large = 1 if abs(dt) > math.pi else 0
                sweep = 1 if dt > 0 else 0
                parts.append(
                    f"A {fmt_num(rx)} {fmt_num(ry)} {fmt_num(math.degrees(phi))} "
                    f"{large} {sweep} {fmt_num(x1)} {fmt_num(y1)}"
                )
        if sp.closed:
            parts.append("Z")
    return " ".join(parts)


def scene_to_svg(scene: SceneGraph) -> str:
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{fmt_num(scene.canvas_width)}" '
        f'height="{fmt_num(scene.canvas_height)}">'
    ]
    for el in scene.elements:
        lines.append("  " + element_to_svg(el))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
