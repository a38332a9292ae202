"""Encoding channel recovery: color clustering, ordering, ramp interpolation,
classification, and correlation-driven channel merging."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .cluster import dbscan, minmax_normalize
from .errors import LengthMismatch, TooFewColors
from .labcolor import LabColor, chroma, hue_angle_deg, lab_distance, rgb_to_lab
from .svgdoc import SceneGraph, VisualElement
from .symbols import IconicSymbol

COLOR_EPS = 0.15          # normalized LAB DBSCAN radius
COLOR_MIN_POINTS = 3
RAMP_SAMPLES = 512
CONTINUOUS_MIN_DISTINCT = 20
SINGLE_HUE_RANGE_DEG = 30.0
DIVERGING_L_DEVIATION = 10.0
CORRELATION_THRESHOLD = 0.75


@dataclass
class EncodingChannel:
    channel_id: str
    symbol_id: str
    kind: str                      # color | size | rotation
    classification: str            # categorical | ordinal | continuous_*
    ordered_values: list           # RGB tuples, or sorted numeric values
    element_map: dict[str, float]  # element id -> value index or ramp position
    ramp: list[LabColor] | None = None

    def is_continuous(self) -> bool:
        return self.classification.startswith("continuous")

    def cardinality(self) -> int:
        return len(self.ordered_values)


@dataclass
class ChannelGroup:
    group_id: str
    symbol_id: str
    channels: list[EncodingChannel] = field(default_factory=list)

    def primary(self) -> EncodingChannel:
        for kind in ("color", "size", "rotation"):
            for ch in self.channels:
                if ch.kind == kind:
                    return ch
        return self.channels[0]


# --------------------------------------------------------------------------
# clustering and ordering


def cluster_colors(
    colors: list[LabColor], eps: float = COLOR_EPS, min_points: int = COLOR_MIN_POINTS
) -> tuple[list[list[int]], list[int]]:
    """DBSCAN in min-max normalized LAB. Returns (clusters, noise) as index
    lists; clusters are ordered by size descending, ties by first occurrence."""
    if not colors:
        return [], []
    pts = minmax_normalize(np.array([c.to_tuple() for c in colors]))
    labels = dbscan(pts, eps, min_points)
    clusters: dict[int, list[int]] = {}
    noise: list[int] = []
    for i, lab in enumerate(labels):
        if lab == -1:
            noise.append(i)
        else:
            clusters.setdefault(int(lab), []).append(i)
    ordered = sorted(clusters.values(), key=lambda c: (-len(c), c[0]))
    return ordered, noise


def _order_indices(colors: list[LabColor]) -> list[int]:
    n = len(colors)
    dist = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = lab_distance(colors[i], colors[j])
            dist[i, j] = dist[j, i] = d

    k = 1 if n <= 100 else 3
    edges: set[tuple[int, int]] = set()
    for i in range(n):
        order = sorted(range(n), key=lambda j: (dist[i, j], j))
        picked = 0
        for j in order:
            if j == i:
                continue
            edges.add((min(i, j), max(i, j)))
            picked += 1
            if picked >= k:
                break

    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        parent[find(i)] = find(j)
    while True:
        roots = {find(i) for i in range(n)}
        if len(roots) <= 1:
            break
        best = None
        for i in range(n):
            for j in range(i + 1, n):
                if find(i) != find(j):
                    cand = (dist[i, j], i, j)
                    if best is None or cand < best:
                        best = cand
        edges.add((best[1], best[2]))
        parent[find(best[1])] = find(best[2])

    adj: dict[int, list[tuple[float, int]]] = {i: [] for i in range(n)}
    for i, j in edges:
        adj[i].append((dist[i, j], j))
        adj[j].append((dist[i, j], i))

    # Prim MST over the adjacency graph, deterministic tie-breaking
    in_tree = [False] * n
    tree: dict[int, list[tuple[float, int]]] = {i: [] for i in range(n)}
    in_tree[0] = True
    frontier = [(w, 0, j) for w, j in adj[0]]
    count = 1
    while count < n:
        frontier = [(w, u, v) for w, u, v in frontier if not in_tree[v]]
        w, u, v = min(frontier)
        in_tree[v] = True
        tree[u].append((w, v))
        tree[v].append((w, u))
        count += 1
        frontier.extend((w2, v, j) for w2, j in adj[v] if not in_tree[j])

    def preorder(root: int) -> list[int]:
        seq, stack, seen = [], [root], {root}
        while stack:
            node = stack.pop()
            seq.append(node)
            children = sorted(
                [(w, j) for w, j in tree[node] if j not in seen], reverse=True
            )
            for _, j in children:
                seen.add(j)
            stack.extend(j for _, j in children)
        return seq

    def cost(seq: list[int]) -> float:
        return sum(dist[seq[i], seq[i + 1]] for i in range(len(seq) - 1))

    candidates = [list(range(n))]  # never worse than the given order
    candidates.extend(preorder(r) for r in range(n))
    return min(candidates, key=cost)


def order_colors(cluster: list[LabColor]) -> list[LabColor]:
    """Order a color cluster along its shortest visiting path (TSP heuristic:
    kNN graph + MST preorder from every start, minimum-cost sequence wins)."""
    if len(cluster) < 2:
        raise TooFewColors("ordering needs at least 2 colors")
    if len(cluster) == 2:
        return list(cluster)
    return [cluster[i] for i in _order_indices(cluster)]


def sequence_cost(seq: list[LabColor]) -> float:
    return sum(lab_distance(seq[i], seq[i + 1]) for i in range(len(seq) - 1))


# --------------------------------------------------------------------------
# ramp interpolation


def fit_lab_spline(sequence: list[LabColor]):
    """Natural cubic LAB spline parameterized by cumulative chord length.

    Returns (eval_fn, knot_parameters, knot_points); consecutive duplicate
    knots are dropped first.
    """
    pts = np.array([c.to_tuple() for c in sequence], dtype=np.float64)
    keep = [0]
    for i in range(1, len(pts)):
        if np.linalg.norm(pts[i] - pts[keep[-1]]) > 1e-12:
            keep.append(i)
    pts = pts[keep]
    if len(pts) == 1:
        return (lambda ts: np.repeat(pts, len(np.atleast_1d(ts)), axis=0),
                np.zeros(1), pts)
    chord = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    if len(pts) == 2:
        def eval_t(ts: np.ndarray) -> np.ndarray:
            frac = (np.atleast_1d(ts) / chord[-1])[:, None]
            return pts[0] * (1 - frac) + pts[1] * frac
        return eval_t, chord, pts
    return CubicSpline(chord, pts, bc_type="natural"), chord, pts


def interpolate_ramp(sequence: list[LabColor], sample_count: int = RAMP_SAMPLES) -> list[LabColor]:
    """Natural cubic spline through the sequence in LAB, parameterized by
    cumulative chord length, resampled at equidistant arc-length positions."""
    if len(sequence) < 2 or sample_count < 2:
        raise TooFewColors("ramp needs >= 2 knots and >= 2 samples")
    eval_t, chord, pts = fit_lab_spline(sequence)
    if len(pts) == 1:
        return [sequence[0]] * sample_count

    dense_n = max(sample_count * 4, 1024)
    ts = np.linspace(0.0, chord[-1], dense_n)
    dense = eval_t(ts)
    seg = np.linalg.norm(np.diff(dense, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, arc[-1], sample_count)
    t_of_s = np.interp(targets, arc, ts)
    samples = eval_t(t_of_s)
    samples[0] = pts[0]
    samples[-1] = pts[-1]
    return [LabColor(*row) for row in samples]


def ramp_position(ramp: list[LabColor], color: LabColor) -> float:
    """Normalized position of the nearest ramp sample."""
    best, best_d = 0, math.inf
    for i, c in enumerate(ramp):
        d = lab_distance(c, color)
        if d < best_d:
            best, best_d = i, d
    return best / (len(ramp) - 1)


# --------------------------------------------------------------------------
# classification


def _monotone(values: list[float]) -> bool:
    inc = all(values[i] <= values[i + 1] + 1e-9 for i in range(len(values) - 1))
    dec = all(values[i] >= values[i + 1] - 1e-9 for i in range(len(values) - 1))
    return inc or dec


def _hue_range_deg(colors: list[LabColor]) -> float:
    hues = sorted(hue_angle_deg(c) for c in colors if chroma(c) > 2.0)
    if len(hues) < 2:
        return 0.0
    gaps = [hues[i + 1] - hues[i] for i in range(len(hues) - 1)]
    gaps.append(360.0 - hues[-1] + hues[0])
    return 360.0 - max(gaps)


def _interior_l_deviation(sequence: list[LabColor]) -> float:
    """Largest deviation of an interior local L extremum from the endpoint chord."""
    n = len(sequence)
    if n < 3:
        return 0.0
    l0, l1 = sequence[0].L, sequence[-1].L
    worst = 0.0
    for i in range(1, n - 1):
        li = sequence[i].L
        prev, nxt = sequence[i - 1].L, sequence[i + 1].L
        if (li >= prev and li >= nxt) or (li <= prev and li <= nxt):
            chord_l = l0 + (l1 - l0) * i / (n - 1)
            worst = max(worst, abs(li - chord_l))
    return worst


def classify_channel(
    clusters: list[list[LabColor]], ordered: list[LabColor] | None = None
) -> str:
    """Classification per the extracted cluster structure.

    Multiple clusters -> categorical, or ordinal when their ordered centers
    run monotone in lightness. One cluster with enough distinct colors ->
    continuous, subtyped by hue range and interior lightness extrema.
    """
    if len(clusters) >= 2:
        if len(clusters) >= 3:
            centers = [
                LabColor(*np.mean([c.to_tuple() for c in cl], axis=0)) for cl in clusters
            ]
            seq = order_colors(centers)
            if _monotone([c.L for c in seq]):
                return "ordinal"
        return "categorical"
    colors = clusters[0] if clusters else []
    distinct = {(round(c.L, 6), round(c.a, 6), round(c.b, 6)) for c in colors}
    if len(distinct) < CONTINUOUS_MIN_DISTINCT:
        return "categorical"
    seq = ordered if ordered is not None else order_colors(colors)
    if _interior_l_deviation(seq) > DIVERGING_L_DEVIATION:
        return "continuous_diverging"
    if _hue_range_deg(seq) < SINGLE_HUE_RANGE_DEG:
        return "continuous_single_hue"
    return "continuous_multi_hue"


# --------------------------------------------------------------------------
# distance correlation


def distance_correlation(X: np.ndarray, Y: np.ndarray) -> float:
    """Sample distance correlation in [0, 1]; 0 when either input is constant."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if Y.ndim == 1:
        Y = Y[:, None]
    if len(X) != len(Y):
        raise LengthMismatch(f"{len(X)} vs {len(Y)} samples")
    n = len(X)
    if n < 4:
        raise LengthMismatch("distance correlation needs n >= 4")

    def centered(M: np.ndarray) -> np.ndarray:
        d = np.sqrt(((M[:, None, :] - M[None, :, :]) ** 2).sum(axis=2))
        return d - d.mean(axis=0) - d.mean(axis=1)[:, None] + d.mean()

    A, B = centered(X), centered(Y)
    dvar_x = (A * A).mean()
    dvar_y = (B * B).mean()
    if dvar_x <= 1e-24 or dvar_y <= 1e-24:
        return 0.0
    dcov2 = (A * B).mean()
    return float(np.clip(math.sqrt(max(dcov2, 0.0) / math.sqrt(dvar_x * dvar_y)), 0.0, 1.0))


# --------------------------------------------------------------------------
# channel assembly per symbol


def _element_color(el: VisualElement) -> tuple[int, int, int] | None:
    paint = el.fill if el.fill is not None else el.stroke
    if paint is None:
        return None
    return (paint[0], paint[1], paint[2])


def _build_color_channel(
    symbol: IconicSymbol, scene: SceneGraph, channel_id: str
) -> EncodingChannel | None:
    members = [scene.element_by_id(mid) for mid in symbol.member_ids]
    colored = [(el.id, _element_color(el)) for el in members if el is not None]
    colored = [(mid, c) for mid, c in colored if c is not None]
    if len({c for _, c in colored}) < 2:
        return None  # constant paint encodes nothing
    labs = [rgb_to_lab(c) for _, c in colored]
    clusters, _noise = cluster_colors(labs)
    if not clusters:
        return None
    cluster_colors_list = [[labs[i] for i in cl] for cl in clusters]
    classification = classify_channel(cluster_colors_list)

    if classification.startswith("continuous"):
        idxs = clusters[0]
        seen: dict[tuple, int] = {}
        distinct: list[LabColor] = []
        for i in idxs:
            key = colored[i][1]
            if key not in seen:
                seen[key] = len(distinct)
                distinct.append(labs[i])
        seq = order_colors(distinct)
        classification = classify_channel([distinct], ordered=seq)
        if not classification.startswith("continuous"):
            classification = "continuous_multi_hue"
        ramp = interpolate_ramp(seq, RAMP_SAMPLES)
        element_map = {
            colored[i][0]: ramp_position(ramp, labs[i]) for i in idxs
        }
        from .labcolor import lab_to_rgb

        ordered_values = [lab_to_rgb(c) for c in seq]
        return EncodingChannel(
            channel_id, symbol.symbol_id, "color", classification,
            ordered_values, element_map, ramp,
        )

    # discrete: one palette entry per cluster (first exact member color)
    palettes = []
    index_of_cluster = {}
    for ci, cl in enumerate(clusters):
        palettes.append(colored[cl[0]][1])
        index_of_cluster[ci] = ci
    if classification == "ordinal":
        centers = [
            LabColor(*np.mean([labs[i].to_tuple() for i in cl], axis=0)) for cl in clusters
        ]
        seq = order_colors(centers)
        ls = [c.L for c in seq]
        perm = sorted(range(len(clusters)), key=lambda ci: centers[ci].L,
                      reverse=ls[0] > ls[-1])
        palettes = [colored[clusters[ci][0]][1] for ci in perm]
        remap = {old: new for new, old in enumerate(perm)}
    else:
        remap = {ci: ci for ci in range(len(clusters))}
    element_map = {}
    for ci, cl in enumerate(clusters):
        for i in cl:
            element_map[colored[i][0]] = float(remap[ci])
    return EncodingChannel(
        channel_id, symbol.symbol_id, "color", classification, palettes, element_map,
    )


def _build_numeric_channel(
    symbol: IconicSymbol, attr: str, channel_id: str
) -> EncodingChannel | None:
    # snap to visual precision so flattening noise never fabricates a channel
    digits = 2 if attr == "scale_factor" else 1
    values = {mid: round(getattr(ch, attr), digits) for mid, ch in symbol.shape_channels.items()}
    distinct = sorted(set(values.values()))
    if len(distinct) < 2:
        return None
    lo, hi = distinct[0], distinct[-1]
    span = hi - lo if hi > lo else 1.0
    element_map = {mid: (v - lo) / span for mid, v in values.items()}
    kind = "size" if attr == "scale_factor" else "rotation"
    return EncodingChannel(
        channel_id, symbol.symbol_id, kind, "ordinal", distinct, element_map,
    )


def build_channels(symbol: IconicSymbol, scene: SceneGraph) -> list[EncodingChannel]:
    out = []
    color = _build_color_channel(symbol, scene, f"{symbol.symbol_id}.color")
    if color:
        out.append(color)
    size = _build_numeric_channel(symbol, "scale_factor", f"{symbol.symbol_id}.size")
    if size:
        out.append(size)
    rot = _build_numeric_channel(symbol, "rotation", f"{symbol.symbol_id}.rotation")
    if rot:
        out.append(rot)
    return out


def _aligned_samples(
    symbol: IconicSymbol, scene: SceneGraph, channels: list[EncodingChannel]
) -> tuple[list[str], dict[str, np.ndarray]]:
    """Per-element sequences aligned over members present in every channel."""
    common = [
        mid for mid in symbol.member_ids
        if all(mid in ch.element_map for ch in channels)
    ]
    seqs: dict[str, np.ndarray] = {}
    for ch in channels:
        if ch.kind == "color":
            rows = []
            for mid in common:
                el = scene.element_by_id(mid)
                rows.append(rgb_to_lab(_element_color(el)).to_tuple())
            seqs[ch.channel_id] = np.array(rows)
        else:
            attr = "scale_factor" if ch.kind == "size" else "rotation"
            seqs[ch.channel_id] = np.array(
                [getattr(symbol.shape_channels[mid], attr) for mid in common]
            )[:, None]
    return common, seqs


def merge_correlated_channels(
    channels: list[EncodingChannel], symbol: IconicSymbol, scene: SceneGraph,
    threshold: float = CORRELATION_THRESHOLD,
) -> list[list[EncodingChannel]]:
    """Transitively union channels whose pairwise distance correlation exceeds
    the threshold; each group later renders as a single legend."""
    if len(channels) <= 1:
        return [[ch] for ch in channels]
    common, seqs = _aligned_samples(symbol, scene, channels)
    parent = list(range(len(channels)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    if len(common) >= 4:
        for i in range(len(channels)):
            for j in range(i + 1, len(channels)):
                d = distance_correlation(
                    seqs[channels[i].channel_id], seqs[channels[j].channel_id]
                )
                if d > threshold:
                    parent[find(i)] = find(j)
    groups: dict[int, list[EncodingChannel]] = {}
    for i, ch in enumerate(channels):
        groups.setdefault(find(i), []).append(ch)
    return sorted(groups.values(), key=lambda g: channels.index(g[0]))


def extract_channel_groups(scene: SceneGraph, symbols: list[IconicSymbol]) -> list[ChannelGroup]:
    out: list[ChannelGroup] = []
    n = 0
    for symbol in symbols:
        chans = build_channels(symbol, scene)
        for grouped in merge_correlated_channels(chans, symbol, scene):
            out.append(ChannelGroup(f"grp{n}", symbol.symbol_id, grouped))
            n += 1
    return out
