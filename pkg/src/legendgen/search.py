"""Genetic search over the mixed discrete/continuous legend space.

Chromosomes carry one index gene per discrete design dimension plus a
normalized (x, y) anchor. Anchors decode into a band extending 15% beyond
the canvas so legends can sit beside the chart, and are quantized to the
metric raster grid so cached evaluation is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .design import ANCHOR_MARGIN, DesignConstraints, LegendSpec
from .errors import NoAdmissibleSpec
from .metrics import MetricVector


@dataclass(frozen=True)
class Chromosome:
    discrete: tuple[int, ...]
    continuous: tuple[float, float]


@dataclass
class GAParams:
    population: int = 50
    generations: int = 100
    crossover_rate: float = 0.8
    mutation_rate: float = 0.1
    elitism: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        assert self.population >= 2
        assert 0.0 <= self.crossover_rate <= 1.0
        assert 0.0 <= self.mutation_rate <= 1.0
        assert self.elitism < self.population


@dataclass
class SearchSpace:
    constraints: DesignConstraints
    canvas_width: float
    canvas_height: float
    anchor_quantum: float = 1.0  # user units per raster pixel

    def __post_init__(self) -> None:
        if any(len(opts) == 0 for _, opts in self.constraints.dimensions()):
            raise NoAdmissibleSpec("a design dimension has no admissible options")

    def dimension_sizes(self) -> list[int]:
        return [len(opts) for _, opts in self.constraints.dimensions()]

    def _anchor(self, u: float, v: float) -> tuple[float, float]:
        span_x = (1.0 + 2 * ANCHOR_MARGIN) * self.canvas_width
        span_y = (1.0 + 2 * ANCHOR_MARGIN) * self.canvas_height
        ax = -ANCHOR_MARGIN * self.canvas_width + u * span_x
        ay = -ANCHOR_MARGIN * self.canvas_height + v * span_y
        q = self.anchor_quantum
        return (round(ax / q) * q, round(ay / q) * q)

    def decode(self, chrom: Chromosome) -> LegendSpec:
        values = {}
        for gene, (name, options) in zip(chrom.discrete, self.constraints.dimensions()):
            values[name] = options[gene % len(options)]
        return LegendSpec(
            symbol_type=values["symbol_type"],
            symbol_layout=values["symbol_layout"],
            text_layout=values["text_layout"],
            multi_layout=values["multi_layout"],
            direction=values["direction"],
            anchor=self._anchor(*chrom.continuous),
            channel_group_ids=self.constraints.group_ids,
        )


@dataclass
class SearchResult:
    ranked: list[tuple[LegendSpec, float]]       # top-k unique, score descending
    best_per_generation: list[float]
    evaluations: int

    @property
    def best(self) -> tuple[LegendSpec, float]:
        return self.ranked[0]


class _Cache:
    """Score cache keyed by decoded spec; counts distinct evaluations."""

    def __init__(self, space: SearchSpace, evaluator, scorer):
        self.space = space
        self.evaluator = evaluator
        self.scorer = scorer
        self.seen: dict[LegendSpec, float] = {}
        self.evaluations = 0

    def score(self, chrom: Chromosome) -> tuple[LegendSpec, float]:
        spec = self.space.decode(chrom)
        if spec not in self.seen:
            self.seen[spec] = float(self.scorer(self.evaluator(spec)))
            self.evaluations += 1
        return spec, self.seen[spec]


def ga_search(
    space: SearchSpace,
    evaluator,
    scorer,
    params: GAParams | None = None,
    top_k: int = 10,
) -> SearchResult:
    """Tournament GA with uniform discrete crossover, arithmetic anchor blend,
    per-gene mutation, and elitism. Deterministic under a fixed seed."""
    params = params or GAParams()
    rng = np.random.default_rng(params.seed)
    sizes = space.dimension_sizes()
    cache = _Cache(space, evaluator, scorer)

    def random_chrom() -> Chromosome:
        return Chromosome(
            tuple(int(rng.integers(0, s)) for s in sizes),
            (float(rng.random()), float(rng.random())),
        )

    def sort_key(entry):
        chrom, spec, score = entry
        return (-score, chrom.discrete, chrom.continuous)

    # half the initial population walks a coverage grid over the anchor band
    # (cycling through discrete combos) so no placement basin starts empty
    population: list[Chromosome] = []
    structured = params.population // 2
    grid = max(int(math.ceil(math.sqrt(structured))), 2)
    combos = itertools.cycle(itertools.product(*(range(s) for s in sizes)))
    for k in range(structured):
        u = (k % grid) / (grid - 1)
        v = ((k // grid) % grid) / (grid - 1)
        population.append(Chromosome(tuple(next(combos)), (u, v)))
    while len(population) < params.population:
        population.append(random_chrom())
    history: list[float] = []
    scored = [(c, *cache.score(c)) for c in population]
    scored.sort(key=sort_key)

    def tournament() -> Chromosome:
        best = None
        for _ in range(3):
            pick = scored[int(rng.integers(0, len(scored)))]
            if best is None or pick[2] > best[2]:
                best = pick
        return best[0]

    for _ in range(params.generations):
        history.append(scored[0][2])
        nxt = [entry[0] for entry in scored[:params.elitism]]
        while len(nxt) < params.population:
            pa, pb = tournament(), tournament()
            da, db = list(pa.discrete), list(pb.discrete)
            ca, cb = list(pa.continuous), list(pb.continuous)
            if rng.random() < params.crossover_rate:
                for k in range(len(da)):
                    if rng.random() < 0.5:
                        da[k], db[k] = db[k], da[k]
                alpha = rng.random()
                blended = [alpha * a + (1 - alpha) * b for a, b in zip(ca, cb)]
                ca = blended
            child_d, child_c = da, ca
            for k in range(len(child_d)):
                if rng.random() < params.mutation_rate:
                    child_d[k] = int(rng.integers(0, sizes[k]))
            child_c = [
                min(max(v + rng.normal(0.0, 0.1), 0.0), 1.0)
                if rng.random() < params.mutation_rate else v
                for v in child_c
            ]
            nxt.append(Chromosome(tuple(child_d), (child_c[0], child_c[1])))
        scored = [(c, *cache.score(c)) for c in nxt]
        scored.sort(key=sort_key)
    history.append(scored[0][2])

    ranked: list[tuple[LegendSpec, float]] = []
    emitted = set()
    for _, spec, score in scored:
        if spec in emitted:
            continue
        emitted.add(spec)
        ranked.append((spec, score))
        if len(ranked) >= top_k:
            break
    # backfill from the cache if the final population lacks variety
    if len(ranked) < top_k:
        for spec, score in sorted(cache.seen.items(), key=lambda kv: -kv[1]):
            if spec not in emitted:
                emitted.add(spec)
                ranked.append((spec, score))
                if len(ranked) >= top_k:
                    break
    ranked.sort(key=lambda pair: -pair[1])
    return SearchResult(ranked, history, cache.evaluations)


def brute_force_search(
    space: SearchSpace,
    evaluator,
    scorer,
    grid: int = 11,
) -> SearchResult:
    """Exhaustive oracle: every discrete combination crossed with a grid of
    anchors; exact argmax with lexicographic gene tie-breaking."""
    if grid < 2:
        raise ValueError("grid must be >= 2")
    sizes = space.dimension_sizes()
    cache = _Cache(space, evaluator, scorer)
    best: tuple | None = None
    count = 0
    axis = [k / (grid - 1) for k in range(grid)]
    for combo in itertools.product(*(range(s) for s in sizes)):
        for u in axis:
            for v in axis:
                chrom = Chromosome(tuple(combo), (u, v))
                spec, score = cache.score(chrom)
                count += 1
                key = (-score, combo, (u, v))
                if best is None or key < best[0]:
                    best = (key, spec, score)
    return SearchResult([(best[1], best[2])], [best[2]], count)
