"""End-to-end assembly: parse -> extract -> constrain -> search."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property

from .channels import ChannelGroup, extract_channel_groups
from .design import (
    CompositeDocument,
    DesignConstraints,
    LegendFragment,
    LegendSpec,
    composite,
    render_legend,
    valid_space,
)
from .metrics import ChartContext, MetricVector, metric_vector
from .model import QualityModel
from .search import GAParams, SearchResult, SearchSpace, brute_force_search, ga_search
from .svgdoc import SceneGraph, parse_svg, scene_to_svg
from .symbols import IconicSymbol, extract_symbols


def legend_eligible(groups: list[ChannelGroup], symbols: list[IconicSymbol]) -> list[ChannelGroup]:
    """Channel groups worth a legend: anything carrying a color channel, plus
    size channels on circular marks (bubble radii). Falls back to all groups
    when nothing qualifies, so every extractable chart stays designable."""
    kind_of = {s.symbol_id: s.kind for s in symbols}
    picked = []
    for g in groups:
        kinds = {ch.kind for ch in g.channels}
        if "color" in kinds:
            picked.append(g)
        elif g.primary().kind == "size" and kind_of.get(g.symbol_id) in ("circle", "ellipse"):
            picked.append(g)
    return picked or list(groups)


@dataclass
class Document:
    """A parsed chart with its extraction results and evaluation caches."""

    scene: SceneGraph
    symbols: list[IconicSymbol]
    groups: list[ChannelGroup]
    legend_groups: list[ChannelGroup]
    constraints: DesignConstraints
    doc_id: str
    source: str = ""
    _context: ChartContext | None = field(default=None, repr=False)

    @staticmethod
    def from_svg(text: str) -> "Document":
        scene = parse_svg(text)
        symbols = extract_symbols(scene)
        groups = extract_channel_groups(scene, symbols)
        legend_groups = legend_eligible(groups, symbols)
        constraints = valid_space(legend_groups)
        doc_id = hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
        return Document(scene, symbols, groups, legend_groups, constraints, doc_id, text)

    # -- rendering ----------------------------------------------------------

    def render(self, spec: LegendSpec) -> LegendFragment:
        return render_legend(spec, self.legend_groups, self.scene, self.symbols, self.constraints)

    def compose(self, spec: LegendSpec) -> CompositeDocument:
        fragment = self.render(spec)
        return composite(self.scene, fragment, spec.anchor, spec,
                         self.legend_groups, self.symbols)

    def composed_svg(self, spec: LegendSpec) -> str:
        return scene_to_svg(self.compose(spec).to_scene())

    # -- evaluation ----------------------------------------------------------

    @property
    def context(self) -> ChartContext:
        if self._context is None:
            self._context = ChartContext(
                self.scene, self.symbols, self.legend_groups, self.render
            )
        return self._context

    def metrics_for(self, spec: LegendSpec, fast: bool = True) -> MetricVector:
        if fast:
            return self.context.evaluate_spec(spec)
        return metric_vector(self.compose(spec))

    def search_space(self) -> SearchSpace:
        return SearchSpace(
            constraints=self.constraints,
            canvas_width=self.scene.canvas_width,
            canvas_height=self.scene.canvas_height,
            anchor_quantum=1.0 / self.context.scale,
        )

    def candidates(
        self,
        model: QualityModel,
        params: GAParams | None = None,
        top_k: int = 10,
    ) -> SearchResult:
        return ga_search(
            self.search_space(),
            self.context.evaluate_spec,
            model.score,
            params,
            top_k=top_k,
        )

    def brute_force(self, model: QualityModel, grid: int = 11) -> SearchResult:
        return brute_force_search(self.search_space(), self.context.evaluate_spec,
                                  model.score, grid)

    # -- reporting -----------------------------------------------------------

    def extraction_report(self) -> dict:
        return {
            "document_id": self.doc_id,
            "canvas": [self.scene.canvas_width, self.scene.canvas_height],
            "symbols": [
                {
                    "symbol_id": s.symbol_id,
                    "kind": s.kind,
                    "match_stage": s.match_stage,
                    "members": len(s.member_ids),
                    "representative": s.representative_id,
                }
                for s in self.symbols
            ],
            "channel_groups": [
                {
                    "group_id": g.group_id,
                    "symbol_id": g.symbol_id,
                    "legend_eligible": g in self.legend_groups,
                    "channels": [
                        {
                            "channel_id": ch.channel_id,
                            "kind": ch.kind,
                            "classification": ch.classification,
                            "cardinality": ch.cardinality(),
                            "values": (
                                ["#%02x%02x%02x" % tuple(c) for c in ch.ordered_values]
                                if ch.kind == "color"
                                else [float(v) for v in ch.ordered_values]
                            ),
                        }
                        for ch in g.channels
                    ],
                }
                for g in self.groups
            ],
            "warnings": list(self.scene.warnings),
        }
