"""legendgen: interactive legend generation for SVG charts.

Pipeline: parse an SVG chart, extract iconic symbols and their encoding
channels, search the legend design space with a genetic algorithm scored by
a small perceptron, and adapt that scorer online from preference feedback.
"""

from .channels import ChannelGroup, EncodingChannel
from .design import CompositeDocument, LegendFragment, LegendSpec, valid_space
from .metrics import MetricVector, metric_vector
from .model import FeedbackTuple, QualityModel, init_model, update
from .pipeline import Document
from .search import GAParams, SearchSpace, brute_force_search, ga_search
from .svgdoc import SceneGraph, VisualElement, parse_svg, scene_to_svg
from .symbols import IconicSymbol, extract_symbols

__version__ = "0.1.0"

__all__ = [
    "ChannelGroup",
    "CompositeDocument",
    "Document",
    "EncodingChannel",
    "FeedbackTuple",
    "GAParams",
    "IconicSymbol",
    "LegendFragment",
    "LegendSpec",
    "MetricVector",
    "QualityModel",
    "SceneGraph",
    "SearchSpace",
    "VisualElement",
    "brute_force_search",
    "extract_symbols",
    "ga_search",
    "init_model",
    "metric_vector",
    "parse_svg",
    "scene_to_svg",
    "update",
    "valid_space",
    "__version__",
]
