"""Exception types shared across the pipeline.

Every error carries a stable machine-readable ``code`` so the service can
surface structured failures without string matching.
"""


class LegendgenError(Exception):
    code = "error"


class MalformedDocument(LegendgenError):
    code = "malformed_document"


class UnsupportedFeature(LegendgenError):
    code = "unsupported_feature"


class DegeneratePath(LegendgenError):
    code = "degenerate_path"


class ZeroArea(LegendgenError):
    code = "zero_area"


class EmptySelection(LegendgenError):
    code = "empty_selection"


class NoSymbolsFound(LegendgenError):
    code = "no_symbols"


class TooFewColors(LegendgenError):
    code = "too_few_colors"


class LengthMismatch(LegendgenError):
    code = "length_mismatch"


class RegionOutOfBounds(LegendgenError):
    code = "region_out_of_bounds"


class NoInk(LegendgenError):
    code = "no_ink"


class InvalidBoxes(LegendgenError):
    code = "invalid_boxes"


class InadmissibleSpec(LegendgenError):
    code = "inadmissible_spec"


class UnknownSelection(LegendgenError):
    code = "unknown_selection"


class NotAMark(LegendgenError):
    code = "not_a_mark"


class CardinalityMismatch(LegendgenError):
    code = "cardinality_mismatch"


class NoAdmissibleSpec(LegendgenError):
    code = "no_admissible_spec"


class NonFiniteInput(LegendgenError):
    code = "non_finite_input"


class DivergedUpdate(LegendgenError):
    code = "diverged_update"


class NoChange(LegendgenError):
    code = "no_change"


class VersionConflict(LegendgenError):
    code = "version_conflict"
