"""Exception hierarchy.

Every error raised by the package derives from :class:`EraSegError` and
carries enough context (window index, country, row) for the pipeline to
report where a failure happened.
"""


class EraSegError(Exception):
    """Base class; ``exit_code`` is what the command line returns."""

    exit_code = 1


# -- panel ingest ----------------------------------------------------------

class PanelError(EraSegError, ValueError):
    exit_code = 3


class MalformedDates(PanelError):
    pass


class BadValue(PanelError):
    def __init__(self, row, column, value):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"bad price value {value!r} at data row {row}, column {column!r}")


class GapInSeries(PanelError):
    def __init__(self, country):
        self.country = country
        super().__init__(f"internal gap in series for country {country!r}")


class PanelTooShort(PanelError):
    pass


# -- graph construction ----------------------------------------------------

class WindowTooSparse(EraSegError, ValueError):
    exit_code = 4

    def __init__(self, window_index, n_included=0):
        self.window_index = window_index
        self.n_included = n_included
        super().__init__(
            f"window {window_index}: only {n_included} country(ies) usable, need at least 2"
        )


class NonContiguousWindows(EraSegError, ValueError):
    exit_code = 4


# -- segmentation ----------------------------------------------------------

class SegmentationError(EraSegError, ValueError):
    exit_code = 5


class ConstantIndexRow(SegmentationError):
    def __init__(self, row):
        self.row = row
        super().__init__(f"index row {row!r} is constant; cannot standardize")


class ShapeError(SegmentationError):
    pass


class BadInput(SegmentationError):
    pass


class BadBounds(SegmentationError):
    pass


# -- embedding / rendering -------------------------------------------------

class RenderError(EraSegError, ValueError):
    exit_code = 6


class TooFewNodes(RenderError):
    pass


class BadK(RenderError):
    pass


class ConsistencyError(RenderError):
    pass


class ReportIOError(EraSegError, OSError):
    exit_code = 7
