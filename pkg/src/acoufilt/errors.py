"""Exception hierarchy shared by the toolkit.

Every error carries a short machine-parseable ``category`` string; the CLI
prints ``<category>: <detail>`` on stderr and the HTTP service returns it in
the response body.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""

    category = "internal"


class UsageError(ToolkitError):
    """Bad command line or request arguments."""

    category = "usage"


class DomainError(ToolkitError):
    """Input outside an operation's domain, or a type invariant violation."""

    category = "domain"


class RangeError(ToolkitError):
    """Query outside the covered range of a table or dataset."""

    category = "range"


class AmbiguityError(ToolkitError):
    """More than one defensible answer; caller must disambiguate."""

    category = "ambiguity"


class ParseError(ToolkitError):
    """Malformed file content; carries a 1-based line number when known."""

    category = "parse"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ExtractionError(ToolkitError):
    """A figure of merit could not be extracted from the data."""

    category = "extraction"


class BracketingError(ExtractionError):
    """A required extremum sits at (or beyond) the edge of the data."""

    category = "bracketing"


class GridTooCoarseError(ExtractionError):
    """Frequency grid too coarse for unambiguous phase unwrapping."""

    category = "grid"


class FeasibilityError(ToolkitError):
    """A design target is unreachable; message names the limiting bound."""

    category = "feasibility"


class DegeneracyError(ToolkitError):
    """A derived element collapsed below its physical floor."""

    category = "degeneracy"


class RankError(ToolkitError):
    """A fit has too few independent data points."""

    category = "rank"
