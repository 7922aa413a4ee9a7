"""Exception types shared across the library.

The CLI maps these onto distinct exit codes, so the split matters:
bad user input, numerically untrustworthy results, and label classes
too small for the requested computation are different failure modes.
"""


class BagOfPathsError(Exception):
    """Base class for all library errors."""


class InputError(BagOfPathsError, ValueError):
    """Malformed files, out-of-domain parameters, or invalid graph structure."""


class NumericalError(BagOfPathsError, ArithmeticError):
    """A linear solve or series evaluation failed or cannot be trusted."""


class DegenerateClassError(BagOfPathsError, ValueError):
    """A label class has too few seed nodes for the requested computation."""
