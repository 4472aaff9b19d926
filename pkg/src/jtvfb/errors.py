"""Exception types shared across the library.

Every validation or numeric failure raises a subclass of ``JTVError`` so
callers (and the CLI) can distinguish library errors from I/O errors.
"""


class JTVError(Exception):
    """Base class for all library errors."""


class IndexOutOfRangeError(JTVError):
    """Node index outside ``[0, n)``."""


class SelfLoopError(JTVError):
    """Edge connecting a node to itself."""


class DuplicateEdgeError(JTVError):
    """The same unordered node pair appears more than once."""


class NonPositiveWeightError(JTVError):
    """Edge weight is zero or negative."""


class TooSmallError(JTVError):
    """Structure below its minimum admissible size."""


class IsolatedNodeError(JTVError):
    """Zero-degree node rejected in strict mode."""


class NotSymmetricError(JTVError):
    """Matrix is not symmetric within tolerance."""


class NoConvergenceError(JTVError):
    """Eigensolver failed to converge."""


class BadSplitIndexError(JTVError):
    """Color-class split index outside ``[1, K)``."""


class InconsistentExtensionError(JTVError):
    """The two redundancy formulas disagree for an extension."""


class TooLargeToMaterializeError(JTVError):
    """Joint operator too large for dense materialization."""


class DimensionMismatchError(JTVError):
    """Operand shapes are incompatible."""


class NotBipartiteError(JTVError):
    """A bipartition does not certify the graph as bipartite."""


class ZeroReferenceError(JTVError):
    """SNR reference signal is identically zero."""


class BadPatientZeroError(JTVError):
    """Empty or out-of-range patient-zero node list."""


class UnreadableImageError(JTVError):
    """Image file is missing, malformed, or unsupported."""


class TooFewFramesError(JTVError):
    """Video sequence shorter than the minimum frame count."""
