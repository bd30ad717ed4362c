"""Exception hierarchy shared across the package."""


class DecompCovError(Exception):
    """Base class for all validation and numeric failures raised here."""


class BadIndex(DecompCovError):
    """Node index out of range, empty clique, or uncovered node."""


class DuplicateOrNestedClique(DecompCovError):
    """A supplied clique is contained in (or equal to) another one."""


class NotDecomposable(DecompCovError):
    """No clique ordering satisfies the running intersection property."""


class NotChordal(DecompCovError):
    """Adjacency pattern has a chordless cycle of length four or more.

    ``cycle`` holds a best-effort witness (list of 1-based nodes) or None.
    """

    def __init__(self, message, cycle=None):
        super().__init__(message)
        self.cycle = cycle


class NotPositiveDefinite(DecompCovError):
    """Cholesky factorization failed on a matrix required to be SPD."""


class PatternViolation(DecompCovError):
    """Matrix has nonzero entries outside the graph's edge set."""


class SingularBlock(DecompCovError):
    """A clique or separator block of the sample statistic is singular."""


class TooFewSamples(DecompCovError):
    """Sample count below the existence threshold max_k |C_k|."""

    def __init__(self, n, max_clique):
        super().__init__(
            f"need n >= {max_clique} samples (largest clique), got n = {n}"
        )
        self.n = n
        self.max_clique = max_clique


class ZeroTrace(DecompCovError):
    """Degenerate all-zero data: Tr(scatter) is not positive."""


class NotConverged(DecompCovError):
    """Iterative projection hit its iteration cap.

    Carries the best iterate as ``estimate`` and its ``report``.
    """

    def __init__(self, message, estimate=None, report=None):
        super().__init__(message)
        self.estimate = estimate
        self.report = report
