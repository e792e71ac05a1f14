"""Exception taxonomy for manifold constructions and solvers.

Every failure mode that callers are expected to handle (recording a
failed estimator run, rejecting malformed input files, ...) derives
from :class:`ManifoldMeansError`, so harness code can catch one type.
"""

from __future__ import annotations


class ManifoldMeansError(Exception):
    """Base class for all numerical and validation failures."""


class InvalidPoint(ManifoldMeansError):
    """A matrix does not satisfy a manifold or tangent constraint."""


class RankDeficient(ManifoldMeansError):
    """A factorization input is (numerically) rank deficient."""


class Unsolvable(ManifoldMeansError):
    """A structured linear system is singular."""


class NoConvergence(ManifoldMeansError):
    """An iterative solver exhausted its iteration budget."""


class EigenGapDegenerate(ManifoldMeansError):
    """The eigenvalue gap separating a dominant subspace vanishes."""


class CutLocus(ManifoldMeansError):
    """Two subspaces are (numerically) orthogonal in some direction,
    so the logarithm between them is not defined."""


class LiftingFailure(ManifoldMeansError):
    """A lifting could not be evaluated at one of the samples.

    Attributes
    ----------
    sample_index : int
        Index of the offending sample in the input sequence.
    """

    def __init__(self, sample_index: int, message: str | None = None):
        self.sample_index = sample_index
        super().__init__(message or f"lifting failed at sample {sample_index}")
