"""Domain error types shared across the engine.

Every error a caller is expected to handle derives from :class:`SciConNavError`,
so the CLI can map "domain error" to a single exit code.
"""


class SciConNavError(Exception):
    """Base class for all domain errors raised by this package."""


class ParseError(SciConNavError):
    """An input file is malformed (bad header, bad row, bad value)."""


class CycleError(SciConNavError):
    """The concept parent graph contains a cycle; the load is rejected."""

    def __init__(self, cycle: tuple[str, ...]):
        self.cycle = tuple(cycle)
        super().__init__(f"cycle detected in taxonomy: {' -> '.join(self.cycle)}")


class UnknownConceptError(SciConNavError):
    """A concept id was not found where it was required to exist."""


class CorpusError(SciConNavError):
    """Trajectory corpus construction failed."""


class EmptyCorpusError(CorpusError):
    """No trajectories survived filtering, or an empty corpus was supplied."""


class TrainingError(SciConNavError):
    """Embedding training could not run or diverged."""


class EmptyGroupError(SciConNavError):
    """A functional group resolved to no embedded member concepts."""


class DegenerateAxisError(SciConNavError):
    """A functional axis collapsed to the zero vector."""


class VocabularyExhaustedError(SciConNavError):
    """Every vocabulary entry was excluded from an argmax query."""


class GraphError(SciConNavError):
    """Navigation-graph construction or query failed."""


class BundleError(SciConNavError):
    """A served artifact bundle is incomplete or fails its digest check."""
