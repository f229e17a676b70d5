"""Exception hierarchy.

Every failure mode that callers are expected to distinguish gets its own
class; anything else surfaces as ValueError from argument validation.
"""


class ChromaticError(Exception):
    """Base class for algorithmic failures (CLI exit code 1)."""


class ParseError(ChromaticError):
    """Malformed instance file; carries a 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class BudgetExceededError(ChromaticError):
    """An enumeration or tree-construction budget was exhausted."""


class EmptySupportError(ChromaticError):
    """No proper colouring exists for the queried (conditional) instance."""


class ResampleLimitError(ChromaticError):
    """The resampling loop hit its iteration cap without finding a
    proper colouring (out of regime, or an unlucky run)."""


class PinSequenceError(ChromaticError):
    """A pinning step would shrink an edge below the configured minimum
    size; the base colouring was not prefix-proper."""


class LeafInconsistentError(ChromaticError):
    """The y-side of a halted coupling leaf admits no proper completion,
    so the leaf ratio is undefined."""


class VacuousSystemError(ChromaticError):
    """The constraint system carries no ratio information (no halted
    leaves below the truncation depth), so a bracket search is
    meaningless."""


class InfeasibleBracketError(ChromaticError):
    """The initial ratio bracket is infeasible, or both halves of a
    bisection step are infeasible."""


class SolverFailureError(ChromaticError):
    """The LP backend failed numerically; distinct from a clean
    infeasibility verdict."""
