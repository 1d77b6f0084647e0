"""Exception types raised by the learners and estimators."""


class PolytreeError(Exception):
    """Base class for all package errors."""


class CycleError(PolytreeError):
    def __init__(self, edges):
        self.edges = edges
        super().__init__(f"graph with edges {sorted(edges)} is not acyclic")


class DegenerateConditioningError(PolytreeError, ArithmeticError):
    """A conditional variance collapsed or a conditioning block is singular."""

    def __init__(self, message, *, pair=None, given=None):
        self.pair = pair
        self.given = given
        where = ""
        if pair is not None:
            where = f" (pair={tuple(pair)}, given={sorted(given) if given else '{}'})"
        super().__init__(message + where)


class InfiniteMutualInformationError(DegenerateConditioningError):
    """|correlation| reached 1, so the Gaussian mutual information diverges."""


class OrientationConflictError(PolytreeError):
    """Phase-1 v-structure detection demanded both directions of one edge."""

    def __init__(self, edge, triples):
        self.edge = edge
        self.triples = triples
        super().__init__(
            f"edge {edge} forced in both directions by unshielded triples {triples}"
        )
