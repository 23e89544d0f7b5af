"""Exception hierarchy shared by the whole package."""


class CayleyError(Exception):
    """Base class for all errors raised by cayleytri."""


class InputError(CayleyError, ValueError):
    """Malformed or out-of-range input."""


class StructuralError(CayleyError):
    """An object does not have the combinatorial structure it claims."""


class CyclicSystemError(CayleyError):
    """A system of permutations is cyclic where acyclicity is required.

    ``triple`` holds ``(i, j, (X, Y, Z))``: the symbol pair and the column
    triangle on which the orientation is a directed 3-cycle.
    """

    def __init__(self, triple, message=None):
        self.triple = triple
        i, j, cols = triple
        super().__init__(message or f"cyclic system: symbols {i},{j} on columns {''.join(map(str, cols))}")


class ConsistencyError(CayleyError):
    """Internal disagreement, e.g. between combinatorial and geometric checks."""
