"""Exception types shared across the package."""


class SpecError(ValueError):
    """Invalid operator specification or options."""


class SchemaError(SpecError):
    """JSON document violates the input schema.

    `path` is a JSON-pointer-ish location of the offending value.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class DeltaRangeError(SpecError):
    """Bucket base delta outside (0, 1)."""


class DeltaMismatchError(SpecError):
    """Two bucketed objects built over different delta grids."""


class BoundaryAmbiguityError(SpecError):
    """A numerical singular value sits within tolerance of a bucket boundary."""

    def __init__(self, value: float, boundary):
        self.value = value
        self.boundary = boundary
        super().__init__(
            f"singular value {value!r} is within tolerance of bucket boundary {boundary}"
        )


class HypothesisViolationError(ValueError):
    """Window count inequalities fail; carries a re-checkable witness window."""

    def __init__(self, side: str, k: int, length: int):
        self.side = side
        self.k = k
        self.length = length
        super().__init__(
            f"window inequality fails on the {side} side at window "
            f"[{k}, {k + length - 1}] (length {length})"
        )


class UnsupportedTailError(SpecError):
    """Analytic comparison not implemented for this tail combination."""
