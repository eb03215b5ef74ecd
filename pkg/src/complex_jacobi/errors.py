"""Exception hierarchy.

Every error carries the fields the CLI needs to emit a structured diagnostic.
"""


class ComplexJacobiError(Exception):
    """Base class for all library errors."""

    kind = "Error"

    def __init__(self, message="", **fields):
        super().__init__(message or self.kind)
        self.fields = fields

    def to_dict(self):
        out = {"error": self.kind, "message": str(self)}
        out.update(self.fields)
        return out


class ValidationError(ComplexJacobiError):
    kind = "ValidationError"


class ZeroOffDiagonal(ValidationError):
    kind = "ZeroOffDiagonal"

    def __init__(self, k):
        super().__init__(f"off-diagonal entry a_{k} is zero", k=k)
        self.k = k


class EmptySpec(ValidationError):
    kind = "EmptySpec"

    def __init__(self):
        super().__init__("Jacobi window is empty")


class NormalizationError(ValidationError):
    kind = "NormalizationError"


class NegativeWeight(ValidationError):
    kind = "NegativeWeight"


class EmptyMeasure(ValidationError):
    kind = "EmptyMeasure"

    def __init__(self):
        super().__init__("measure has no atoms")


class NonpositiveTau(ValidationError):
    kind = "NonpositiveTau"


class ParseError(ValidationError):
    kind = "ParseError"


class WindowOverflow(ComplexJacobiError):
    kind = "WindowOverflow"

    def __init__(self, needed, available):
        super().__init__(
            f"operation needs {needed} window entries, only {available} available",
            needed=needed,
            available=available,
        )


class InsufficientMoments(ComplexJacobiError):
    kind = "InsufficientMoments"

    def __init__(self, needed, available):
        super().__init__(
            f"need moments through s_{needed}, have through s_{available}",
            needed=needed,
            available=available,
        )
        self.needed = needed


class DegreeOverflow(ComplexJacobiError):
    kind = "DegreeOverflow"


class Breakdown(ComplexJacobiError):
    """The bilinear self-pairing of the residual polynomial vanished."""

    kind = "Breakdown"

    def __init__(self, k, magnitude):
        super().__init__(
            f"breakdown at step k={k}: |sigma(q, q)| = {magnitude:.3e}",
            k=k,
            magnitude=float(magnitude),
        )
        self.k = k
        self.magnitude = float(magnitude)


class NotRepresentable(ComplexJacobiError):
    kind = "NotRepresentable"


class NumericalFailure(ComplexJacobiError):
    kind = "NumericalFailure"


class NotAContraction(NumericalFailure):
    kind = "NotAContraction"


class IdentityCheckFailed(NumericalFailure):
    kind = "IdentityCheckFailed"


class EigenFailure(NumericalFailure):
    kind = "EigenFailure"


class NoConvergence(EigenFailure):
    kind = "NoConvergence"


class NotHermitian(NumericalFailure):
    kind = "NotHermitian"


class NegativeEigenvalue(NumericalFailure):
    kind = "NegativeEigenvalue"

    def __init__(self, value):
        super().__init__(f"eigenvalue {float(value):.3e} below the clamp floor", value=float(value))
