"""Exception and warning types raised across the package."""


class AlgebroidKitError(Exception):
    """Base class for every error raised by algebroidkit."""


# poly
class VarSpaceMismatch(AlgebroidKitError):
    pass


class UnknownVariable(AlgebroidKitError, KeyError):
    pass


class IncompleteSubstitution(AlgebroidKitError):
    pass


class EmptyIntegrationSet(AlgebroidKitError):
    pass


# algebroid
class ShapeError(AlgebroidKitError):
    pass


class AlgebroidMismatch(AlgebroidKitError):
    pass


class VarClash(AlgebroidKitError):
    pass


class NotProlongation(AlgebroidKitError):
    pass


class ChainMismatch(AlgebroidKitError):
    pass


class InvalidMorphism(AlgebroidKitError):
    """A morphism failed its anchor or bracket condition where validity is required."""


# forms
class ArityMismatch(AlgebroidKitError):
    pass


class InvalidAlgebroid(AlgebroidKitError):
    pass


class BadAverageSet(AlgebroidKitError):
    pass


class TargetMismatch(AlgebroidKitError):
    pass


# simplex / homotopy
class BadFaceIndex(AlgebroidKitError):
    pass


class EndpointError(AlgebroidKitError):
    pass


class DegreeTooLow(UserWarning):
    """Fiber integration of a form whose degree is below the simplex dimension."""


# cohomology
class NotPointAlgebroid(AlgebroidKitError):
    pass


class NotClosed(AlgebroidKitError):
    pass
