"""Exception hierarchy shared across the package."""


class MdcodecError(Exception):
    """Base class for all package-specific errors."""


class BoundsError(MdcodecError, ValueError):
    """A coordinate, index, or sub-array region falls outside the ambient array."""


class StructuralError(MdcodecError, ValueError):
    """A compound value (compacted array, partial array) violates its own invariants."""


class ParameterError(MdcodecError, ValueError):
    """A configuration or argument is structurally invalid."""


class FeasibilityError(ParameterError):
    """A constraint configuration cannot fit its metadata payload into one deletion."""


class CorruptStreamError(MdcodecError):
    """Decoded data is inconsistent: bad container bytes or an impossible payload."""


class IterationCapError(MdcodecError):
    """A diagnostic iteration cap was hit.  Unreachable for well-formed inputs."""


class ContractViolation(MdcodecError, RuntimeError):
    """An internal guarantee failed; indicates a bug, not bad input."""
