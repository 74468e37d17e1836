"""Exception types raised across the package."""


class BekkTailError(Exception):
    """Base class for all package errors."""


# model and config

class SpecError(BekkTailError, ValueError):
    """Invalid model or config file."""


class ShapeMismatch(SpecError):
    pass


class NotPositiveDefinite(SpecError):
    pass


class AllZeroCoefficients(SpecError):
    pass


class ConfigError(SpecError):
    """Config file is not valid JSON or violates the schema."""


# coefficient structure

class StructureError(BekkTailError):
    pass


class ComplexEigenvalues(StructureError):
    pass


class NotDiagonalizable(StructureError):
    pass


class NotSimultaneouslyDiagonalizable(StructureError):
    pass


class NoCommonRealEigenvector(StructureError):
    pass


# tail theory

class TailTheoryError(BekkTailError):
    pass


class NoRoot(TailTheoryError):
    """The moment equation E|sigma z|^alpha = 1 has no positive root."""


class TieUndetermined(TailTheoryError):
    """The two triangular diagonal indexes coincide; no tail result is available."""


class NoSignChange(TailTheoryError):
    pass


class NotApplicable(TailTheoryError):
    pass


# simulation / estimation

class SimulationOverflow(BekkTailError, FloatingPointError):
    """A simulated state left the representable range (explosive regime)."""

    def __init__(self, step, replica=None):
        self.step = int(step)
        self.replica = None if replica is None else int(replica)
        where = f"step {self.step}"
        if self.replica is not None:
            where += f" of replica {self.replica}"
        super().__init__(f"state overflow at {where}")


class InsufficientData(BekkTailError, ValueError):
    pass


class UnknownExample(BekkTailError, KeyError):
    pass
