"""Exception types shared across the package."""


class TorusFCError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(TorusFCError, ValueError):
    """Array does not have the shape required by the grid."""


class DegenerateSampleError(TorusFCError, ValueError):
    """a(x, eta) - lambda vanished at a sample point; the certificate is void."""

    def __init__(self, lam, x, eta):
        self.lam, self.x, self.eta = lam, x, eta
        super().__init__(
            f"a - lambda vanishes at lambda={lam}, x={x}, eta={eta}"
        )


class SpectrumCollisionError(TorusFCError, ValueError):
    """An eigenvalue sits on (or outside) the integration contour."""

    def __init__(self, eigenvalue, detail=""):
        self.eigenvalue = eigenvalue
        super().__init__(
            f"contour/spectrum collision near eigenvalue {eigenvalue} {detail}".rstrip()
        )


class BranchCutError(TorusFCError, ValueError):
    """The contour or spectrum touches the branch cut of f."""


class PreconditionError(TorusFCError, ValueError):
    """A documented operation precondition was not met."""


class TraceClassGateError(PreconditionError):
    """Order/exponent gate for trace functionals violated."""


class ConfigSchemaError(TorusFCError, ValueError):
    """Run configuration violates the strict schema."""
