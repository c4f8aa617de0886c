"""Exceptions for harmonic morphism checks."""


class HarmorphError(Exception):
    """Generic harmorph exception."""

    pass


class FormatError(HarmorphError):
    """Malformed algebra, ansatz, constraint or polynomial input."""

    pass


class IndexOutOfRange(HarmorphError):
    """A structure-constant index lies outside the algebra."""

    pass


class InvalidEntry(HarmorphError):
    """A bracket entry of a basis vector with itself is nonzero."""

    pass


class DuplicateEntry(HarmorphError):
    """The same structure constant was given twice with different values."""

    pass


class GramNotSPD(HarmorphError):
    """The inner-product matrix is not symmetric positive definite."""

    pass


class DimensionMismatch(HarmorphError):
    """A vector or operator does not match the algebra dimension."""

    pass


class BadDecomposition(HarmorphError):
    """Index blocks do not partition the basis orthogonally."""

    pass


class TooSmall(HarmorphError):
    """The requested dimension is too small."""

    pass


class NotALieAlgebra(HarmorphError):
    """The bracket violates the Jacobi identity."""

    pass


class DegeneratePlane(HarmorphError):
    """The two vectors do not span a plane."""

    pass


class NotOrthonormal(HarmorphError):
    """A frame is not orthonormal with respect to the metric."""

    pass


class NotAbelianAction(HarmorphError):
    """The abelian part does not act by commuting operators."""

    pass


class NotInvariant(HarmorphError):
    """A subspace is not invariant under the adjoint action."""

    pass


class RootDecompositionFailed(HarmorphError):
    """No generic element separated the root spaces."""

    pass


class RootSpaceMismatch(HarmorphError):
    """A root space does not belong to the given algebra and splitting."""

    pass


class GradingViolation(HarmorphError):
    """A bracket does not respect the Carnot grading."""

    pass


class JacobiViolation(HarmorphError):
    """User-supplied brackets violate the Jacobi identity."""

    pass


class MissingParameter(HarmorphError):
    """A parameter value is missing."""

    pass


class BranchUnsolvable(HarmorphError):
    """A constraint set cannot be solved for designated variables."""

    pass


class UnknownFamily(HarmorphError):
    """The catalog has no family with the requested id."""

    pass


class ConstraintViolated(HarmorphError):
    """Parameter values do not satisfy a family constraint."""

    pass


class DegenerateBranch(HarmorphError):
    """Parameter values zero a denominator of a family table."""

    pass


class NoPredicate(HarmorphError):
    """The family has no non-positive curvature predicate."""

    pass
