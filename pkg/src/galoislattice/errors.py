"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`GaloisLatticeError` so callers (notably the CLI) can map them to
stable exit codes.
"""


class GaloisLatticeError(Exception):
    """Base class."""

    code = "error"


class InputError(GaloisLatticeError, ValueError):
    """Malformed or inconsistent input."""

    code = "input"


class ResourceError(GaloisLatticeError):
    """A configured resource cap was hit."""

    code = "resource"


# exact_linalg
class NonSquare(InputError):
    code = "non_square"


class DimensionMismatch(InputError):
    code = "dimension_mismatch"


class NotInSpan(InputError):
    code = "not_in_span"


# group_lattice
class GroupTooLarge(ResourceError):
    code = "group_too_large"


class NotInvertible(InputError):
    code = "not_invertible"


class NotPeriodic(InputError):
    code = "not_periodic"


class IndexOutOfRange(InputError):
    code = "index_out_of_range"


class InconsistentAction(InputError):
    code = "inconsistent_action"


# multilinear
class GroupMismatch(InputError):
    code = "group_mismatch"


class NotApplicable(InputError):
    code = "not_applicable"


# delpezzo
class BadDegree(InputError):
    code = "bad_degree"


class BadRank(InputError):
    code = "bad_rank"


class NotARoot(InputError):
    code = "not_a_root"


class TooLargeForEnumeration(ResourceError):
    code = "too_large_for_enumeration"


class WrongDegree(InputError):
    code = "wrong_degree"


class BadInput(InputError):
    code = "bad_input"


class ActionDoesNotPreserveForm(InputError):
    code = "action_does_not_preserve_form"


# chatelet
class NotTransitive(InputError):
    code = "not_transitive"


class OddDegree(InputError):
    code = "odd_degree"


class InconsistentSigma(InputError):
    code = "inconsistent_sigma"


class BadFactorId(InputError):
    code = "bad_factor_id"


class PreconditionViolated(InputError):
    code = "precondition_violated"


class WitnessNotFound(GaloisLatticeError):
    code = "witness_not_found"


# cli
class ParseError(InputError):
    code = "parse_error"
