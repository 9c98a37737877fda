class CosetForgeError(Exception):
    """Base class for domain errors; ``code`` is the machine-readable name."""

    code = "error"


class NotGeodesic(CosetForgeError):
    code = "not_geodesic"


class NielsenViolation(CosetForgeError):
    code = "nielsen_violation"


class NotInSubgroup(CosetForgeError):
    code = "not_in_subgroup"


class IdentityWord(CosetForgeError):
    code = "identity_word"


class RepresentativeInSubgroup(CosetForgeError):
    code = "representative_in_subgroup"


class NotInCoset(CosetForgeError):
    code = "not_in_coset"


class CentralLetterUnrespectable(CosetForgeError):
    code = "central_letter_unrespectable"


class MinimalityViolated(CosetForgeError):
    code = "minimality_violated"


class KBoundViolated(CosetForgeError):
    code = "k_bound_violated"


class FixtureMismatch(CosetForgeError):
    code = "fixture_mismatch"
