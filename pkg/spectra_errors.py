"""
SPECTRA ERRORS - Exception hierarchy for the power-map spectra analyzer

Every failure the library can raise is a SpectraError. The CLI maps the
exit_code attribute straight to the process exit status:
    1 = usage / bad parameter
    2 = budget or applicability (closed form outside its hypotheses)
"""


class SpectraError(ValueError):
    """Base class for all analyzer errors"""
    exit_code = 1


class InvalidParameter(SpectraError):
    """A parameter is outside its domain (m < 1, bad encoding, 2m does not divide n, ...)"""


# --- field construction / arithmetic -------------------------------------

class NonPrimeCharacteristic(SpectraError):
    """Characteristic p is not prime"""


class FieldTooLarge(SpectraError):
    """p^n exceeds the element budget"""
    exit_code = 2


class ReducedPolynomial(SpectraError):
    """Override polynomial is not monic irreducible of degree n"""


class NotPrimitive(SpectraError):
    """Override psi does not have order p^n - 1"""


class LogOfZero(SpectraError):
    """Discrete log requested for the zero element"""


class ZeroExponent(SpectraError):
    """Power map with d = 0"""


class FieldMismatch(SpectraError):
    """FieldSpec does not match the (p, 2m) it is used with"""


# --- enumeration ---------------------------------------------------------

class ZeroDerivativeDirection(SpectraError):
    """delta(a, b) with a = 0"""


class ZeroArgument(SpectraError):
    """beta(a, b) with a = 0 or b = 0"""


class PairBudgetExceeded(SpectraError):
    """p^{2n} exceeds the pair budget"""
    exit_code = 2


class WrongSpectrumKind(SpectraError):
    """Spectrum of the wrong kind passed to an operation"""


# --- closed forms --------------------------------------------------------

class NotApplicable(SpectraError):
    """(p^m+1)/t <= 3, outside the closed-form hypothesis"""
    exit_code = 2


class NonIntegerFrequency(SpectraError):
    """A table frequency evaluated to a non-integer"""


class NegativeFrequency(SpectraError):
    """A table frequency evaluated to a negative number"""


class IdentityViolation(SpectraError):
    """Evaluated closed-form spectrum breaks the basic identities"""


# --- curves and cosets ---------------------------------------------------

class HypothesisViolated(SpectraError):
    """lcm(n1, n2) does not divide p^m + 1"""
    exit_code = 2


class UncoveredCase(SpectraError):
    """Residue combination (r1, r2) matched by none of the five curve cases"""
    exit_code = 2


class OutsideSharpSet(SpectraError):
    """x is 0 or -1, which lie in no coset cell"""
