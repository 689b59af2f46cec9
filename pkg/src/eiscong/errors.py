"""Exception types shared across the package."""


class EiscongError(Exception):
    """Base class for all package-specific errors."""


class NotAMultiple(EiscongError, ValueError):
    """Target modulus is not a multiple of the character's modulus."""


class NotPrimitive(EiscongError, ValueError):
    """Operation requires a primitive character (modulus == conductor)."""


class NotSquareFree(EiscongError, ValueError):
    """Operation requires a square-free integer."""


class InsufficientPrecision(EiscongError, ValueError):
    """A q-expansion does not carry enough coefficients for the request."""


class DenominatorDivisibleByEll(EiscongError, ArithmeticError):
    """A coefficient denominator is divisible by the residue characteristic,
    so membership in the prime is not defined by reduction alone."""


class RamifiedUnsupported(EiscongError, ValueError):
    """Exact valuations are only implemented for unramified primes (ell
    coprime to the cyclotomic conductor)."""


class CapExceeded(EiscongError, ArithmeticError):
    """Valuation exceeds the caller-supplied certification cap."""


class NotASubfield(EiscongError, ValueError):
    """No field embedding exists (degree does not divide target degree)."""


class BadDivisor(EiscongError, ValueError):
    """d must be a proper divisor of M."""


class NotFound(EiscongError, LookupError):
    """Newform label is unknown to both the fixture store and the remote API."""


class InsufficientData(EiscongError, ValueError):
    """Fewer Hecke eigenvalue coefficients are available than requested."""


class NetworkError(EiscongError, IOError):
    """Remote fetch failed after the offline fallback was attempted."""


class BadPrimeForBasis(EiscongError, ArithmeticError):
    """ell divides a denominator of the stored integral-basis matrix."""


class NonSquarefreeReduction(EiscongError, ArithmeticError):
    """The coefficient-field polynomial is not squarefree mod ell; such
    primes are skipped rather than resolved through the maximal order."""


class CharacterMismatch(EiscongError, ValueError):
    """Newform nebentypus does not equal the lifted character of the
    Eisenstein parameters."""
