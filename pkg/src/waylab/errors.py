"""Exception types shared across the toolkit."""


class WaylabError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(WaylabError):
    """Operands live on spaces of different dimension."""


class NotHermitian(WaylabError):
    """A matrix required to be selfadjoint is not, beyond tolerance."""


class NotUnitary(WaylabError):
    """A matrix required to be unitary is not, beyond tolerance."""


class BlochNormExceeded(WaylabError):
    """A Bloch vector has Euclidean norm larger than one."""


class UnknownOutcome(WaylabError):
    """An outcome label is not part of the observable."""


class InvalidModel(WaylabError):
    """A measurement model violates one of its structural invariants."""


class InvalidState(WaylabError):
    """A programming state is not a unit vector of the right dimension."""


class PreconditionViolated(WaylabError):
    """An operation was called outside its stated precondition."""


class NotSharpProgram(WaylabError):
    """The first program of a multimeter bound must be a sharp observable."""


class UnknownId(WaylabError):
    """No catalog entry with the requested id."""


class BadParams(WaylabError):
    """Catalog builder parameters are out of range."""


class MalformedCsv(WaylabError):
    """A CSV document does not match the scan/region layout."""


class SchemaError(WaylabError):
    """A JSON document violates one of the wire schemas.

    Carries the dotted path of the offending field so CLI errors can name it.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
