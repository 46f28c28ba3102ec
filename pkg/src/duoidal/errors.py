"""Exception hierarchy shared by every module of the package."""


class DuoidalError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(DuoidalError):
    def __init__(self, message, pos=None, line=None):
        self.message = message
        self.pos = pos
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if pos is not None:
            where.append(f"column {pos + 1}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)


class AntisymmetryViolation(DuoidalError):
    pass


class ElementError(DuoidalError, IndexError):
    """An element index is out of range for its poset."""


class NotZetless(DuoidalError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotBracketed(DuoidalError):
    pass


class NotInterval(DuoidalError):
    def __init__(self, message, node=None, wires=None):
        super().__init__(message)
        self.node = node
        self.wires = wires


class InvalidInclusion(DuoidalError):
    pass


class NoSuchStructureMap(DuoidalError):
    pass


class BoundaryMismatch(DuoidalError):
    pass


class SizeLimit(DuoidalError):
    pass


class UnknownType(DuoidalError):
    def __init__(self, name, generator=None):
        self.name = name
        self.generator = generator
        msg = f"unknown type {name!r}"
        if generator is not None:
            msg += f" in generator {generator!r}"
        super().__init__(msg)


class DuplicateGenerator(DuoidalError):
    pass


class UnknownGenerator(DuoidalError):
    pass


class TypeMismatch(DuoidalError):
    def __init__(self, message, generator=None, node=None):
        super().__init__(message)
        self.generator = generator
        self.node = node


class SignatureMismatch(DuoidalError):
    pass


class NotWireLinear(DuoidalError):
    def __init__(self, message, wire=None):
        super().__init__(message)
        self.wire = wire


class Cyclic(DuoidalError):
    pass


class NoInputInclusion(DuoidalError):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class DecompositionError(DuoidalError):
    """A diagram's cuts could not be read as duoidal expressions."""


class UnassignedGenerator(DuoidalError):
    pass


class AlgebraTypeMismatch(DuoidalError):
    pass
