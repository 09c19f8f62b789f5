"""Exception hierarchy shared by every pbk0 module."""


class Pbk0Error(Exception):
    """Base class for all errors raised by pbk0."""


class RingMismatchError(Pbk0Error):
    pass


class InhomogeneousError(Pbk0Error):
    """A generator is not homogeneous in the x-grading.

    ``index`` is the position of the offending generator in the input list.
    """

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"generator {index} is not homogeneous")


class DegreeError(Pbk0Error):
    """A matrix entry does not have the degree forced by the twists."""

    def __init__(self, row, col, message=None):
        self.row = row
        self.col = col
        super().__init__(message or f"entry ({row}, {col}) has the wrong degree")


class ParseError(Pbk0Error):
    def __init__(self, text, pos, message):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos} in {text!r}")


class SaturationError(Pbk0Error):
    pass


class LiftError(Pbk0Error):
    """An element expected to lie in a submodule does not."""


class UnsupportedInstance(Pbk0Error):
    """The question is well posed but outside what the engine can certify."""


class NotRegularError(Pbk0Error):
    pass


class SectionsError(Pbk0Error):
    """A presentation does not realize the global sections of its sheaf."""


class TwistCapExceeded(Pbk0Error):
    def __init__(self, cap, last_q=None):
        self.cap = cap
        self.last_q = last_q
        detail = f" (last failing q = {last_q})" if last_q is not None else ""
        super().__init__(f"no Mumford-regular twist found up to {cap}{detail}")


class TripleError(Pbk0Error):
    """Candidate triple whose alpha is not an isomorphism.

    ``reason`` is one of ``"degree"``, ``"not-a-map"``, ``"kernel"``,
    ``"cokernel"``; ``witness`` holds a generator that survives.
    """

    def __init__(self, reason, witness=None, message=None):
        self.reason = reason
        self.witness = witness
        super().__init__(message or f"alpha is not an isomorphism: {reason}")


class CertificateError(Pbk0Error):
    """A construction whose correctness is guaranteed by theory failed its check."""


class ScenarioError(Pbk0Error):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
