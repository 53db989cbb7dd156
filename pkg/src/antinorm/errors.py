"""Exception hierarchy. Every error carries a short machine-readable ``code``."""


class AntinormError(Exception):
    code = "error"


class NotHermitianError(AntinormError, ValueError):
    code = "not_hermitian"

    def __init__(self, defect, message=None):
        self.defect = float(defect)
        super().__init__(message or f"matrix is not Hermitian (defect {self.defect:.3e})")


class DomainError(AntinormError, ValueError):
    code = "domain"

    def __init__(self, value, message=None):
        self.value = value
        super().__init__(message or f"function undefined at eigenvalue {value!r}")


class PreconditionError(AntinormError, ValueError):
    code = "precondition"


class UnsupportedCombination(AntinormError, TypeError):
    code = "unsupported"


class FlagVerificationError(AntinormError, ValueError):
    code = "flag_verification"


class WitnessNotFound(AntinormError, RuntimeError):
    code = "witness_not_found"

    def __init__(self, best_margin, message=None):
        self.best_margin = float(best_margin)
        super().__init__(message or f"no certified witness found (best margin {self.best_margin:.3e})")


class ParseError(AntinormError, ValueError):
    code = "parse"

    def __init__(self, message, line=None, position=None):
        self.line = line
        self.position = position
        where = ""
        if line is not None:
            where = f" (line {line}, position {position})"
        super().__init__(message + where)
