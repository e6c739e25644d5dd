"""Exception hierarchy. Every toolkit error derives from NVThermoError."""


class NVThermoError(Exception):
    pass


class DomainError(NVThermoError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ValidationError(NVThermoError, ValueError):
    pass


class CapacityError(NVThermoError):
    pass


class NumericError(NVThermoError, ArithmeticError):
    pass


class AmbiguityError(NVThermoError):
    """Eigenstates cannot be matched to product-basis labels (near anticrossings)."""

    def __init__(self, message, states=()):
        super().__init__(message)
        self.states = list(states)


class LabelLookupError(NVThermoError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class RankError(NVThermoError, ArithmeticError):
    """Normal equations are singular; some parameter is unidentifiable."""


class ContractError(NVThermoError, ValueError):
    """Inputs violate a model's validity window."""


class ExtrapolationError(NVThermoError, ValueError):
    pass


class DerivativeUndefinedError(NVThermoError, ValueError):
    pass


class ParseError(NVThermoError, ValueError):
    def __init__(self, message, path=None, line=None, column=None):
        loc = []
        if path is not None:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line}")
        if column is not None:
            loc.append(f"column {column}")
        prefix = ":".join(loc[:1]) + (", " + ", ".join(loc[1:]) if len(loc) > 1 else "")
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.line = line
        self.column = column
