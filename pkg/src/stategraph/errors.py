"""Exception hierarchy shared by every stage of the analysis."""


class StategraphError(Exception):
    """Base class for all analysis errors."""


class IndexOutOfRange(StategraphError, IndexError):
    pass


class SortMismatch(StategraphError, TypeError):
    pass


class UnboundVariable(StategraphError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class WellFormednessError(StategraphError):
    pass


class SortConflict(StategraphError):
    pass


class CfgTooLarge(StategraphError):
    pass


class MissingLabel(StategraphError):
    pass


class InstantiationDiverged(StategraphError):
    """Raised when instantiation discovers more BES variables than allowed."""

    def __init__(self, limit, discovered=None):
        self.limit = limit
        self.discovered = discovered
        super().__init__(f"instantiation exceeded {limit} variables")


class ParseError(StategraphError):
    def __init__(self, message, span=None, expected=()):
        self.message = message or "syntax error"
        self.span = span
        self.expected = list(expected)
        super().__init__(self.__str__())

    def __str__(self):
        where = f"{self.span}: " if self.span is not None else ""
        text = f"{where}{self.message}"
        if self.expected:
            text += " (expected " + ", ".join(self.expected) + ")"
        return text
