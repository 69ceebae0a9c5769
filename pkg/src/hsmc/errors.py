"""Exception hierarchy shared by every module of the package."""


class HSError(Exception):
    """Base class for all errors raised by hsmc."""


class KripkeError(HSError):
    pass


class NotLeftTotal(KripkeError):
    def __init__(self, state):
        super().__init__(f"state {state!r} has no successor")
        self.state = state


class UnknownState(KripkeError):
    def __init__(self, name):
        super().__init__(f"unknown state {name!r}")
        self.name = name


class LabelOutsideAP(KripkeError):
    def __init__(self, state, letter):
        super().__init__(f"label {letter!r} of state {state!r} is not a declared proposition letter")
        self.state = state
        self.letter = letter


class InvalidTrack(KripkeError):
    pass


class IndexOutOfRange(KripkeError, IndexError):
    pass


class KripkeSyntaxError(KripkeError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class FormulaSyntaxError(HSError):
    def __init__(self, position, message):
        super().__init__(f"at position {position}: {message}")
        self.position = position
        self.message = message


class UnsupportedFragment(HSError):
    pass


class BudgetZero(HSError):
    pass


class MissingTableEntry(HSError):
    """A valuation table lacks an entry the oracle needs (driver bug)."""


class ConfigLimitExceeded(HSError):
    def __init__(self, limit):
        super().__init__(f"configuration graph exceeded the cap of {limit} configurations")
        self.limit = limit


class SnsatError(HSError):
    pass
