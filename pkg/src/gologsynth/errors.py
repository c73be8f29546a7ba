"""Exception types shared across the package."""


class GologSynthError(Exception):
    """Base class for all errors raised by this package."""


class SortError(GologSynthError, TypeError):
    """A term of the wrong sort was used (e.g. an action where an object is expected)."""


class C2Error(GologSynthError):
    """A formula lies outside the two-variable counting fragment."""


class NotNNFError(GologSynthError):
    """A temporal formula was expected in negation normal form."""


class CyclicTheoryError(GologSynthError):
    """The effect dependency graph of a basic action theory has a cycle."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cyclic fluent dependencies: " + " -> ".join(self.cycle))


class NotSituationDeterminedError(GologSynthError):
    pass


class ResourceLimitError(GologSynthError):
    """A configured cap (states, nodes, hypotheses, atoms) was exceeded."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = dict(stats or {})


class InconsistentTheoryError(GologSynthError):
    pass


class ProverError(GologSynthError):
    """The external prover produced an unusable answer."""


class ParseError(GologSynthError):
    def __init__(self, message, line=None, column=None, source=None):
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if line is not None:
            where = f"{source or '<input>'}:{line}:{column or 1}: "
        super().__init__(where + message)
        self.message = message
