"""Exception hierarchy shared by all modules."""


class NestedHankelError(Exception):
    """Base class for every error raised by this package."""


class InputError(NestedHankelError, ValueError):
    """Malformed input: bad syntax, invalid automaton, unknown oracle."""


class InvalidNestedWord(InputError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid nested word: " + "; ".join(self.violations))


class NotWellMatched(InputError):
    """A tagged word whose calls and returns do not pair up.

    ``position`` is 1-based: the first unmatched return, or the last
    call left open at the end of the word.
    """

    def __init__(self, position, reason=""):
        self.position = position
        msg = f"not well-matched at position {position}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class UnknownLetter(InputError):
    def __init__(self, symbol):
        self.symbol = symbol
        super().__init__(f"letter {symbol!r} is not in the automaton alphabet")


class LinalgError(NestedHankelError, ArithmeticError):
    pass


class ZeroMatrix(LinalgError):
    def __init__(self):
        super().__init__("SVD requested for the zero matrix")


class NotRankOne(LinalgError):
    def __init__(self, rank):
        self.rank = rank
        super().__init__(f"matrix has numerical rank {rank}, expected 1")


class InsufficientTerms(LinalgError):
    def __init__(self, terms, rank):
        self.terms = terms
        self.rank = rank
        super().__init__(f"{terms} expansion terms cannot reproduce a rank-{rank} matrix")


class SynthesisError(NestedHankelError):
    """Failure of the Hankel-to-automaton pipeline (CLI exit code 3)."""


class NotInSpan(SynthesisError, LinalgError):
    def __init__(self, residual, label=None):
        self.residual = residual
        self.label = label
        where = f" for {label}" if label is not None else ""
        super().__init__(f"target row not in span of basis rows{where}: residual {residual:.3g}")


class NoNonzeroBasis(SynthesisError):
    def __init__(self, detail=""):
        msg = "no spanning set of rows with nonzero function values"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class NotStabilized(SynthesisError):
    def __init__(self, max_len, ranks):
        self.max_len = max_len
        self.ranks = list(ranks)
        super().__init__(
            f"Hankel rank did not stabilize up to length {max_len} (ranks by length: {self.ranks})"
        )


class RoundTripMismatch(SynthesisError):
    def __init__(self, error, word, tol):
        self.error = error
        self.word = word
        self.tol = tol
        super().__init__(
            f"synthesized automaton disagrees with the oracle: error {error:.6g} > {tol:g} at {word}"
        )
