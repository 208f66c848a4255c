"""Exception hierarchy shared by all galelab modules.

Two families matter to callers:

* ``ConfigError`` and plain ``ValueError`` mean the caller asked for
  something malformed (bad distribution, bad exponent, unreadable
  fixture).  The CLI maps these to exit code 1.
* ``PropertyViolation`` subclasses mean a checked mathematical property
  failed at run time (a selector broke its contract, a pair stopped
  being disjoint, a query exceeded its length policy).  The CLI maps
  these to exit code 2.
"""


class GaleLabError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(GaleLabError):
    """Malformed configuration, manifest, or fixture input."""


class PropertyViolation(GaleLabError):
    """A checked run-time property failed."""


class PartialMassError(GaleLabError):
    """A mass function was queried at a word where it is undefined."""

    def __init__(self, word: str):
        self.word = word
        super().__init__(f"mass undefined at word {word!r} (partial definition)")


class DecodeError(GaleLabError):
    """A string is not a valid codeword for the pairing code."""


class FixtureOverrunError(GaleLabError):
    """A fixed-length sequence fixture was queried beyond its length."""

    def __init__(self, index: int, length: int):
        self.index = index
        self.length = length
        super().__init__(f"sequence index {index} beyond fixture length {length}")


class ConstructorViolation(PropertyViolation):
    """A constructor returned something other than a proper extension."""


class SelectorContractViolation(PropertyViolation):
    """A selector returned a string outside the queried pair."""


class ReductionContractViolation(PropertyViolation):
    """A reduction exceeded its declared output-length bound."""


class PolicyViolation(PropertyViolation):
    """An oracle query exceeded the length allowed by its policy."""

    def __init__(self, query: str, allowed: int, context: int):
        self.query = query
        self.allowed = allowed
        self.context = context
        super().__init__(
            f"query of length {len(query)} exceeds limit {allowed} "
            f"at context length {context}: {query!r}"
        )


class ThresholdViolation(PropertyViolation):
    """No block-threshold index exists: the selectivity premises are broken."""

    def __init__(self, block: int, detail: str = ""):
        self.block = block
        msg = f"threshold violated at block q={block}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class DisjointnessViolation(PropertyViolation):
    """Both components of a pair claimed the same string."""

    def __init__(self, string: str, index: int):
        self.string = string
        self.index = index
        super().__init__(
            f"pair components are not disjoint: both contain s_{index} = {string!r}"
        )


class InfeasibleParameters(GaleLabError):
    """Transform parameters fail a required inequality."""

    def __init__(self, inequality: str, margin: float | None = None):
        self.inequality = inequality
        self.margin = margin
        msg = f"parameter inequality fails: {inequality}"
        if margin is not None:
            msg += f" (margin {margin:.3e})"
        super().__init__(msg)
