"""Exact representation and evaluation of martingales, s-gales, and their
generalizations to arbitrary alphabet distributions.

A beta-s-gale is a function d on words over an alphabet with distribution
beta satisfying d(w) = sum_a d(wa) * beta(a)^s.  For non-integer s the
capital values are irrational, so everything here is normalized to the
*mass* M(w) = d(w) * beta(w)^s, where beta(w) is the product of the symbol
probabilities along w.  Under this normalization the gale identity becomes

    M(w) = sum_a M(wa)          (exact, rational, zero tolerance)

and validating a gale means checking sum-preservation of its mass
function.  Capital is recovered in the log2 domain:

    log2 d(w) = log2 M(w) - s * sum_a count_a(w) * log2 beta(a),

kept as an exact Fraction plus symbol counts, with a float view whose
error stays below 1e-9 for words up to length 2^20 (both log2 terms are
computed to within a few ulps of results bounded by ~1e6).

Changing the exponent label of a gale leaves its mass untouched; that is
the mass-level content of the equivalence between s-gales and martingales
(d'(w) = 2^((1-s)|w|) d(w)), and it is why round trips here are exact.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import ConfigError, PartialMassError

try:
    # Exact rationals on the hot paths; gmpy2.mpq is an order of magnitude
    # faster than fractions.Fraction and interoperates with it (equality,
    # hashing, mixed arithmetic).  Everything still works on the stdlib
    # fallback, just slower.
    from gmpy2 import mpq as rat
except ImportError:  # pragma: no cover
    rat = Fraction

__all__ = [
    "BINARY_SYMBOLS",
    "TERNARY_SYMBOLS",
    "log2_fraction",
    "AlphabetDistribution",
    "as_exponent",
    "MassFunction",
    "TableMass",
    "RatioMass",
    "MixtureMass",
    "halving_mass",
    "bernoulli_mass",
    "predictor_mass",
    "GaleSpec",
    "LogCapital",
    "capital",
    "MassCheckReport",
    "validate_mass",
    "iter_words",
    "martingale_to_sgale",
    "sgale_to_martingale",
    "SuccessTrace",
    "success_trace",
    "dump_mass_table",
    "load_mass_table",
]

ZERO = rat(0)
ONE = rat(1)

BINARY_SYMBOLS = ("0", "1")
TERNARY_SYMBOLS = ("0", "+", "-")  # 0, 1, -1 in the pair-encoding alphabet


def log2_fraction(x: Rational) -> float:
    """log2 of a non-negative rational; -inf at zero.

    Numerator and denominator logs are each within a few ulps, so the
    absolute error stays below 1e-9 even for the huge integers produced
    by deep traces.
    """
    if x < 0:
        raise ValueError(f"log2 of negative value {x}")
    if x == 0:
        return -math.inf
    # int() lets math.log2 take its arbitrary-precision path (floats would
    # overflow long before the deep traces do).
    return math.log2(int(x.numerator)) - math.log2(int(x.denominator))


def as_exponent(s: Fraction | int | str) -> Fraction:
    """Coerce a dimension exponent to an exact non-negative rational."""
    s = Fraction(s)
    if s < 0:
        raise ConfigError(f"exponent must be non-negative, got {s}")
    return s


@dataclass(frozen=True)
class AlphabetDistribution:
    """An ordered alphabet of single-character symbols with exact positive
    probabilities summing to 1."""

    symbols: tuple[str, ...]
    probabilities: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.symbols) != len(self.probabilities):
            raise ConfigError("one probability per symbol required")
        if len(set(self.symbols)) != len(self.symbols):
            raise ConfigError(f"duplicate symbols: {self.symbols}")
        if any(len(a) != 1 for a in self.symbols):
            raise ConfigError("symbols must be single characters")
        object.__setattr__(
            self, "probabilities", tuple(Fraction(p) for p in self.probabilities)
        )
        if any(p <= 0 for p in self.probabilities):
            raise ConfigError(f"probabilities must be strictly positive: {self.probabilities}")
        if sum(self.probabilities) != 1:
            raise ConfigError(f"probabilities must sum to 1: {self.probabilities}")

    @classmethod
    def uniform_binary(cls) -> "AlphabetDistribution":
        return cls(BINARY_SYMBOLS, (Fraction(1, 2), Fraction(1, 2)))

    @classmethod
    def binary(cls, p0: Fraction | str) -> "AlphabetDistribution":
        p0 = Fraction(p0)
        return cls(BINARY_SYMBOLS, (p0, 1 - p0))

    @classmethod
    def ternary(cls, p0, p_plus, p_minus) -> "AlphabetDistribution":
        return cls(TERNARY_SYMBOLS, (Fraction(p0), Fraction(p_plus), Fraction(p_minus)))

    def prob(self, symbol: str) -> Fraction:
        try:
            return self.probabilities[self.symbols.index(symbol)]
        except ValueError:
            raise ConfigError(f"symbol {symbol!r} not in alphabet {self.symbols}") from None

    def counts(self, word: str) -> tuple[int, ...]:
        """Occurrences of each symbol in ``word``; unknown symbols are errors."""
        counts = [0] * len(self.symbols)
        index = {a: i for i, a in enumerate(self.symbols)}
        for ch in word:
            try:
                counts[index[ch]] += 1
            except KeyError:
                raise ConfigError(
                    f"symbol {ch!r} not in alphabet {self.symbols}"
                ) from None
        return tuple(counts)

    def log2_weight(self, counts: Sequence[int]) -> float:
        """sum_a counts[a] * log2 prob[a], as a float."""
        return sum(
            c * (math.log2(p.numerator) - math.log2(p.denominator))
            for c, p in zip(counts, self.probabilities)
            if c
        )

    @property
    def is_uniform_binary(self) -> bool:
        return self.symbols == BINARY_SYMBOLS and self.probabilities == (
            Fraction(1, 2),
            Fraction(1, 2),
        )


# ---------------------------------------------------------------------------
# Mass functions
# ---------------------------------------------------------------------------

class MassFunction:
    """Exact non-negative capital assignment on words.

    Subclasses implement ``value(word)`` returning an exact rational
    (gmpy2.mpq when available, fractions.Fraction otherwise; the two mix
    freely); the sum-preservation
    invariant (children of w sum exactly to the mass at w) is what
    ``validate_mass`` checks.  ``child_masses`` exists so validation can
    walk level by level without quadratic replay; the default simply
    evaluates each child.
    """

    symbols: tuple[str, ...] = BINARY_SYMBOLS

    def value(self, word: str) -> Rational:
        raise NotImplementedError

    def child_masses(self, word: str) -> tuple[Rational, ...]:
        return tuple(self.value(word + a) for a in self.symbols)

    @property
    def root(self) -> Rational:
        return self.value("")


class TableMass(MassFunction):
    """Mass given eagerly by a finite table; missing words are errors."""

    def __init__(self, table: Mapping[str, Rational], symbols: tuple[str, ...] = BINARY_SYMBOLS):
        self.symbols = symbols
        self.table = {w: rat(v) for w, v in table.items()}
        if "" not in self.table:
            raise PartialMassError("")

    def value(self, word: str) -> Rational:
        try:
            return self.table[word]
        except KeyError:
            raise PartialMassError(word) from None


class _CachedWalkMass(MassFunction):
    """Shared machinery for rule-defined masses: walk a word from the root,
    caching per-prefix state so traces and level walks stay linear."""

    def __init__(self):
        self._cache: dict[str, object] = {"": self._initial_state()}
        self._lock = threading.Lock()

    def _initial_state(self):
        raise NotImplementedError

    def _step(self, state, word: str, symbol: str):
        """State after extending ``word`` (whose state is ``state``) by symbol."""
        raise NotImplementedError

    def _mass_of(self, state) -> Rational:
        raise NotImplementedError

    def _state(self, word: str):
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        # Find the longest cached ancestor, then extend downward.
        hi = len(word)
        start = 0
        for i in range(hi - 1, -1, -1):
            if word[:i] in self._cache:
                start = i
                break
        with self._lock:
            state = self._cache[word[:start]]
            for i in range(start, hi):
                prefix = word[: i + 1]
                nxt = self._cache.get(prefix)
                if nxt is None:
                    nxt = self._step(state, word[:i], word[i])
                    self._cache[prefix] = nxt
                state = nxt
        return state

    def value(self, word: str) -> Rational:
        return self._mass_of(self._state(word))

    def child_masses(self, word: str) -> tuple[Rational, ...]:
        state = self._state(word)
        return tuple(
            self._mass_of(self._step(state, word, a)) for a in self.symbols
        )


class RatioMass(_CachedWalkMass):
    """Mass defined by per-node child ratios: M(wa) = M(w) * ratios(w)[a].

    The gale is sum-preserving iff every ratio vector sums to 1; the rule
    is not trusted, validation recomputes the sums.
    """

    def __init__(
        self,
        ratios: Callable[[str], Sequence[Rational]],
        symbols: tuple[str, ...] = BINARY_SYMBOLS,
        root: Rational = ONE,
    ):
        self.symbols = symbols
        self.ratios = ratios
        self._root = rat(root)
        super().__init__()

    def _initial_state(self) -> Rational:
        return self._root

    def _step(self, state: Rational, word: str, symbol: str) -> Rational:
        if state == 0:
            return ZERO
        r = self.ratios(word)[self.symbols.index(symbol)]
        return state * r

    def _mass_of(self, state: Rational) -> Rational:
        return state


class MixtureMass(MassFunction):
    """Weighted sum of member masses sharing one alphabet."""

    def __init__(self, members: Sequence[MassFunction], weights: Sequence[Rational]):
        if not members:
            raise ConfigError("mixture needs at least one member")
        if len(members) != len(weights):
            raise ConfigError("one weight per member required")
        symbols = members[0].symbols
        if any(m.symbols != symbols for m in members):
            raise ConfigError("mixture members must share an alphabet")
        self.symbols = symbols
        self.members = tuple(members)
        self.weights = tuple(rat(w) for w in weights)
        if any(w <= 0 for w in self.weights):
            raise ConfigError(f"mixture weights must be positive: {self.weights}")

    def value(self, word: str) -> Rational:
        return sum(
            (w * m.value(word) for w, m in zip(self.weights, self.members)), ZERO
        )

    def child_masses(self, word: str) -> tuple[Rational, ...]:
        totals = [ZERO] * len(self.symbols)
        for w, m in zip(self.weights, self.members):
            for i, v in enumerate(m.child_masses(word)):
                totals[i] += w * v
        return tuple(totals)


def halving_mass(symbols: tuple[str, ...] = BINARY_SYMBOLS) -> RatioMass:
    """The uniform mass M(w) = |alphabet|^-|w|; the constant-capital gale."""
    share = rat(1, len(symbols))
    ratios = (share,) * len(symbols)
    return RatioMass(lambda w: ratios, symbols=symbols)


def bernoulli_mass(p_one: Fraction | str) -> RatioMass:
    """Martingale mass betting a fixed fraction p on symbol 1 each step."""
    p = Fraction(p_one)
    if not 0 <= p <= 1:
        raise ConfigError(f"betting fraction must lie in [0,1], got {p}")
    ratios = (rat(1 - p), rat(p))
    return RatioMass(lambda w: ratios, symbols=BINARY_SYMBOLS)


def predictor_mass(predict: Callable[[str], str],
                   symbols: tuple[str, ...] = BINARY_SYMBOLS) -> RatioMass:
    """All-in strategy: stakes the whole mass on predict(w) at each node.

    A correct prediction preserves mass; a wrong one zeroes the branch the
    play actually takes.
    """

    def ratios(word: str) -> tuple[Fraction, ...]:
        choice = predict(word)
        return tuple(ONE if a == choice else ZERO for a in symbols)

    return RatioMass(ratios, symbols=symbols)


# ---------------------------------------------------------------------------
# Gales and capital
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GaleSpec:
    """A gale: alphabet distribution, exponent, and a mass function.

    The implied capital d(w) = M(w) / beta(w)^exponent satisfies the gale
    identity whenever the mass is sum-preserving; that is by construction,
    not by trust, and ``validate_mass`` checks it.
    """

    distribution: AlphabetDistribution
    exponent: Fraction
    mass: MassFunction
    name: str

    def __post_init__(self):
        object.__setattr__(self, "exponent", as_exponent(self.exponent))
        if self.distribution.symbols != self.mass.symbols:
            raise ConfigError(
                f"distribution alphabet {self.distribution.symbols} differs from "
                f"mass alphabet {self.mass.symbols}"
            )

    def capital(self, word: str) -> "LogCapital":
        return capital(self, word)

    def with_exponent(self, s: Fraction, name: str | None = None) -> "GaleSpec":
        return GaleSpec(self.distribution, s, self.mass, name or self.name)


@dataclass(frozen=True)
class LogCapital:
    """Capital in the log2 domain: exact mass plus symbolic correction.

    log2 d(w) = log2(mass) - exponent * sum_a counts[a] * log2 beta(a).
    The ``log2`` float view carries a documented error budget of 1e-9 for
    words up to length 2^20; the mass and counts themselves are exact.
    """

    mass: Rational
    counts: tuple[int, ...]
    exponent: Fraction
    distribution: AlphabetDistribution

    @property
    def length(self) -> int:
        return sum(self.counts)

    @property
    def is_zero(self) -> bool:
        return self.mass == 0

    @property
    def log2(self) -> float:
        if self.mass == 0:
            return -math.inf
        return log2_fraction(self.mass) - float(self.exponent) * self.distribution.log2_weight(
            self.counts
        )


def capital(gale: GaleSpec, word: str) -> LogCapital:
    """Capital of ``gale`` after reading ``word``, in log2 form."""
    counts = gale.distribution.counts(word)  # rejects foreign symbols
    return LogCapital(gale.mass.value(word), counts, gale.exponent, gale.distribution)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def iter_words(symbols: Sequence[str], depth: int) -> Iterator[str]:
    """Every word of length at most ``depth``, in level order."""
    level = [""]
    for _ in range(depth + 1):
        for w in level:
            yield w
        level = [w + a for w in level for a in symbols]


@dataclass(frozen=True)
class MassCheckReport:
    ok: bool
    first_violation: str | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_mass(mass: MassFunction, depth: int) -> MassCheckReport:
    """Check exact sum-preservation of ``mass`` on all words shorter than ``depth``.

    Walks level by level; the first violating word in level order (which is
    the shortest one) is reported.  Negative masses are violations too.
    Querying a word where the mass is undefined raises PartialMassError.
    """
    if depth < 0:
        raise ValueError(f"depth must be non-negative, got {depth}")
    root = mass.value("")
    if root < 0:
        return MassCheckReport(False, "", f"negative root mass {root}")
    level: list[tuple[str, Fraction]] = [("", root)]
    for _ in range(depth):
        nxt: list[tuple[str, Fraction]] = []
        for word, value in level:
            kids = mass.child_masses(word)
            for a, v in zip(mass.symbols, kids):
                if v < 0:
                    return MassCheckReport(
                        False, word + a, f"negative mass {v} at {word + a!r}"
                    )
            total = sum(kids, ZERO)
            if total != value:
                return MassCheckReport(
                    False,
                    word,
                    f"children of {word!r} sum to {total}, expected {value}",
                )
            nxt.extend((word + a, v) for a, v in zip(mass.symbols, kids))
        level = nxt
    return MassCheckReport(True)


# ---------------------------------------------------------------------------
# Exponent relabeling
# ---------------------------------------------------------------------------

def martingale_to_sgale(gale: GaleSpec, s: Fraction | str | int) -> GaleSpec:
    """Relabel a uniform-binary martingale as an s-gale.

    The mass table is untouched (capital picks up the 2^((s-1)|w|) factor
    through the normalization), so the round trip with
    ``sgale_to_martingale`` is the identity on masses.
    """
    if not gale.distribution.is_uniform_binary:
        raise ConfigError("exponent relabeling works on the uniform binary alphabet only")
    if gale.exponent != 1:
        raise ConfigError(f"input must be a martingale (exponent 1), got {gale.exponent}")
    s = as_exponent(s)
    if s == 1:
        return gale
    return gale.with_exponent(s, f"{gale.name}@s={s}")


def sgale_to_martingale(gale: GaleSpec) -> GaleSpec:
    """Inverse relabeling: any uniform-binary s-gale back to a martingale."""
    if not gale.distribution.is_uniform_binary:
        raise ConfigError("exponent relabeling works on the uniform binary alphabet only")
    if gale.exponent == 1:
        return gale
    name = gale.name
    suffix = f"@s={gale.exponent}"
    if name.endswith(suffix):
        name = name[: -len(suffix)]
    return gale.with_exponent(Fraction(1), name)


# ---------------------------------------------------------------------------
# Success traces
# ---------------------------------------------------------------------------

@dataclass
class SuccessTrace:
    """Per-prefix capitals of a gale along a sequence, with the first index
    (if any) where log2 capital reached the threshold."""

    capitals: list[LogCapital]
    log2_values: list[float]
    threshold_log2: float
    crossing: int | None

    @property
    def final_log2(self) -> float:
        return self.log2_values[-1]


def success_trace(gale: GaleSpec, source, n: int,
                  threshold_log2: float) -> SuccessTrace:
    """Capitals of ``gale`` on the first n symbols of ``source``.

    ``source`` is anything with a ``prefix(n) -> str`` method over the
    gale's alphabet (a LanguageSpec, a PairEncoding, another fixture).
    Success at finite scale means crossing the log2 threshold; the
    returned trace has n+1 entries, one per prefix length.
    """
    if n < 0:
        raise ValueError(f"prefix length must be non-negative, got {n}")
    word = source.prefix(n)
    if len(word) != n:
        raise ConfigError(f"source produced {len(word)} symbols, wanted {n}")
    capitals = [capital(gale, word[:i]) for i in range(n + 1)]
    log2s = [c.log2 for c in capitals]
    crossing = next((i for i, v in enumerate(log2s) if v >= threshold_log2), None)
    return SuccessTrace(capitals, log2s, float(threshold_log2), crossing)


# ---------------------------------------------------------------------------
# Mass-table serialization
# ---------------------------------------------------------------------------

def dump_mass_table(mass: MassFunction, depth: int) -> str:
    """One line per word up to length ``depth``: ``word<TAB>num/den``.

    Level order, so tables are byte-comparable across implementations.
    """
    lines = []
    level = [""]
    for _ in range(depth + 1):
        for w in level:
            v = mass.value(w)
            lines.append(f"{w}\t{v.numerator}/{v.denominator}")
        level = [w + a for w in level for a in mass.symbols]
    return "\n".join(lines) + "\n"


def load_mass_table(text: str, symbols: tuple[str, ...] = BINARY_SYMBOLS) -> TableMass:
    table: dict[str, Fraction] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            word, value = line.split("\t")
            num, den = value.split("/")
            table[word] = rat(int(num), int(den))
        except ValueError as exc:
            raise ConfigError(f"bad mass-table line {lineno}: {line!r}") from exc
    return TableMass(table, symbols=symbols)
