"""Disjoint language pairs encoded as ternary sequences.

A pair (A, B) of disjoint languages becomes a single sequence over the
alphabet {0, 1, -1}: position n holds 1 if s_n is in A, -1 if s_n is in
B, and 0 otherwise.  In text form the symbols are '0', '+', '-'.
Disjointness is checked lazily, on every queried index; a position
claimed by both components is a hard error naming the offending string.

Flattening maps both nonzero symbols to 1, turning a pair prefix into
the characteristic prefix of the union A or B.

``GAMMA_ZERO`` is the reference distribution (1/4, 3/8, 3/8) on
(0, 1, -1) used by the pair-lift transform.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DisjointnessViolation
from .gales import AlphabetDistribution, TERNARY_SYMBOLS
from .langs import LanguageSpec, index_to_string

__all__ = [
    "TERNARY_SYMBOLS",
    "GAMMA_ZERO",
    "PairEncoding",
    "encode_pair",
    "flatten",
    "union_language",
    "save_pair_fixture",
    "load_pair_fixture",
]

GAMMA_ZERO = AlphabetDistribution(
    TERNARY_SYMBOLS, (Fraction(1, 4), Fraction(3, 8), Fraction(3, 8))
)

_FLATTEN = {"0": "0", "+": "1", "-": "1", "1": "1"}


class PairEncoding:
    """A disjoint pair (A, B) viewed as its ternary encoding sequence."""

    def __init__(self, a: LanguageSpec, b: LanguageSpec, name: str | None = None):
        self.a = a
        self.b = b
        self.name = name or f"pair({a.name};{b.name})"

    def __repr__(self) -> str:
        return f"PairEncoding({self.name!r})"

    def symbol(self, n: int) -> str:
        in_a = self.a.bit(n)
        in_b = self.b.bit(n)
        if in_a and in_b:
            raise DisjointnessViolation(index_to_string(n), n)
        if in_a:
            return "+"
        if in_b:
            return "-"
        return "0"

    def prefix(self, n: int) -> str:
        return "".join(self.symbol(i) for i in range(n))


def encode_pair(pair: PairEncoding, n: int) -> str:
    """First n symbols of the ternary encoding of ``pair``."""
    return pair.prefix(n)


def flatten(word: str) -> str:
    """Symbol-wise map 0 -> 0 and +/- -> 1; length preserving.

    Binary words pass through unchanged, so the map is idempotent.
    """
    try:
        return "".join(_FLATTEN[c] for c in word)
    except KeyError as exc:
        raise ValueError(f"symbol {exc.args[0]!r} not in the pair alphabet") from None


def union_language(pair: PairEncoding) -> LanguageSpec:
    """A union B as a language; queries surface disjointness violations."""
    return LanguageSpec(
        f"union({pair.name})",
        "union",
        bit_source=lambda n: 0 if pair.symbol(n) == "0" else 1,
    )


def save_pair_fixture(pair: PairEncoding, n: int, path) -> None:
    """Write both components as length-n fixture blocks under one header."""
    from pathlib import Path

    text = (
        f"pair {pair.name}\n"
        f"length {n}\n{pair.a.prefix(n)}\n"
        f"length {n}\n{pair.b.prefix(n)}\n"
    )
    Path(path).write_text(text)


def load_pair_fixture(path) -> PairEncoding:
    from pathlib import Path

    from .errors import ConfigError
    from .langs import language_from_text

    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("pair "):
        raise ConfigError("pair fixture must start with a 'pair <name>' header")
    name = lines[0][len("pair "):].strip()
    if len(lines) < 5:
        raise ConfigError("pair fixture needs two 'length N'/bits blocks")
    a = language_from_text("\n".join(lines[1:3]), f"{name}.A")
    b = language_from_text("\n".join(lines[3:5]), f"{name}.B")
    return PairEncoding(a, b, name=name)
