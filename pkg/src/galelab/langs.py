"""Languages as characteristic sequences, plus the string machinery around them.

A language is identified with the infinite bit sequence recording, for the
length-lexicographic enumeration ``s_0, s_1, s_2, ...`` of binary strings,
whether each ``s_n`` is a member.  This module provides:

* the enumeration (``index_to_string`` / ``string_to_index``) and the
  self-delimiting pairing code (``pair`` / ``unpair``);
* ``LanguageSpec`` with the built-in families (left cuts, periodic
  sequences, seeded random sequences, file-backed fixtures, arbitrary
  membership callbacks);
* selectors and reductions as checked callables;
* query-length policies for oracle access, with audit logs;
* ``FunctionRegistry``, a finite ordered stand-in for enumerations of
  strategies or oracles.

Left cuts use ``string_value(x)``, the value of the binary expansion
``0.x1`` (a sentinel 1 bit is appended so distinct strings get distinct
values).  The left cut at a rational threshold theta is the language
``{x : string_value(x) < theta}``; it is the canonical selective fixture
because membership is monotone in ``string_value``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    ConfigError,
    ConstructorViolation,
    DecodeError,
    FixtureOverrunError,
    PolicyViolation,
    ReductionContractViolation,
    SelectorContractViolation,
)

__all__ = [
    "index_to_string",
    "string_to_index",
    "pair",
    "unpair",
    "string_value",
    "LanguageSpec",
    "left_cut",
    "periodic",
    "seeded_random",
    "language_from_file",
    "language_from_text",
    "language_from_program",
    "char_prefix",
    "run_constructor",
    "growth_rate",
    "SelectorFunction",
    "left_cut_selector",
    "enumeration_min_selector",
    "first_argument_selector",
    "coin_flip_selector",
    "ReductionFunction",
    "identity_reduction",
    "strip_last_bit_reduction",
    "LogLengthPolicy",
    "RestrictedOracle",
    "restrict_oracle",
    "FunctionRegistry",
]


# ---------------------------------------------------------------------------
# Standard enumeration and pairing
# ---------------------------------------------------------------------------

def index_to_string(n: int) -> str:
    """n-th string in length-lexicographic order: λ, 0, 1, 00, 01, 10, 11, ...

    The bijection is n -> binary digits of n+1 with the leading 1 removed.
    """
    if n < 0:
        raise ValueError(f"index must be non-negative, got {n}")
    return format(n + 1, "b")[1:]


def string_to_index(w: str) -> int:
    """Inverse of index_to_string."""
    _check_binary(w)
    return int("1" + w, 2) - 1


def _check_binary(w: str) -> None:
    if w.strip("01"):
        raise ValueError(f"not a binary string: {w!r}")


def pair(a: str, b: str) -> str:
    """Self-delimiting pairing code: each bit of ``a`` doubled, then 01, then ``b``.

    Injective, with output length 2|a| + 2 + |b|.
    """
    _check_binary(a)
    _check_binary(b)
    return "".join(c + c for c in a) + "01" + b


def unpair(p: str) -> tuple[str, str]:
    """Decode a pairing codeword; raises DecodeError on non-codewords."""
    _check_binary(p)
    out = []
    i = 0
    while True:
        chunk = p[i : i + 2]
        if len(chunk) < 2:
            raise DecodeError(f"truncated pair code: {p!r}")
        if chunk == "01":
            return "".join(out), p[i + 2 :]
        if chunk in ("00", "11"):
            out.append(chunk[0])
            i += 2
        else:
            raise DecodeError(f"invalid pair code chunk {chunk!r} at offset {i} in {p!r}")


def string_value(x: str) -> Fraction:
    """Value of the binary expansion 0.x1 (sentinel bit appended).

    string_value(λ) = 1/2, string_value("0") = 1/4, string_value("1") = 3/4.
    The sentinel makes the map injective on all finite strings.
    """
    _check_binary(x)
    return Fraction(int(x + "1", 2), 2 ** (len(x) + 1))


# ---------------------------------------------------------------------------
# Languages
# ---------------------------------------------------------------------------

class LanguageSpec:
    """A decidable membership rule identified with its characteristic sequence.

    Exactly one of ``membership`` (string -> bool) or ``bit_source``
    (index -> 0/1) drives the language; the other view is derived through
    the standard enumeration.  ``length`` bounds sequence-backed fixtures;
    queries beyond it raise FixtureOverrunError.
    """

    def __init__(
        self,
        name: str,
        kind: str,
        *,
        membership: Callable[[str], bool] | None = None,
        bit_source: Callable[[int], int] | None = None,
        length: int | None = None,
        params: Mapping[str, object] | None = None,
    ):
        if (membership is None) == (bit_source is None):
            raise ConfigError("exactly one of membership/bit_source is required")
        self.name = name
        self.kind = kind
        self.length = length
        self.params = dict(params or {})
        self._membership = membership
        self._bit_source = bit_source

    def __repr__(self) -> str:
        return f"LanguageSpec({self.name!r}, kind={self.kind!r})"

    def bit(self, n: int) -> int:
        """Characteristic-sequence bit n, i.e. membership of s_n."""
        if n < 0:
            raise ValueError(f"bit index must be non-negative, got {n}")
        if self.length is not None and n >= self.length:
            raise FixtureOverrunError(n, self.length)
        if self._bit_source is not None:
            return 1 if self._bit_source(n) else 0
        return 1 if self._membership(index_to_string(n)) else 0

    def contains(self, x: str) -> bool:
        if self._membership is not None:
            return bool(self._membership(x))
        return bool(self.bit(string_to_index(x)))

    def prefix(self, n: int) -> str:
        """First n characteristic bits, as a binary word."""
        return "".join(str(self.bit(i)) for i in range(n))


def left_cut(theta: Fraction | str | int, name: str | None = None) -> LanguageSpec:
    """The left cut {x : string_value(x) < theta} for rational theta in [0, 1)."""
    theta = Fraction(theta)
    if not 0 <= theta < 1:
        raise ConfigError(f"left-cut threshold must lie in [0,1), got {theta}")
    return LanguageSpec(
        name or f"leftcut({theta})",
        "left-cut",
        membership=lambda x: string_value(x) < theta,
        params={"theta": str(theta)},
    )


def periodic(pattern: str, name: str | None = None) -> LanguageSpec:
    """Characteristic sequence repeating ``pattern`` forever."""
    _check_binary(pattern)
    if not pattern:
        raise ConfigError("periodic pattern must be non-empty")
    return LanguageSpec(
        name or f"periodic({pattern})",
        "periodic",
        bit_source=lambda n: int(pattern[n % len(pattern)]),
        params={"pattern": pattern},
    )


def seeded_random(seed: int, name: str | None = None) -> LanguageSpec:
    """Reproducible pseudo-random characteristic sequence.

    Bits come from ``random.Random(seed)`` drawn one at a time and cached,
    so bit n is independent of query order.
    """
    rng = random.Random(seed)
    bits: list[int] = []

    def bit_source(n: int) -> int:
        while len(bits) <= n:
            bits.append(rng.getrandbits(1))
        return bits[n]

    return LanguageSpec(
        name or f"random(seed={seed})",
        "seeded-random",
        bit_source=bit_source,
        params={"seed": seed},
    )


def language_from_text(text: str, name: str, kind: str = "file-backed") -> LanguageSpec:
    """Parse the fixture format: first line ``length N``, second line N bits."""
    lines = text.splitlines()
    if len(lines) < 2 or not lines[0].startswith("length "):
        raise ConfigError("fixture must start with a 'length N' line followed by bits")
    try:
        n = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise ConfigError(f"bad fixture length line: {lines[0]!r}") from exc
    bits = lines[1].strip()
    if len(bits) != n or bits.strip("01"):
        raise ConfigError(f"fixture body must be exactly {n} characters of 0/1")
    return LanguageSpec(
        name, kind, bit_source=lambda i: int(bits[i]), length=n,
    )


def language_from_file(path: str | Path, name: str | None = None) -> LanguageSpec:
    path = Path(path)
    spec = language_from_text(path.read_text(), name or path.stem)
    spec.params["path"] = str(path)
    return spec


def write_language_fixture(lang: LanguageSpec, n: int, path: str | Path) -> None:
    Path(path).write_text(f"length {n}\n{lang.prefix(n)}\n")


def language_from_program(fn: Callable[[str], bool], name: str) -> LanguageSpec:
    return LanguageSpec(name, "program-backed", membership=fn)


def char_prefix(lang: LanguageSpec, n: int) -> str:
    """First n bits of the characteristic sequence of ``lang``."""
    return lang.prefix(n)


# ---------------------------------------------------------------------------
# Constructors and growth rates
# ---------------------------------------------------------------------------

def run_constructor(delta: Callable[[str], str], n: int) -> str:
    """Apply a proper-extension function n times to the empty string.

    Each step checks the proper-extension contract and raises
    ConstructorViolation if delta(w) does not strictly extend w.
    """
    if n < 0:
        raise ValueError(f"step count must be non-negative, got {n}")
    w = ""
    for step in range(n):
        nxt = delta(w)
        if len(nxt) <= len(w) or not nxt.startswith(w):
            raise ConstructorViolation(
                f"constructor output {nxt!r} is not a proper extension of {w!r} "
                f"(step {step + 1})"
            )
        w = nxt
    return w


def growth_rate(i: int, n: int) -> int:
    """Canonical growth-rate tower: g_0(n) = 2n, g_{i+1}(n) = 2^(g_i(log2 n)).

    Levels above 0 take a base-2 logarithm, so every n they encounter must
    be a power of two; anything else is rejected.
    """
    if i < 0:
        raise ValueError(f"level must be non-negative, got {i}")
    if n < 1:
        raise ValueError(f"argument must be positive, got {n}")
    if i == 0:
        return 2 * n
    if n & (n - 1):
        raise ValueError(f"argument must be a power of two at level {i}, got {n}")
    return 2 ** growth_rate(i - 1, n.bit_length() - 1)


# ---------------------------------------------------------------------------
# Selectors and reductions
# ---------------------------------------------------------------------------

@dataclass
class SelectorFunction:
    """A function on pair codes that must return one of the paired strings.

    The wrapper decodes the argument and enforces the output contract on
    every call; a violation raises SelectorContractViolation.
    """

    name: str
    choose: Callable[[str, str], str]

    def __call__(self, paired: str) -> str:
        a, b = unpair(paired)
        out = self.choose(a, b)
        if out != a and out != b:
            raise SelectorContractViolation(
                f"selector {self.name!r} returned {out!r}, not in {{{a!r}, {b!r}}}"
            )
        return out

    def select(self, a: str, b: str) -> str:
        """Convenience: selector applied to pair(a, b)."""
        return self(pair(a, b))


def left_cut_selector(theta: Fraction | str | int, name: str | None = None) -> SelectorFunction:
    """Selector for the left cut at theta: picks the argument of smaller value.

    Ties (equal strings) go to the first argument.  Because left-cut
    membership is downward closed under string_value, the chosen string is
    a member whenever either argument is.
    """
    theta = Fraction(theta)

    def choose(a: str, b: str) -> str:
        return a if string_value(a) <= string_value(b) else b

    return SelectorFunction(name or f"leftcut-selector({theta})", choose)


def enumeration_min_selector() -> SelectorFunction:
    """Picks the argument that comes first in the standard enumeration."""

    def choose(a: str, b: str) -> str:
        return a if string_to_index(a) <= string_to_index(b) else b

    return SelectorFunction("enumeration-min", choose)


def first_argument_selector() -> SelectorFunction:
    """Always returns the first argument.  Valid for no non-trivial language."""
    return SelectorFunction("first-argument", lambda a, b: a)


def coin_flip_selector(seed: int) -> SelectorFunction:
    """Adversarial fixture: picks a uniformly random argument per call.

    Deterministic for a fixed seed and call order, but a genuine selector
    for no language; engines probing it should detect broken premises.
    """
    rng = random.Random(seed)
    return SelectorFunction(
        f"coin-flip(seed={seed})", lambda a, b: a if rng.getrandbits(1) else b
    )


@dataclass
class ReductionFunction:
    """A checked string-to-string map with a declared output-length bound."""

    name: str
    fn: Callable[[str], str]
    output_length_bound: Callable[[int], int] | None = None

    def __call__(self, x: str) -> str:
        out = self.fn(x)
        if self.output_length_bound is not None:
            limit = self.output_length_bound(len(x))
            if len(out) > limit:
                raise ReductionContractViolation(
                    f"reduction {self.name!r} produced {len(out)} > {limit} "
                    f"output bits on input of length {len(x)}"
                )
        return out


def identity_reduction() -> ReductionFunction:
    return ReductionFunction("identity", lambda x: x, output_length_bound=lambda n: n)


def strip_last_bit_reduction() -> ReductionFunction:
    """x -> x without its last bit (λ maps to itself)."""
    return ReductionFunction(
        "strip-last-bit", lambda x: x[:-1], output_length_bound=lambda n: max(n - 1, 0)
    )


# ---------------------------------------------------------------------------
# Oracle query policies
# ---------------------------------------------------------------------------

class LogLengthPolicy:
    """Query-length budget c * log2(context), decided in exact arithmetic.

    ``context`` is the length of the prefix whose capital is currently
    being computed; engines set it before issuing queries.  The allowed
    length is floor(c * log2(context)), computed via the integer test
    2^(L * c.den) <= context^(c.num) so boundary cases are exact.
    """

    def __init__(self, c: Fraction | int | str, context: int = 1):
        self.c = Fraction(c)
        if self.c <= 0:
            raise ConfigError(f"policy constant must be positive, got {self.c}")
        self.context = context

    def set_context(self, n: int) -> None:
        if n < 0:
            raise ValueError(f"context length must be non-negative, got {n}")
        self.context = n

    def max_query_length(self) -> int:
        if self.context < 2:
            return 0
        target = self.context ** self.c.numerator
        length = 0
        while 2 ** ((length + 1) * self.c.denominator) <= target:
            length += 1
        return length


@dataclass
class QueryRecord:
    query: str
    context: int
    allowed: int
    compliant: bool


class RestrictedOracle:
    """Wraps a string function so every query is checked against a policy.

    In strict mode an over-length query raises PolicyViolation; otherwise
    it is recorded in ``violations`` and forwarded anyway (audit mode).
    The query log belongs to one evaluation session; call ``reset_log``
    between sessions.
    """

    def __init__(self, fn: Callable[[str], str], policy: LogLengthPolicy,
                 name: str = "", strict: bool = True):
        self.fn = fn
        self.policy = policy
        self.name = name or getattr(fn, "name", "oracle")
        self.strict = strict
        self.log: list[QueryRecord] = []

    @property
    def violations(self) -> list[QueryRecord]:
        return [r for r in self.log if not r.compliant]

    def reset_log(self) -> None:
        self.log = []

    def __call__(self, query: str) -> str:
        allowed = self.policy.max_query_length()
        ok = len(query) <= allowed
        self.log.append(QueryRecord(query, self.policy.context, allowed, ok))
        if not ok and self.strict:
            raise PolicyViolation(query, allowed, self.policy.context)
        return self.fn(query)


def restrict_oracle(fn: Callable[[str], str], policy: LogLengthPolicy,
                    name: str = "", strict: bool = True) -> RestrictedOracle:
    """Wrap ``fn`` so queries obey the policy; see RestrictedOracle."""
    return RestrictedOracle(fn, policy, name=name, strict=strict)


# ---------------------------------------------------------------------------
# Function registries
# ---------------------------------------------------------------------------

class FunctionRegistry:
    """Finite ordered list of named functions with slice access.

    Stands in for enumerations of strategies or oracles: experiments
    quantify over an explicit registry instead of an infinite family.
    """

    def __init__(self, entries: Iterable[tuple[str, object]]):
        self._entries = list(entries)
        names = [name for name, _ in self._entries]
        if len(set(names)) != len(names):
            raise ConfigError(f"registry names must be unique: {names}")

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self._entries]

    def slice(self, k: int):
        """k-th registered function; out-of-range k is an error."""
        if not 0 <= k < len(self._entries):
            raise ConfigError(
                f"registry slice {k} out of range (size {len(self._entries)})"
            )
        return self._entries[k][1]

    def get(self, name: str):
        for entry_name, fn in self._entries:
            if entry_name == name:
                return fn
        raise ConfigError(f"no registry entry named {name!r}")

    @classmethod
    def from_manifest(
        cls,
        manifest: Sequence[Mapping[str, object]] | str | Path,
        builders: Mapping[str, Callable[..., object]],
    ) -> "FunctionRegistry":
        """Build a registry from a JSON manifest: a list of {name, kind, params}."""
        if isinstance(manifest, (str, Path)):
            manifest = json.loads(Path(manifest).read_text())
        entries = []
        for item in manifest:
            try:
                name = item["name"]
                kind = item["kind"]
            except (KeyError, TypeError) as exc:
                raise ConfigError(f"manifest entry needs name and kind: {item!r}") from exc
            if kind not in builders:
                raise ConfigError(f"unknown registry kind {kind!r} (have {sorted(builders)})")
            params = dict(item.get("params", {}))
            entries.append((name, builders[kind](**params)))
        return cls(entries)
