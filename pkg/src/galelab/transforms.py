"""Gale-to-gale constructions: exponent shifts, weighted mixtures, change
of alphabet distribution, and the binary-to-ternary pair lift.

All four transforms act on mass functions, so the exact rational
structure survives even though the capital-level formulas involve
irrational powers:

* Exponent shift.  Relabeling a martingale as an s-gale multiplies its
  capital by 2^((s-1)|w|) and leaves its mass untouched.
* Mixture.  d = sum_k weight_k * d_k is again a gale for gales of a
  shared distribution and exponent; in mass form it is the weighted sum
  of the member masses, so capital of the mixture dominates each
  member's capital shifted down by log2(weight_k), exactly.
* Distribution change.  A uniform-binary s-gale d becomes a beta-t-gale
  d' via d'(wb) = d'(w) * d(wb) / (2^s d(w)) / beta(b)^t.  In mass form
  this is the identity: the output reuses the input mass under the new
  (beta, t) labels, and d'(w) = d(w) * 2^(-s|w|) / beta(w)^t holds with
  equality wherever d is positive.  If additionally
  max(beta(0), beta(1)) < 2^(-s'/t) for some s' > s, the correction
  factor grows like 2^((s'-s)|w|), so success carries over.
* Pair lift.  A binary beta-s-gale d lifts to a gale D on the ternary
  pair alphabet with distribution gamma and exponent s', reading the
  flattened word: the 0-child keeps the source's 0-ratio and the two
  nonzero children split the source's 1-ratio in proportion
  gamma(1)^s' : gamma(-1)^s'.  Under the required inequalities

      beta(0) = gamma(0),
      beta(1)^s >= gamma(1)^s' + gamma(-1)^s',
      beta(0)^s >= gamma(0)^s',

  every step multiplies capital by a factor >= 1 relative to the
  source, giving D(w) >= d(flatten(w)) pointwise.  For symmetric gamma
  the split is exactly 1/2 : 1/2 and the output mass is exactly
  rational; an asymmetric gamma falls back to a split weight rounded to
  the nearest double (the mass stays sum-preserving because the two
  weights are complementary Fractions, but the domination residual then
  carries an error of order 1e-16 per level).

The inequality preconditions involve irrational powers; they are decided
in double precision (error far below 1e-12) and must hold with margin at
least 1e-9, otherwise the configuration is rejected as ambiguous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

from .errors import ConfigError, InfeasibleParameters
from .gales import (
    BINARY_SYMBOLS,
    ZERO,
    AlphabetDistribution,
    GaleSpec,
    MassFunction,
    MixtureMass,
    as_exponent,
    martingale_to_sgale,
    rat,
)
from .pairs import GAMMA_ZERO, TERNARY_SYMBOLS, flatten

__all__ = [
    "GaleFamily",
    "exponent_shift",
    "mixture",
    "default_mixture_weights",
    "to_beta_gale",
    "beta_transfer_margin",
    "PairLiftMass",
    "pair_lift_margins",
    "lift_to_pair_gale",
    "find_exponent_pair",
]

MARGIN = 1e-9


@dataclass(frozen=True, eq=False)
class GaleFamily:
    """Ordered finite list of gales sharing an alphabet distribution.

    Slice semantics mirror FunctionRegistry: member k by index, errors
    beyond the end.  Exponent agreement is demanded by the operations
    that need it (mixtures), not at construction.
    """

    members: tuple[GaleSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ConfigError("gale family must be non-empty")
        dist = self.members[0].distribution
        if any(g.distribution != dist for g in self.members):
            raise ConfigError("family members must share alphabet and distribution")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def slice(self, k: int) -> GaleSpec:
        if not 0 <= k < len(self.members):
            raise ConfigError(f"family slice {k} out of range (size {len(self.members)})")
        return self.members[k]

    @property
    def distribution(self) -> AlphabetDistribution:
        return self.members[0].distribution


def exponent_shift(family: GaleFamily, s: Fraction | str | int) -> GaleFamily:
    """Relabel a family of martingales as s-gales; masses are unchanged."""
    s = as_exponent(s)
    return GaleFamily(tuple(martingale_to_sgale(g, s) for g in family))


def default_mixture_weights(count: int) -> tuple[Fraction, ...]:
    """The dyadic weights 1, 1/2, 1/4, ... used when none are given."""
    return tuple(Fraction(1, 2**k) for k in range(count))


def mixture(family: GaleFamily, weights: Sequence[Fraction] | None = None) -> GaleSpec:
    """Weighted sum of a family sharing distribution and exponent.

    Default weights are 2^-k; any positive rational weights are accepted
    and no renormalization is applied (a root capital up to sum(weights)
    is deliberate).  Each member must start with capital at most 1.
    In mass form the mixture dominates weight_k * member_k pointwise, so
    log2 capital(mixture, w) >= log2 weight_k + log2 capital(member k, w)
    holds exactly for every k and w.
    """
    exponent = family.members[0].exponent
    if any(g.exponent != exponent for g in family):
        raise ConfigError("mixture members must share one exponent")
    for g in family:
        if g.mass.root > 1:
            raise ConfigError(
                f"member {g.name!r} has root capital {g.mass.root} > 1"
            )
    if weights is None:
        weights = default_mixture_weights(len(family))
    weights = tuple(Fraction(w) for w in weights)
    mass = MixtureMass([g.mass for g in family], weights)
    return GaleSpec(
        family.distribution,
        exponent,
        mass,
        f"mixture({len(family.members)} members)",
    )


# ---------------------------------------------------------------------------
# Distribution change (binary, new exponent t)
# ---------------------------------------------------------------------------

def to_beta_gale(gale: GaleSpec, t: Fraction | str,
                 beta: AlphabetDistribution) -> GaleSpec:
    """Turn a uniform-binary s-gale into a beta-t-gale.

    The mass function is reused unchanged; only the distribution and
    exponent labels move, which realizes the capital recursion
    d'(wb) = d'(w) d(wb) / (2^s d(w)) / beta(b)^t exactly.  Subtrees
    where the source capital hits zero stay at zero.
    """
    if not gale.distribution.is_uniform_binary:
        raise ConfigError("distribution change expects a uniform binary source")
    t = Fraction(t)
    if not 0 < t < 1:
        raise ConfigError(f"target exponent must lie in (0,1), got {t}")
    if beta.symbols != BINARY_SYMBOLS:
        raise ConfigError(f"target distribution must be binary, got {beta.symbols}")
    return GaleSpec(beta, t, gale.mass, f"{gale.name}->beta{beta.probabilities}@t={t}")


def beta_transfer_margin(beta: AlphabetDistribution, s_prime: Fraction | str,
                         t: Fraction | str) -> float:
    """Margin of the success-transfer condition max(beta) < 2^(-s'/t).

    Positive margin means a beta-t-gale obtained from an s-gale with
    s < s' inherits the source's success set.
    """
    s_prime = Fraction(s_prime)
    t = Fraction(t)
    return 2.0 ** (-float(s_prime) / float(t)) - float(max(beta.probabilities))


# ---------------------------------------------------------------------------
# Pair lift (binary -> ternary)
# ---------------------------------------------------------------------------

class PairLiftMass(MassFunction):
    """Mass of the lifted ternary gale, driven by a binary source mass.

    M(w0)   = M(w) * M_src(f0) / M_src(f)
    M(w +/-) = M(w) * M_src(f1) / M_src(f) * split(+/-)

    where f = flatten(w) and split(+) + split(-) = 1 exactly.  Zero
    source mass prunes the subtree.
    """

    symbols = TERNARY_SYMBOLS

    def __init__(self, source: MassFunction, split_plus: Fraction = Fraction(1, 2)):
        if source.symbols != BINARY_SYMBOLS:
            raise ConfigError("pair lift needs a binary source mass")
        self.source = source
        self.split = {"+": rat(split_plus), "-": rat(1 - Fraction(split_plus))}
        self._cache: dict[str, Rational] = {"": source.root}
        # Source ratios depend only on the flattened word; one division
        # per distinct flat word instead of one per ternary node.
        self._flat_ratios: dict[str, tuple[Rational, Rational]] = {}

    def _ratios_at(self, flat: str) -> tuple[Rational, Rational]:
        cached = self._flat_ratios.get(flat)
        if cached is None:
            parent = self.source.value(flat)
            if parent == 0:
                cached = (ZERO, ZERO)
            else:
                cached = (
                    self.source.value(flat + "0") / parent,
                    self.source.value(flat + "1") / parent,
                )
            self._flat_ratios[flat] = cached
        return cached

    def _ratio(self, flat: str, symbol: str) -> Rational:
        zero_ratio, one_ratio = self._ratios_at(flat)
        if symbol == "0":
            return zero_ratio
        return one_ratio * self.split[symbol]

    def value(self, word: str) -> Rational:
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        start = 0
        for i in range(len(word) - 1, -1, -1):
            if word[:i] in self._cache:
                start = i
                break
        value = self._cache[word[:start]]
        flat = flatten(word[:start])
        for i in range(start, len(word)):
            symbol = word[i]
            if symbol not in self.symbols:
                raise ConfigError(f"symbol {symbol!r} not in the pair alphabet")
            value = value * self._ratio(flat, symbol) if value else ZERO
            flat += "0" if symbol == "0" else "1"
            self._cache[word[: i + 1]] = value
        return value

    def child_masses(self, word: str) -> tuple[Rational, ...]:
        value = self.value(word)
        if value == 0:
            return (ZERO, ZERO, ZERO)
        zero_ratio, one_ratio = self._ratios_at(flatten(word))
        shared = value * one_ratio
        return (value * zero_ratio, shared * self.split["+"], shared * self.split["-"])


def _fpow(base: Fraction, exponent: Fraction) -> float:
    return math.pow(float(base), float(exponent))


def pair_lift_margins(beta: AlphabetDistribution, gamma: AlphabetDistribution,
                      s: Fraction, s_prime: Fraction) -> tuple[float, float]:
    """Margins of the two lift inequalities, positive when satisfied:

    (beta(1)^s - gamma(1)^s' - gamma(-1)^s',  beta(0)^s - gamma(0)^s')
    """
    m_one = (
        _fpow(beta.prob("1"), s)
        - _fpow(gamma.prob("+"), s_prime)
        - _fpow(gamma.prob("-"), s_prime)
    )
    m_zero = _fpow(beta.prob("0"), s) - _fpow(gamma.prob("0"), s_prime)
    return m_one, m_zero


def _check_lift_preconditions(beta: AlphabetDistribution,
                              gamma: AlphabetDistribution,
                              s: Fraction, s_prime: Fraction) -> tuple[float, float]:
    if gamma.symbols != TERNARY_SYMBOLS:
        raise ConfigError(f"lift target distribution must be ternary, got {gamma.symbols}")
    if beta.symbols != BINARY_SYMBOLS:
        raise ConfigError(f"lift source distribution must be binary, got {beta.symbols}")
    if beta.prob("0") != gamma.prob("0"):
        raise ConfigError(
            f"lift requires beta(0) = gamma(0), got {beta.prob('0')} != {gamma.prob('0')}"
        )
    m_one, m_zero = pair_lift_margins(beta, gamma, s, s_prime)
    if m_one < MARGIN:
        raise InfeasibleParameters(
            f"beta(1)^s >= gamma(1)^s' + gamma(-1)^s' with s={s}, s'={s_prime}", m_one
        )
    if m_zero < MARGIN:
        raise InfeasibleParameters(
            f"beta(0)^s >= gamma(0)^s' with s={s}, s'={s_prime}", m_zero
        )
    return m_one, m_zero


def lift_to_pair_gale(gale: GaleSpec, gamma: AlphabetDistribution,
                      s_prime: Fraction | str) -> GaleSpec:
    """Lift a binary beta-s-gale to a gamma-s'-gale on pair encodings.

    Requires beta(0) = gamma(0) exactly and the two power inequalities
    with margin >= 1e-9 (ambiguous configurations are rejected).  The
    lifted capital dominates the source capital on the flattened word:
    D(w) >= d(flatten(w)) for every ternary w, with equality degraded
    only by the float-rounded split for asymmetric gamma.
    """
    s_prime = Fraction(s_prime)
    if not 0 < s_prime < 1:
        raise ConfigError(f"lift exponent must lie in (0,1), got {s_prime}")
    _check_lift_preconditions(gale.distribution, gamma, gale.exponent, s_prime)
    g_plus, g_minus = gamma.prob("+"), gamma.prob("-")
    if g_plus == g_minus:
        split_plus = Fraction(1, 2)
    else:
        # Asymmetric split gamma(1)^s' / (gamma(1)^s' + gamma(-1)^s'),
        # rounded to the nearest double; its complement keeps the mass
        # exactly sum-preserving.
        p = _fpow(g_plus, s_prime)
        m = _fpow(g_minus, s_prime)
        split_plus = Fraction(p / (p + m))
    mass = PairLiftMass(gale.mass, split_plus)
    return GaleSpec(gamma, s_prime, mass, f"lift({gale.name})@s'={s_prime}")


def find_exponent_pair(beta: AlphabetDistribution, gamma: AlphabetDistribution,
                       s: Fraction | str) -> Fraction | None:
    """Smallest s' on the 1/1000 grid in [s, 1) satisfying both lift
    inequalities with margin, or None when the grid holds no such point.

    beta(0) = gamma(0) is a precondition, not a search outcome.
    """
    s = Fraction(s)
    if not 0 < s < 1:
        raise ConfigError(f"source exponent must lie in (0,1), got {s}")
    if gamma.symbols != TERNARY_SYMBOLS or beta.symbols != BINARY_SYMBOLS:
        raise ConfigError("find_exponent_pair expects binary beta and ternary gamma")
    if beta.prob("0") != gamma.prob("0"):
        raise ConfigError(
            f"beta(0) must equal gamma(0), got {beta.prob('0')} != {gamma.prob('0')}"
        )
    start = -((-1000 * s.numerator) // s.denominator)  # ceil(1000 s)
    for i in range(start, 1000):
        s_prime = Fraction(i, 1000)
        m_one, m_zero = pair_lift_margins(beta, gamma, s, s_prime)
        if m_one >= MARGIN and m_zero >= MARGIN:
            return s_prime
    return None
