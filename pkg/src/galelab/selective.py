"""The selective betting strategy: an exact s-gale built from a selector
and a many-one reduction.

Given a selector f for a language B (from any two strings, f picks one
that is in B whenever either is) and a reduction h with x in A iff
h(x) in B, the engine bets on the characteristic sequence of A in blocks
of k consecutive strings.  For block q it plays a tournament on the block
strings s_{qk}, ..., s_{qk+k-1}:

    edge (i, j)  present  iff  f(<h(s_{qk+i}), h(s_{qk+j})>) = h(s_{qk+j})

Contracting strongly connected components and topologically sorting the
result yields a linear order on the block (ties inside a component broken
toward the smallest vertex index).  When the premises actually hold, an
edge from a member to a non-member of A is impossible, so the members of
A within the block form a suffix of this order: one of k+1 candidate
membership patterns is correct.

The strategy runs k+1 all-or-nothing sub-bettors, one per candidate
suffix.  At each block boundary every sub-bettor restarts from the shared
aggregate capital; inside a block a live sub-bettor grows by 2^s per
correctly predicted bit and dies on a mistake.  In mass normalization
this is trivially exact: a live sub-bettor keeps its mass, a dead one
holds zero, and the aggregate is the average of the k+1 masses.  Exactly
one sub-bettor survives any full block (candidate patterns differ
pairwise inside the block), so along the true sequence

    mass(A restricted to qk) = (k+1)^-q      exactly,
    log2 capital = q * (k*s - log2(k+1)),

which grows without bound as soon as 2^(k*s) > k + 1.  The block size is
therefore chosen as the least k with 2^(k*s) > k + 1, decided in exact
integer arithmetic.
"""

from __future__ import annotations

import heapq
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import ConfigError, ThresholdViolation
from .gales import (
    ONE,
    ZERO,
    AlphabetDistribution,
    GaleSpec,
    MassFunction,
    as_exponent,
    success_trace,
    SuccessTrace,
)
from .langs import (
    LanguageSpec,
    LogLengthPolicy,
    QueryRecord,
    RestrictedOracle,
    index_to_string,
    pair,
    restrict_oracle,
)

__all__ = [
    "min_block_size",
    "block_size_feasible",
    "StrategyConfig",
    "BlockTournament",
    "build_tournament",
    "threshold_index",
    "SelectiveMass",
    "selective_gale",
    "BlockDiagnostic",
    "CertifyReport",
    "certify_success",
]


def block_size_feasible(k: int, s: Fraction) -> bool:
    """Exact test of 2^(k*s) > k + 1 via integers: 2^(k*p) > (k+1)^r for s = p/r."""
    if k < 1:
        return False
    return 2 ** (k * s.numerator) > (k + 1) ** s.denominator


def min_block_size(s: Fraction | str | int) -> int:
    """Least block size k >= 1 with 2^(k*s) > k + 1, in exact arithmetic.

    Such a k exists for every s > 0 because 2^(k*s) outgrows k + 1.
    """
    s = Fraction(s)
    if s <= 0:
        raise ConfigError(f"exponent must be positive, got {s}")
    k = 1
    while not block_size_feasible(k, s):
        k += 1
    return k


@dataclass
class StrategyConfig:
    """Parameters of the selective betting strategy.

    ``block_size`` defaults to the minimal feasible k for the exponent;
    an explicitly given infeasible k is rejected.  If ``policy`` is set,
    the selector and reduction are wrapped so every query they receive is
    checked against the query-length budget (strictly or audit-only), and
    the engine updates the policy context to the block-end prefix length
    before each block's queries.
    """

    exponent: Fraction
    selector: Callable[[str], str]
    reduction: Callable[[str], str]
    block_size: int | None = None
    max_cached_blocks: int | None = None
    policy: LogLengthPolicy | None = None
    strict_policy: bool = False
    name: str = ""
    selector_oracle: RestrictedOracle | None = field(default=None, repr=False)
    reduction_oracle: RestrictedOracle | None = field(default=None, repr=False)

    def __post_init__(self):
        self.exponent = as_exponent(self.exponent)
        if self.exponent == 0:
            raise ConfigError("exponent must be positive")
        if self.block_size is None:
            self.block_size = min_block_size(self.exponent)
        elif not block_size_feasible(self.block_size, self.exponent):
            raise ConfigError(
                f"block size {self.block_size} infeasible for exponent "
                f"{self.exponent}: need 2^(k*s) > k+1"
            )
        if not self.name:
            self.name = f"selective(s={self.exponent};k={self.block_size})"
        if self.policy is not None and self.selector_oracle is None:
            self.selector_oracle = restrict_oracle(
                self.selector, self.policy, name="selector", strict=self.strict_policy
            )
            self.reduction_oracle = restrict_oracle(
                self.reduction, self.policy, name="reduction", strict=self.strict_policy
            )
            self.selector = self.selector_oracle
            self.reduction = self.reduction_oracle

    def policy_violations(self) -> list[QueryRecord]:
        out: list[QueryRecord] = []
        for oracle in (self.selector_oracle, self.reduction_oracle):
            if oracle is not None:
                out.extend(oracle.violations)
        return out

    def query_log(self) -> list[QueryRecord]:
        out: list[QueryRecord] = []
        for oracle in (self.selector_oracle, self.reduction_oracle):
            if oracle is not None:
                out.extend(oracle.log)
        return out


@dataclass(frozen=True)
class BlockTournament:
    """Tournament outcome on one block: edges, contracted components in
    topological order, and the induced linear order on vertices.

    ``precedes(i, j)`` is the order extended with the virtual vertex
    ``size`` (the empty-suffix candidate) as maximum.
    """

    block: int
    size: int
    edges: frozenset[tuple[int, int]]
    components: tuple[tuple[int, ...], ...]
    order: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "_rank", {v: r for r, v in enumerate(self.order)}
        )

    def rank(self, v: int) -> int:
        return self.size if v == self.size else self._rank[v]

    def precedes(self, i: int, j: int) -> bool:
        return self.rank(i) <= self.rank(j)

    def suffix_pattern(self, i: int) -> tuple[int, ...]:
        """Predicted block membership bits if i is the threshold index."""
        return tuple(1 if self.precedes(i, j) else 0 for j in range(self.size))


def _tarjan_sccs(n: int, successors: Sequence[Sequence[int]]) -> list[list[int]]:
    """Strongly connected components, iterative Tarjan; output order unused."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0

    for root in range(n):
        if root in index:
            continue
        work = [(root, iter(successors[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(successors[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(sorted(comp))
    return sccs


def build_tournament(q: int, config: StrategyConfig) -> BlockTournament:
    """Play block q's tournament: k reduction calls, k^2 ordered selector calls.

    The contracted component DAG is topologically sorted with Kahn's
    algorithm on a min-heap keyed by the smallest vertex of each
    component, so the order (and every tie-break) is deterministic.
    """
    if q < 0:
        raise ValueError(f"block index must be non-negative, got {q}")
    k = config.block_size
    base = q * k
    if config.policy is not None:
        # Queries for block q happen while computing capitals of prefixes
        # up to the block-end length.
        config.policy.set_context(base + k)
    reduced = [config.reduction(index_to_string(base + i)) for i in range(k)]
    edges = set()
    for i in range(k):
        for j in range(k):
            if config.selector(pair(reduced[i], reduced[j])) == reduced[j]:
                edges.add((i, j))

    successors = [sorted({j for (u, j) in edges if u == i and j != i}) for i in range(k)]
    sccs = _tarjan_sccs(k, successors)
    comp_of = {}
    for ci, comp in enumerate(sccs):
        for v in comp:
            comp_of[v] = ci
    comp_succ: list[set[int]] = [set() for _ in sccs]
    indegree = [0] * len(sccs)
    for (u, v) in edges:
        cu, cv = comp_of[u], comp_of[v]
        if cu != cv and cv not in comp_succ[cu]:
            comp_succ[cu].add(cv)
            indegree[cv] += 1

    heap = [(comp[0], ci) for ci, comp in enumerate(sccs) if indegree[ci] == 0]
    heapq.heapify(heap)
    ordered_components: list[tuple[int, ...]] = []
    order: list[int] = []
    while heap:
        _, ci = heapq.heappop(heap)
        ordered_components.append(tuple(sccs[ci]))
        order.extend(sccs[ci])
        for cv in sorted(comp_succ[ci]):
            indegree[cv] -= 1
            if indegree[cv] == 0:
                heapq.heappush(heap, (sccs[cv][0], cv))
    if len(order) != k:
        raise ConfigError(f"tournament contraction failed to order block {q}")

    return BlockTournament(
        block=q,
        size=k,
        edges=frozenset(edges),
        components=tuple(ordered_components),
        order=tuple(order),
    )


def threshold_index(q: int, config: StrategyConfig, lang: LanguageSpec,
                    tournament: BlockTournament | None = None) -> int:
    """The unique candidate i whose order suffix matches the block membership.

    Test-harness operation: it peeks at the language.  If no candidate
    matches, the supplied selector and reduction do not witness the
    selectivity premises, and ThresholdViolation is raised.
    """
    t = tournament if tournament is not None else build_tournament(q, config)
    k = config.block_size
    bits = tuple(lang.bit(q * k + j) for j in range(k))
    for i in range(k + 1):
        if t.suffix_pattern(i) == bits:
            return i
    raise ThresholdViolation(
        q, f"memberships {bits} match no suffix of order {t.order}"
    )


class SelectiveMass(MassFunction):
    """Mass function of the selective strategy.

    State at a word w is the tuple of k+1 sub-bettor masses plus their
    average (the aggregate).  Extending w at in-block position j:

    * stake = aggregate mass at w if j = 0 (block-boundary re-allocation),
      else the sub-bettor's own mass;
    * sub-bettor i predicts bit 1 exactly when i precedes-or-equals j in
      the block order; it keeps its stake if right, drops to 0 if wrong.

    All values are exact rationals; the 2^s payoff factor lives entirely
    in the capital normalization.  Tournaments are memoized per block
    behind a lock (concurrent readers see a consistent cache), and
    selector/reduction call counts are tracked for cost accounting.
    """

    symbols = ("0", "1")

    def __init__(self, config: StrategyConfig):
        self.config = config
        self._tournaments: OrderedDict[int, BlockTournament] = OrderedDict()
        self._tlock = threading.Lock()
        self._states: dict[str, tuple[tuple[Fraction, ...], Fraction]] = {
            "": ((ONE,) * (config.block_size + 1), ONE)
        }
        self._slock = threading.Lock()
        self.tournaments_built = 0
        self.selector_calls = 0
        self.reduction_calls = 0

    def tournament(self, q: int) -> BlockTournament:
        with self._tlock:
            t = self._tournaments.get(q)
            if t is not None:
                self._tournaments.move_to_end(q)
                return t
        t = build_tournament(q, self.config)
        k = self.config.block_size
        with self._tlock:
            if q not in self._tournaments:
                self._tournaments[q] = t
                self.tournaments_built += 1
                self.selector_calls += k * k
                self.reduction_calls += k
                limit = self.config.max_cached_blocks
                if limit is not None:
                    while len(self._tournaments) > limit:
                        self._tournaments.popitem(last=False)
            return self._tournaments.get(q, t)

    def _step(self, state, word_len: int, symbol: str):
        masses, aggregate = state
        k = self.config.block_size
        q, j = divmod(word_len, k)
        t = self.tournament(q)
        bet_on_one = symbol == "1"
        nxt = []
        for i in range(k + 1):
            stake = aggregate if j == 0 else masses[i]
            if stake and t.precedes(i, j) == bet_on_one:
                nxt.append(stake)
            else:
                nxt.append(ZERO)
        return tuple(nxt), sum(nxt, ZERO) / (k + 1)

    def _state(self, word: str):
        cached = self._states.get(word)
        if cached is not None:
            return cached
        start = 0
        for i in range(len(word) - 1, -1, -1):
            if word[:i] in self._states:
                start = i
                break
        with self._slock:
            state = self._states[word[:start]]
            for i in range(start, len(word)):
                prefix = word[: i + 1]
                nxt = self._states.get(prefix)
                if nxt is None:
                    nxt = self._step(state, i, word[i])
                    self._states[prefix] = nxt
                state = nxt
        return state

    def value(self, word: str) -> Fraction:
        if word.strip("01"):
            raise ConfigError(f"not a binary word: {word!r}")
        return self._state(word)[1]

    def child_masses(self, word: str) -> tuple[Fraction, ...]:
        state = self._state(word)
        return tuple(
            self._step(state, len(word), a)[1] for a in self.symbols
        )

    def sub_masses(self, word: str) -> tuple[Fraction, ...]:
        """The k+1 sub-bettor masses at ``word`` (diagnostics)."""
        return self._state(word)[0]


def selective_gale(config: StrategyConfig) -> GaleSpec:
    """The aggregate strategy as an exact s-gale over the uniform binary
    alphabet.  Capital at w costs O(|w|) steps and O(k^2) selector calls
    per block, memoized."""
    return GaleSpec(
        AlphabetDistribution.uniform_binary(),
        config.exponent,
        SelectiveMass(config),
        config.name,
    )


# ---------------------------------------------------------------------------
# Certification
# ---------------------------------------------------------------------------

@dataclass
class BlockDiagnostic:
    q: int
    order: tuple[int, ...]
    threshold: int | None
    capital_log2: float

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "order": list(self.order),
            "i": self.threshold,
            "capital_log2": self.capital_log2,
        }


@dataclass
class CertifyReport:
    """Outcome of a certified run: the trace, the per-block-boundary growth
    check against q * (k*s - log2(k+1)), and accumulated violations."""

    config_name: str
    fixture_name: str
    n: int
    threshold_log2: float
    trace: SuccessTrace
    blocks: list[BlockDiagnostic]
    bound_values: list[float]
    bound_ok: bool
    bound_failures: list[int]
    violations: list[str]
    selector_calls: int
    reduction_calls: int
    policy_violations: list[QueryRecord]

    @property
    def ok(self) -> bool:
        return self.bound_ok and not self.violations and not self.policy_violations

    @property
    def final_log2(self) -> float:
        return self.trace.final_log2

    def to_dict(self) -> dict:
        return {
            "gale": self.config_name,
            "fixture": self.fixture_name,
            "n": self.n,
            "threshold_log2": self.threshold_log2,
            "crossing": self.trace.crossing,
            "final_log2": self.final_log2,
            "bound_satisfied": self.bound_ok,
            "bound_failures": self.bound_failures,
            "violations": list(self.violations),
            "selector_calls": self.selector_calls,
            "reduction_calls": self.reduction_calls,
            "policy_violations": [
                {"query": r.query, "context": r.context, "allowed": r.allowed}
                for r in self.policy_violations
            ],
            "ok": self.ok,
        }


def certify_success(config: StrategyConfig, lang: LanguageSpec, n: int,
                    threshold_log2: float = 10.0,
                    float_budget: float = 1e-9) -> CertifyReport:
    """Run the strategy on ``lang`` for n bits and check everything checkable.

    At every block boundary qk <= n the exact capital must satisfy
    log2 d >= q * (k*s - log2(k+1)) up to the float reporting budget (the
    exact value meets the bound with equality, since exactly one
    sub-bettor survives each block).  Threshold indices are recomputed per
    block by brute force; a missing index means the premises are broken
    and is reported, not raised.  Query-policy compliance is reported when
    the config carries a policy.
    """
    gale = selective_gale(config)
    mass: SelectiveMass = gale.mass  # type: ignore[assignment]
    trace = success_trace(gale, lang, n, threshold_log2)

    k = config.block_size
    s = float(config.exponent)
    per_block_gain = k * s - math.log2(k + 1)
    violations: list[str] = []
    blocks: list[BlockDiagnostic] = []
    bound_values: list[float] = []
    bound_failures: list[int] = []

    for q in range(n // k):
        t = mass.tournament(q)
        try:
            idx = threshold_index(q, config, lang, tournament=t)
        except ThresholdViolation as exc:
            idx = None
            violations.append(str(exc))
        end = (q + 1) * k
        blocks.append(BlockDiagnostic(q, t.order, idx, trace.log2_values[end]))
        bound = (q + 1) * per_block_gain
        bound_values.append(bound)
        if trace.log2_values[end] < bound - float_budget:
            bound_failures.append(q + 1)

    return CertifyReport(
        config_name=config.name,
        fixture_name=lang.name,
        n=n,
        threshold_log2=float(threshold_log2),
        trace=trace,
        blocks=blocks,
        bound_values=bound_values,
        bound_ok=not bound_failures,
        bound_failures=bound_failures,
        violations=violations,
        selector_calls=mass.selector_calls,
        reduction_calls=mass.reduction_calls,
        policy_violations=config.policy_violations(),
    )
