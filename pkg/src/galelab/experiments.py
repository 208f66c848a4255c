"""Experiment runner behind the CLI: capital traces, empirical dimension
tables, the oracle/fixture min-sup matrix, the selective-strategy
certification, and the pair-lift chain.

Everything here is a pure function of (config, seed): fixtures, gales,
selectors, and oracles are built from JSON descriptions through explicit
builder tables, outputs are written in canonical order with fixed number
formatting, and repeated runs produce byte-identical files.

The empirical dimension of a fixture, relative to a registry of base
strategies, is the least exponent s on the configured grid at which some
registry strategy, relabeled as an s-gale, drives its capital over the
threshold within n bits.  It is a finite, registry-relative estimate and
is labeled as such in the outputs; capital of a relabeled strategy only
grows with s, so the estimate is a well-defined threshold on the grid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping, Sequence

from . import langs, pairs, selective, transforms
from .errors import ConfigError
from .gales import (
    AlphabetDistribution,
    GaleSpec,
    RatioMass,
    bernoulli_mass,
    halving_mass,
    log2_fraction,
    predictor_mass,
    success_trace,
)
from .langs import (
    LanguageSpec,
    LogLengthPolicy,
    RestrictedOracle,
    index_to_string,
    restrict_oracle,
)

__all__ = [
    "RunResult",
    "parse_fraction",
    "build_language",
    "build_pair",
    "build_selector",
    "build_reduction",
    "build_oracle",
    "build_strategy",
    "exponent_grid",
    "empirical_dimension",
    "cmd_trace",
    "cmd_dimest",
    "cmd_p2s",
    "cmd_selective",
    "cmd_liftpair",
    "run_command",
    "COMMANDS",
]

TRACE_HEADER = "n,log2_capital,gale_id,fixture_id,block_q"

DEFAULT_THRESHOLD_LOG2 = 10.0
DEFAULT_N = 4096
DEFAULT_GRID = {"start": "0", "stop": "1", "step": "1/64"}


@dataclass
class RunResult:
    command: str
    exit_code: int
    files: dict[str, str] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Config parsing and builders
# ---------------------------------------------------------------------------

def parse_fraction(value, what: str = "value") -> Fraction:
    """Exact rational from config: string like '2/3' or an integer.

    Floats are rejected; determinism and exactness both want explicit
    rationals.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise ConfigError(f"{what} must be an exact rational string or integer, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad rational for {what}: {value!r}") from exc


def _require(cfg: Mapping, key: str, what: str):
    if key not in cfg:
        raise ConfigError(f"missing config key {key!r} for {what}")
    return cfg[key]


def build_language(spec: Mapping, default_seed: int = 0) -> LanguageSpec:
    """Build a fixture language from {name, kind, params}."""
    kind = _require(spec, "kind", "fixture")
    params = dict(spec.get("params", {}))
    name = spec.get("name")
    if kind == "left-cut":
        return langs.left_cut(parse_fraction(_require(params, "theta", "left-cut"), "theta"), name)
    if kind == "periodic":
        return langs.periodic(str(_require(params, "pattern", "periodic")), name)
    if kind == "seeded-random":
        return langs.seeded_random(int(params.get("seed", default_seed)), name)
    if kind == "file":
        return langs.language_from_file(_require(params, "path", "file fixture"), name)
    raise ConfigError(f"unknown fixture kind {kind!r}")


def build_pair(spec: Mapping, default_seed: int = 0) -> pairs.PairEncoding:
    if "file" in spec:
        return pairs.load_pair_fixture(spec["file"])
    a = build_language(_require(spec, "a", "pair fixture"), default_seed)
    b = build_language(_require(spec, "b", "pair fixture"), default_seed)
    return pairs.PairEncoding(a, b, name=spec.get("name"))


def build_selector(spec: Mapping, default_seed: int = 0) -> langs.SelectorFunction:
    kind = _require(spec, "kind", "selector")
    params = dict(spec.get("params", {}))
    if kind == "left-cut":
        return langs.left_cut_selector(
            parse_fraction(_require(params, "theta", "selector"), "theta")
        )
    if kind == "enumeration-min":
        return langs.enumeration_min_selector()
    if kind == "first-argument":
        return langs.first_argument_selector()
    if kind == "coin-flip":
        return langs.coin_flip_selector(int(params.get("seed", default_seed)))
    raise ConfigError(f"unknown selector kind {kind!r}")


def build_reduction(name: str) -> langs.ReductionFunction:
    if name == "identity":
        return langs.identity_reduction()
    if name == "strip-last":
        return langs.strip_last_bit_reduction()
    raise ConfigError(f"unknown reduction {name!r}")


def _theta_bits_oracle(theta: Fraction) -> Callable[[str], str]:
    """Returns the first len(query) bits of the non-terminating binary
    expansion of theta, so partial values are always strictly below theta."""

    def fn(query: str) -> str:
        m = len(query)
        if m == 0:
            return ""
        if theta == 0:
            return "0" * m
        partial = (theta.numerator * 2**m - 1) // theta.denominator
        return format(partial, f"0{m}b")

    return fn


def build_oracle(kind: str, params: Mapping | None = None) -> Callable[[str], str]:
    params = dict(params or {})
    if kind == "noop":
        return lambda query: ""
    if kind == "theta-bits":
        return _theta_bits_oracle(parse_fraction(_require(params, "theta", "oracle"), "theta"))
    raise ConfigError(f"unknown oracle kind {kind!r}")


def _theta_predictor_ratios(oracle: Callable[[str], str] | None):
    """Betting rule that reconstructs a left cut through an oracle.

    For the bit at position n it asks the oracle for the first
    len(s_n) + 1 expansion bits of the hidden threshold and stakes
    everything on the comparison; for n < 2 (where the query budget is
    zero) and without an oracle it bets evenly.
    """
    half = (Fraction(1, 2), Fraction(1, 2))

    def ratios(word: str) -> tuple[Fraction, Fraction]:
        n = len(word)
        if oracle is None or n < 2:
            return half
        if isinstance(oracle, RestrictedOracle):
            oracle.policy.set_context(n + 1)
        s_n = index_to_string(n)
        m = len(s_n) + 1
        bits = oracle("0" * m)
        member = int(s_n + "1", 2) <= int(bits, 2) if bits else False
        return (Fraction(0), Fraction(1)) if member else (Fraction(1), Fraction(0))

    return ratios


def build_strategy(spec: Mapping, oracle: Callable[[str], str] | None = None,
                   default_seed: int = 0) -> GaleSpec:
    """Build a named base strategy (a martingale) from {name, kind, params}.

    Oracle-aware kinds receive the (possibly policy-restricted) oracle;
    the rest ignore it.
    """
    kind = _require(spec, "kind", "gale")
    params = dict(spec.get("params", {}))
    name = spec.get("name", kind)
    uniform = AlphabetDistribution.uniform_binary()
    one = Fraction(1)
    if kind == "constant":
        return GaleSpec(uniform, one, halving_mass(), name)
    if kind == "bet0":
        return GaleSpec(uniform, one, predictor_mass(lambda w: "0"), name)
    if kind == "bet1":
        return GaleSpec(uniform, one, predictor_mass(lambda w: "1"), name)
    if kind == "bernoulli":
        p = parse_fraction(_require(params, "p", "bernoulli"), "p")
        return GaleSpec(uniform, one, bernoulli_mass(p), name)
    if kind == "theta-predictor":
        return GaleSpec(uniform, one, RatioMass(_theta_predictor_ratios(oracle)), name)
    if kind == "language-predictor":
        lang = build_language(_require(params, "language", "language-predictor"), default_seed)
        return GaleSpec(
            uniform, one,
            predictor_mass(lambda w: "1" if lang.bit(len(w)) else "0"),
            name,
        )
    raise ConfigError(f"unknown gale kind {kind!r}")


def _build_selective_config(block: Mapping, default_seed: int) -> selective.StrategyConfig:
    s = parse_fraction(_require(block, "s", "selective"), "s")
    sel = build_selector(_require(block, "selector", "selective"), default_seed)
    red = build_reduction(block.get("reduction", "identity"))
    policy = None
    if "policy_c" in block and block["policy_c"] is not None:
        policy = LogLengthPolicy(parse_fraction(block["policy_c"], "policy_c"))
    return selective.StrategyConfig(
        exponent=s,
        selector=sel,
        reduction=red,
        block_size=block.get("k"),
        policy=policy,
        name=block.get("name", ""),
    )


# ---------------------------------------------------------------------------
# Formatting and output helpers
# ---------------------------------------------------------------------------

def format_log2(x: float) -> str:
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return f"{x:.9f}"


def format_s_hat(s: Fraction | None) -> str:
    return "inf" if s is None else str(s)


def _write(out_dir: Path, filename: str, text: str, files: dict[str, str]) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / filename
    path.write_text(text)
    files[filename] = str(path)


def _write_json(out_dir: Path, filename: str, obj, files: dict[str, str]) -> None:
    _write(out_dir, filename, json.dumps(obj, indent=2, sort_keys=True) + "\n", files)


def _trace_rows(gale: GaleSpec, fixture_name: str, source, n: int,
                threshold: float) -> tuple[list[str], object]:
    trace = success_trace(gale, source, n, threshold)
    k = None
    if isinstance(gale.mass, selective.SelectiveMass):
        k = gale.mass.config.block_size
    rows = []
    for i, value in enumerate(trace.log2_values):
        block = str(i // k) if k else ""
        rows.append(f"{i},{format_log2(value)},{gale.name},{fixture_name},{block}")
    return rows, trace


# ---------------------------------------------------------------------------
# Grid and empirical dimension
# ---------------------------------------------------------------------------

def exponent_grid(cfg: Mapping | None) -> list[Fraction]:
    cfg = dict(cfg or DEFAULT_GRID)
    start = parse_fraction(cfg.get("start", "0"), "grid start")
    stop = parse_fraction(cfg.get("stop", "1"), "grid stop")
    step = parse_fraction(cfg.get("step", "1/64"), "grid step")
    if step <= 0:
        raise ConfigError(f"grid step must be positive, got {step}")
    if stop < start:
        raise ConfigError("grid stop must not precede start")
    grid = []
    s = start
    while s <= stop:
        grid.append(s)
        s += step
    return grid


def _mass_log2_trace(strategy: GaleSpec, prefix: str) -> list[float]:
    return [log2_fraction(strategy.mass.value(prefix[:j])) for j in range(len(prefix) + 1)]


def empirical_dimension(strategies: Sequence[GaleSpec], prefix: str,
                        grid: Sequence[Fraction], threshold: float) -> Fraction | None:
    """Least grid exponent at which some strategy, relabeled to that
    exponent, crosses the threshold within the prefix; None if none does.

    Strategies must be martingales; the relabeled capital at prefix
    length j is log2 mass + s * j, monotone in s, so the scan over the
    ascending grid is exact.
    """
    for g in strategies:
        if g.exponent != 1:
            raise ConfigError(f"registry strategy {g.name!r} must be a martingale")
    traces = [_mass_log2_trace(g, prefix) for g in strategies]
    for s in grid:
        fs = float(s)
        for tr in traces:
            if any(v + fs * j >= threshold for j, v in enumerate(tr)):
                return s
    return None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _apply_pipeline(strategies: list[GaleSpec], pipeline: Sequence[Mapping]) -> list[GaleSpec]:
    gales = list(strategies)
    for stage in pipeline:
        op = _require(stage, "op", "pipeline stage")
        params = dict(stage.get("params", {}))
        if op == "exponent-shift":
            s = parse_fraction(_require(params, "s", "exponent-shift"), "s")
            gales = list(transforms.exponent_shift(transforms.GaleFamily(tuple(gales)), s))
        elif op == "mixture":
            weights = params.get("weights")
            if weights is not None:
                weights = [parse_fraction(w, "mixture weight") for w in weights]
            gales = [transforms.mixture(transforms.GaleFamily(tuple(gales)), weights)]
        elif op == "to-beta":
            t = parse_fraction(_require(params, "t", "to-beta"), "t")
            beta = AlphabetDistribution.binary(
                parse_fraction(params.get("beta0", "1/4"), "beta0")
            )
            gales = [transforms.to_beta_gale(g, t, beta) for g in gales]
        elif op == "lift-pair":
            s_prime = parse_fraction(_require(params, "s_prime", "lift-pair"), "s_prime")
            gamma = _gamma_from(params)
            gales = [transforms.lift_to_pair_gale(g, gamma, s_prime) for g in gales]
        else:
            raise ConfigError(f"unknown pipeline op {op!r}")
    return gales


def _gamma_from(params: Mapping) -> AlphabetDistribution:
    gamma = params.get("gamma")
    if gamma is None:
        return pairs.GAMMA_ZERO
    if len(gamma) != 3:
        raise ConfigError("gamma needs three probabilities (0, +, -)")
    return AlphabetDistribution.ternary(*(parse_fraction(g, "gamma") for g in gamma))


def cmd_trace(config: Mapping, out_dir: Path, seed: int) -> RunResult:
    """Capital traces of every configured gale on every fixture, as CSV."""
    n = int(config.get("n", DEFAULT_N))
    threshold = float(config.get("threshold_log2", DEFAULT_THRESHOLD_LOG2))
    gales: list[GaleSpec] = []
    for spec in config.get("gales", []):
        if spec.get("kind") == "selective":
            gales.append(selective.selective_gale(_build_selective_config(spec.get("params", {}), seed)))
        else:
            gales.append(build_strategy(spec, default_seed=seed))
    gales = _apply_pipeline(gales, config.get("pipeline", []))
    if not gales:
        raise ConfigError("trace needs at least one gale")

    ternary = any(g.distribution.symbols == pairs.TERNARY_SYMBOLS for g in gales)
    if ternary:
        sources = [build_pair(p, seed) for p in config.get("pairs", [])]
    else:
        sources = [build_language(f, seed) for f in config.get("fixtures", [])]
    if not sources:
        raise ConfigError("trace needs at least one fixture (or pair, for ternary gales)")

    lines = [TRACE_HEADER]
    for source in sources:
        for gale in gales:
            rows, _ = _trace_rows(gale, source.name, source, n, threshold)
            lines.extend(rows)
    files: dict[str, str] = {}
    _write(out_dir, "trace.csv", "\n".join(lines) + "\n", files)
    return RunResult("trace", 0, files, {"rows": (n + 1) * len(sources) * len(gales)})


def cmd_dimest(config: Mapping, out_dir: Path, seed: int) -> RunResult:
    """Empirical dimension estimate per fixture over the strategy registry."""
    n = int(config.get("n", DEFAULT_N))
    threshold = float(config.get("threshold_log2", DEFAULT_THRESHOLD_LOG2))
    grid = exponent_grid(config.get("grid"))
    fixtures = [build_language(f, seed) for f in config.get("fixtures", [])]
    if not fixtures:
        raise ConfigError("dimest needs at least one fixture")
    strategy_specs = list(config.get("gales", []))

    lines = ["fixture_id,s_hat"]
    table = {}
    for fixture in fixtures:
        strategies = [build_strategy(s, default_seed=seed) for s in strategy_specs]
        prefix = fixture.prefix(n)
        s_hat = empirical_dimension(strategies, prefix, grid, threshold) if strategies else None
        table[fixture.name] = format_s_hat(s_hat)
        lines.append(f"{fixture.name},{format_s_hat(s_hat)}")
    files: dict[str, str] = {}
    _write(out_dir, "dimest.csv", "\n".join(lines) + "\n", files)
    return RunResult("dimest", 0, files, {"estimates": table})


def _p2s_matrix(config: Mapping, seed: int):
    n = int(config.get("n", DEFAULT_N))
    threshold = float(config.get("threshold_log2", DEFAULT_THRESHOLD_LOG2))
    grid = exponent_grid(config.get("grid"))
    fixtures = [build_language(f, seed) for f in config.get("fixtures", [])]
    oracle_specs = list(config.get("oracles", []))
    strategy_specs = list(config.get("gales", []))
    if not fixtures or not oracle_specs:
        raise ConfigError("p2s needs fixtures and oracles")
    policy_c = config.get("policy_c", "4")

    cells = {}
    cell_violations = {}
    for ospec in oracle_specs:
        oracle_name = _require(ospec, "name", "oracle")
        for fixture in fixtures:
            # Fresh restricted oracle per cell: logs are per evaluation.
            base = build_oracle(_require(ospec, "kind", "oracle"), ospec.get("params"))
            restricted = restrict_oracle(
                base, LogLengthPolicy(parse_fraction(policy_c, "policy_c")),
                name=oracle_name, strict=False,
            )
            strategies = [
                build_strategy(s, oracle=restricted, default_seed=seed)
                for s in strategy_specs
            ]
            prefix = fixture.prefix(n)
            s_hat = empirical_dimension(strategies, prefix, grid, threshold) if strategies else None
            cells[(oracle_name, fixture.name)] = s_hat
            cell_violations[(oracle_name, fixture.name)] = len(restricted.violations)

    oracle_names = sorted({o for o, _ in cells})
    fixture_names = sorted({f for _, f in cells})
    sups: dict[str, Fraction | None] = {}
    for o in oracle_names:
        values = [cells[(o, f)] for f in fixture_names]
        sups[o] = None if any(v is None for v in values) else max(values)
    # min over oracles, treating None as +inf
    finite = {o: s for o, s in sups.items() if s is not None}
    if finite:
        min_sup = min(finite.values())
        argmin = min(o for o, s in finite.items() if s == min_sup)
    else:
        min_sup, argmin = None, None
    return cells, cell_violations, sups, min_sup, argmin


def cmd_p2s(config: Mapping, out_dir: Path, seed: int) -> RunResult:
    """Oracle x fixture matrix of empirical dimensions with min-sup summary.

    Rows are emitted in sorted (oracle, fixture) order, so permuting the
    registries in the config leaves the outputs identical.
    """
    cells, cell_violations, sups, min_sup, argmin = _p2s_matrix(config, seed)
    lines = ["oracle_id,fixture_id,s_hat,policy_violations"]
    for (o, f) in sorted(cells):
        lines.append(f"{o},{f},{format_s_hat(cells[(o, f)])},{cell_violations[(o, f)]}")
    summary = {
        "per_oracle_sup": {o: format_s_hat(s) for o, s in sups.items()},
        "min_sup": format_s_hat(min_sup),
        "argmin_oracle": argmin,
        "note": "registry-relative estimate, not a true dimension",
    }
    files: dict[str, str] = {}
    _write(out_dir, "p2s.csv", "\n".join(lines) + "\n", files)
    _write_json(out_dir, "p2s_summary.json", summary, files)
    violations = [f"{o}/{f}: {c} policy violations"
                  for (o, f), c in sorted(cell_violations.items()) if c]
    return RunResult("p2s", 2 if violations else 0, files, summary, violations)


def cmd_selective(config: Mapping, out_dir: Path, seed: int) -> RunResult:
    """Certified run of the selective strategy; emits report, trace, blocks."""
    block = config.get("selective")
    if not block:
        raise ConfigError("selective command needs a 'selective' config block")
    strategy = _build_selective_config(block, seed)
    fixture = build_language(_require(block, "fixture", "selective"), seed)
    n = int(block.get("n", config.get("n", DEFAULT_N)))
    threshold = float(block.get("threshold_log2", config.get("threshold_log2", DEFAULT_THRESHOLD_LOG2)))
    report = selective.certify_success(strategy, fixture, n, threshold)

    files: dict[str, str] = {}
    lines = [TRACE_HEADER]
    k = strategy.block_size
    for i, value in enumerate(report.trace.log2_values):
        lines.append(f"{i},{format_log2(value)},{strategy.name},{fixture.name},{i // k}")
    _write(out_dir, "selective_trace.csv", "\n".join(lines) + "\n", files)
    _write_json(out_dir, "selective_blocks.json", [b.to_dict() for b in report.blocks], files)
    _write_json(out_dir, "selective_report.json", report.to_dict(), files)
    violations = list(report.violations)
    violations += [f"bound failed at q={q}" for q in report.bound_failures]
    violations += [f"policy violation: {r.query!r}" for r in report.policy_violations]
    return RunResult("selective", 0 if report.ok else 2, files, report.to_dict(), violations)


def cmd_liftpair(config: Mapping, out_dir: Path, seed: int) -> RunResult:
    """Chain a union-succeeding gale through the distribution change and
    the pair lift; verify domination along the encoded pair."""
    block = config.get("liftpair")
    if not block:
        raise ConfigError("liftpair command needs a 'liftpair' config block")
    pair = build_pair(_require(block, "pair", "liftpair"), seed)
    n = int(block.get("n", config.get("n", 512)))
    threshold = float(block.get("threshold_log2", config.get("threshold_log2", DEFAULT_THRESHOLD_LOG2)))
    t = parse_fraction(_require(block, "s", "liftpair"), "s")
    beta = AlphabetDistribution.binary(parse_fraction(block.get("beta0", "1/4"), "beta0"))
    gamma = _gamma_from(block)

    source_kind = block.get("source", "union-predictor")
    union = pairs.union_language(pair)
    if source_kind == "union-predictor":
        source = GaleSpec(
            AlphabetDistribution.uniform_binary(), Fraction(1),
            predictor_mass(lambda w: "1" if union.bit(len(w)) else "0"),
            f"predict({union.name})",
        )
    else:
        source = build_strategy({"kind": source_kind, "name": source_kind}, default_seed=seed)

    beta_gale = transforms.to_beta_gale(source, t, beta)

    files: dict[str, str] = {}
    if block.get("s_prime") is not None:
        s_prime = parse_fraction(block["s_prime"], "s_prime")
    else:
        s_prime = transforms.find_exponent_pair(beta, gamma, t)
    if s_prime is None:
        edge = Fraction(999, 1000)
        m_one, m_zero = transforms.pair_lift_margins(beta, gamma, t, edge)
        failing = (
            "beta(1)^s >= gamma(1)^s' + gamma(-1)^s'"
            if m_one < transforms.MARGIN
            else "beta(0)^s >= gamma(0)^s'"
        )
        report = {
            "feasible": False,
            "failing_inequality": failing,
            "margin_at_grid_edge": m_one if m_one < transforms.MARGIN else m_zero,
            "s": str(t),
        }
        _write_json(out_dir, "liftpair_report.json", report, files)
        return RunResult("liftpair", 2, files, report, [f"infeasible: {failing}"])

    m_one, m_zero = transforms.pair_lift_margins(beta, gamma, t, s_prime)
    lifted = transforms.lift_to_pair_gale(beta_gale, gamma, s_prime)

    encoded = pair.prefix(n)
    flattened = pairs.flatten(encoded)
    lift_trace = success_trace(lifted, pair, n, threshold)
    source_trace = success_trace(beta_gale, _PrefixSource(flattened), n, threshold)

    residuals = [
        lift_trace.log2_values[i] - source_trace.log2_values[i]
        for i in range(n + 1)
        if not math.isinf(source_trace.log2_values[i])
    ]
    min_residual = min(residuals) if residuals else 0.0
    domination_ok = min_residual >= -1e-9
    transfer_ok = (
        source_trace.crossing is None
        or (lift_trace.crossing is not None and lift_trace.crossing <= source_trace.crossing)
    )

    lines = [TRACE_HEADER]
    for i, value in enumerate(lift_trace.log2_values):
        lines.append(f"{i},{format_log2(value)},{lifted.name},{pair.name},")
    _write(out_dir, "liftpair_pair_trace.csv", "\n".join(lines) + "\n", files)
    lines = [TRACE_HEADER]
    for i, value in enumerate(source_trace.log2_values):
        lines.append(f"{i},{format_log2(value)},{beta_gale.name},flatten({pair.name}),")
    _write(out_dir, "liftpair_source_trace.csv", "\n".join(lines) + "\n", files)

    report = {
        "feasible": True,
        "s": str(t),
        "s_prime": str(s_prime),
        "margins": {"one_symbol": m_one, "zero_symbol": m_zero},
        "min_domination_residual_log2": min_residual,
        "domination_ok": domination_ok,
        "crossing_pair": lift_trace.crossing,
        "crossing_source": source_trace.crossing,
        "transfer_ok": transfer_ok,
    }
    _write_json(out_dir, "liftpair_report.json", report, files)
    violations = []
    if not domination_ok:
        violations.append(f"domination residual {min_residual} below -1e-9")
    if not transfer_ok:
        violations.append("success transfer failed")
    return RunResult("liftpair", 0 if not violations else 2, files, report, violations)


class _PrefixSource:
    """Wrap a fixed word as a prefix source for success_trace."""

    def __init__(self, word: str, name: str = "word"):
        self.word = word
        self.name = name

    def prefix(self, n: int) -> str:
        if n > len(self.word):
            raise ConfigError(f"prefix {n} beyond fixed word of length {len(self.word)}")
        return self.word[:n]


COMMANDS: dict[str, Callable[[Mapping, Path, int], RunResult]] = {
    "trace": cmd_trace,
    "dimest": cmd_dimest,
    "p2s": cmd_p2s,
    "selective": cmd_selective,
    "liftpair": cmd_liftpair,
}


def run_command(command: str, config: Mapping, out_dir: Path | str,
                seed: int | None = None) -> RunResult:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r} (have {sorted(COMMANDS)})")
    effective_seed = seed if seed is not None else int(config.get("seed", 0))
    return COMMANDS[command](config, Path(out_dir), effective_seed)
