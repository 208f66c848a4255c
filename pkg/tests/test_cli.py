"""End-to-end tests of the galelab CLI.

Core claims:
    - every command writes its files and returns exit code 0 on clean runs
    - byte-identical outputs for identical (config, seed), for all commands
    - dimest reproduces the hand-computed estimates (1/64 on all-zeros via
      the bet-0 strategy, inf sentinel for an empty registry or a random
      fixture nobody beats)
    - p2s min-sup strictly decreases when the informative theta-bits
      oracle joins the registry, and is invariant under registry order
    - selective certifies the left-cut demo, rejects an infeasible block
      size with exit 1, and flags a coin-flip selector with exit 2
    - liftpair verifies domination on a feasible chain and reports the
      failing inequality (exit 2) on an infeasible exponent
"""

import json
from pathlib import Path

import pytest

from galelab.cli import main

LEFTCUT = {"name": "leftcut23", "kind": "left-cut", "params": {"theta": "2/3"}}
ZEROS = {"name": "zeros", "kind": "periodic", "params": {"pattern": "0"}}
RANDOM7 = {"name": "rand7", "kind": "seeded-random", "params": {"seed": 7}}
COMP_PAIR = {
    "name": "comp",
    "a": {"name": "evens", "kind": "periodic", "params": {"pattern": "10"}},
    "b": {"name": "odds", "kind": "periodic", "params": {"pattern": "01"}},
}


def run(tmp_path: Path, command: str, config: dict, sub: str = "out", seed=None) -> tuple[int, Path]:
    cfg_path = tmp_path / f"{command}_{sub}.json"
    cfg_path.write_text(json.dumps(config))
    out = tmp_path / sub
    argv = [command, "--config", str(cfg_path), "--out", str(out)]
    if seed is not None:
        argv += ["--seed", str(seed)]
    return main(argv), out


def read_all(out: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())}


class TestTrace:
    def test_constant_is_flat(self, tmp_path):
        config = {"n": 32, "threshold_log2": 10,
                  "fixtures": [ZEROS],
                  "gales": [{"name": "constant", "kind": "constant"}]}
        code, out = run(tmp_path, "trace", config)
        assert code == 0
        lines = (out / "trace.csv").read_text().splitlines()
        assert lines[0] == "n,log2_capital,gale_id,fixture_id,block_q"
        assert len(lines) == 34
        assert all(line.split(",")[1] == "0.000000000" for line in lines[1:])

    def test_selective_gale_with_blocks(self, tmp_path):
        config = {
            "n": 60, "threshold_log2": 10,
            "fixtures": [LEFTCUT],
            "gales": [{
                "kind": "selective",
                "params": {"s": "1/2", "k": 6,
                           "selector": {"kind": "left-cut", "params": {"theta": "2/3"}},
                           "reduction": "identity"},
            }],
        }
        code, out = run(tmp_path, "trace", config)
        assert code == 0
        last = (out / "trace.csv").read_text().splitlines()[-1]
        n, log2c, _, _, block = last.split(",")
        assert (n, block) == ("60", "10")
        assert float(log2c) == pytest.approx(10 * (3 - 2.807354922057604), abs=1e-6)

    def test_pipeline_to_ternary(self, tmp_path):
        config = {
            "n": 64, "threshold_log2": 5,
            "pairs": [COMP_PAIR],
            "gales": [{"name": "bet1", "kind": "bet1"}],
            "pipeline": [
                {"op": "to-beta", "params": {"t": "3/10", "beta0": "1/4"}},
                {"op": "lift-pair", "params": {"s_prime": "4/5"}},
            ],
        }
        code, out = run(tmp_path, "trace", config)
        assert code == 0
        lines = (out / "trace.csv").read_text().splitlines()
        assert len(lines) == 66

    def test_determinism(self, tmp_path):
        config = {"n": 48, "fixtures": [LEFTCUT, RANDOM7],
                  "gales": [{"name": "b23", "kind": "bernoulli", "params": {"p": "2/3"}}]}
        _, out1 = run(tmp_path, "trace", config, "a", seed=5)
        _, out2 = run(tmp_path, "trace", config, "b", seed=5)
        assert read_all(out1) == read_all(out2)

    def test_missing_fixture_is_usage_error(self, tmp_path):
        code, _ = run(tmp_path, "trace", {"gales": [{"kind": "constant"}]})
        assert code == 1

    def test_unreadable_config(self, tmp_path, capsys):
        assert main(["trace", "--config", str(tmp_path / "nope.json")]) == 1


class TestDimest:
    def test_all_zeros_hits_grid_minimum(self, tmp_path):
        config = {"n": 1024, "threshold_log2": 10,
                  "fixtures": [ZEROS],
                  "gales": [{"name": "bet0", "kind": "bet0"}]}
        code, out = run(tmp_path, "dimest", config)
        assert code == 0
        assert (out / "dimest.csv").read_text() == "fixture_id,s_hat\nzeros,1/64\n"

    def test_empty_registry_sentinel(self, tmp_path):
        config = {"n": 64, "fixtures": [ZEROS], "gales": []}
        code, out = run(tmp_path, "dimest", config)
        assert code == 0
        assert "zeros,inf" in (out / "dimest.csv").read_text()

    def test_random_fixture_unbeaten(self, tmp_path):
        config = {"n": 1024, "threshold_log2": 10,
                  "fixtures": [RANDOM7],
                  "gales": [{"name": "bet0", "kind": "bet0"}]}
        code, out = run(tmp_path, "dimest", config)
        assert code == 0
        assert "rand7,inf" in (out / "dimest.csv").read_text()


P2S_BASE = {
    "n": 1024,
    "threshold_log2": 10,
    "fixtures": [LEFTCUT, ZEROS],
    "gales": [
        {"name": "bet0", "kind": "bet0"},
        {"name": "b23", "kind": "bernoulli", "params": {"p": "2/3"}},
        {"name": "theta-aware", "kind": "theta-predictor"},
    ],
}


class TestP2S:
    def test_informative_oracle_strictly_lowers_min_sup(self, tmp_path):
        from fractions import Fraction

        noop_only = dict(P2S_BASE, oracles=[{"name": "noop", "kind": "noop"}])
        both = dict(P2S_BASE, oracles=[
            {"name": "noop", "kind": "noop"},
            {"name": "theta23", "kind": "theta-bits", "params": {"theta": "2/3"}},
        ])
        code1, out1 = run(tmp_path, "p2s", noop_only, "noop")
        code2, out2 = run(tmp_path, "p2s", both, "both")
        assert code1 == 0 and code2 == 0
        sup1 = json.loads((out1 / "p2s_summary.json").read_text())["min_sup"]
        sup2 = json.loads((out2 / "p2s_summary.json").read_text())["min_sup"]
        assert Fraction(sup2) < Fraction(sup1)
        assert Fraction(sup2) == Fraction(1, 64)

    def test_permutation_invariance(self, tmp_path):
        both = dict(P2S_BASE, oracles=[
            {"name": "noop", "kind": "noop"},
            {"name": "theta23", "kind": "theta-bits", "params": {"theta": "2/3"}},
        ])
        permuted = dict(both)
        permuted["oracles"] = list(reversed(both["oracles"]))
        permuted["fixtures"] = list(reversed(both["fixtures"]))
        permuted["gales"] = list(reversed(both["gales"]))
        _, out1 = run(tmp_path, "p2s", both, "fwd")
        _, out2 = run(tmp_path, "p2s", permuted, "rev")
        assert read_all(out1) == read_all(out2)

    def test_zero_policy_violations_recorded(self, tmp_path):
        both = dict(P2S_BASE, oracles=[
            {"name": "theta23", "kind": "theta-bits", "params": {"theta": "2/3"}},
        ])
        code, out = run(tmp_path, "p2s", both)
        assert code == 0
        for line in (out / "p2s.csv").read_text().splitlines()[1:]:
            assert line.rsplit(",", 1)[1] == "0"


SELECTIVE_DEMO = {
    "selective": {
        "s": "1/2", "k": 6,
        "selector": {"kind": "left-cut", "params": {"theta": "2/3"}},
        "reduction": "identity",
        "fixture": LEFTCUT,
        "n": 600,
        "threshold_log2": 15,
        "policy_c": "4",
    }
}


class TestSelective:
    def test_left_cut_demo(self, tmp_path):
        code, out = run(tmp_path, "selective", SELECTIVE_DEMO)
        assert code == 0
        report = json.loads((out / "selective_report.json").read_text())
        assert report["bound_satisfied"] is True
        assert report["ok"] is True
        assert report["crossing"] is not None
        blocks = json.loads((out / "selective_blocks.json").read_text())
        assert len(blocks) == 100
        assert set(blocks[0]) == {"q", "order", "i", "capital_log2"}

    def test_infeasible_block_size_rejected(self, tmp_path):
        bad = json.loads(json.dumps(SELECTIVE_DEMO))
        bad["selective"]["k"] = 3  # 2^(3/2) < 4
        code, _ = run(tmp_path, "selective", bad)
        assert code == 1

    def test_broken_selector_flagged(self, tmp_path):
        bad = json.loads(json.dumps(SELECTIVE_DEMO))
        bad["selective"]["selector"] = {"kind": "coin-flip", "params": {"seed": 99}}
        bad["selective"]["n"] = 300
        code, out = run(tmp_path, "selective", bad)
        assert code == 2
        report = json.loads((out / "selective_report.json").read_text())
        assert any("threshold violated" in v for v in report["violations"])

    def test_determinism(self, tmp_path):
        _, out1 = run(tmp_path, "selective", SELECTIVE_DEMO, "a")
        _, out2 = run(tmp_path, "selective", SELECTIVE_DEMO, "b")
        assert read_all(out1) == read_all(out2)


LIFT_DEMO = {
    "liftpair": {
        "pair": COMP_PAIR,
        "s": "3/10",
        "n": 256,
        "threshold_log2": 10,
    }
}


class TestLiftpair:
    def test_feasible_chain(self, tmp_path):
        code, out = run(tmp_path, "liftpair", LIFT_DEMO)
        assert code == 0
        report = json.loads((out / "liftpair_report.json").read_text())
        assert report["feasible"] is True
        assert report["s_prime"] == "159/200"
        assert report["domination_ok"] is True
        assert report["transfer_ok"] is True
        assert report["crossing_pair"] is not None
        assert (out / "liftpair_pair_trace.csv").exists()
        assert (out / "liftpair_source_trace.csv").exists()

    def test_explicit_s_prime(self, tmp_path):
        cfg = json.loads(json.dumps(LIFT_DEMO))
        cfg["liftpair"]["s_prime"] = "4/5"
        code, out = run(tmp_path, "liftpair", cfg)
        assert code == 0
        report = json.loads((out / "liftpair_report.json").read_text())
        assert report["s_prime"] == "4/5"

    def test_infeasible_names_inequality(self, tmp_path):
        cfg = json.loads(json.dumps(LIFT_DEMO))
        cfg["liftpair"]["s"] = "999/1000"
        code, out = run(tmp_path, "liftpair", cfg)
        assert code == 2
        report = json.loads((out / "liftpair_report.json").read_text())
        assert report["feasible"] is False
        assert "gamma(1)" in report["failing_inequality"]

    def test_determinism(self, tmp_path):
        _, out1 = run(tmp_path, "liftpair", LIFT_DEMO, "a")
        _, out2 = run(tmp_path, "liftpair", LIFT_DEMO, "b")
        assert read_all(out1) == read_all(out2)


class TestCliSurface:
    def test_unknown_command_rejected(self):
        with pytest.raises(SystemExit):
            main(["frobnicate", "--config", "x.json"])

    def test_output_mentions_files(self, tmp_path, capsys):
        config = {"n": 8, "fixtures": [ZEROS], "gales": [{"kind": "constant"}]}
        cfg_path = tmp_path / "c.json"
        cfg_path.write_text(json.dumps(config))
        code = main(["trace", "--config", str(cfg_path), "--out", str(tmp_path / "o")])
        captured = capsys.readouterr()
        assert code == 0
        assert "trace.csv" in captured.out
        assert "trace: ok" in captured.out
