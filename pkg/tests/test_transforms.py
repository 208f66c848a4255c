"""Tests for exponent shifts, mixtures, distribution change, and pair lift.

Core claims:
    - exponent shift relabels martingales without touching masses and
      inverts exactly
    - mixtures start at the weighted root sum, dominate each member by
      its weight exactly (mass form), and inherit member crossings
    - the distribution change yields a valid beta-t-gale, matches the
      hand value at "1", satisfies the capital lower bound with residual
      >= -1e-9, and transfers success on the all-zeros fixture
    - the pair lift enforces beta(0) = gamma(0) and both power
      inequalities (margin 1e-9), splits the one-ratio (1/2, 1/4, 1/4)
      for symmetric gamma, dominates the source on flattened words, and
      stays exactly sum-preserving even for asymmetric gamma
    - the exponent-pair search finds 159/200 at s = 3/10 and reports the
      near-1 region infeasible on the 1/1000 grid
"""

import math
from fractions import Fraction

import pytest

from galelab import errors
from galelab.gales import (
    AlphabetDistribution,
    GaleSpec,
    bernoulli_mass,
    capital,
    dump_mass_table,
    halving_mass,
    iter_words,
    log2_fraction,
    predictor_mass,
    success_trace,
    validate_mass,
)
from galelab.langs import periodic
from galelab.pairs import GAMMA_ZERO
from galelab.transforms import (
    GaleFamily,
    beta_transfer_margin,
    default_mixture_weights,
    exponent_shift,
    find_exponent_pair,
    lift_to_pair_gale,
    mixture,
    pair_lift_margins,
    to_beta_gale,
)

UNIFORM = AlphabetDistribution.uniform_binary()
BETA = AlphabetDistribution.binary("1/4")
ONE_F = Fraction(1)


def martingale(mass, name) -> GaleSpec:
    return GaleSpec(UNIFORM, ONE_F, mass, name)


def base_family() -> GaleFamily:
    return GaleFamily((
        martingale(halving_mass(), "constant"),
        martingale(predictor_mass(lambda w: "0"), "bet0"),
        martingale(predictor_mass(lambda w: "1"), "bet1"),
        martingale(bernoulli_mass("2/3"), "b23"),
        martingale(bernoulli_mass("1/3"), "b13"),
    ))


class TestExponentShift:
    def test_identity_at_one(self):
        family = base_family()
        assert list(exponent_shift(family, 1)) == list(family.members)

    def test_constant_shifted_capital(self):
        shifted = exponent_shift(base_family(), Fraction(1, 2))
        assert capital(shifted.slice(0), "0110").log2 == pytest.approx(-2.0)

    def test_shift_then_invert(self):
        from galelab.gales import sgale_to_martingale

        family = base_family()
        shifted = exponent_shift(family, Fraction(1, 2))
        back = [sgale_to_martingale(g) for g in shifted]
        assert [g.name for g in back] == [g.name for g in family]
        assert all(b.mass is g.mass for b, g in zip(back, family))

    def test_rejects_non_martingale(self):
        shifted = exponent_shift(base_family(), Fraction(1, 2))
        with pytest.raises(errors.ConfigError):
            exponent_shift(shifted, Fraction(1, 4))

    def test_family_slice_bounds(self):
        family = base_family()
        with pytest.raises(errors.ConfigError):
            family.slice(len(family))

    def test_empty_family_rejected(self):
        with pytest.raises(errors.ConfigError):
            GaleFamily(())


class TestMixture:
    def test_root_is_weighted_sum(self):
        fam = GaleFamily((martingale(halving_mass(), "a"),
                          martingale(halving_mass(), "b")))
        mix = mixture(fam)
        assert mix.mass.value("") == Fraction(3, 2)

    def test_single_member_weight_one(self):
        fam = GaleFamily((martingale(bernoulli_mass("2/3"), "b23"),))
        mix = mixture(fam, [ONE_F])
        for w in ["", "01", "1101"]:
            assert mix.mass.value(w) == fam.slice(0).mass.value(w)

    def test_default_weights(self):
        assert default_mixture_weights(3) == (Fraction(1), Fraction(1, 2), Fraction(1, 4))

    def test_is_exact_gale(self):
        mix = mixture(base_family())
        assert validate_mass(mix.mass, 10).ok

    def test_domination_exact_in_mass(self):
        fam = base_family()
        mix = mixture(fam)
        weights = default_mixture_weights(len(fam))
        for w in iter_words("01", 10):
            mv = mix.mass.value(w)
            for k, member in enumerate(fam):
                assert mv >= weights[k] * member.mass.value(w)

    def test_member_crossing_transfers(self):
        # Member k crossing T implies the mixture crosses T - k by the
        # same index (log2 weight_k = -k).
        fam = base_family()
        mix = mixture(fam)
        fixture = periodic("0")
        member_trace = success_trace(fam.slice(1), fixture, 40, 10)  # bet0 at slice 1
        mix_trace = success_trace(mix, fixture, 40, 10 - 1)
        assert member_trace.crossing is not None
        assert mix_trace.crossing is not None
        assert mix_trace.crossing <= member_trace.crossing

    def test_rejects_mixed_exponents(self):
        shifted = exponent_shift(base_family(), Fraction(1, 2))
        fam = GaleFamily((base_family().slice(0), shifted.slice(1)))
        with pytest.raises(errors.ConfigError):
            mixture(fam)

    def test_rejects_root_above_one(self):
        from galelab.gales import RatioMass

        big = martingale(RatioMass(lambda w: (Fraction(1, 2), Fraction(1, 2)),
                                   root=Fraction(2)), "big")
        with pytest.raises(errors.ConfigError):
            mixture(GaleFamily((big,)))


class TestDistributionChange:
    def test_identity_at_root(self):
        # d'(0) beta(0)^t + d'(1) beta(1)^t = d'(lambda) = 1.
        g = to_beta_gale(martingale(halving_mass(), "c"), Fraction(1, 2), BETA)
        t = float(g.exponent)
        total = sum(
            2.0 ** capital(g, a).log2 * float(BETA.prob(a)) ** t for a in "01"
        )
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_hand_value(self):
        g = to_beta_gale(martingale(halving_mass(), "c"), Fraction(1, 2), BETA)
        assert capital(g, "1").log2 == pytest.approx(math.log2(1 / math.sqrt(3)), abs=1e-12)

    def test_validates(self):
        g = to_beta_gale(martingale(bernoulli_mass("2/3"), "b"), Fraction(1, 2), BETA)
        assert validate_mass(g.mass, 12).ok

    def test_capital_lower_bound(self):
        # d'(w) >= d(w) 2^(-s|w|) beta(w)^(-t), log-domain residual >= -1e-9.
        src = exponent_shift(base_family(), Fraction(1, 2)).slice(3)  # b23 at s=1/2
        out = to_beta_gale(src, Fraction(1, 2), BETA)
        s, t = float(src.exponent), float(out.exponent)
        for w in iter_words("01", 10):
            lhs = capital(out, w).log2
            d = capital(src, w).log2
            if math.isinf(d):
                continue
            counts = BETA.counts(w)
            rhs = d - s * len(w) - t * BETA.log2_weight(counts)
            assert lhs - rhs >= -1e-9

    def test_success_transfer_all_zeros(self):
        src = exponent_shift(
            GaleFamily((martingale(predictor_mass(lambda w: "0"), "bet0"),)),
            Fraction(1, 2),
        ).slice(0)
        out = to_beta_gale(src, Fraction(1, 2), BETA)
        fixture = periodic("0")
        src_trace = success_trace(src, fixture, 64, 10)
        out_trace = success_trace(out, fixture, 64, 10)
        assert src_trace.crossing is not None
        assert out_trace.crossing is not None
        assert out_trace.crossing <= src_trace.crossing

    def test_transfer_feasibility_threshold(self):
        # For s' = 0.2 and beta = (1/4, 3/4), transfer needs t above
        # 0.2 / log2(4/3); t = 1/2 qualifies, t = 0.45 does not.
        assert beta_transfer_margin(BETA, Fraction(1, 5), Fraction(1, 2)) > 0
        assert beta_transfer_margin(BETA, Fraction(1, 5), Fraction(9, 20)) < 0

    def test_rejects_bad_t(self):
        for t in (Fraction(0), Fraction(1), Fraction(3, 2)):
            with pytest.raises(errors.ConfigError):
                to_beta_gale(martingale(halving_mass(), "c"), t, BETA)

    def test_rejects_non_uniform_source(self):
        g = to_beta_gale(martingale(halving_mass(), "c"), Fraction(1, 2), BETA)
        with pytest.raises(errors.ConfigError):
            to_beta_gale(g, Fraction(1, 2), BETA)

    def test_pruned_subtree_stays_zero(self):
        g = to_beta_gale(martingale(predictor_mass(lambda w: "0"), "bet0"),
                         Fraction(1, 2), BETA)
        assert g.mass.value("1") == 0
        assert g.mass.value("10") == 0


def beta_source(mass=None, s=Fraction(3, 10)) -> GaleSpec:
    return GaleSpec(BETA, s, mass or halving_mass(), "beta-src")


class TestPairLift:
    def test_child_split(self):
        lifted = lift_to_pair_gale(beta_source(), GAMMA_ZERO, Fraction(4, 5))
        assert lifted.mass.child_masses("") == (
            Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))

    def test_validates(self):
        lifted = lift_to_pair_gale(beta_source(bernoulli_mass("2/3")),
                                   GAMMA_ZERO, Fraction(4, 5))
        assert validate_mass(lifted.mass, 8).ok

    def test_domination_on_all_ternary_words(self):
        src = beta_source(bernoulli_mass("2/3"))
        lifted = lift_to_pair_gale(src, GAMMA_ZERO, Fraction(4, 5))
        from galelab.pairs import flatten

        for w in iter_words("0+-", 6):
            lhs = capital(lifted, w).log2
            rhs = capital(src, flatten(w)).log2
            if math.isinf(rhs):
                assert math.isinf(lhs) or lhs >= rhs
                continue
            assert lhs - rhs >= -1e-9

    def test_margin_values(self):
        m1, m0 = pair_lift_margins(BETA, GAMMA_ZERO, Fraction(3, 10), Fraction(4, 5))
        assert m1 == pytest.approx(0.75**0.3 - 2 * 0.375**0.8, abs=1e-12)
        assert m1 > 1e-9 and m0 > 1e-9

    def test_requires_matching_zero_probability(self):
        beta_bad = AlphabetDistribution.binary("1/3")
        with pytest.raises(errors.ConfigError):
            lift_to_pair_gale(GaleSpec(beta_bad, Fraction(3, 10), halving_mass(), "x"),
                              GAMMA_ZERO, Fraction(4, 5))

    def test_infeasible_pair_names_inequality(self):
        with pytest.raises(errors.InfeasibleParameters) as err:
            lift_to_pair_gale(beta_source(s=Fraction(999, 1000)), GAMMA_ZERO,
                              Fraction(999, 1000))
        assert "gamma(1)" in str(err.value)

    def test_asymmetric_gamma_still_exact(self):
        gamma = AlphabetDistribution.ternary("1/4", "2/5", "7/20")
        lifted = lift_to_pair_gale(beta_source(s=Fraction(3, 10)), gamma, Fraction(4, 5))
        assert validate_mass(lifted.mass, 6).ok
        plus, minus = lifted.mass.split["+"], lifted.mass.split["-"]
        assert plus + minus == 1
        assert plus != minus

    def test_mass_agrees_with_source_recursion(self):
        src = beta_source(bernoulli_mass("2/3"))
        lifted = lift_to_pair_gale(src, GAMMA_ZERO, Fraction(4, 5))
        from galelab.pairs import flatten

        for w in iter_words("0+-", 6):
            plus_minus = sum(1 for c in w if c in "+-")
            expect = src.mass.value(flatten(w)) * Fraction(1, 2**plus_minus)
            assert lifted.mass.value(w) == expect


class TestExponentPairSearch:
    def test_reference_value(self):
        assert find_exponent_pair(BETA, GAMMA_ZERO, Fraction(3, 10)) == Fraction(159, 200)

    def test_cross_check_inequality(self):
        s_prime = find_exponent_pair(BETA, GAMMA_ZERO, Fraction(3, 10))
        assert 2 * 0.375 ** float(s_prime) <= 0.75**0.3

    def test_near_one_infeasible_on_grid(self):
        assert find_exponent_pair(BETA, GAMMA_ZERO, Fraction(999, 1000)) is None

    def test_smallest_grid_point(self):
        s_prime = find_exponent_pair(BETA, GAMMA_ZERO, Fraction(3, 10))
        previous = s_prime - Fraction(1, 1000)
        m1, _ = pair_lift_margins(BETA, GAMMA_ZERO, Fraction(3, 10), previous)
        assert m1 < 1e-9

    def test_mismatched_zero_probability_error(self):
        with pytest.raises(errors.ConfigError):
            find_exponent_pair(AlphabetDistribution.binary("1/3"), GAMMA_ZERO,
                               Fraction(3, 10))

    def test_log2_fraction_helper_used_by_traces(self):
        assert log2_fraction(Fraction(3, 2)) == pytest.approx(math.log2(1.5))


class TestObsRoundTripThroughTransforms:
    def test_shift_preserves_mass_tables(self):
        family = base_family()
        shifted = exponent_shift(family, Fraction(1, 2))
        for orig, new in zip(family, shifted):
            assert dump_mass_table(orig.mass, 6) == dump_mass_table(new.mass, 6)
