
import numpy as np
import oracles as O
import pytest
from conftest import LN2, LN_PHI, MORAN_VALUES, PHI
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import bernoulli, irreducible_systems

from bsdim.caratheodory import SetSpec
from bsdim.errors import ValidationError
from bsdim.shift_space import Potential, validate_sft
from bsdim.thermo import (
    MarkovMeasure,
    bowen_root,
    entropy,
    equilibrium_markov,
    pressure,
    ratio,
    restrict_system,
    stationary_distribution,
    transition_costs,
)
from bsdim.variational import (
    finite_difference_gradient,
    inner_gradient,
    inner_objective,
    local_global_check,
    maximize_ratio,
    mirror_ascent_inner,
    mirror_ascent_ratio,
    packing_variational_check,
    random_measure_certificate,
    random_transition,
)

MORAN_ROOT = O.moran_root(MORAN_VALUES)


class TestMaximizeRatio:
    def test_full_shift(self, full2):
        r = maximize_ratio(*full2)
        assert r.ratio == pytest.approx(LN2, abs=1e-10)
        np.testing.assert_allclose(r.best_measure.transition, 0.5, atol=1e-10)

    def test_moran(self, moran):
        r = maximize_ratio(*moran)
        assert r.ratio == pytest.approx(MORAN_ROOT, abs=1e-10)
        assert r.best_measure.transition[0, 0] == pytest.approx(2.0**-MORAN_ROOT, abs=1e-8)

    def test_golden_parry(self, golden):
        r = maximize_ratio(*golden)
        assert r.ratio == pytest.approx(LN_PHI, abs=1e-10)
        assert r.best_measure.transition[0, 0] == pytest.approx(1 / PHI, abs=1e-10)

    def test_bad_tol(self, golden):
        with pytest.raises(ValidationError):
            maximize_ratio(*golden, tol=-1.0)

    @given(irreducible_systems())
    @settings(max_examples=40, deadline=None)
    def test_strong_duality_and_trail(self, sys_):
        _, _, _, sft, u = sys_
        r = maximize_ratio(sft, u)
        assert r.gap <= 1e-9
        assert r.ratio <= r.s_star_reference + 1e-10
        ss = [s for s, _ in r.trail]
        assert all(a < b for a, b in zip(ss, ss[1:]))
        for s, attained in r.trail:
            assert attained == pytest.approx(pressure(sft, u, s), abs=1e-9)

    @given(irreducible_systems(max_k=1))
    @settings(max_examples=8, deadline=None)
    def test_mirror_ascent_cross_check(self, sys_):
        _, _, _, sft, u = sys_
        assert mirror_ascent_ratio(sft, u) == pytest.approx(maximize_ratio(sft, u).ratio, abs=1e-6)

    def test_mirror_inner_matches_pressure(self, golden_depth2):
        sft, u = golden_depth2
        value, _ = mirror_ascent_inner(sft, u, 0.4)
        assert value == pytest.approx(pressure(sft, u, 0.4), abs=1e-8)

    @given(irreducible_systems(), st.floats(0.2, 5.0))
    @settings(max_examples=20, deadline=None)
    def test_scaling(self, sys_, c):
        _, _, _, sft, u = sys_
        a, b = maximize_ratio(sft, u, 1e-12), maximize_ratio(sft, u.scaled(c), 1e-12)
        assert b.ratio == pytest.approx(a.ratio / c, abs=1e-9)
        np.testing.assert_allclose(b.best_measure.transition, a.best_measure.transition, atol=1e-8)

    def test_restriction_monotone(self):
        sft = validate_sft(3, [[1, 1, 1]] * 3)
        u = Potential.from_symbol_values(sft, [1.0, 1.5, 0.7])
        chain = [[[1, 1, 0], [1, 0, 0], [0, 0, 0]], [[1, 1, 0], [1, 1, 0], [0, 0, 0]], [[1, 1, 1], [1, 1, 0], [1, 0, 1]]]
        values = [maximize_ratio(*restrict_system(sft, u, B)[:2]).ratio for B in chain]
        values.append(maximize_ratio(sft, u).ratio)
        assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))


class TestGradient:
    @given(irreducible_systems(), st.floats(0.0, 2.0), st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_matches_finite_differences(self, sys_, s, seed):
        _, _, _, sft, u = sys_
        _, costs = transition_costs(sft, u)
        P = random_transition(costs, np.random.default_rng(seed), concentration=3.0)
        P = np.where(np.isnan(costs), 0.0, np.maximum(P, 1e-3))
        P /= P.sum(axis=1, keepdims=True)
        g, fd = inner_gradient(P, costs, s), finite_difference_gradient(P, costs, s)
        assert np.linalg.norm(g - fd) <= 1e-5 * max(np.linalg.norm(fd), 1e-12)

    def test_stationary_extension(self, golden_depth2):
        sft, u = golden_depth2
        _, costs = transition_costs(sft, u)
        P = random_transition(costs, np.random.default_rng(0))
        mu = MarkovMeasure.from_transition([(0,), (1,)], P)
        assert inner_objective(P, costs, 0.5) == pytest.approx(entropy(mu) - 0.5 * (
            sum(mu.stationary[a] * P[a, b] * costs[a, b] for a in range(2) for b in range(2) if P[a, b] > 0)
        ), abs=1e-13)

    def test_equilibrium_is_stationary_point(self, golden_depth2):
        # at the maximizer the gradient is constant along each row (the simplex normal)
        sft, u = golden_depth2
        _, costs = transition_costs(sft, u)
        mu = equilibrium_markov(sft, u, 0.6)
        g = inner_gradient(mu.transition, costs, 0.6)
        for row, mask in zip(g, ~np.isnan(costs)):
            assert np.ptp(row[mask]) <= 1e-9


class TestCertificate:
    def test_full_shift(self, full2):
        rep = random_measure_certificate(*full2, 500, seed=0)
        assert rep.passed
        assert all(d["ratio"] <= LN2 + 1e-9 for d in rep.draws)
        assert rep.details["best_ratio"] >= 0.65
        js = rep.to_json()
        assert js["verdicts"] == {"weak_duality": "pass", "best_below_optimum": "pass"}
        assert js["seed"] == 0 and len(js["draws"]) == 500

    def test_deterministic(self, golden):
        a = random_measure_certificate(*golden, 20, seed=3).to_json()
        assert a == random_measure_certificate(*golden, 20, seed=3).to_json()
        assert a != random_measure_certificate(*golden, 20, seed=4).to_json()

    def test_cycle_measure(self, full2):
        P = np.array([[0.0, 1.0], [1.0, 0.0]])
        mu = MarkovMeasure(((0,), (1,)), P, stationary_distribution(P))
        assert entropy(mu) == 0.0 and ratio(mu, full2[1]) == 0.0

    def test_golden_inside_full(self, full2):
        sub, usub, _ = restrict_system(*full2, [[1, 1], [1, 0]])
        rep = random_measure_certificate(sub, usub, 200, seed=1)
        assert rep.passed
        assert rep.s_star == pytest.approx(LN_PHI, abs=1e-9)
        assert max(d["ratio"] for d in rep.draws) <= LN_PHI + 1e-9 < LN2

    @given(irreducible_systems(), st.integers(0, 1000))
    @settings(max_examples=20, deadline=None)
    def test_weak_duality(self, sys_, seed):
        _, _, _, sft, u = sys_
        assert random_measure_certificate(sft, u, 30, seed).verdicts["weak_duality"]

    def test_count(self, golden):
        with pytest.raises(ValidationError):
            random_measure_certificate(*golden, 0, seed=0)


class TestLocalGlobal:
    def test_fair_coin_both_directions(self, full2):
        mu = bernoulli(0.5)
        for direction in (1, 2):
            rep = local_global_check(*full2, mu, direction, [10, 50], draws=50)
            assert rep.passed
            assert rep.details["s"] == pytest.approx(LN2, abs=1e-12)
            assert rep.s_star == pytest.approx(LN2, abs=1e-9)

    def test_parry_inside_full(self, full2):
        mu = equilibrium_markov(validate_sft(2, [[1, 1], [1, 0]]), full2[1], 0.0)
        rep = local_global_check(*full2, mu, 2, [100, 1000], z=SetSpec.from_sub_adjacency([[1, 1], [1, 0]]))
        assert rep.passed
        assert rep.details["s"] <= rep.s_star + 0.02

    def test_biased_coin(self, full2):
        rep = local_global_check(*full2, bernoulli(0.9), 2, [100, 2000], draws=200)
        assert rep.passed
        samples = rep.details["local_samples"][-1]
        assert samples["mean"] == pytest.approx(O.binary_entropy(0.9), abs=0.01)
        assert round(O.binary_entropy(0.9), 3) == 0.325
        # the certified value is strictly below the dimension: one measure is not enough
        assert rep.details["s"] < LN2 - 0.3

    def test_direction(self, full2):
        with pytest.raises(ValidationError):
            local_global_check(*full2, bernoulli(0.5), 3, [10])


class TestPackingVariational:
    def test_full_shift(self, full2):
        rep = packing_variational_check(*full2, depth=14)
        assert rep.passed
        assert rep.details["pack_exponent"] == pytest.approx(LN2, abs=1e-9)
        assert rep.details["optimum"] == pytest.approx(LN2, abs=1e-10)

    def test_golden_inside_full(self, full2):
        rep = packing_variational_check(*full2, z=SetSpec.from_sub_adjacency([[1, 1], [1, 0]]), depth=14)
        assert rep.passed
        assert abs(rep.details["pack_exponent"] - LN_PHI) <= 0.03

    def test_moran(self, moran):
        rep = packing_variational_check(*moran, tol=0.02, depth=16)
        assert rep.passed
        assert abs(rep.details["pack_exponent"] - 0.6942419) <= 0.02

    def test_generator_target_rejected(self, full2):
        with pytest.raises(ValidationError):
            packing_variational_check(*full2, z=SetSpec.from_generators(["0"]), depth=6)


def test_bowen_root_consistent_with_optimum(golden_depth2):
    sft, u = golden_depth2
    assert maximize_ratio(sft, u).ratio == pytest.approx(bowen_root(sft, u), abs=1e-10)
