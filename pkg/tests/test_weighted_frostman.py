import math

import numpy as np
import oracles as O
import pytest
from conftest import LN2, LN_PHI
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import instances, oracle_leaves, weights_by_word

from bsdim.caratheodory import SetSpec, build_tree, cover_sum, node_weights
from bsdim.errors import EmptySet, ThresholdUnmet, ValidationError
from bsdim.weighted_frostman import (
    FEAS_TOL,
    cover_violation,
    duality_gap,
    frostman_measure,
    frostman_violation,
    full_leaf_masses,
    sandwich_check,
    sandwich_threshold,
    subtree_masses,
    weighted_cover_value,
)


def _lp_inputs(tree, u, s, N):
    D = tree.max_depth
    leaves = [tree.word(D, int(i)) for i in np.nonzero(tree.marked[D])[0]]
    nodes = [tree.word(d, int(i)) for d in range(N, D + 1) for i in np.nonzero(tree.marked[d])[0]]
    return leaves, nodes, weights_by_word(tree, u, s)


class TestExamples:
    def test_full_shift_at_ln2(self, full2):
        t = build_tree(full2[0], None, 5)
        assert weighted_cover_value(t, full2[1], LN2, 1).objective == pytest.approx(1.0, rel=1e-14)

    def test_full_shift_at_one(self, full2):
        t = build_tree(full2[0], None, 5)
        w = weighted_cover_value(t, full2[1], 1.0, 1)
        assert w.objective == pytest.approx((2 / math.e) ** 5, rel=1e-14)
        # (2/e)^5 = 0.215614, the minimum of (2/e)^n over n in [1, 5]
        assert w.objective == pytest.approx(0.2156143, abs=1e-7)

    def test_dense_lp_confirms(self, full2):
        for s in (LN2, 1.0):
            t = build_tree(full2[0], None, 3)
            assert O.lp_weighted_cover(*_lp_inputs(t, full2[1], s, 1)) == pytest.approx(
                weighted_cover_value(t, full2[1], s, 1).objective, rel=1e-9
            )

    def test_empty_set(self, full2):
        t = build_tree(full2[0], SetSpec.from_sub_adjacency([[0, 1], [0, 0]]), 4)
        assert weighted_cover_value(t, full2[1], 1.0, 1).objective == 0.0
        with pytest.raises(EmptySet):
            frostman_measure(t, full2[1], 1.0, 1)

    def test_uniform_frostman(self, full2):
        t = build_tree(full2[0], None, 5)
        mu = frostman_measure(t, full2[1], LN2, 1)
        assert mu.total_mass == pytest.approx(1.0, rel=1e-14)
        np.testing.assert_allclose(mu.leaf_masses, 2.0**-5, rtol=1e-14)

    def test_counting_frostman(self, full2):
        t = build_tree(full2[0], None, 5)
        mu = frostman_measure(t, full2[1], 0.0, 1)
        assert mu.total_mass == pytest.approx(2.0, rel=1e-14)
        np.testing.assert_allclose(mu.leaf_masses, 2.0 / 32, rtol=1e-14)

    def test_single_chain(self, golden_depth2):
        sft, u = golden_depth2
        t = build_tree(sft, SetSpec.from_generators(["01001"]), 5)
        mu = frostman_measure(t, u, 0.7, 2)
        w = node_weights(t, u, 0.7)
        path = [float(w[d][t.index_of((0, 1, 0, 0, 1)[:d])]) for d in range(2, 6)]
        assert mu.total_mass == pytest.approx(min(path), rel=1e-14)

    def test_golden_duality(self, golden):
        t = build_tree(golden[0], None, 8)
        gap = duality_gap(t, golden[1], LN_PHI, 1)
        value = weighted_cover_value(t, golden[1], LN_PHI, 1).objective
        assert gap <= 1e-9
        assert O.lp_frostman(*_lp_inputs(t, golden[1], LN_PHI, 1)) == pytest.approx(value, rel=1e-9)

    def test_json(self, full2):
        t = build_tree(full2[0], None, 2)
        js = frostman_measure(t, full2[1], LN2, 1).to_json()
        assert set(js) == {"total_mass", "s", "leaves", "tight_cylinders"}
        assert js["leaves"][0] == {"word": "00", "mass": pytest.approx(0.25)}

    def test_negative_s(self, full2):
        with pytest.raises(ValidationError):
            weighted_cover_value(build_tree(full2[0], None, 2), full2[1], -1.0, 1)


class TestAgainstLp:
    @given(instances(max_nodes=60), st.floats(0.0, 1.5), st.data())
    @settings(max_examples=40, deadline=None)
    def test_weighted_and_frostman(self, inst, s, data):
        adj, sft, u, z, D = inst
        t = build_tree(sft, z, D)
        if t.is_empty:
            return
        N = data.draw(st.integers(1, D))
        args = _lp_inputs(t, u, s, N)
        w = weighted_cover_value(t, u, s, N)
        mu = frostman_measure(t, u, s, N)
        assert w.objective == pytest.approx(O.lp_weighted_cover(*args), rel=1e-8)
        assert mu.total_mass == pytest.approx(O.lp_frostman(*args), rel=1e-8)
        assert w.objective == cover_sum(t, u, s, N).value

    @given(instances(max_nodes=60), st.floats(0.0, 1.5), st.data())
    @settings(max_examples=30, deadline=None)
    def test_general_demand(self, inst, s, data):
        adj, sft, u, z, D = inst
        t = build_tree(sft, z, D)
        if t.is_empty:
            return
        N = data.draw(st.integers(1, D))
        leaves = sorted(oracle_leaves(adj, z, D))
        h = {leaf: data.draw(st.sampled_from([0.0, 0.5, 1.0, 2.0])) for leaf in leaves}
        if not any(h.values()):
            return
        w = weighted_cover_value(t, u, s, N, demand=h)
        assert cover_violation(t, w, N, demand=h) <= FEAS_TOL
        recomputed = math.fsum(c * weights_by_word(t, u, s)[b] for b, c in w.assignments)
        assert w.objective == pytest.approx(recomputed, rel=1e-12)
        _, nodes, wt = _lp_inputs(t, u, s, N)
        lp = O.lp_weighted_cover(leaves, nodes, wt, [h[x] for x in leaves])
        assert w.objective == pytest.approx(lp, rel=1e-8)
        # the greedy Frostman dual attains the same value
        mu = frostman_measure(t, u, s, N, demand=h)
        assert mu.objective == pytest.approx(lp, rel=1e-8)
        assert frostman_violation(t, u, mu, N) <= FEAS_TOL

    def test_demand_validation(self, golden):
        t = build_tree(golden[0], SetSpec.from_generators(["0"]), 3)
        with pytest.raises(ValidationError):
            weighted_cover_value(t, golden[1], 1.0, 1, demand={"10": 1.0})
        with pytest.raises(ValidationError):
            weighted_cover_value(t, golden[1], 1.0, 1, demand={"100": 1.0})
        with pytest.raises(ValidationError):
            weighted_cover_value(t, golden[1], 1.0, 1, demand={"000": -1.0})


class TestInvariants:
    @given(instances(max_nodes=200), st.floats(0.0, 2.0), st.data())
    @settings(max_examples=50, deadline=None)
    def test_duality_and_feasibility(self, inst, s, data):
        adj, sft, u, z, D = inst
        t = build_tree(sft, z, D)
        if t.is_empty:
            return
        N = data.draw(st.integers(1, D))
        w = weighted_cover_value(t, u, s, N)
        mu = frostman_measure(t, u, s, N)
        assert abs(w.objective - mu.total_mass) <= 1e-9 * (1 + w.objective)
        assert cover_violation(t, w, N) <= FEAS_TOL
        assert frostman_violation(t, u, mu, N) <= FEAS_TOL
        # normalized measure: mu(C) <= exp(-s u(C)) / c cylinder by cylinder
        c = mu.total_mass
        sub = subtree_masses(t, full_leaf_masses(t, mu) / c)
        wts = node_weights(t, u, s)
        for d in range(N, D + 1):
            m = t.marked[d]
            assert (sub[d][m] <= wts[d][m] / c * (1 + 1e-9)).all()

    @given(instances(), st.floats(0.0, 1.5), st.floats(0.01, 1.0), st.data())
    @settings(max_examples=30, deadline=None)
    def test_monotone(self, inst, s, gap, data):
        adj, sft, u, _, D = inst
        N = data.draw(st.integers(1, D))
        t_all = build_tree(sft, None, D)
        t_part = build_tree(sft, SetSpec.from_generators([O.words(adj, 1)[0]]), D)
        W = lambda t, a: weighted_cover_value(t, u, a, N).objective
        assert W(t_all, s + gap) < W(t_all, s)
        assert W(t_part, s) <= W(t_all, s)


class TestSandwich:
    @pytest.mark.parametrize("u_min, delta, expected", [(1.0, 0.3, 20), (1.0, 1.0, 3), (1.0, 2.0, 3), (0.5, 0.3, 53)])
    def test_threshold(self, u_min, delta, expected):
        N = sandwich_threshold(u_min, delta)
        assert N == expected
        f = lambda n: n * n * math.exp(-u_min * n * delta)
        assert all(f(n) <= 1 for n in range(N, N + 500))
        assert N == 3 or f(N - 1) > 1

    def test_full_shift_example(self, full2):
        t = build_tree(full2[0], None, 22)
        r = sandwich_check(t, full2[1], 0.5, 0.3, 20, strict=True)
        assert r.threshold == 20 and r.threshold_met
        assert r.upper_holds and r.lower_holds and r.equality and r.passed

    def test_below_threshold(self, full2):
        t = build_tree(full2[0], None, 8)
        r = sandwich_check(t, full2[1], 0.5, 0.3, 6)
        assert r.lower_holds is None and r.equality
        with pytest.raises(ThresholdUnmet):
            sandwich_check(t, full2[1], 0.5, 0.3, 6, strict=True)

    def test_counting_case(self, golden):
        t = build_tree(golden[0], None, 10)
        r = sandwich_check(t, golden[1], 0.0, 1.0, 4)
        assert r.cover == r.weighted == golden[0].word_count(4)
        assert r.cover_shifted <= r.weighted and r.passed

    @given(instances(max_nodes=200), st.floats(0.0, 1.5), st.floats(0.05, 2.0), st.data())
    @settings(max_examples=40, deadline=None)
    def test_equality_everywhere(self, inst, s, delta, data):
        adj, sft, u, z, D = inst
        t = build_tree(sft, z, D)
        if t.is_empty:
            return
        r = sandwich_check(t, u, s, delta, data.draw(st.integers(1, D)))
        assert r.upper_holds and r.equality and r.lower_holds is not False
