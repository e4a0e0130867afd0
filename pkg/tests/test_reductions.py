import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import instances, labelings
from lcsparse.core import Instance, degree_profile, eval_labeling, max_degree
from lcsparse.formats import serialize_instance
from lcsparse.generators import GenSpec, gen_planted, gen_random
from lcsparse.reductions import (
    SparsifyParams,
    amplify_copies,
    compute_params,
    instantiate_gap_params,
    is_prime_power,
    sparsify,
    subsample,
    subsample_mask,
    trim,
)
from lcsparse.solvers import maxrep_exact
from oracles import brute_maxrep, smallest_prime_power_ratio


class TestComputeParams:
    def test_default_constants(self):
        # 10**6 * 2 * ln 8 / 0.1 = 41588830.80...
        assert compute_params(4, 0.01).delta == 41588831

    def test_scaled_constant(self):
        assert compute_params(4, 0.01, c_delta=1).delta == 42

    @pytest.mark.parametrize("gamma", [0.0, 1.0, 1.5, -0.1])
    def test_gamma_out_of_range(self, gamma):
        with pytest.raises(ValueError):
            compute_params(4, gamma)

    def test_explicit_delta_and_binding(self):
        params = compute_params(4, 0.3, delta=20, c_p=0.1)
        bound = params.for_degree(2000)
        assert bound.p == pytest.approx(0.001, rel=1e-15)
        assert bound.D == 2000 and params.p is None

    def test_trim_slack_at_default_constants(self):
        params = compute_params(4, 0.01)
        # 1/delta + p D / delta <= 0.0002, the per-endpoint bound in the trim argument
        assert params.trim_slack <= 0.0002


class TestGapParams:
    def test_g2_c1_matches_sieve(self):
        gp = instantiate_gap_params(2, 1.0)
        assert gp.q == smallest_prime_power_ratio(4e5, 7_000_000) == 6259871
        assert gp.gamma == pytest.approx(2 * math.log(gp.q) / gp.q)
        assert gp.eps == 1 / gp.delta
        assert gp.delta == compute_params(gp.q**2, gp.gamma).delta
        assert gp.chan_delta == min(gp.eps, math.log(gp.q) / gp.q)

    def test_small_constant(self):
        # 8/ln 8 = 3.85 <= 4 < 9/ln 9 = 4.10, and 9 = 3**2
        assert instantiate_gap_params(2, 1e-5).q == 9

    @pytest.mark.parametrize("g,c", [(3, 1e-4), (5, 2e-5), (2, 3e-3)])
    def test_minimality_against_sieve(self, g, c):
        gp = instantiate_gap_params(g, c)
        assert gp.q == smallest_prime_power_ratio(1e5 * c * g * g, 200_000)
        assert is_prime_power(gp.q)

    def test_g_must_exceed_one(self):
        with pytest.raises(ValueError):
            instantiate_gap_params(1, 1.0)

    def test_prime_power(self):
        assert [q for q in range(1, 30) if is_prime_power(q)] == [
            2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29,
        ]


class TestAmplify:
    def test_identity(self, tiny1):
        assert amplify_copies(tiny1, 1) == tiny1

    def test_tiny1_t3_counts(self, tiny1):
        big = amplify_copies(tiny1, 3)
        assert (big.n_a, big.n_b, big.num_edges) == (6, 6, 36)
        assert degree_profile(big).histogram == {6: 12}

    def test_tiny1_t2_value(self, tiny1):
        assert brute_maxrep(amplify_copies(tiny1, 2)) == 1

    def test_vertex_indexing(self, tiny1):
        big = amplify_copies(tiny1, 2)
        # copy i of a1 is 1*2+i; its edges to b0 copies carry swap
        assert {(a, b): t for a, b, t in big.edges}[(3, 0)] == (1, 0)

    @given(st.data())
    def test_value_preserved(self, data):
        inst = data.draw(instances(max_side=3, max_sigma=3))
        t = data.draw(st.integers(1, 3))
        if inst.sigma ** (inst.n_a * t) > 300_000:
            t = 1
        assert maxrep_exact(amplify_copies(inst, t)).objective == brute_maxrep(inst)

    def test_bad_t(self, tiny1):
        with pytest.raises(ValueError):
            amplify_copies(tiny1, 0)


class TestSubsample:
    def test_p_one_and_zero(self, tiny1):
        assert subsample(tiny1, 1.0, 3) == tiny1
        assert subsample(tiny1, 0.0, 3).num_edges == 0

    def test_binomial_mean(self, tiny1):
        big = amplify_copies(tiny1, 50)
        assert big.num_edges == 10_000
        counts = np.array([subsample_mask(big.num_edges, 0.3, s).sum() for s in range(1000)])
        sd = math.sqrt(10_000 * 0.3 * 0.7)
        assert abs(counts.mean() - 3000) <= 3 * sd
        assert abs(counts.mean() - 3000) <= 3 * sd / math.sqrt(1000)

    @given(st.integers(0, 2**64 - 1), st.floats(0, 1), st.floats(0, 1))
    def test_monotone_coupling(self, seed, p1, p2):
        lo, hi = sorted((p1, p2))
        small, large = subsample_mask(500, lo, seed), subsample_mask(500, hi, seed)
        assert not (small & ~large).any()

    def test_rejects_bad_p(self):
        with pytest.raises(ValueError):
            subsample_mask(5, 1.5, 0)


class TestTrim:
    def test_noop(self, tiny1):
        res = trim(tiny1, 2)
        assert res.instance == tiny1 and res.removed_edges == 0

    def test_star(self):
        star = Instance(1, 5, 2, tuple((0, b, (0, 1)) for b in range(5)))
        res = trim(star, 4)
        assert res.instance.num_edges == 0 and res.removed_edges == 5
        assert (res.trimmed_vertices_a, res.trimmed_vertices_b) == (1, 0)

    def test_delta_zero(self, tiny1):
        assert trim(tiny1, 0).instance.num_edges == 0

    def test_single_pass_on_input_degrees(self):
        # a0 has degree 3 and is cut; b0 drops to degree 1 but b1 (degree 2) stays
        inst = Instance(
            2, 3, 1, ((0, 0, (0,)), (0, 1, (0,)), (0, 2, (0,)), (1, 0, (0,)), (1, 1, (0,)))
        )
        res = trim(inst, 2)
        assert [e[:2] for e in res.instance.edges] == [(1, 0), (1, 1)]

    @given(st.data())
    def test_idempotent_and_bounded(self, data):
        inst = data.draw(instances(max_side=5))
        d = data.draw(st.integers(0, 5))
        once = trim(inst, d).instance
        assert trim(once, d).instance == once
        assert not once.edges or max_degree(once) <= d
        assert set(once.edges) <= set(inst.edges)


class TestSparsify:
    def planted(self):
        return gen_planted(GenSpec(40, 20, 3, seed=5))

    def test_p_one_path(self):
        inst, _ = self.planted()
        out = sparsify(inst, 0.3, 1, delta=10, c_p=2.0, guard_ratio=0)
        assert out.params.p == 1.0
        assert out.intermediate == inst

    def test_guard_message(self):
        inst, _ = self.planted()
        with pytest.raises(ValueError, match="requires D >= 100"):
            sparsify(inst, 0.3, 1, delta=10, guard_ratio=10)

    def test_default_guard_refuses_desk_instance(self):
        inst, _ = self.planted()
        with pytest.raises(ValueError, match="degree guard"):
            sparsify(inst, 0.3, 1)

    def test_rejects_irregular(self, tiny1):
        inst = tiny1.with_edges(tiny1.edges[:3])
        with pytest.raises(ValueError, match="regular"):
            sparsify(inst, 0.3, 1, delta=1, guard_ratio=0)

    @given(st.integers(0, 10**9), st.integers(1, 10), st.floats(0.05, 1.0))
    def test_output_invariants(self, seed, delta, c_p):
        inst = gen_random(GenSpec(20, 10, 3, "random", seed=seed % 17))
        out = sparsify(inst, 0.3, seed, delta=delta, c_p=c_p, guard_ratio=0)
        assert set(out.trimmed.edges) <= set(out.intermediate.edges) <= set(inst.edges)
        assert not out.trimmed.edges or max_degree(out.trimmed) <= delta
        assert out.removed_edges == out.intermediate.num_edges - out.trimmed.num_edges
        assert out.params.p == pytest.approx(c_p * delta / 10)

    @given(st.data())
    def test_trimmed_satisfied_count_only_drops(self, data):
        inst = gen_random(GenSpec(6, 4, 3, "random", seed=data.draw(st.integers(0, 50))))
        phi = data.draw(labelings(inst))
        out = sparsify(inst, 0.3, data.draw(st.integers(0, 1000)), delta=2, c_p=1.0, guard_ratio=0)
        assert (
            eval_labeling(out.trimmed, phi).satisfied_count
            <= eval_labeling(out.intermediate, phi).satisfied_count
        )

    def test_reproducible(self):
        inst, _ = self.planted()
        a = sparsify(inst, 0.3, 77, delta=8, c_p=0.5, guard_ratio=0)
        b = sparsify(inst, 0.3, 77, delta=8, c_p=0.5, guard_ratio=0)
        assert serialize_instance(a.trimmed) == serialize_instance(b.trimmed)
        assert a.summary() == b.summary()


def test_params_reject_bad_probability():
    with pytest.raises(ValueError):
        SparsifyParams(delta=3, gamma=0.5, p=1.5)
