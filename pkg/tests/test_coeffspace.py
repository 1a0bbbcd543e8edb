"""Vectors, norms, projections, operator-norm estimation."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import greedylab as gl
from greedylab import CoeffVector as CV
from greedylab import GapSequence


def summing_norm_quadratic_oracle(x: CV) -> float:
    """Recompute every prefix sum from scratch; O(n^2) reference."""
    support = x.support()
    if not support:
        return 0.0
    best = 0.0
    for n in range(1, max(support) + 1):
        prefix = sum(v for i, v in x.pairs() if i <= n)
        best = max(best, abs(prefix))
    return best


class TestCoeffVector:
    def test_canonical_form(self):
        v = CV([3, 1, 1, 2], [1.0, 2.0, -2.0, 0.0])
        assert v.support() == (3,)
        assert v[3] == 1.0 and v[1] == 0.0 and v[2] == 0.0

    def test_rejects_nonpositive_indices(self):
        with pytest.raises(ValueError):
            CV([0], [1.0])

    def test_iteration_strictly_increasing(self):
        v = CV([5, 2, 9], [1.0, 1.0, 1.0])
        idx = [i for i, _ in v.pairs()]
        assert idx == sorted(idx) and len(set(idx)) == len(idx)

    def test_algebra_roundtrip(self):
        a = CV.from_dense([1.0, 2.0, 3.0])
        b = CV.from_dense([0.0, -2.0, 1.0])
        assert (a + b).support() == (1, 3)
        assert (a - a) == CV.zero()
        assert (2.0 * a)[2] == 4.0

    def test_json_pairs_roundtrip(self):
        v = CV.from_pairs([(2, -0.5), (7, 1.25)])
        again = CV.from_json(v.to_json())
        assert again == v
        assert json.loads(v.to_json()) == [[2, -0.5], [7, 1.25]]


class TestProjection:
    def test_empty_set_convention(self):
        x = CV.from_dense([1.0, 2.0, 3.0])
        assert gl.projection(x, []) == CV.zero()

    def test_restriction(self):
        x = CV.from_dense([1.0, 2.0, 3.0])
        assert gl.projection(x, {1, 3}).to_json_pairs() == [[1, 1.0], [3, 3.0]]

    def test_disjoint_support(self):
        x = CV.from_dense([1.0, 2.0, 3.0])
        assert gl.projection(x, {5}) == CV.zero()

    @given(st.lists(st.floats(-10, 10), min_size=1, max_size=12),
           st.sets(st.integers(1, 12)))
    @settings(max_examples=200)
    def test_idempotent(self, dense, A):
        x = CV.from_dense(dense)
        once = gl.projection(x, A)
        assert gl.projection(once, A) == once


class TestSummingNorm:
    def test_cancelling_pair(self):
        assert gl.summing_norm(CV.from_dense([1.0, -1.0])) == 1.0

    def test_zero_vector(self):
        assert gl.summing_norm(CV.zero()) == 0.0

    def test_truncated_divergence_element(self):
        ex = gl.build_example(3)
        from greedylab.counterexample import dense_vector
        assert gl.summing_norm(dense_vector(ex)) == pytest.approx(1.0, abs=1e-10)

    def test_against_quadratic_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(60):
            n = int(rng.integers(1, 30))
            x = CV.from_dense(rng.standard_normal(n))
            assert gl.summing_norm(x) == pytest.approx(
                summing_norm_quadratic_oracle(x), rel=1e-12)

    def test_monotone_basis(self):
        # prefix partial sums never increase the norm
        rng = np.random.default_rng(1)
        for _ in range(1000):
            n = int(rng.integers(1, 24))
            x = CV.from_dense(rng.standard_normal(n))
            nx = gl.summing_norm(x)
            m = int(rng.integers(1, n + 1))
            assert gl.summing_norm(gl.projection(x, range(1, m + 1))) <= nx + 1e-12


class TestLpNorms:
    def test_pythagorean(self):
        assert gl.lp_norm(CV.from_dense([3.0, 4.0]), 2) == 5.0

    def test_quasi_norm_half(self):
        assert gl.lp_norm(CV.from_dense([1.0, 1.0]), 0.5) == pytest.approx(4.0)

    @pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 7.3])
    def test_singleton(self, p):
        assert gl.lp_norm(CV.basis_vector(4), p) == pytest.approx(1.0)

    def test_rejects_nonpositive_exponent(self):
        with pytest.raises(ValueError):
            gl.lp_norm(CV.basis_vector(1), 0.0)
        with pytest.raises(ValueError):
            gl.lp_norm(CV.basis_vector(1), -1.0)

    def test_weighted_defaults_to_one(self):
        x = CV.from_pairs([(1, 1.0), (10, 1.0)])
        assert gl.weighted_lp_norm(x, 2, [4.0]) == pytest.approx(math.sqrt(5.0))


CATALOGUE = [
    ("summing", 1.0),
    ("lp:1", 1.0),
    ("lp:2", 1.0),
    ("sup", 1.0),
    ("lp:1/2", 2.0),
    ("lp:2/3", 2.0 ** 0.5),
]


class TestNormAxioms:
    @pytest.mark.parametrize("key,alpha", CATALOGUE)
    def test_homogeneity_and_quasi_triangle(self, key, alpha):
        space = gl.space_from_key(key, 16)
        assert space.alpha == pytest.approx(alpha, rel=1e-12)
        rng = np.random.default_rng(hash(key) % 2 ** 32)
        for _ in range(1700):  # about 1e4 pairs across the catalogue
            n = int(rng.integers(1, 16))
            x = CV.from_dense(rng.standard_normal(n))
            y = CV.from_dense(rng.standard_normal(int(rng.integers(1, 16))))
            lam = float(rng.standard_normal())
            nx, ny = space.norm(x), space.norm(y)
            assert space.norm(x.scale(lam)) == pytest.approx(abs(lam) * nx, rel=1e-9)
            assert space.norm(x + y) <= space.alpha * (nx + ny) * (1 + 1e-9)
        assert space.norm(CV.zero()) == 0.0

    def test_c_param_exceeds_two(self):
        for key, _ in CATALOGUE:
            assert gl.space_from_key(key, 8).c_param > 2.0


class TestSpaceCatalogue:
    def test_unknown_key(self):
        with pytest.raises(ValueError):
            gl.space_from_key("banana")

    def test_weighted_lp_key(self, tmp_path):
        wfile = tmp_path / "w.json"
        wfile.write_text(json.dumps([4.0, 1.0]))
        space = gl.space_from_key(f"weighted-lp:2:{wfile}", 8)
        assert space.norm(CV.basis_vector(1)) == pytest.approx(2.0)
        assert space.norm(CV.basis_vector(2)) == pytest.approx(1.0)

    def test_summing_parameters(self):
        space = gl.summing_space(8)
        assert space.alpha1 == 1.0 and space.alpha2 == 2.0
        assert space.schauder_constant == 1.0
        assert space.c_param == 6.0

    def test_fraction_exponent(self):
        assert gl.space_from_key("lp:1/2").alpha == 2.0


class TestExtremePoints:
    def test_summing_dim2_vertices(self):
        space = gl.summing_space(2)
        pts = list(space.extreme_points((1, 2)))
        assert len(pts) == 4
        for p in pts:
            assert gl.summing_norm(p) == pytest.approx(1.0)

    def test_vertex_prefix_patterns(self):
        space = gl.summing_space(3)
        for p in space.extreme_points((1, 2, 3)):
            prefixes = np.cumsum(p.to_dense(3))
            assert np.all(np.isin(prefixes, (-1.0, 1.0)))


class TestOperatorNorm:
    def test_summing_first_coordinate(self):
        est = gl.estimate_operator_norm(gl.summing_space(2), {1}, 2, 0)
        assert est.value == 1.0 and est.exact

    def test_summing_middle_coordinate(self):
        # exhaustive oracle over the integer grid {-2..2}^3
        best = 0.0
        for a in range(-2, 3):
            for b in range(-2, 3):
                for c in range(-2, 3):
                    x = CV.from_dense([a, b, c])
                    nx = gl.summing_norm(x)
                    if nx > 0:
                        best = max(best, abs(b) / nx)
        assert best == pytest.approx(2.0)
        est = gl.estimate_operator_norm(gl.summing_space(3), {2}, 3, 0)
        assert est.value == pytest.approx(best) and est.exact

    def test_l2_projection_contracts(self):
        est = gl.estimate_operator_norm(gl.lp_space(2.0), {1, 3}, 5, 80,
                                        np.random.default_rng(2))
        assert est.value == 1.0 and not est.exact
        assert est.note == "LOWER_BOUND"

    def test_no_strategy_error(self):
        with pytest.raises(ValueError, match="no search strategy"):
            gl.estimate_operator_norm(gl.lp_space(2.0), {1}, 4, 0)

    def test_empty_set(self):
        est = gl.estimate_operator_norm(gl.summing_space(4), set(), 4, 0)
        assert est.value == 0.0

    def test_dim_must_cover_A(self):
        with pytest.raises(ValueError):
            gl.estimate_operator_norm(gl.summing_space(2), {5}, 2, 0)


class TestGapSequence:
    def test_naturals(self):
        nat = GapSequence.naturals()
        assert nat.members_up_to(5) == (1, 2, 3, 4, 5)
        assert 3 in nat and nat.first() == 1

    def test_powers(self):
        g = GapSequence.powers(2)
        assert g.members_up_to(20) == (1, 2, 4, 8, 16)
        assert g.bound_l == 2

    def test_strictly_increasing_enforced(self):
        with pytest.raises(ValueError):
            GapSequence.explicit([3, 3, 5])

    def test_bounded_gap_violation(self):
        with pytest.raises(ValueError):
            GapSequence.explicit([1, 5], bound_l=2)
        assert GapSequence.explicit([2, 4, 8], bound_l=2).values == (2, 4, 8)
