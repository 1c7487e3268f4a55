import json
import math

import numpy as np
import pytest

from _helpers import random_exact_quadrature, vandermonde_rank_oracle
from extremal_moments import quadrature as Q
from extremal_moments.errors import MembershipError

SQRT_THIRD = math.sqrt(1 / 3)
SQRT_3_5 = math.sqrt(3 / 5)
SQRT_FIFTH = math.sqrt(1 / 5)


class TestConstructions:
    def test_gauss_one(self):
        q = Q.gauss(1)
        assert q.nodes == (0.0,)
        assert q.weights == (2.0,)

    def test_gauss_two(self):
        q = Q.gauss(2)
        assert q.nodes == pytest.approx((-SQRT_THIRD, SQRT_THIRD), abs=1e-15)
        assert q.weights == pytest.approx((1.0, 1.0), abs=1e-13)

    def test_gauss_three(self):
        q = Q.gauss(3)
        assert q.nodes == pytest.approx((-SQRT_3_5, 0.0, SQRT_3_5), abs=1e-15)
        assert q.weights == pytest.approx((5 / 9, 8 / 9, 5 / 9), abs=1e-13)

    def test_lobatto_two_is_trapezoid(self):
        q = Q.lobatto(2)
        assert q.nodes == (-1.0, 1.0)
        assert q.weights == (1.0, 1.0)

    def test_lobatto_three(self):
        q = Q.lobatto(3)
        assert q.nodes == (-1.0, 0.0, 1.0)
        assert q.weights == pytest.approx((1 / 3, 4 / 3, 1 / 3), abs=1e-15)

    def test_lobatto_four(self):
        q = Q.lobatto(4)
        assert q.nodes == pytest.approx((-1.0, -SQRT_FIFTH, SQRT_FIFTH, 1.0), abs=1e-15)
        assert q.weights == pytest.approx((1 / 6, 5 / 6, 5 / 6, 1 / 6), abs=1e-13)

    def test_radau_two_left(self):
        q = Q.radau(2, "left")
        assert q.nodes == pytest.approx((-1.0, 1 / 3), abs=1e-14)
        assert q.weights == pytest.approx((0.5, 1.5), abs=1e-13)

    def test_radau_two_right_mirrors_left(self):
        left = Q.radau(2, "left")
        right = Q.radau(2, "right")
        assert right.nodes == tuple(-x for x in reversed(left.nodes))
        assert right.weights == tuple(reversed(left.weights))

    def test_radau_one_left(self):
        q = Q.radau(1, "left")
        assert q.nodes == (-1.0,)
        assert q.weights == (2.0,)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            Q.gauss(0)
        with pytest.raises(ValueError):
            Q.lobatto(1)
        with pytest.raises(ValueError):
            Q.radau(0, "left")
        with pytest.raises(ValueError):
            Q.radau(2, "middle")

    def test_weights_sum_to_two(self):
        for n in range(1, 21):
            for q in (Q.gauss(n), Q.lobatto(n + 1), Q.radau(n, "left")):
                assert math.fsum(q.weights) == pytest.approx(2.0, abs=1e-12)

    def test_all_weights_positive(self):
        for n in range(1, 21):
            for q in (Q.gauss(n), Q.lobatto(n + 1), Q.radau(n, "left"),
                      Q.radau(n, "right")):
                assert all(w > 0.0 for w in q.weights)

    def test_gauss_lobatto_mirror_symmetry(self):
        for n in range(1, 21):
            for q in (Q.gauss(n), Q.lobatto(n + 1)):
                assert q.nodes == tuple(-x for x in reversed(q.nodes))
                assert all(
                    abs(a - b) <= 1e-13
                    for a, b in zip(q.weights, reversed(q.weights))
                )

    def test_exactness_sweep(self):
        for n in range(1, 21):
            cases = (
                (Q.gauss(n), 2 * n - 1),
                (Q.lobatto(n + 1), 2 * n - 1),
                (Q.radau(n, "left"), 2 * n - 2),
                (Q.radau(n, "right"), 2 * n - 2),
            )
            for q, degree in cases:
                for k in range(degree + 1):
                    target = 2.0 / (k + 1) if k % 2 == 0 else 0.0
                    assert Q.apply(q, lambda x, k=k: x**k) == pytest.approx(
                        target, abs=1e-11
                    )


class TestFunctional:
    def test_apply_examples(self):
        g2 = Q.gauss(2)
        assert Q.apply(g2, lambda x: 1.0) == pytest.approx(2.0, abs=1e-14)
        assert Q.apply(g2, lambda x: x**3) == 0.0
        assert Q.apply(g2, lambda x: x**4) == pytest.approx(2 / 9, abs=1e-14)
        assert Q.apply(g2, lambda x: x**4) != pytest.approx(2 / 5, abs=1e-3)

    def test_moment_vector_examples(self):
        expected = (2.0, 0.0, 2 / 3, 0.0)
        for q in (Q.gauss(2), Q.lobatto(3)):
            got = Q.moment_vector(q, 3).values
            assert got == pytest.approx(expected, abs=1e-13)
            assert got[1] == 0.0 and got[3] == 0.0
        single = Q.Quadrature((0.0,), (2.0,))
        assert Q.moment_vector(single, 1).values == (2.0, 0.0)

    def test_is_exact(self):
        g2 = Q.gauss(2)
        assert Q.is_exact(g2, Q.MomentVector.lebesgue(3), 1e-12)
        assert not Q.is_exact(g2, Q.MomentVector.lebesgue(4), 1e-12)
        own = Q.moment_vector(g2, 6)
        assert Q.is_exact(g2, own, 1e-15)

    def test_lebesgue_moment_vector(self):
        m = Q.MomentVector.lebesgue(4)
        assert m.values == (2.0, 0.0, 2 / 3, 0.0, 2 / 5)
        assert m.order == 4


class TestCanonicalize:
    def test_merges_duplicate_nodes(self):
        q = Q.canonicalize(Q.Quadrature((0.0, 0.0), (1.0, 1.0)))
        assert q == Q.Quadrature((0.0,), (2.0,))

    def test_drops_zero_weights(self):
        q = Q.canonicalize(Q.Quadrature((0.0, 1.0), (2.0, 0.0)))
        assert q == Q.Quadrature((0.0,), (2.0,))

    def test_idempotent_on_canonical(self):
        q = Q.gauss(3)
        assert Q.canonicalize(q) == q

    def test_all_zero_weights_raise(self):
        with pytest.raises(ValueError, match="empty quadrature"):
            Q.canonicalize(Q.Quadrature((0.0, 0.5), (0.0, 0.0)))

    def test_merge_preserves_functional_action(self):
        q = Q.Quadrature((0.3, 0.3, 0.7), (1.0, 0.5, 0.5))
        c = Q.canonicalize(q)
        assert len(c.nodes) == 2
        for k in range(5):
            assert Q.apply(c, lambda x, k=k: x**k) == pytest.approx(
                Q.apply(q, lambda x, k=k: x**k), abs=1e-15
            )


class TestQuadratureType:
    def test_constructor_sorts_nodes(self):
        q = Q.Quadrature((0.5, -0.5), (1.0, 3.0))
        assert q.nodes == (-0.5, 0.5)
        assert q.weights == (3.0, 1.0)

    def test_constructor_validation(self):
        with pytest.raises(ValueError, match="length"):
            Q.Quadrature((0.0,), (1.0, 2.0))
        with pytest.raises(ValueError, match="at least one node"):
            Q.Quadrature((), ())
        with pytest.raises(ValueError, match=r"nodes\[0\]"):
            Q.Quadrature((1.5,), (1.0,))
        with pytest.raises(ValueError, match=r"weights\[1\]"):
            Q.Quadrature((0.0, 0.5), (1.0, -0.25))

    def test_json_round_trip(self):
        q = Q.gauss(5)
        data = json.loads(json.dumps(q.to_dict()))
        assert Q.Quadrature.from_dict(data) == q

    def test_from_dict_validation(self):
        with pytest.raises(ValueError, match="quadrature.nodes: missing"):
            Q.Quadrature.from_dict({"weights": [1.0]})
        with pytest.raises(ValueError, match=r"quadrature.weights\[1\]"):
            Q.Quadrature.from_dict({"nodes": [0.0, 0.5], "weights": [1.0, "x"]})


class TestExtremePoints:
    def test_gauss_and_lobatto_are_extreme(self):
        moments = Q.MomentVector.lebesgue(3)
        assert Q.is_extreme(Q.gauss(2), moments)
        assert Q.is_extreme(Q.lobatto(3), moments)

    def test_six_node_equal_weight_rule_is_not_extreme(self):
        # Symmetric six-point rule with equal weights and matched m2: exact
        # for the degree-3 Lebesgue moments but too many nodes to be extreme.
        u3 = math.sqrt(1.0 - 0.04 - 0.16)
        q = Q.Quadrature(
            (-u3, -0.4, -0.2, 0.2, 0.4, u3), (1 / 3,) * 6
        )
        moments = Q.MomentVector.lebesgue(3)
        assert Q.is_exact(q, moments, 1e-12)
        assert not Q.is_extreme(q, moments)

    def test_membership_violation_raises(self):
        with pytest.raises(MembershipError):
            Q.is_extreme(Q.gauss(2), Q.MomentVector.lebesgue(5))

    def test_boundary_node_count(self):
        # Gauss rules with up to 2n nodes stay extreme for degree 2n-1
        # moments; one more node (via a mix) tips over.
        for n in (1, 2, 3):
            moments = Q.MomentVector.lebesgue(2 * n - 1)
            assert Q.is_extreme(Q.gauss(2 * n), moments)
            mixed = Q.canonicalize(
                Q.convex_combination(Q.gauss(2 * n), Q.lobatto(2 * n), 0.5)
            )
            if len(mixed.nodes) > 2 * n:
                assert not Q.is_extreme(mixed, moments)

    def test_classifier_agrees_with_rank_oracle(self):
        rng = np.random.default_rng(2024)
        checked = 0
        for order in range(1, 6):
            moments = Q.MomentVector.lebesgue(order)
            for _ in range(40):
                q = random_exact_quadrature(rng, order)
                assert Q.is_exact(q, moments, 1e-10)
                assert Q.is_extreme(q, moments) == vandermonde_rank_oracle(q, order)
                checked += 1
        assert checked == 200

    def test_convexity_closure(self):
        rng = np.random.default_rng(11)
        moments = Q.MomentVector.lebesgue(5)
        for _ in range(25):
            a = random_exact_quadrature(rng, 5)
            b = random_exact_quadrature(rng, 5)
            mix = Q.convex_combination(a, b, float(rng.uniform()))
            assert Q.is_exact(mix, moments, 1e-10)


class TestConvexTestFunctions:
    def test_catalog_contents(self):
        catalog = Q.convex_catalog(2)
        kinds = [f.kind for f in catalog]
        assert kinds == [
            "exponential", "cosh", "odd_monomial", "even_monomial",
            "truncated_power", "truncated_power", "truncated_power",
        ]
        names = [f.name for f in catalog]
        assert "x^3" in names and "x^4" in names and "x^5" not in names

    def test_evaluations(self):
        f = Q.ConvexTestFunction("odd_monomial", 2)
        assert f(0.5) == 0.5**3
        g = Q.ConvexTestFunction("truncated_power", 2, t=0.5)
        assert g(0.25) == 0.0
        assert g(0.75) == 0.25**3
        assert Q.ConvexTestFunction("exponential", 1)(1.0) == math.e

    def test_validation(self):
        with pytest.raises(ValueError):
            Q.ConvexTestFunction("sinh", 2)
        with pytest.raises(ValueError):
            Q.ConvexTestFunction("exponential", 2, c=-1.0)
        with pytest.raises(ValueError):
            Q.ConvexTestFunction("truncated_power", 2, t=1.5)

    def test_derivative_convexity_numerically(self):
        # Check the defining property: the (2n-2)nd derivative of every
        # catalog entry has a nonnegative second difference on [-1, 1].
        n = 2
        h = 1e-2
        for f in Q.convex_catalog(n):
            def deriv(x, order):
                if order == 0:
                    return f(x)
                return (deriv(x + h, order - 1) - deriv(x - h, order - 1)) / (2 * h)

            for x in np.linspace(-0.9, 0.9, 19):
                second_diff = (
                    deriv(x + h, 2 * n - 2)
                    - 2 * deriv(x, 2 * n - 2)
                    + deriv(x - h, 2 * n - 2)
                )
                assert second_diff >= -1e-6


class TestVerifyExtremality:
    def test_exponential_example(self):
        report = Q.verify_extremality(
            2, Q.gauss(3), [Q.ConvexTestFunction("exponential", 2)], 1e-10
        )
        assert report.passed
        check = report.checks[0]
        assert check.lower == pytest.approx(2.3426960879097307, abs=1e-12)
        assert check.value == pytest.approx(2.3503369286800115, abs=1e-12)
        assert check.upper == pytest.approx(2.362053756543496, abs=1e-12)

    def test_tight_at_gauss_with_zero_slack(self):
        for n in (1, 2, 3):
            report = Q.verify_extremality(n, Q.gauss(n), Q.convex_catalog(n), 0.0)
            assert report.passed
            assert any(c.value == c.lower for c in report.checks)

    def test_tight_at_lobatto_with_zero_slack(self):
        for n in (1, 2, 3):
            report = Q.verify_extremality(n, Q.lobatto(n + 1), Q.convex_catalog(n), 0.0)
            assert report.passed
            assert any(c.value == c.upper for c in report.checks)

    def test_precondition_rejects_inexact_functional(self):
        with pytest.raises(MembershipError):
            Q.verify_extremality(3, Q.gauss(2), Q.convex_catalog(3), 1e-10)

    def test_sweep_over_exact_functionals(self):
        rng = np.random.default_rng(5)
        for n in range(1, 6):
            catalog = Q.convex_catalog(n)
            base = [Q.gauss(p) for p in range(n, 2 * n + 1)]
            base += [Q.lobatto(p) for p in range(n + 1, 2 * n + 1)]
            candidates = list(base)
            for _ in range(10):
                i, j = rng.integers(0, len(base), size=2)
                candidates.append(
                    Q.convex_combination(base[i], base[j], float(rng.uniform()))
                )
            for t in candidates:
                assert Q.verify_extremality(n, t, catalog, 1e-10).passed
