import io
import math

import numpy as np
import pytest

from _helpers import ongrid_mixture
from extremal_moments import kfamily as K
from extremal_moments import measure as M
from extremal_moments import represent as R
from extremal_moments.errors import MembershipError, NumericFailure


def even_monomials(max_degree):
    return [lambda t, k=k: t**k for k in range(0, max_degree + 1, 2)]


class TestSolveNnls:
    def test_identity_feasible(self):
        x = R.solve_nnls(np.eye(2), [1.0, 0.0], np.ones(2), 1.0)
        assert x == pytest.approx([1.0, 0.0], abs=1e-10)

    def test_identity_clamped(self):
        x = R.solve_nnls(np.eye(2), [-1.0, 2.0], np.ones(2), 1.0)
        assert x == pytest.approx([0.0, 1.0], abs=1e-10)
        # brute force over the simplex confirms the vertex
        grid = np.linspace(0.0, 1.0, 2001)
        costs = (grid + 1.0) ** 2 + (1.0 - grid - 2.0) ** 2
        assert grid[np.argmin(costs)] == 0.0

    def test_single_column(self):
        x = R.solve_nnls([[1.0], [2.0]], [1.0, 2.0], np.ones(1), 1.0)
        assert x == pytest.approx([1.0], abs=1e-12)

    def test_unconstrained_matches_known_solution(self):
        x = R.solve_nnls([[1, 0], [1, 0], [0, 1]], [2, 1, 1])
        assert x == pytest.approx([1.5, 1.0], abs=1e-12)

    def test_matches_brute_force_on_random_simplex_problems(self):
        rng = np.random.default_rng(13)
        ws = np.linspace(0, 1, 401)
        simplex = np.stack([ws, 1.0 - ws])
        for _ in range(10):
            matrix = rng.normal(size=(3, 2))
            target = rng.normal(size=3)
            x = R.solve_nnls(matrix, target, np.ones(2), 1.0)
            costs = np.linalg.norm(matrix @ simplex - target[:, None], axis=0)
            brute = simplex[:, np.argmin(costs)]
            assert np.linalg.norm(matrix @ x - target) <= np.min(costs) + 1e-6
            assert x == pytest.approx(brute, abs=5e-3)

    def test_equality_holds_exactly(self):
        rng = np.random.default_rng(21)
        matrix = rng.normal(size=(4, 30))
        target = rng.normal(size=4)
        x = R.solve_nnls(matrix, target, np.ones(30), 1.0)
        assert x.min() >= 0.0
        assert math.fsum(x) == pytest.approx(1.0, abs=1e-12)

    def test_iteration_cap_raises(self):
        rng = np.random.default_rng(3)
        matrix = rng.normal(size=(6, 40))
        target = rng.normal(size=6)
        with pytest.raises(NumericFailure, match="iterations"):
            R.solve_nnls(matrix, target, iteration_factor=0)

    def test_dimension_validation(self):
        with pytest.raises(ValueError):
            R.solve_nnls(np.eye(2), [1.0, 0.0, 0.0])
        with pytest.raises(ValueError):
            R.solve_nnls(np.eye(2), [1.0, 0.0], np.ones(3), 1.0)
        with pytest.raises(ValueError):
            R.solve_nnls(np.eye(2), [1.0, 0.0], np.ones(2))


class TestMixingMeasure:
    def test_validation(self):
        with pytest.raises(ValueError, match=r"points\[0\]"):
            R.MixingMeasure(0.5, ((0.6, 0.9),), (1.0,))
        with pytest.raises(ValueError, match="sum to 1"):
            R.MixingMeasure(0.5, ((0.2, 0.8),), (0.9,))
        with pytest.raises(ValueError, match=r"weights\[1\]"):
            R.MixingMeasure(0.5, ((0.2, 0.8), (0.3, 0.9)), (1.1, -0.1))

    def test_mixture_moment_examples(self):
        b = 0.5
        at_corner = R.MixingMeasure(b, ((b, b),), (1.0,))
        assert R.mixture_moment(at_corner, 2) == b * b
        assert R.mixture_moment(at_corner, 0) == 1.0
        assert R.mixture_moment(at_corner, 3) == 0.0
        three_point = R.MixingMeasure(b, ((0.0, 1.0),), (1.0,))
        assert R.mixture_moment(three_point, 4) == b * b

    def test_mixture_moment_matches_measure_moment(self):
        rng = np.random.default_rng(8)
        b = 0.45
        sigma, support = ongrid_mixture(rng, b, 9, 9, 6)
        gamma = R.MixingMeasure(
            b, tuple(p for p, _ in support), tuple(w for _, w in support)
        )
        for k in range(13):
            assert R.mixture_moment(gamma, k) == pytest.approx(
                M.moment(sigma, k), abs=1e-12
            )


class TestGrid:
    def test_boundary_collapses_to_corner(self):
        b = 0.5
        points = R.grid_points(b, 6, 6)
        assert points[-1] == (b, b)
        assert all(x < b for x, _ in points[:-1])
        assert all(y > b for _, y in points[:-1])
        assert len(points) == 26

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            R.grid_points(0.5, 1, 5)


class TestRepresent:
    def test_extreme_point_represents_itself(self):
        b = 0.5
        sigma = K.to_measure(K.make(b, b, b))
        result = R.represent(sigma, b, grid=(11, 11))
        assert result.residual <= 1e-12
        weight_at_corner = sum(
            w for p, w in zip(result.gamma.points, result.gamma.weights)
            if p == (b, b)
        )
        assert weight_at_corner == pytest.approx(1.0, abs=1e-9)

    def test_ongrid_kpoint_recovered(self):
        sigma = K.to_measure(K.make(0.5, 0.2, 0.8))
        result = R.represent(sigma, 0.5, grid=(11, 11))
        assert result.residual <= 1e-10
        recovered = {
            (round(x, 12), round(y, 12)): w
            for (x, y), w in zip(result.gamma.points, result.gamma.weights)
            if w > 1e-9
        }
        assert recovered == {(0.2, 0.8): pytest.approx(1.0, abs=1e-9)}

    def test_random_ongrid_mixture(self):
        rng = np.random.default_rng(2)
        b = 0.6
        sigma, _ = ongrid_mixture(rng, b, 11, 11, 10)
        result = R.represent(sigma, b, grid=(11, 11))
        assert result.residual <= 1e-8
        report = R.verify_representation(
            sigma, result.gamma, even_monomials(12), 1e-8
        )
        assert report.passed

    def test_uniform_target(self):
        b = math.sqrt(1 / 3)
        result = R.represent(M.uniform(), b, grid=(101, 101))
        assert result.residual <= 1e-6
        assert math.fsum(result.gamma.weights) == pytest.approx(1.0, abs=1e-12)
        assert min(result.gamma.weights) >= 0.0

    def test_monotone_refinement(self):
        b = math.sqrt(1 / 3)
        coarse = R.represent(M.uniform(), b, grid=(26, 26))
        fine = R.represent(M.uniform(), b, grid=(51, 51))  # nested refinement
        assert fine.residual <= coarse.residual + 1e-12

    def test_exchange_consistency(self):
        # Integrating monomials against the assembled mixture measure agrees
        # with the weighted parameter-space sum.
        rng = np.random.default_rng(14)
        b = 0.55
        sigma, _ = ongrid_mixture(rng, b, 9, 9, 5)
        result = R.represent(sigma, b, grid=(9, 9))
        assembled = M.Measure.zero()
        for (x, y), w in zip(result.gamma.points, result.gamma.weights):
            if w == 0.0:
                continue
            assembled = M.add(
                assembled, M.scale(K.to_measure(K.make(b, x, y)), w)
            )
        for k in range(13):
            assert R.mixture_moment(result.gamma, k) == pytest.approx(
                M.moment(assembled, k), abs=1e-12
            )

    def test_membership_enforced(self):
        with pytest.raises(MembershipError):
            R.represent(M.uniform(), 0.5, grid=(11, 11))

    def test_basis_validation(self):
        with pytest.raises(ValueError):
            R.TestBasis(7)
        with pytest.raises(ValueError):
            R.TestBasis(0)
        assert R.TestBasis(6).degrees == (0, 2, 4, 6)


class TestVerifyRepresentation:
    def test_exact_point_passes_transcendental_functions(self):
        b = 0.5
        sigma = K.to_measure(K.make(b, b, b))
        gamma = R.MixingMeasure(b, ((b, b),), (1.0,))
        report = R.verify_representation(sigma, gamma, [math.cos, math.exp], 1e-12)
        assert report.passed
        assert report.max_gap <= 1e-12

    def test_gaps_match_residual_components(self):
        rng = np.random.default_rng(5)
        b = 0.6
        sigma, _ = ongrid_mixture(rng, b, 11, 11, 4)
        result = R.represent(sigma, b, grid=(11, 11))
        report = R.verify_representation(
            sigma, result.gamma, even_monomials(12), 1e-8
        )
        assert report.passed
        assert report.max_gap <= max(result.residual * 10, 1e-12)


class TestCsvFormat:
    def test_round_trip(self):
        b = math.sqrt(1 / 3)
        result = R.represent(M.uniform(), b, grid=(21, 21))
        buffer = io.StringIO()
        R.write_mixing_csv(result, buffer)
        buffer.seek(0)
        assert R.read_mixing_csv(buffer) == result

    def test_header_validation(self):
        with pytest.raises(ValueError, match="header"):
            R.read_mixing_csv(io.StringIO("x,y,weight\n"))
        bad = io.StringIO('# {"b": 0.5, "grid": [3, 3], "residual": 0.0}\nx,y,weight\n')
        with pytest.raises(ValueError, match="max_degree"):
            R.read_mixing_csv(bad)
