import time

import numpy as np
import pytest

from helpers import (
    LONG_JUMP,
    MAX_MOBILITY_DISPLAY,
    MONOTONE,
    MU,
    NU,
    cdf_l1,
    ipf_coupling,
    random_distribution,
    transport_vertices,
)
from ordinal_transport import (
    Coupling,
    discrepancy,
    frechet_cell_bounds,
    make_distribution,
    max_mobility,
    min_cost_coupling,
    normalized_discrepancy,
    optimal_cell_bounds,
    transport_cost,
)
from ordinal_transport.errors import DimensionMismatch, OutOfRange
from ordinal_transport.lp import Sense, solve
from ordinal_transport.transport import cost_matrix, transport_program


def point_mass(K, k):
    p = np.zeros(K)
    p[k] = 1.0
    return make_distribution(p)


def lp_minimum(mu, nu):
    sol = solve(transport_program(mu, nu, cost_matrix(mu.K), Sense.MINIMIZE))
    assert sol.ok
    return sol.objective_value


class TestDiscrepancy:
    def test_illustrative_value(self):
        assert discrepancy(MU, NU) == pytest.approx(0.5, abs=1e-9)

    def test_identity_and_extremes(self):
        assert discrepancy(MU, MU) == 0.0
        for K in (2, 4, 7):
            assert discrepancy(point_mass(K, 0), point_mass(K, K - 1)) == pytest.approx(K - 1)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            discrepancy(MU, make_distribution([0.5, 0.5]))

    def test_metric_axioms(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            K = int(rng.integers(2, 9))
            a, b, c = (random_distribution(rng, K, sparsity=0.2) for _ in range(3))
            assert discrepancy(a, b) == pytest.approx(discrepancy(b, a), abs=1e-12)
            assert discrepancy(a, c) <= discrepancy(a, b) + discrepancy(b, c) + 1e-12
            assert discrepancy(a, a) == 0.0
            if discrepancy(a, b) < 1e-12:
                np.testing.assert_allclose(a.probs, b.probs, atol=1e-9)

    def test_closed_form_equals_lp_minimum(self):
        rng = np.random.default_rng(5)
        for K in range(2, 9):
            for _ in range(150):
                mu, nu = random_distribution(rng, K, 0.2), random_distribution(rng, K, 0.2)
                assert discrepancy(mu, nu) == pytest.approx(lp_minimum(mu, nu), abs=1e-8)


class TestCouplings:
    def test_monotone_coupling_reproduces_the_adjacent_move_example(self):
        c = min_cost_coupling(MU, NU)
        np.testing.assert_allclose(c.mass, MONOTONE, atol=1e-12)
        assert transport_cost(c) == pytest.approx(0.5, abs=1e-9)

    def test_equal_marginals_give_the_diagonal(self):
        c = min_cost_coupling(MU, MU)
        np.testing.assert_allclose(c.mass, np.diag(MU.probs), atol=1e-12)
        assert transport_cost(c) == 0.0

    def test_monotone_coupling_matches_lp_minimum(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            mu, nu = random_distribution(rng, 5, 0.2), random_distribution(rng, 5, 0.2)
            c = min_cost_coupling(mu, nu)
            assert c.check_marginals(mu, nu)
            assert transport_cost(c) == pytest.approx(discrepancy(mu, nu), abs=1e-9)
            assert transport_cost(c) == pytest.approx(lp_minimum(mu, nu), abs=1e-8)

    @pytest.mark.parametrize("mass, cost", [(LONG_JUMP, 0.5), (MONOTONE, 0.5),
                                            (MAX_MOBILITY_DISPLAY, 2.4), (np.diag(MU.probs), 0.0)])
    def test_transport_cost(self, mass, cost):
        assert transport_cost(mass) == pytest.approx(cost, abs=1e-9)

    def test_discrepancy_runtime(self):
        start = time.perf_counter()
        for _ in range(1000):
            discrepancy(MU, NU)
        assert (time.perf_counter() - start) / 1000 < 1e-3


class TestOptimalCellBounds:
    def test_both_illustrative_optima_inside(self):
        b = optimal_cell_bounds(MU, NU)
        assert b.contains(MONOTONE) and b.contains(LONG_JUMP)
        assert b.lo[0, 2] <= 1e-9 and b.hi[0, 2] >= 0.2 - 1e-9
        assert b.hi[3, 0] <= 1e-9

    def test_equal_marginals_force_the_diagonal(self):
        b = optimal_cell_bounds(MU, MU)
        np.testing.assert_allclose(b.lo, np.diag(MU.probs), atol=1e-8)
        np.testing.assert_allclose(b.hi, np.diag(MU.probs), atol=1e-8)

    def test_bounds_equal_extremes_over_optimal_vertices(self):
        rng = np.random.default_rng(23)
        for K in (3, 3, 4):
            mu, nu = random_distribution(rng, K), random_distribution(rng, K)
            d = discrepancy(mu, nu)
            opt = [v for v in transport_vertices(mu.probs, nu.probs)
                   if abs(transport_cost(v) - d) < 1e-9]
            b = optimal_cell_bounds(mu, nu)
            np.testing.assert_allclose(b.lo, np.min(opt, axis=0), atol=1e-7)
            np.testing.assert_allclose(b.hi, np.max(opt, axis=0), atol=1e-7)

    def test_contains_monotone_coupling_and_witnesses_satisfy_frechet(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            K = int(rng.integers(2, 6))
            mu, nu = random_distribution(rng, K, 0.2), random_distribution(rng, K, 0.2)
            b, wit = optimal_cell_bounds(mu, nu, return_witnesses=True)
            fr = frechet_cell_bounds(mu, nu)
            assert b.contains(min_cost_coupling(mu, nu))
            assert fr.contains(b, tol=1e-8)
            for w in wit:
                assert fr.contains(w, tol=1e-8)


class TestMaxMobility:
    def test_matches_vertex_enumeration_on_illustrative_marginals(self):
        value, c = max_mobility(MU, NU)
        best = max(transport_cost(v) for v in transport_vertices(MU.probs, NU.probs))
        assert value == pytest.approx(best, abs=1e-9)
        assert c.check_marginals(MU, NU)
        assert transport_cost(c) == pytest.approx(value, abs=1e-9)

    def test_point_masses(self):
        assert max_mobility(point_mass(4, 2), point_mass(4, 2))[0] == pytest.approx(0.0, abs=1e-12)

    def test_random_pairs_against_vertex_enumeration(self):
        rng = np.random.default_rng(31)
        for _ in range(8):
            mu, nu = random_distribution(rng, 4), random_distribution(rng, 4)
            best = max(transport_cost(v) for v in transport_vertices(mu.probs, nu.probs))
            value, c = max_mobility(mu, nu)
            assert value == pytest.approx(best, abs=1e-8)
            assert frechet_cell_bounds(mu, nu).contains(c, tol=1e-9)

    def test_sandwich(self):
        rng = np.random.default_rng(37)
        for _ in range(200):
            K = int(rng.integers(2, 7))
            mu, nu = random_distribution(rng, K), random_distribution(rng, K)
            P = ipf_coupling(rng, mu.probs, nu.probs)
            assert Coupling(P).check_marginals(mu, nu, tol=1e-8)
            m = max_mobility(mu, nu)[0]
            assert discrepancy(mu, nu) - 1e-9 <= transport_cost(P) <= m + 1e-9
            assert m <= K - 1 + 1e-9


class TestFrechet:
    def test_spot_checks(self):
        fr = frechet_cell_bounds(MU, NU)
        assert fr.hi[0, 1] == pytest.approx(0.3)
        assert fr.hi[2, 0] == pytest.approx(0.2)
        assert fr.contains(MONOTONE)
        assert MONOTONE[0, 1] < fr.hi[0, 1]

    def test_point_masses(self):
        fr = frechet_cell_bounds(point_mass(3, 1), point_mass(3, 2))
        assert fr.cell(1, 2).lo == 1.0 and fr.cell(1, 2).hi == 1.0


class TestNormalization:
    def test_values(self):
        assert round(normalized_discrepancy(0.125, 4), 4) == 0.0417
        assert round(normalized_discrepancy(0.316, 4), 4) == 0.1053
        assert normalized_discrepancy(0.0, 5) == 0.0

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            normalized_discrepancy(3.5, 4)
        with pytest.raises(OutOfRange):
            normalized_discrepancy(-0.1, 4)


def test_cdf_l1_helper_agrees():
    assert cdf_l1(MU.probs, NU.probs) == pytest.approx(discrepancy(MU, NU))
