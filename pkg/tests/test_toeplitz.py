import numpy as np
import pytest

from berezinlab.domains import build_bump, unit_profile
from berezinlab.toeplitz import (
    CapError,
    EigenvalueTable,
    SupportError,
    disc_radial_eigenvalue,
    eigenvalue_limit,
    essential_norm,
    operator_norm,
    radial_symbol_eigenvalues,
    spectrum_approx,
    toeplitz_eigenvalue,
)

from oracles import StubWeight, angular_inner_product

# Frozen from the independent adaptive-quadrature oracle (two disjoint
# integration routes agreed to 2e-15):
LAMBDA_00 = 0.5970939148902772
LAMBDA_0_INF = 0.6265927977839337
LAMBDA_1_INF = 0.7827130658278489
OPERATOR_NORM = 0.7948579108930386  # = limit at n = 2


class TestEigenvalues:
    def test_zero_symbol(self, profile):
        zero = StubWeight(0.3, 0.9, lambda r: np.zeros_like(r))
        for n, m in [(0, 0), (3, 7)]:
            assert toeplitz_eigenvalue(profile, zero, n, m) == 0.0

    def test_unit_profile_m_independent(self, bump):
        uni = unit_profile()
        vals = [toeplitz_eigenvalue(uni, bump, 2, m) for m in (0, 3, 9)]
        assert vals[0] == pytest.approx(vals[1], rel=1e-12)
        assert vals[1] == pytest.approx(vals[2], rel=1e-12)

    def test_default_lambda00_oracle(self, profile, bump):
        got = toeplitz_eigenvalue(profile, bump, 0, 0)
        assert got == pytest.approx(LAMBDA_00, abs=1e-9)

    def test_table_matches_scalar(self, profile, bump, eig60):
        for n, m in [(0, 0), (5, 9), (20, 40)]:
            assert eig60.values[n, m] == pytest.approx(
                toeplitz_eigenvalue(profile, bump, n, m), rel=1e-10
            )

    def test_positivity_and_sup_bound(self, eig60, bump):
        assert np.all(eig60.values >= 0.0)
        assert np.all(eig60.values <= bump.sup_norm() + 1e-12)

    def test_monotone_chain(self, eig60):
        block = eig60.values[:21, :41]
        assert np.all(np.diff(block, axis=1) > 1e-12)
        assert np.all(block < eig60.limits[:21, None] - 1e-12)


class TestEigenvalueLimits:
    def test_full_plateau_weight_gives_one(self, profile):
        # chi == 1 on almost all of the plateau: the limit ratio collapses
        full = StubWeight(1e-9, 0.95 - 1e-12, lambda r: np.ones_like(r))
        for n in (0, 1, 5):
            assert eigenvalue_limit(full, 0.95, n) == pytest.approx(1.0, abs=1e-10)

    def test_moment_inequality_orders_first_two(self, bump):
        l0 = eigenvalue_limit(bump, 0.95, 0)
        l1 = eigenvalue_limit(bump, 0.95, 1)
        assert l0 == pytest.approx(LAMBDA_0_INF, abs=1e-9)
        assert l1 == pytest.approx(LAMBDA_1_INF, abs=1e-9)
        assert l0 < l1

    def test_high_index_decay(self, bump, eig60):
        l5 = eigenvalue_limit(bump, 0.95, 5)
        l60 = eigenvalue_limit(bump, 0.95, 60)
        assert l60 < l5
        assert l60 < 0.1
        np.testing.assert_allclose(eig60.limits[[5, 60]], [l5, l60], rtol=1e-9)

    def test_support_leak_rejected(self, profile):
        wide = StubWeight(0.5, 0.97, lambda r: np.ones_like(r))
        with pytest.raises(SupportError):
            eigenvalue_limit(wide, 0.95, 0)


class TestNorms:
    def test_operator_norm_witness(self, eig60):
        value, n0 = operator_norm(eig60)
        assert n0 >= 1
        assert n0 == 2
        assert value == pytest.approx(OPERATOR_NORM, abs=1e-9)

    def test_essential_equals_operator(self, eig60):
        value, _ = operator_norm(eig60)
        assert essential_norm(eig60) == value

    def test_scaling_doubles_everything(self, profile, bump, eig60):
        doubled = EigenvalueTable.build(profile, bump.scaled(2.0), 20, 20)
        base = EigenvalueTable.build(profile, bump, 20, 20)
        np.testing.assert_array_equal(doubled.values, 2.0 * base.values)
        assert operator_norm(doubled)[0] == 2.0 * operator_norm(base)[0]
        assert operator_norm(doubled)[1] == operator_norm(base)[1]

    def test_cap_too_small_refused(self, profile):
        # support hugging the plateau end pushes the argmax past n = 60
        edge_bump = build_bump(0.935, 0.9485, 0.003)
        table = EigenvalueTable.build(profile, edge_bump, 60, 10)
        with pytest.raises(CapError):
            operator_norm(table)

    def test_compact_model_zero_essential_norm(self, profile, bump):
        # diagonal decaying in both indices: norm positive, limits all zero
        table = EigenvalueTable.build(profile, bump, 20, 20)
        n = np.arange(21, dtype=float)
        table.values = 1.0 / (1.0 + np.add.outer(n, n))
        table.limits = np.zeros(21)
        assert essential_norm(table) == 0.0
        assert table.values.max() > 0.0


class TestSpectrum:
    def test_zero_symbol_spectrum(self, profile):
        zero = StubWeight(0.3, 0.9, lambda r: np.zeros_like(r))
        table = EigenvalueTable.build(profile, build_bump(0.52, 0.93, 0.02), 10, 10)
        table.values = np.zeros_like(table.values)
        table.limits = np.zeros_like(table.limits)
        assert spectrum_approx(table, 1e-9) == [0.0]

    def test_unit_profile_m_collapse(self, bump):
        table = EigenvalueTable.build(unit_profile(), bump, 15, 15)
        points = spectrum_approx(table, 1e-12)
        # one value per n (m-independent rows) plus coincident limits
        assert len(points) <= 2 * 16

    def test_default_contains_zero_marker(self, eig60):
        points = spectrum_approx(eig60, 1e-2)
        assert 0.0 in points

    def test_resolution_validated(self, eig60):
        with pytest.raises(ValueError):
            spectrum_approx(eig60, 0.0)


class TestDiscEigenvalues:
    def test_constant_symbol(self):
        for n in (0, 4, 60):
            got = disc_radial_eigenvalue(lambda r: np.full_like(r, 0.3), n)
            assert got == pytest.approx(0.3, rel=1e-12)

    def test_r_squared_closed_form(self):
        for n in (0, 1, 10):
            got = disc_radial_eigenvalue(lambda r: r**2, n)
            assert got == pytest.approx((n + 1.0) / (n + 2.0), rel=1e-12)
        assert disc_radial_eigenvalue(lambda r: r**2, 0) == pytest.approx(0.5, rel=1e-12)

    def test_limit_toward_boundary_value(self):
        lam = [disc_radial_eigenvalue(lambda r: r**2, n) for n in (10, 100, 400)]
        assert lam[0] < lam[1] < lam[2] < 1.0
        assert 1.0 - lam[2] < 3e-3


class TestOrthogonalityIdentity:
    def test_off_diagonal_vanishes(self, profile, bump, eig60):
        rng = np.random.default_rng(5)
        for _ in range(8):
            n, m = rng.integers(0, 10, size=2)
            j, k = rng.integers(0, 10, size=2)
            if (n, m) == (j, k):
                j += 1
            val = angular_inner_product(profile, bump, int(n), int(m), int(j), int(k))
            assert abs(val) < 1e-10

    def test_diagonal_matches_eigenvalue(self, profile, bump, eig60, norms60):
        for n, m in [(0, 0), (2, 3), (5, 1)]:
            pairing = angular_inner_product(profile, bump, n, m, n, m)
            lam = eig60.values[n, m]
            delta_sq = norms60.delta_sq(n, m)
            assert abs(pairing.real - lam * delta_sq) < 1e-9
            assert abs(pairing.imag) < 1e-12


class TestGeneralRadialSymbols:
    def test_one_minus_abs_sq(self, profile):
        grid = radial_symbol_eigenvalues(profile, lambda r: 1.0 - r**2, 4, 300)
        # the m -> infinity limit is the plateau ratio 1 - alpha^2/2, but the
        # infinitely flat glue makes the approach logarithmic in m
        expected = 1.0 - 0.95**2 / 2.0
        assert grid[0, -1] == pytest.approx(expected, abs=2e-2)
        assert np.all(np.diff(grid[0]) > 0.0)
        assert abs(grid[0, -1] - expected) < abs(grid[0, 0] - expected)

    def test_matches_bump_table(self, profile, bump, eig60):
        grid = radial_symbol_eigenvalues(
            profile, lambda r: np.asarray(bump(r)), 10, 10,
            support=(bump.support_lo, bump.support_hi),
            breakpoints=(0.54, 0.91),
        )
        np.testing.assert_allclose(grid, eig60.values[:11, :11], rtol=1e-9)
