import math

import numpy as np
import pytest

from berezinlab.bergman import MarginError
from berezinlab.berezin import (
    ProductBerezinEvaluator,
    ReinhardtBerezinEvaluator,
    SearchRegion,
    SeparableTerm,
    berezin_diagonal_operator,
    berezin_disc,
    berezin_disc_radial,
    berezin_product,
    berezin_radial,
    reinhardt_region,
    sup_norm_search,
)
from berezinlab.domains import ProductDomainSpec

from oracles import berezin_brute_force, disc_abs2_transform, disc_series_transform

ABS2 = lambda x: np.abs(x) ** 2
ONE = lambda x: np.ones_like(np.real(x))


class TestReinhardtSeries:
    def test_constant_diagonal(self, norms60):
        diag = np.full((61, 61), 0.37)
        for t, s in [(0.0, 0.0), (0.3, 0.2), (0.6, 0.5)]:
            ev = berezin_diagonal_operator(diag, norms60, t, s)
            assert ev.ok
            assert ev.value == pytest.approx(0.37, rel=1e-12)

    def test_origin_picks_first_eigenvalue(self, eig60, norms60):
        ev = berezin_radial(eig60, norms60, 0.0, 0.0)
        assert ev.value == eig60.values[0, 0]
        assert ev.residual == 0.0

    def test_interior_point_against_cubature_oracle(self, domain, bump, eig60, norms60):
        got = berezin_radial(eig60, norms60, 0.25, 0.25)
        assert got.ok
        oracle = berezin_brute_force(domain.profile, bump, norms60, 0.25, 0.25)
        assert got.value == pytest.approx(oracle, abs=1e-8)

    def test_margin_rejected(self, eig60, norms60):
        with pytest.raises(MarginError):
            berezin_radial(eig60, norms60, 0.9995**2, 0.0)

    def test_rank_one_model_dies_toward_boundary(self, norms_waxis):
        diag = np.zeros((25, 3001))
        diag[0, 0] = 1.0
        vals = []
        for s in (0.2, 0.5, 0.8, 0.95, 0.98):
            ev = berezin_diagonal_operator(diag, norms_waxis, 0.0, s)
            assert ev.ok
            vals.append(ev.value)
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 0.02

    def test_single_term_diagonal_value(self, norms60):
        n = np.arange(61, dtype=float)
        diag = 1.0 / (1.0 + np.add.outer(n, n))
        ev = berezin_diagonal_operator(diag, norms60, 0.0, 0.0)
        assert ev.value == pytest.approx(1.0, rel=1e-12)

    def test_grid_matches_scalar(self, eig60, norms60):
        evaluator = ReinhardtBerezinEvaluator(eig60.values, norms60)
        t_vals = np.array([0.0, 0.2, 0.5])
        s_vals = np.array([0.1, 0.4])
        grid, ok = evaluator.evaluate_grid(t_vals, s_vals)
        for i, t in enumerate(t_vals):
            for j, s in enumerate(s_vals):
                scalar = evaluator.evaluate_ts(float(t), float(s))
                assert grid[i, j] == pytest.approx(scalar.value, rel=1e-12)
                assert bool(ok[i, j]) == scalar.ok


class TestDiscTransform:
    def test_normalization(self):
        for z in (0.0, 0.3, 0.9, 0.6 + 0.4j):
            assert berezin_disc(ONE, z) == pytest.approx(1.0, abs=1e-12)

    def test_abs2_at_origin(self):
        assert berezin_disc(ABS2, 0.0) == pytest.approx(0.5, abs=1e-12)

    def test_abs2_matches_closed_form(self):
        for z in (0.2, 0.5, 0.9, 0.99):
            got = berezin_disc(ABS2, z)
            assert got == pytest.approx(disc_abs2_transform(z * z), abs=1e-10)

    def test_abs2_increases_toward_boundary(self):
        vals = [berezin_disc(ABS2, z) for z in (0.9, 0.95, 0.99, 0.998)]
        assert 0.5 < vals[0] < vals[1] < vals[2] < vals[3] < 1.0

    def test_harmonic_symbol_reproduced(self):
        # Re xi is harmonic: its transform is exactly Re z
        for z in (0.7, 0.2 + 0.6j, 0.95):
            got = berezin_disc(lambda x: np.real(x), z)
            assert got == pytest.approx(complex(z).real, abs=1e-12)

    def test_radial_route_matches_series_oracle(self):
        # 1 - |xi| has a cone at 0: the radial reduction stays accurate there
        phi = lambda r: 1.0 - r
        for z in (0.3, 0.7, 0.9):
            got = berezin_disc_radial(phi, z)
            oracle = disc_series_transform(phi, z * z)
            assert got == pytest.approx(oracle, abs=1e-9)

    def test_radial_route_matches_mobius_for_smooth_symbols(self):
        for z in (0.2, 0.6, 0.9):
            via_radial = berezin_disc_radial(lambda r: r**2, z)
            via_mobius = berezin_disc(ABS2, z)
            assert via_radial == pytest.approx(via_mobius, abs=1e-10)

    def test_margin(self):
        with pytest.raises(MarginError):
            berezin_disc(ABS2, 0.9995)


class TestProductTransform:
    def test_first_factor_abs2_at_center(self):
        spec = ProductDomainSpec.bidisc()
        got = berezin_product(spec, [SeparableTerm(1.0, (ABS2, None))], (0.0, 0.0))
        assert got == pytest.approx(0.5, abs=1e-12)

    def test_constant_symbol(self):
        spec = ProductDomainSpec.bidisc()
        got = berezin_product(spec, [SeparableTerm(1.0, (None, None))], (0.3, 0.4))
        assert got == pytest.approx(1.0, abs=1e-15)

    def test_product_symbol_at_center(self):
        spec = ProductDomainSpec.bidisc()
        got = berezin_product(spec, [SeparableTerm(1.0, (ABS2, ABS2))], (0.0, 0.0))
        assert got == pytest.approx(0.25, abs=1e-10)

    def test_sum_handled_linearly(self):
        spec = ProductDomainSpec.bidisc()
        terms = [SeparableTerm(1.0, (None, None)), SeparableTerm(-1.0, (ABS2, None))]
        got = berezin_product(spec, terms, (0.5, 0.1))
        expected = 1.0 - disc_abs2_transform(0.25)
        assert got == pytest.approx(expected, abs=1e-10)

    def test_ball_factor_rejected(self):
        from berezinlab.domains import FactorSpec

        spec = ProductDomainSpec((FactorSpec("ball", 2),))
        with pytest.raises(ValueError):
            ProductBerezinEvaluator(spec, [SeparableTerm(1.0, (None,))])

    def test_cross_backend_agreement_on_bidisc(self, bidisc_norms160):
        # |z1|^2 via the diagonal series versus the integral backend
        n = np.arange(161, dtype=float)
        diag = np.repeat(((n + 1.0) / (n + 2.0))[:, None], 161, axis=1)
        series = ReinhardtBerezinEvaluator(diag, bidisc_norms160)
        rng = np.random.default_rng(9)
        for _ in range(10):
            t, s = rng.uniform(0.0, 0.81, size=2)
            got = series.evaluate_ts(t, s)
            assert got.ok
            expected = berezin_disc(ABS2, math.sqrt(t))
            assert got.value == pytest.approx(expected, abs=1e-7)


class TestInvariants:
    def test_contractivity_random_diagonals(self, norms60):
        rng = np.random.default_rng(123)
        evaluator_cache = {}
        for _ in range(60):
            diag = rng.uniform(-1.0, 1.0, size=(61, 61))
            evaluator = ReinhardtBerezinEvaluator(diag, norms60)
            t, s = rng.uniform(0.0, 0.6, size=2)
            ev = evaluator.evaluate_ts(float(t), float(s))
            assert ev.ok
            assert diag.min() - 1e-12 <= ev.value <= diag.max() + 1e-12
            assert abs(ev.value) <= np.abs(diag).max() + 1e-12

    def test_averaging_bounds_for_symbol(self, eig60, norms60):
        rng = np.random.default_rng(77)
        evaluator = ReinhardtBerezinEvaluator(eig60.values, norms60)
        for _ in range(50):
            t, s = rng.uniform(0.0, 0.65, size=2)
            ev = evaluator.evaluate_ts(float(t), float(s))
            assert ev.ok
            assert 0.0 - 1e-12 <= ev.value <= 1.0 + 1e-12

    def test_linearity(self, norms60):
        rng = np.random.default_rng(5)
        d1 = rng.uniform(0.0, 1.0, size=(61, 61))
        d2 = rng.uniform(0.0, 1.0, size=(61, 61))
        a, b = 0.7, -1.3
        for t, s in [(0.1, 0.3), (0.5, 0.5)]:
            v1 = berezin_diagonal_operator(d1, norms60, t, s).value
            v2 = berezin_diagonal_operator(d2, norms60, t, s).value
            v = berezin_diagonal_operator(a * d1 + b * d2, norms60, t, s).value
            assert v == pytest.approx(a * v1 + b * v2, abs=1e-10)


class _RectEvaluator:
    """Stub evaluator over a rectangle for search tests."""

    def __init__(self, fn, t_max=0.9, s_max=0.9):
        self.fn = fn
        self.t_max = t_max
        self._s_max = s_max

    def region(self):
        return SearchRegion(self.t_max, lambda t: np.full_like(np.asarray(t, float), self._s_max))

    def evaluate_grid(self, t_vals, s_vals):
        tt, ss = np.meshgrid(t_vals, s_vals, indexing="ij")
        return self.fn(tt, ss), np.ones_like(tt, dtype=bool)

    def evaluate_ts(self, t, s):
        from berezinlab.berezin import BerezinEvaluation

        return BerezinEvaluation(float(self.fn(np.array(t), np.array(s))), 0.0, True)


class TestSupSearch:
    def test_constant_evaluator(self):
        ev = _RectEvaluator(lambda t, s: np.full_like(t, 0.42))
        res = sup_norm_search(ev, ev.region())
        assert res.sup == 0.42

    def test_monotone_bilinear_argmax_at_corner(self):
        ev = _RectEvaluator(lambda t, s: t * s)
        res = sup_norm_search(ev, ev.region())
        assert res.sup == pytest.approx(0.81, rel=1e-9)
        assert res.argmax[0] == pytest.approx(0.9, abs=1e-9)
        assert res.argmax[1] == pytest.approx(0.9, abs=1e-9)

    def test_interior_peak_found(self):
        ev = _RectEvaluator(lambda t, s: -((t - 0.31) ** 2) - (s - 0.47) ** 2)
        res = sup_norm_search(ev, ev.region(), coarse_step=0.05, refinements=5)
        assert res.argmax[0] == pytest.approx(0.31, abs=1e-4)
        assert res.argmax[1] == pytest.approx(0.47, abs=1e-4)

    def test_default_domain_sup_below_essential_norm(self, eig60, norms60):
        from berezinlab.toeplitz import essential_norm

        evaluator = ReinhardtBerezinEvaluator(eig60.values, norms60)
        res = sup_norm_search(evaluator, reinhardt_region(norms60))
        assert res.skipped > 0  # near-boundary region honestly flagged
        assert res.sup < essential_norm(eig60)

    def test_parameter_validation(self, eig60, norms60):
        evaluator = ReinhardtBerezinEvaluator(eig60.values, norms60)
        with pytest.raises(ValueError):
            sup_norm_search(evaluator, reinhardt_region(norms60), coarse_step=0.5)
        with pytest.raises(ValueError):
            sup_norm_search(evaluator, reinhardt_region(norms60), refinements=9)
