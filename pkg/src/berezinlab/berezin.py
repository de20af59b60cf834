"""Berezin transforms and sup-norm search.

Four backends share one interface (evaluate a point, get value + residual +
ok flag):

* reinhardt-series: ratio of the two truncated double series
  sum lambda_{nm} t^n s^m / delta^2  over  sum t^n s^m / delta^2,
  t = |z|^2, s = |w|^2, for diagonal (eigenvalue) data on a Reinhardt domain.
* disc-integral: the unit-disc transform of a bounded symbol, computed as a
  tensor polar quadrature after the Mobius substitution xi = (z - u)/(1 - conj(z) u),
  which turns the normalized-kernel density into the flat measure dA/pi and
  leaves a smooth integrand.
* product-tensor: products of per-factor disc transforms for separable
  symbols on polydiscs, sums handled linearly.
* diagonal-operator: the reinhardt-series form for arbitrary bounded
  diagonal data (models compact-like operators that are not symbols).

Transforms of diagonal data are weighted averages of the diagonal, so every
evaluation lies between min and max of the data; series evaluations carry a
geometric-tail residual and are flagged instead of trusted near the boundary.
"""

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .bergman import (
    EVAL_MARGIN,
    MarginError,
    MonomialNormTable,
    series_tail_residual,
    series_weight_matrix,
)
from .domains import ProductDomainSpec
from .quadrature import gauss_nodes

# Relative truncation residual allowed in either series before an
# evaluation is flagged as unreliable.
SERIES_RESIDUAL_TOL = 1e-8


class BerezinEvaluation(NamedTuple):
    value: float
    residual: float
    ok: bool


class ReinhardtBerezinEvaluator:
    """Transform of a diagonal operator on a Reinhardt domain (series form)."""

    def __init__(self, diagonal: np.ndarray, norms: MonomialNormTable,
                 backend: str = "reinhardt-series"):
        self.backend = backend
        diagonal = np.asarray(diagonal, dtype=float)
        expected = (norms.n_cap + 1, norms.m_cap + 1)
        if diagonal.shape != expected:
            raise ValueError(
                f"diagonal shape {diagonal.shape} does not match table caps {expected}"
            )
        if not np.all(np.isfinite(diagonal)):
            raise ValueError("diagonal data must be finite (bounded operator)")
        self.norms = norms
        self.diagonal = diagonal
        self.sup_abs = float(np.max(np.abs(diagonal)))
        self._inv_norm = np.exp(-norms.log_norm_sq)
        self._weighted = diagonal * self._inv_norm

    # -- scalar path (compensated summation) --------------------------------

    def evaluate_ts(self, t: float, s: float) -> BerezinEvaluation:
        """Evaluate at radial coordinates t = |z|^2, s = |w|^2."""
        if t < 0.0 or s < 0.0:
            raise MarginError(f"radial coordinates must be nonnegative, got ({t}, {s})")
        if not self.norms.margin_ok(math.sqrt(t), math.sqrt(s)):
            raise MarginError(
                f"(t, s) = ({t}, {s}) violates the {EVAL_MARGIN} interior margin"
            )
        weights = series_weight_matrix(self.norms, t, s)
        # compensated across rows; within a row the terms are positive and
        # a plain vector sum is already at the 1e-15 relative level
        den = math.fsum(weights.sum(axis=1).tolist())
        num = math.fsum((self.diagonal * weights).sum(axis=1).tolist())
        value = num / den
        tail = series_tail_residual(weights)
        if math.isinf(tail):
            return BerezinEvaluation(value=value, residual=math.inf, ok=False)
        rel_den = tail / den
        rel_num = (self.sup_abs * tail) / max(abs(num), 1e-300)
        residual = max(rel_den, rel_num)
        return BerezinEvaluation(value=value, residual=residual,
                                 ok=residual <= SERIES_RESIDUAL_TOL)

    def evaluate_point(self, point) -> BerezinEvaluation:
        z, w = complex(point[0]), complex(point[1])
        return self.evaluate_ts(abs(z) ** 2, abs(w) ** 2)

    def in_margin(self, point) -> bool:
        z, w = complex(point[0]), complex(point[1])
        return self.norms.margin_ok(abs(z), abs(w))

    # -- vectorized grid path (used by the sup search) -----------------------

    def evaluate_grid(self, t_vals: np.ndarray, s_vals: np.ndarray):
        """Values and ok-flags on the rectangle t_vals x s_vals.

        Same series as evaluate_ts assembled with matrix products; the sup
        search re-evaluates its incumbent through the compensated scalar
        path before reporting.
        """
        t_vals = np.asarray(t_vals, dtype=float)
        s_vals = np.asarray(s_vals, dtype=float)
        n_idx = np.arange(self.norms.n_cap + 1, dtype=float)
        m_idx = np.arange(self.norms.m_cap + 1, dtype=float)
        T = _power_outer(t_vals, n_idx)  # (nt, N+1)
        S = _power_outer(s_vals, m_idx).T  # (M+1, ns)
        den = T @ self._inv_norm @ S
        num = T @ self._weighted @ S
        values = num / den

        tail_rows = _grid_tail_rows(T, self._inv_norm @ S)
        tail_cols = _grid_tail_cols(T @ self._inv_norm, S)
        with np.errstate(invalid="ignore"):
            tail = tail_rows + tail_cols + tail_rows * tail_cols / den
        rel_den = tail / den
        rel_num = self.sup_abs * tail / np.maximum(np.abs(num), 1e-300)
        ok = np.isfinite(tail) & (np.maximum(rel_den, rel_num) <= SERIES_RESIDUAL_TOL)
        return values, ok


def _power_outer(x: np.ndarray, exponents: np.ndarray) -> np.ndarray:
    """x^e with 0^0 = 1, assembled in log space."""
    with np.errstate(divide="ignore", invalid="ignore"):
        log_x = np.where(x > 0.0, np.log(np.maximum(x, 1e-320)), -np.inf)
        expo = np.outer(log_x, exponents)
    expo[:, 0] = 0.0  # x^0 == 1 even at x == 0
    out = np.exp(np.maximum(expo, -745.0))
    out[expo < -745.0] = 0.0
    return out


def _tail_from_last4(last4: np.ndarray) -> np.ndarray:
    """Vectorized geometric-tail estimate from the last four slice sums.

    last4 has shape (..., 4), slice sums in increasing index order.
    """
    prev = last4[..., :-1]
    curr = last4[..., 1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(prev > 0.0, curr / np.maximum(prev, 1e-300), np.inf)
        ratios = np.where((prev == 0.0) & (curr == 0.0), 0.0, ratios)
    rho = np.max(ratios, axis=-1)
    last = last4[..., -1]
    tail = np.where(
        last == 0.0,
        0.0,
        np.where(rho < 0.999, last * rho / np.maximum(1.0 - rho, 1e-12), np.inf),
    )
    return tail


def _grid_tail_rows(T: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Row-direction tail: slice sums R_k(t, s) = t^k * (E[k, :] @ S)."""
    k = T.shape[1]
    idx = np.arange(k - 4, k)
    # shape (nt, 4, ns)
    slices = T[:, idx, None] * right[idx, :][None, :, :]
    return _tail_from_last4(np.moveaxis(slices, 1, 2))


def _grid_tail_cols(left: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Column-direction tail: slice sums C_k(t, s) = (T @ E)[:, k] * s^k."""
    k = S.shape[0]
    idx = np.arange(k - 4, k)
    slices = left[:, idx, None] * S[idx, :][None, :, :]
    return _tail_from_last4(np.moveaxis(slices, 1, 2))


def berezin_radial(eig_table, norms: MonomialNormTable, t: float, s: float) -> BerezinEvaluation:
    """Transform of a radial-symbol Toeplitz operator at t = |z|^2, s = |w|^2."""
    return ReinhardtBerezinEvaluator(eig_table.values, norms).evaluate_ts(t, s)


def berezin_diagonal_operator(diagonal: np.ndarray, norms: MonomialNormTable,
                              t: float, s: float) -> BerezinEvaluation:
    """Transform of arbitrary bounded diagonal data (not necessarily a symbol)."""
    evaluator = ReinhardtBerezinEvaluator(diagonal, norms, backend="diagonal-operator")
    return evaluator.evaluate_ts(t, s)


# ---------------------------------------------------------------------------
# Unit disc: integral backend
# ---------------------------------------------------------------------------


def _disc_orders(z: complex, radial_order: int, angular_order: int):
    """Quadrature orders resolving the Mobius integrand up to |z| = 0.999.

    The substituted integrand is analytic with its nearest pole at
    u = 1/conj(z).  Radial Gauss converges like rho_B^(-2R) with the
    Bernstein parameter of that pole; the angular trapezoid aliases like
    (|z| rho_max)^M, so both orders grow as |z| -> 1.
    """
    az = abs(z)
    if az < 0.9:
        return radial_order, angular_order
    x = 2.0 / az - 1.0
    log_rho_b = math.log(x + math.sqrt(x * x - 1.0))
    radial = max(radial_order, int(math.ceil(14.0 / log_rho_b)) + 8)
    # aliasing decays like q^M with q = |z| * (largest radial node); add a
    # polynomial-growth allowance of 60 in the exponent budget
    q = az * (1.0 - 1.4 / radial**2)
    angular = max(angular_order, int(math.ceil(60.0 / -math.log(q))))
    return radial, angular


def _mobius_grid(z: complex, radial_order: int, angular_order: int):
    rho, w_rho = gauss_nodes(0.0, 1.0, radial_order)
    theta = 2.0 * math.pi * np.arange(angular_order) / angular_order
    w_theta = 2.0 * math.pi / angular_order
    u = rho[:, None] * np.exp(1j * theta)[None, :]
    sigma = (z - u) / (1.0 - np.conjugate(z) * u)
    weights = (rho * w_rho)[:, None] * (w_theta / math.pi)
    return sigma, weights


def berezin_disc(phi: Callable, z: complex, radial_order: int = 160,
                 angular_order: int = 320) -> float:
    """(1/pi) int_D phi(xi) (1-|z|^2)^2 / |1 - conj(z) xi|^4 dA(xi).

    Computed as (1/pi) int_D phi(sigma_z(u)) dA(u) via the Mobius
    substitution sigma_z(u) = (z - u)/(1 - conj(z) u), a tensor polar rule
    on a smooth integrand; the stated orders are floors that grow
    automatically near the boundary.  phi must be vectorized over complex
    arrays.
    """
    z = complex(z)
    if abs(z) > EVAL_MARGIN:
        raise MarginError(f"|z| = {abs(z)} exceeds the {EVAL_MARGIN} margin")
    radial, angular = _disc_orders(z, radial_order, angular_order)
    sigma, weights = _mobius_grid(z, radial, angular)
    vals = np.asarray(phi(sigma), dtype=float)
    return float(np.sum(vals * weights))


def berezin_disc_radial(psi: Callable, z: complex, tol: float = 1e-11) -> float:
    """Disc transform of a radial symbol psi(|xi|) via the exact angular integral.

    integral dtheta / |1 - a e^{i theta}|^4 = 2 pi (1 + a^2)/(1 - a^2)^3
    reduces the transform to 2 (1-t)^2 int_0^1 psi(r) r (1 + t r^2)/(1 - t r^2)^3 dr
    with t = |z|^2.  Handles symbols that are merely Lipschitz in |xi|
    (where the Mobius route loses accuracy to the cone at xi = 0).
    """
    from .quadrature import adaptive_integrate

    z = complex(z)
    if abs(z) > EVAL_MARGIN:
        raise MarginError(f"|z| = {abs(z)} exceeds the {EVAL_MARGIN} margin")
    t = abs(z) ** 2

    def integrand(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        tr2 = t * r * r
        return np.asarray(psi(r), dtype=float) * r * (1.0 + tr2) / (1.0 - tr2) ** 3

    scale = 2.0 * (1.0 - t) ** 2
    raw = adaptive_integrate(integrand, 0.0, 1.0, tol / max(scale, 1e-12)).value
    return scale * raw


class DiscBerezinEvaluator:
    """Disc transform of one bounded symbol, integral backend.

    Build with a complex-argument symbol (Mobius tensor quadrature) or via
    ``DiscBerezinEvaluator.radial`` with a modulus-argument symbol (exact
    angular reduction; robust for symbols non-smooth in xi like 1 - |xi|).
    """

    backend = "disc-integral"

    def __init__(self, phi: Callable, radial_order: int = 160, angular_order: int = 320,
                 _radial_psi: Optional[Callable] = None):
        self.phi = phi
        self.radial_order = radial_order
        self.angular_order = angular_order
        self._radial_psi = _radial_psi

    @classmethod
    def radial(cls, psi: Callable) -> "DiscBerezinEvaluator":
        return cls(phi=lambda x: np.asarray(psi(np.abs(x)), dtype=float),
                   _radial_psi=psi)

    def evaluate_point(self, point) -> BerezinEvaluation:
        z = complex(point[0]) if isinstance(point, (tuple, list)) else complex(point)
        if self._radial_psi is not None:
            value = berezin_disc_radial(self._radial_psi, z)
        else:
            value = berezin_disc(self.phi, z, self.radial_order, self.angular_order)
        return BerezinEvaluation(value=value, residual=0.0, ok=True)

    def in_margin(self, point) -> bool:
        z = complex(point[0]) if isinstance(point, (tuple, list)) else complex(point)
        return abs(z) <= EVAL_MARGIN


# ---------------------------------------------------------------------------
# Products of discs: separable symbols
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparableTerm:
    """coefficient * product over factors of per-factor symbols (None = 1)."""

    coefficient: float
    factors: tuple  # one callable or None per product factor


class ProductBerezinEvaluator:
    """Transform of a finite sum of separable symbols on a polydisc."""

    backend = "product-tensor"

    def __init__(self, spec: ProductDomainSpec, terms: Sequence[SeparableTerm],
                 radial_order: int = 160, angular_order: int = 320):
        for factor in spec.factors:
            if factor.kind != "disc":
                raise ValueError(
                    "product transforms are implemented for disc factors only"
                )
        n = len(spec.factors)
        for term in terms:
            if len(term.factors) != n:
                raise ValueError(
                    f"term has {len(term.factors)} factor slots, domain has {n}"
                )
        self.spec = spec
        self.terms = tuple(terms)
        self.radial_order = radial_order
        self.angular_order = angular_order

    def evaluate_point(self, point) -> BerezinEvaluation:
        coords = [complex(c) for c in point]
        if len(coords) != len(self.spec.factors):
            raise ValueError(
                f"point has {len(coords)} coordinates, expected {len(self.spec.factors)}"
            )
        total = 0.0
        for term in self.terms:
            prod = term.coefficient
            for z_j, phi_j in zip(coords, term.factors):
                if phi_j is not None:
                    prod *= berezin_disc(phi_j, z_j, self.radial_order, self.angular_order)
            total += prod
        return BerezinEvaluation(value=total, residual=0.0, ok=True)

    def in_margin(self, point) -> bool:
        return all(abs(complex(c)) <= EVAL_MARGIN for c in point)


def berezin_product(spec: ProductDomainSpec, terms: Sequence[SeparableTerm], point) -> float:
    """Transform of a separable-sum symbol; per-factor transforms multiply."""
    return ProductBerezinEvaluator(spec, terms).evaluate_point(point).value


# ---------------------------------------------------------------------------
# Deterministic sup search over the radial region
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchRegion:
    """Radial (t, s) region: 0 <= t <= t_max, 0 <= s <= s_max(t)."""

    t_max: float
    s_max: Callable[[np.ndarray], np.ndarray]


def reinhardt_region(norms: MonomialNormTable) -> SearchRegion:
    """The margin-shrunk Hartogs region in (t, s) = (|z|^2, |w|^2)."""
    profile = norms.domain.profile

    def s_max(t: np.ndarray) -> np.ndarray:
        r = np.sqrt(np.asarray(t, dtype=float))
        h = np.asarray(profile(r), dtype=float)
        return (EVAL_MARGIN * h) ** 2

    return SearchRegion(t_max=EVAL_MARGIN**2, s_max=s_max)


@dataclass(frozen=True)
class SupSearchResult:
    sup: float
    argmax: tuple
    resolution: float
    evaluated: int
    skipped: int


def sup_norm_search(
    evaluator: ReinhardtBerezinEvaluator,
    region: SearchRegion,
    coarse_step: float = 0.02,
    refinements: int = 4,
) -> SupSearchResult:
    """Coarse grid sweep plus local refinement around the incumbent maximum.

    Deterministic: ties resolve to the first grid point in row-major order.
    Flagged evaluations (margin or residual) are skipped and counted; the
    reported sup is the incumbent re-evaluated through the compensated
    scalar path.
    """
    if not 0.0 < coarse_step <= 0.1:
        raise ValueError(f"coarse_step must lie in (0, 0.1], got {coarse_step}")
    if refinements < 0 or refinements > 6:
        raise ValueError(f"refinements must lie in [0, 6], got {refinements}")

    evaluated = 0
    skipped = 0
    best_val = -math.inf
    best_ts = (0.0, 0.0)

    def sweep(t_vals, s_vals):
        nonlocal evaluated, skipped, best_val, best_ts
        values, ok = evaluator.evaluate_grid(t_vals, s_vals)
        smax = region.s_max(t_vals)
        region_mask = s_vals[None, :] <= smax[:, None] + 1e-15
        usable = ok & region_mask
        evaluated += int(np.count_nonzero(usable))
        skipped += int(np.count_nonzero(region_mask & ~ok))
        if not np.any(usable):
            return
        masked = np.where(usable, values, -math.inf)
        flat = int(np.argmax(masked))
        i, j = divmod(flat, masked.shape[1])
        if masked[i, j] > best_val:
            best_val = float(masked[i, j])
            best_ts = (float(t_vals[i]), float(s_vals[j]))

    n_t = int(math.floor(region.t_max / coarse_step)) + 1
    t_vals = np.minimum(np.arange(n_t + 1) * coarse_step, region.t_max)
    s_top = float(np.max(region.s_max(t_vals)))
    n_s = int(math.floor(s_top / coarse_step)) + 1
    s_vals = np.minimum(np.arange(n_s + 1) * coarse_step, s_top)
    sweep(np.unique(t_vals), np.unique(s_vals))

    cell = coarse_step
    for _ in range(refinements):
        cell /= 4.0
        t0, s0 = best_ts
        t_loc = np.clip(t0 + cell * np.linspace(-2.0, 2.0, 9), 0.0, region.t_max)
        s_loc = np.clip(s0 + cell * np.linspace(-2.0, 2.0, 9), 0.0, s_top)
        sweep(np.unique(t_loc), np.unique(s_loc))

    if not math.isfinite(best_val):
        raise RuntimeError("no evaluable grid points inside the region")
    final = evaluator.evaluate_ts(*best_ts)
    return SupSearchResult(
        sup=final.value,
        argmax=best_ts,
        resolution=cell / 4.0,
        evaluated=evaluated,
        skipped=skipped,
    )
