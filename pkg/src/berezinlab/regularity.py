"""Boundary-limit probes for Berezin transforms.

Berezin transforms of continuous symbols attain the symbol's value at
strongly pseudoconvex boundary points, but can fail to do so at boundary
points lying on analytic discs.  Nothing here certifies either behavior as
a proof; a probe samples a transform along paths into a boundary target,
extrapolates, and reports limits with explicit Cauchy diagnostics.  An
"inconclusive" verdict is a first-class outcome: when the evaluation margin
or series residual is exhausted before the diagnostics settle, no limit is
fabricated.

The mass-profile machinery quantifies the disc-failure mechanism for a base
point q = (0, t) on the w-axis of a Reinhardt domain: the fiberwise kernel
mass

    mu_q(r) = int_{|w| < h(r)} |k_q(r, w)|^2 dV(w)

is constant in r over the plateau (the slice domain does not vary there),
so its circle integral M_q(r) = 2 pi r mu_q(r) grows linearly and the test
integral of g(r) = 1 - r/eps against M_q is strictly negative, separating
the limit measure from a boundary point mass.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .bergman import MonomialNormTable, TruncationError, _geometric_tail
from .berezin import BerezinEvaluation, DiscBerezinEvaluator
from .quadrature import adaptive_integrate
from .toeplitz import disc_radial_eigenvalue

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Paths and limit extrapolation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryPath:
    """Parametrized approach to a boundary target; u in (0, 1], u -> 0."""

    target: tuple
    parametrize: Callable[[float], tuple]
    label: str = "custom"

    def point(self, u: float) -> tuple:
        return self.parametrize(u)


def radial_path(target, label: str = "radial") -> BoundaryPath:
    """All coordinates scaled inward by (1 - u)."""
    target = tuple(complex(c) for c in target)
    return BoundaryPath(target, lambda u: tuple((1.0 - u) * c for c in target), label)


def coordinate_path(target, index: int, label: str = "normal") -> BoundaryPath:
    """Only the boundary-realizing coordinate scaled inward by (1 - u)."""
    target = tuple(complex(c) for c in target)

    def fn(u: float) -> tuple:
        return tuple(
            (1.0 - u) * c if j == index else c for j, c in enumerate(target)
        )

    return BoundaryPath(target, fn, label)


def slanted_path(target, slopes, label: str = "slanted") -> BoundaryPath:
    """Coordinates scaled inward at per-coordinate rates (1 - slope_j u)."""
    target = tuple(complex(c) for c in target)
    slopes = tuple(float(s) for s in slopes)

    def fn(u: float) -> tuple:
        return tuple((1.0 - s * u) * c for c, s in zip(target, slopes))

    return BoundaryPath(target, fn, label)


def _fit_geometric(ks, vs):
    """v_k = L + C rho^k fitted to three consecutive values.

    Returns (limit, backcast at k-1) or None when the difference ratio is
    outside (-0.999, 0.999) or degenerate.
    """
    d1 = vs[1] - vs[0]
    d2 = vs[2] - vs[1]
    if d1 == 0.0:
        return None
    rho = d2 / d1
    if not -0.999 < rho < 0.999 or rho == 0.0:
        return None
    limit = vs[2] + d2 * rho / (1.0 - rho)
    backcast = vs[0] - d1 / rho
    return limit, backcast


def _fit_rational(ks, vs):
    """v_k = L - c/(k + b) fitted to three consecutive equally spaced values.

    Captures limits approached at an algebraic (1/k) rate, e.g. transforms
    whose convergence in the path index is only logarithmic in the distance
    to the boundary.  Returns (limit, backcast at k-1) or None.
    """
    k1, k2, k3 = ks
    d = k2 - k1
    d1 = vs[1] - vs[0]
    d2 = vs[2] - vs[1]
    if d1 == 0.0 or d2 == 0.0:
        return None
    rho = d2 / d1
    if not 0.0 < rho < 1.0:
        return None
    b = (rho * k3 - k1) / (1.0 - rho)
    if k1 + b <= 0.0:
        return None
    c = d2 * (k2 + b) * (k3 + b) / d
    limit = vs[2] + c / (k3 + b)
    k0 = k1 - d
    if k0 + b <= 0.0:
        return None
    backcast = limit - c / (k0 + b)
    return limit, backcast


def _extrapolate(ks: Sequence[float], vs: Sequence[float]):
    """Pick the model (geometric vs rational-in-k) that backcasts v[-4] best."""
    scale = max(1.0, max(abs(v) for v in vs))
    diffs = [vs[i + 1] - vs[i] for i in range(len(vs) - 1)]
    if all(abs(dv) <= 1e-14 * scale for dv in diffs):
        return vs[-1], "constant"
    fit_ks, fit_vs = ks[-3:], vs[-3:]
    candidates = []
    geo = _fit_geometric(fit_ks, fit_vs)
    if geo is not None:
        candidates.append((abs(geo[1] - vs[-4]), geo[0], "geometric"))
    rat = _fit_rational(fit_ks, fit_vs)
    if rat is not None:
        candidates.append((abs(rat[1] - vs[-4]), rat[0], "rational"))
    if not candidates:
        return vs[-1], "last-value"
    candidates.sort(key=lambda c: (c[0], c[2]))
    _, limit, model = candidates[0]
    return limit, model


@dataclass(frozen=True)
class PathLimitResult:
    label: str
    limit: Optional[float]
    diagnostic: float  # max |successive difference| over the last three
    diffs: tuple
    n_valid: int
    converged: bool
    reason: str
    model: str
    samples: tuple  # (k, u, value) triples


def path_limit(evaluator, path: BoundaryPath, steps: int = 10) -> PathLimitResult:
    """Evaluate along u_k = 2^-k and extrapolate the boundary limit.

    Stops early when the next point leaves the evaluator margin or its
    series residual is flagged; with fewer than four valid samples the
    result is not converged and carries the stop reason instead of a
    fabricated limit.
    """
    if steps < 6:
        raise ValueError(f"steps must be >= 6, got {steps}")
    samples = []
    reason = "completed"
    for k in range(1, steps + 1):
        u = 2.0 ** (-k)
        point = path.point(u)
        if not evaluator.in_margin(point):
            reason = f"margin exhausted at u = 2^-{k}"
            break
        ev: BerezinEvaluation = evaluator.evaluate_point(point)
        if not ev.ok:
            reason = f"series residual flagged at u = 2^-{k}"
            break
        samples.append((k, u, float(ev.value)))

    if len(samples) < 4:
        last = samples[-1][2] if samples else None
        return PathLimitResult(
            label=path.label, limit=last, diagnostic=math.inf, diffs=(),
            n_valid=len(samples), converged=False, reason=reason,
            model="none", samples=tuple(samples),
        )

    ks = [s[0] for s in samples[-4:]]
    vs = [s[2] for s in samples[-4:]]
    diffs = tuple(vs[i + 1] - vs[i] for i in range(3))
    diagnostic = max(abs(d) for d in diffs)
    limit, model = _extrapolate(ks, vs)
    scale = max(1.0, max(abs(v) for v in vs))
    non_expanding = (
        abs(diffs[2]) <= abs(diffs[0]) + 1e-12 * scale
        and abs(diffs[1]) <= abs(diffs[0]) + 1e-12 * scale
    )
    converged = model == "constant" or (model in ("geometric", "rational") and non_expanding)
    return PathLimitResult(
        label=path.label, limit=float(limit), diagnostic=diagnostic, diffs=diffs,
        n_valid=len(samples), converged=converged, reason=reason,
        model=model, samples=tuple(samples),
    )


# ---------------------------------------------------------------------------
# Probes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeReport:
    target: tuple
    verdict: str  # consistent | inconsistent | inconclusive
    path_results: tuple
    limit_spread: Optional[float]
    diagnostic: Optional[float]
    symbol_value: Optional[float]
    matches_symbol: Optional[bool]
    caps: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "target": [[c.real, c.imag] for c in map(complex, self.target)],
            "verdict": self.verdict,
            "limit_spread": self.limit_spread,
            "diagnostic": self.diagnostic,
            "symbol_value": self.symbol_value,
            "matches_symbol": self.matches_symbol,
            "caps": self.caps,
            "paths": [
                {
                    "label": r.label,
                    "limit": r.limit,
                    "diagnostic": None if math.isinf(r.diagnostic) else r.diagnostic,
                    "n_valid": r.n_valid,
                    "converged": r.converged,
                    "reason": r.reason,
                    "model": r.model,
                    "samples": [[k, u, v] for (k, u, v) in r.samples],
                }
                for r in self.path_results
            ],
        }


def bc_probe(
    evaluator,
    target,
    paths: Sequence[BoundaryPath],
    symbol_value: Optional[float] = None,
    steps: int = 10,
    caps: Optional[dict] = None,
) -> ProbeReport:
    """Run path limits into one target and compare them.

    Verdict rule: "inconsistent" only when two path limits differ by more
    than 10x the larger Cauchy diagnostic; any non-converged path makes the
    probe inconclusive.
    """
    if len(paths) < 2:
        raise ValueError("a probe needs at least two paths to the target")
    results = tuple(path_limit(evaluator, p, steps=steps) for p in paths)

    if any(not r.converged for r in results):
        verdict, spread, diag = "inconclusive", None, None
    else:
        limits = [r.limit for r in results]
        spread = max(limits) - min(limits)
        diag = max(r.diagnostic for r in results)
        verdict = "inconsistent" if spread > 10.0 * diag else "consistent"

    matches = None
    if symbol_value is not None and verdict != "inconclusive":
        tol = max(10.0 * (diag if diag is not None else 0.0), 5e-3)
        matches = all(abs(r.limit - symbol_value) <= tol for r in results)
    return ProbeReport(
        target=tuple(complex(c) for c in target),
        verdict=verdict,
        path_results=results,
        limit_spread=spread,
        diagnostic=diag,
        symbol_value=symbol_value,
        matches_symbol=matches,
        caps=dict(caps or {}),
    )


def delta_test(cases: Sequence[Tuple], path: BoundaryPath, steps: int = 9) -> float:
    """Max |path limit of a transform - symbol value at the target|.

    ``cases`` pairs an evaluator (the transform of one continuous symbol
    through a closed-form kernel backend) with the symbol's value at the
    path target.  Small deviations witness |k_z|^2 -> point mass at the
    target.  Raises TruncationError when any path fails to converge.
    """
    worst = 0.0
    for evaluator, expected in cases:
        res = path_limit(evaluator, path, steps=steps)
        if not res.converged:
            raise TruncationError(
                f"path {path.label!r} inconclusive: {res.reason}"
            )
        worst = max(worst, abs(res.limit - float(expected)))
    return worst


# ---------------------------------------------------------------------------
# Mass profiles over the boundary disc
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MassProfile:
    base_modulus: float  # q = (0, t); this is t
    grid: np.ndarray
    values: np.ndarray
    total_mass: float
    plateau_end: float
    m_cap: int
    density: Callable[[np.ndarray], np.ndarray]
    point_mass_at_zero: float = 0.0

    def to_dict(self) -> dict:
        return {
            "base_point_t": self.base_modulus,
            "grid": [float(r) for r in self.grid],
            "values": [float(v) for v in self.values],
            "total_mass": self.total_mass,
            "plateau_end": self.plateau_end,
            "m_cap": self.m_cap,
            "point_mass_at_zero": self.point_mass_at_zero,
        }


def point_mass_profile(plateau_end: float = 1.0) -> MassProfile:
    """Synthetic profile modelling the point mass at 0 (no density part)."""
    grid = np.linspace(0.0, plateau_end, 9)
    zero = lambda r: np.zeros_like(np.asarray(r, dtype=float))
    return MassProfile(
        base_modulus=1.0, grid=grid, values=zero(grid), total_mass=1.0,
        plateau_end=plateau_end, m_cap=0, density=zero, point_mass_at_zero=1.0,
    )


def mass_profile(
    norms: MonomialNormTable,
    t: float,
    grid: Optional[np.ndarray] = None,
) -> MassProfile:
    """Fiberwise kernel mass mu_q for the base point q = (0, t).

    Only the n = 0 kernel terms survive on the w-axis, so

        mu_q(r) = 2 pi sum_m t^(2m) h(r)^(2m+2) / ((2m+2) delta_{0m}^4)
                  / sum_m t^(2m) / delta_{0m}^2 .

    The total mass 2 pi int mu_q(r) r dr is recomputed by adaptive
    quadrature of the assembled density (an independent route from the
    norm-table identity that would make it exactly 1).
    """
    if not 0.0 <= t < 1.0:
        raise ValueError(f"base modulus must lie in [0, 1), got {t}")
    if not norms.margin_ok(0.0, t):
        raise ValueError(f"base point (0, {t}) violates the evaluation margin")
    profile = norms.domain.profile
    alpha = float(profile.plateau_end)
    m_cap = norms.m_cap
    log_norm0 = norms.log_norm_sq[0, :]
    m_idx = np.arange(m_cap + 1, dtype=float)

    with np.errstate(divide="ignore", invalid="ignore"):
        log_t2 = 2.0 * np.log(t) if t > 0.0 else -math.inf
        log_den = np.where(m_idx == 0.0, 0.0, m_idx * log_t2) - log_norm0
    peak = float(np.max(log_den))
    den_terms = np.exp(log_den - peak)
    den_total = float(np.sum(den_terms))
    # numerator coefficients share the same scale factor e^peak, so it cancels
    log_num = log_den - log_norm0 - np.log(2.0 * m_idx + 2.0)
    num_coeff = np.exp(log_num - peak)

    den_tail = _geometric_tail(den_terms[-4:]) if m_cap >= 3 else math.inf
    num_tail = _geometric_tail(num_coeff[-4:]) if m_cap >= 3 else math.inf
    num_total = float(np.sum(num_coeff))
    if not (den_tail / den_total <= 1e-8 and num_tail / max(num_total, 1e-300) <= 1e-8):
        raise TruncationError(
            f"mass-profile series residual flagged at t = {t} with m_cap = {m_cap}"
        )

    m_exp = 2.0 * m_idx + 2.0

    def density(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        h = np.asarray(profile(r), dtype=float)
        with np.errstate(divide="ignore"):
            log_h = np.where(h > 0.0, np.log(np.maximum(h, 1e-320)), -np.inf)
        hpow = np.exp(np.maximum(np.outer(log_h, m_exp), -745.0))
        hpow[np.outer(log_h, m_exp) < -745.0] = 0.0
        return TWO_PI * (hpow @ num_coeff) / den_total

    total = TWO_PI * adaptive_integrate(
        lambda r: density(r) * r, 0.0, 1.0, 1e-9
    ).value
    if not total <= 1.0 + 1e-6:
        raise TruncationError(
            f"total kernel mass {total} exceeds 1 beyond tolerance; "
            "the series or the quadrature is inconsistent"
        )

    if grid is None:
        grid = np.linspace(0.0, alpha, 257)
    grid = np.asarray(grid, dtype=float)
    return MassProfile(
        base_modulus=t, grid=grid, values=density(grid), total_mass=total,
        plateau_end=alpha, m_cap=m_cap, density=density,
    )


def spherical_mean(profile: MassProfile, r) -> np.ndarray:
    """M_q(r) = 2 pi r mu_q(r): the circle integral of the fiber mass."""
    r = np.asarray(r, dtype=float)
    if np.any(r < profile.grid[0] - 1e-12) or np.any(r > profile.grid[-1] + 1e-12):
        raise ValueError("radius outside the profile grid range")
    return TWO_PI * r * profile.density(r)


def test_functional(profile: MassProfile, eps: float) -> float:
    """int_0^{2 eps} (1 - r/eps) M_q(r) dr, plus g(0) times any point mass.

    Strictly negative for the plateau-constant density, which separates the
    limit measure from a point mass at 0 (where the integral would be 1, as
    it is for the synthetic point-mass profile).
    """
    if eps <= 0.0 or 2.0 * eps > profile.plateau_end + 1e-12:
        raise ValueError(
            f"need 0 < 2*eps <= plateau radius {profile.plateau_end}, got eps = {eps}"
        )
    integral = adaptive_integrate(
        lambda r: (1.0 - r / eps) * TWO_PI * r * profile.density(r),
        0.0,
        2.0 * eps,
        1e-11,
    ).value
    return profile.point_mass_at_zero * 1.0 + integral


# ---------------------------------------------------------------------------
# Boundary classification and the disc essential-norm identity
# ---------------------------------------------------------------------------


def classify_boundary(profile, r: float, tol: float = 1e-9) -> str:
    """Plateau-disc part vs log-concave tail, by radial position only.

    Convention for this one-parameter family: the gluing circle r = alpha
    counts as weakly pseudoconvex.
    """
    alpha = float(profile.plateau_end)
    if r < alpha - tol:
        return "plateau-disc"
    if r <= alpha + tol:
        return "gluing-circle"
    return "log-concave-tail"


@dataclass(frozen=True)
class EssentialNormIdentityReport:
    eigenvalue_limit: float
    eigenvalue_max: float
    berezin_boundary: float
    symbol_boundary: float
    difference: float
    n_cap: int


def _sequence_tail_limit(ns: Sequence[int], vs: Sequence[float]) -> float:
    """Limit of an eigenvalue sequence from three equally spaced samples.

    Fits v_n = L - c/(n + b), the leading behavior of radial Toeplitz
    eigenvalues (2n+2) int phi r^(2n+1) dr for phi with one-sided regularity
    at r = 1; exact for phi(r) = r^2 and phi(r) = 1 - r.
    """
    fit = _fit_rational([float(n) for n in ns], list(vs))
    if fit is None:
        geo = _fit_geometric([float(n) for n in ns], list(vs))
        return geo[0] if geo is not None else vs[-1]
    return fit[0]


def essential_norm_identity_check(
    phi: Callable, n_cap: int = 60, steps: int = 9
) -> EssentialNormIdentityReport:
    """Compare limsup_n of the disc eigenvalues with the boundary transform sup.

    For a radial symbol on the disc the essential norm of the diagonal
    Toeplitz operator is the limit of its eigenvalues, and the transform's
    boundary sup is |phi(1)| by rotation invariance; both sides are computed
    numerically and reported with their difference.
    """
    ns = [n_cap - 20, n_cap - 10, n_cap]
    if ns[0] < 0:
        raise ValueError(f"n_cap = {n_cap} too small for the tail fit")
    lam = [disc_radial_eigenvalue(phi, n) for n in ns]
    lam_all = [disc_radial_eigenvalue(phi, n) for n in range(0, n_cap + 1, 5)]
    eigen_limit = abs(_sequence_tail_limit(ns, lam))
    eigen_max = max(abs(v) for v in lam_all + lam)

    evaluator = DiscBerezinEvaluator.radial(phi)
    res = path_limit(evaluator, radial_path((1.0 + 0.0j,)), steps=steps)
    if not res.converged:
        raise TruncationError(f"boundary transform limit inconclusive: {res.reason}")
    symbol_boundary = abs(float(np.asarray(phi(np.array([1.0])))[0]))
    return EssentialNormIdentityReport(
        eigenvalue_limit=eigen_limit,
        eigenvalue_max=eigen_max,
        berezin_boundary=abs(res.limit),
        symbol_boundary=symbol_boundary,
        difference=abs(eigen_limit - abs(res.limit)),
        n_cap=n_cap,
    )
