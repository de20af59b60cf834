"""Domain geometry: radial profiles, bump symbols, Reinhardt and product domains.

The central object is a complete Reinhardt domain in C^2 determined by a
Hartogs profile h:

    Omega = {(z, w) : |z| < 1, |w| < h(|z|)},   0 < h <= 1,

where h == 1 exactly on a plateau [0, alpha] and is non-increasing beyond.
The plateau fills the boundary piece {|w| = 1, |z| <= alpha} with analytic
discs; the decaying tail contributes the strictly log-concave part.  A bump
symbol chi is a smooth nonnegative radial function compactly supported
inside the plateau whose first moment is dominated by twice its third
moment; that inequality drives everything downstream, so it is validated at
construction time.
"""

import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .quadrature import adaptive_integrate

PROFILE_GRID_STEP = 1e-3
# A jump of size j shows up as a centered second difference of order j;
# smooth profiles on a 1e-3 grid stay a couple of orders below this.
SECOND_DIFF_BOUND = 0.05


class DomainError(ValueError):
    """Invalid domain parameter or violated structural hypothesis."""


class MomentInequalityError(DomainError):
    """The bump's moment inequality  int chi r dr < 2 int chi r^3 dr  failed."""


def _smooth_step(x: np.ndarray) -> np.ndarray:
    """exp(-1/x) for x > 0, 0 otherwise (flat-to-all-orders glue)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0.0
    with np.errstate(over="ignore"):
        out[pos] = np.exp(-1.0 / x[pos])
    return out


def _ramp(x: np.ndarray) -> np.ndarray:
    """Smooth partition ramp: 0 for x <= 0, 1 for x >= 1, C-infinity between."""
    x = np.asarray(x, dtype=float)
    s0 = _smooth_step(x)
    s1 = _smooth_step(1.0 - x)
    with np.errstate(invalid="ignore"):
        out = np.where(s0 + s1 > 0.0, s0 / (s0 + s1), 0.0)
    return out


@dataclass(frozen=True)
class RadialProfile:
    """Hartogs profile h on [0, 1] with plateau [0, plateau_end]."""

    plateau_end: float
    steepness: float
    evaluator: Callable[[np.ndarray], np.ndarray]

    def __call__(self, r):
        return self.evaluator(np.asarray(r, dtype=float))


def validate_profile(profile: RadialProfile) -> None:
    """Check the structural invariants of a profile on a fine grid."""
    alpha = profile.plateau_end
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"plateau_end must lie in (0, 1], got {alpha}")
    r = np.arange(0.0, 1.0 + PROFILE_GRID_STEP / 2, PROFILE_GRID_STEP)
    h = np.asarray(profile(r), dtype=float)
    if np.any(h <= 0.0) or np.any(h > 1.0 + 1e-12):
        raise DomainError("profile must satisfy 0 < h <= 1 on [0, 1]")
    on_plateau = r <= alpha + 1e-12
    if np.any(np.abs(h[on_plateau] - 1.0) > 1e-12):
        raise DomainError("profile must equal 1 exactly on the plateau")
    tail = h[r >= alpha - 1e-12]
    if np.any(np.diff(tail) > 1e-12):
        raise DomainError("profile must be non-increasing beyond the plateau")
    d2 = h[:-2] - 2.0 * h[1:-1] + h[2:]
    worst = float(np.max(np.abs(d2))) if d2.size else 0.0
    if worst > SECOND_DIFF_BOUND:
        raise DomainError(
            f"profile looks discontinuous: max second difference {worst:.3g} "
            f"exceeds {SECOND_DIFF_BOUND}"
        )


def default_profile(alpha: float, kappa: float) -> RadialProfile:
    """Plateau-exact profile: h = 1 on [0, alpha], exp(-kappa e^{-1/t}) beyond.

    t = (r - alpha) / (1 - alpha) rescales the tail to [0, 1]; the glue at
    r = alpha is flat to all orders, so the profile is smooth.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if kappa <= 0.0:
        raise DomainError(f"kappa must be positive, got {kappa}")

    def h(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        t = (r - alpha) / (1.0 - alpha)
        return np.exp(-kappa * _smooth_step(t))

    profile = RadialProfile(plateau_end=alpha, steepness=kappa, evaluator=h)
    validate_profile(profile)
    return profile


def unit_profile() -> RadialProfile:
    """h identically 1: the bidisc, as the degenerate all-plateau profile."""
    return RadialProfile(
        plateau_end=1.0, steepness=0.0, evaluator=lambda r: np.ones_like(np.asarray(r, dtype=float))
    )


@dataclass(frozen=True)
class BumpSymbol:
    """Nonnegative radial symbol chi supported in [support_lo, support_hi].

    moment_r and moment_r3 store  int chi(r) r dr  and  int chi(r) r^3 dr;
    the strict inequality moment_r < 2 * moment_r3 is certified when the
    symbol is built.
    """

    support_lo: float
    support_hi: float
    smoothing_width: float
    evaluator: Callable[[np.ndarray], np.ndarray]
    moment_r: float
    moment_r3: float

    def __call__(self, r):
        return self.evaluator(np.asarray(r, dtype=float))

    def sup_norm(self, samples: int = 4001) -> float:
        r = np.linspace(self.support_lo, self.support_hi, samples)
        return float(np.max(self(r)))

    def scaled(self, c: float) -> "BumpSymbol":
        """c * chi for c > 0; the moment inequality is scale invariant."""
        if c <= 0.0:
            raise DomainError(f"scale factor must be positive, got {c}")
        base = self.evaluator
        return BumpSymbol(
            support_lo=self.support_lo,
            support_hi=self.support_hi,
            smoothing_width=self.smoothing_width,
            evaluator=lambda r: c * base(np.asarray(r, dtype=float)),
            moment_r=c * self.moment_r,
            moment_r3=c * self.moment_r3,
        )


def _bump_moments(chi: Callable, a: float, b: float) -> Tuple[float, float]:
    m1 = adaptive_integrate(lambda r: chi(r) * r, a, b, 1e-13).value
    m3 = adaptive_integrate(lambda r: chi(r) * r**3, a, b, 1e-13).value
    return m1, m3


def build_bump(a: float, b: float, width: float) -> BumpSymbol:
    """Mollified indicator of [a, b]: smooth ramps of the given width, 1 between.

    Fails with MomentInequalityError when the support sits too far inside
    the region where 2 r^3 < r (i.e. r < 1/sqrt(2)), since the construction
    certifies  int chi r dr < 2 int chi r^3 dr.
    """
    if not 0.0 < a < b < 1.0:
        raise DomainError(f"support must satisfy 0 < a < b < 1, got [{a}, {b}]")
    if not 0.0 < width < (b - a) / 2.0:
        raise DomainError(
            f"degenerate support: width must lie in (0, (b - a)/2), got {width}"
        )

    def chi(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return _ramp((r - a) / width) * _ramp((b - r) / width)

    m1, m3 = _bump_moments(chi, a, b)
    if not m1 < 2.0 * m3:
        raise MomentInequalityError(
            f"moment inequality fails: int chi r dr = {m1:.6g} "
            f">= 2 int chi r^3 dr = {2.0 * m3:.6g}"
        )
    return BumpSymbol(
        support_lo=a,
        support_hi=b,
        smoothing_width=width,
        evaluator=chi,
        moment_r=m1,
        moment_r3=m3,
    )


def bump_from_evaluator(
    chi: Callable, a: float, b: float, width: float = 0.0
) -> BumpSymbol:
    """Wrap an arbitrary nonnegative evaluator, certifying the same inequality."""
    if not 0.0 < a < b < 1.0:
        raise DomainError(f"support must satisfy 0 < a < b < 1, got [{a}, {b}]")
    m1, m3 = _bump_moments(lambda r: np.asarray(chi(r), dtype=float), a, b)
    if not m1 < 2.0 * m3:
        raise MomentInequalityError(
            f"moment inequality fails: {m1:.6g} >= {2.0 * m3:.6g}"
        )
    return BumpSymbol(a, b, width, lambda r: np.asarray(chi(r), dtype=float), m1, m3)


# ---------------------------------------------------------------------------
# Log-convexity of the Hartogs region
# ---------------------------------------------------------------------------


def check_logconvexity(profile: RadialProfile, grid_step: float = 0.005):
    """Grid test of concavity of u -> log h(e^u) on [log 1e-3, 0).

    The Hartogs region {y < h(x)} is logarithmically convex exactly when
    that map is concave.  Returns (verdict, report); the report carries the
    largest positive second difference and where it occurred.
    """
    if not 0.0 < grid_step <= 0.01:
        raise DomainError(f"grid_step must lie in (0, 0.01], got {grid_step}")
    u = np.arange(math.log(1e-3), 0.0, grid_step)
    r = np.exp(u)
    with np.errstate(divide="ignore"):
        g = np.log(np.asarray(profile(r), dtype=float))
    d2 = g[:-2] - 2.0 * g[1:-1] + g[2:]
    # concave <=> second differences <= 0 (sign convention: d2 here is
    # g(u-du) - 2 g(u) + g(u+du), nonpositive for concave g)
    worst = float(np.max(d2)) if d2.size else 0.0
    idx = int(np.argmax(d2)) + 1 if d2.size else 0
    verdict = worst <= 1e-8
    report = {
        "max_positive_second_difference": worst,
        "at_u": float(u[idx]) if d2.size else None,
        "at_r": float(r[idx]) if d2.size else None,
        "grid_step": grid_step,
        "points": int(u.size),
    }
    return verdict, report


@dataclass(frozen=True)
class ReinhardtDomain2D:
    """Omega = {(z, w) in C^2 : |z| < 1, |w| < h(|z|)}."""

    profile: RadialProfile
    logconvex: bool
    logconvex_report: dict


def make_domain(profile: RadialProfile, grid_step: float = 0.005) -> ReinhardtDomain2D:
    verdict, report = check_logconvexity(profile, grid_step)
    return ReinhardtDomain2D(profile=profile, logconvex=verdict, logconvex_report=report)


def membership(domain: ReinhardtDomain2D, z: complex, w: complex) -> bool:
    """(z, w) in Omega iff |z| < 1 and |w| < h(|z|)."""
    az = abs(z)
    if az >= 1.0:
        return False
    return abs(w) < float(domain.profile(np.array([az]))[0])


# ---------------------------------------------------------------------------
# Product domains and monomial indices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FactorSpec:
    """One factor of a product domain: the unit disc or a unit ball."""

    kind: str  # "disc" | "ball"
    dim: int

    def __post_init__(self):
        if self.kind not in ("disc", "ball"):
            raise DomainError(f"unknown factor kind {self.kind!r}")
        if self.kind == "disc" and self.dim != 1:
            raise DomainError("disc factors are one dimensional")
        if self.dim < 1:
            raise DomainError(f"factor dimension must be >= 1, got {self.dim}")


@dataclass(frozen=True)
class ProductDomainSpec:
    factors: Tuple[FactorSpec, ...]

    def __post_init__(self):
        if len(self.factors) == 0:
            raise DomainError("a product domain needs at least one factor")

    @staticmethod
    def disc() -> "ProductDomainSpec":
        return ProductDomainSpec((FactorSpec("disc", 1),))

    @staticmethod
    def bidisc() -> "ProductDomainSpec":
        return ProductDomainSpec((FactorSpec("disc", 1), FactorSpec("disc", 1)))


class MonomialIndex(tuple):
    """Index (n, m) of the monomial z^n w^m."""

    def __new__(cls, n: int, m: int):
        if n < 0 or m < 0:
            raise DomainError(f"monomial exponents must be nonnegative, got ({n}, {m})")
        return super().__new__(cls, (int(n), int(m)))

    @property
    def n(self) -> int:
        return self[0]

    @property
    def m(self) -> int:
        return self[1]


# ---------------------------------------------------------------------------
# Flat key=value configuration round trip
# ---------------------------------------------------------------------------

DOMAIN_CONFIG_KEYS = ("profile.alpha", "profile.kappa", "bump.a", "bump.b", "bump.width")


def domain_config_text(values: dict) -> str:
    """Serialize a domain configuration; repr round-trips every float exactly."""
    lines = []
    for key in DOMAIN_CONFIG_KEYS:
        if key in values:
            lines.append(f"{key}={values[key]!r}")
    for key in sorted(values):
        if key not in DOMAIN_CONFIG_KEYS:
            lines.append(f"{key}={values[key]!r}")
    return "\n".join(lines) + "\n"


def parse_domain_config(text: str) -> dict:
    """Parse flat key=value lines; malformed lines are reported by number."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DomainError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        try:
            values[key] = float(val.strip())
        except ValueError as exc:
            raise DomainError(f"line {lineno}: field {key!r}: {exc}") from exc
    return values
