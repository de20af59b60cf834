"""Monomial norms and Bergman kernels.

On a complete Reinhardt domain the monomials z^n w^m form an orthogonal
basis of the Bergman space, with squared norms

    ||z^n w^m||^2 = (2 pi)^2 / (2m+2) * integral_0^1 r^(2n+1) h(r)^(2m+2) dr.

The kernel is the diagonal series sum_{n,m} p1^n p2^m conj(q1)^n conj(q2)^m
/ ||z^n w^m||^2, truncated at the table caps; every evaluation carries a
geometric-tail residual estimate and refuses to pretend convergence near the
boundary.  Squared norms are stored in log space since they span many orders
of magnitude for decaying profiles.
"""

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .domains import MonomialIndex, ProductDomainSpec, ReinhardtDomain2D
from .quadrature import moment_grid, radial_moment

TWO_PI = 2.0 * math.pi
LOG_4PI2 = 2.0 * math.log(TWO_PI)

# Interior evaluation margin: radial coordinates may come this close to their
# bound before a kernel evaluation is refused outright.
EVAL_MARGIN = 0.999
# Estimated relative truncation residual above which an evaluation is flagged.
KERNEL_RESIDUAL_TOL = 1e-6


class MarginError(ValueError):
    """Evaluation point too close to the boundary for the table caps."""


class TruncationError(RuntimeError):
    """Series truncation residual above the refuse threshold."""


@dataclass(frozen=True)
class KernelValue:
    value: complex
    truncation_residual: float


class MonomialNormTable:
    """log ||z^n w^m||^2 for all n <= n_cap, m <= m_cap."""

    def __init__(self, domain: ReinhardtDomain2D, n_cap: int, m_cap: int,
                 log_norm_sq: np.ndarray):
        self.domain = domain
        self.n_cap = n_cap
        self.m_cap = m_cap
        self.log_norm_sq = log_norm_sq

    @classmethod
    def build(cls, domain: ReinhardtDomain2D, n_cap: int, m_cap: int) -> "MonomialNormTable":
        moments = moment_grid(domain.profile, n_cap, m_cap)
        m_exp = 2.0 * np.arange(m_cap + 1) + 2.0
        log_norm_sq = LOG_4PI2 - np.log(m_exp)[None, :] + np.log(moments)
        return cls(domain, n_cap, m_cap, log_norm_sq)

    def log_delta_sq(self, n: int, m: int) -> float:
        return float(self.log_norm_sq[n, m])

    def delta_sq(self, n: int, m: int) -> float:
        return math.exp(self.log_norm_sq[n, m])

    def margin_ok(self, az: float, aw: float) -> bool:
        """Moduli (|z|, |w|) acceptable for series evaluation."""
        if az > EVAL_MARGIN:
            return False
        h = float(self.domain.profile(np.array([az]))[0])
        return aw <= EVAL_MARGIN * h

    def to_csv(self, path) -> None:
        """n-major rows of (n, m, log_delta_sq)."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["n", "m", "log_delta_sq"])
            for n in range(self.n_cap + 1):
                for m in range(self.m_cap + 1):
                    writer.writerow([n, m, repr(float(self.log_norm_sq[n, m]))])


def monomial_norm_sq(domain: ReinhardtDomain2D, n: int, m: int) -> float:
    """||z^n w^m||^2 on Omega via the scalar adaptive-moment path."""
    moment = radial_moment(domain.profile, None, n, m)
    return (TWO_PI**2) / (2.0 * m + 2.0) * moment


# ---------------------------------------------------------------------------
# Truncated series kernel
# ---------------------------------------------------------------------------


def _geometric_tail(marginals: np.ndarray) -> float:
    """Tail estimate for a series whose slice sums are ``marginals``.

    Fits a geometric ratio to the last few slice sums; returns inf when the
    ratio does not stay below 1 (the truncation cannot be trusted).
    """
    last = float(marginals[-1])
    if last == 0.0:
        return 0.0
    ratios = []
    for prev, curr in zip(marginals[-4:-1], marginals[-3:]):
        if prev > 0.0:
            ratios.append(float(curr / prev))
        elif curr > 0.0:
            return math.inf
    if not ratios:
        return math.inf
    rho = max(ratios)
    if not rho < 0.999:
        return math.inf
    return last * rho / (1.0 - rho)


def _masked_log_terms(table, log_u, log_v, n_idx, m_idx):
    with np.errstate(invalid="ignore"):
        rows = np.where(n_idx == 0.0, 0.0, n_idx * log_u)
        cols = np.where(m_idx == 0.0, 0.0, m_idx * log_v)
        out = np.add.outer(rows, cols) - table.log_norm_sq
    return out


def series_weight_matrix(table: MonomialNormTable, mod_u: float, mod_v: float) -> np.ndarray:
    """|u|^n |v|^m / delta^2 for 0 <= moduli < 1, assembled in log space."""
    with np.errstate(divide="ignore"):
        log_u = math.log(mod_u) if mod_u > 0.0 else -math.inf
        log_v = math.log(mod_v) if mod_v > 0.0 else -math.inf
    n_idx = np.arange(table.n_cap + 1, dtype=float)
    m_idx = np.arange(table.m_cap + 1, dtype=float)
    log_terms = _masked_log_terms(table, log_u, log_v, n_idx, m_idx)
    out = np.exp(np.maximum(log_terms, -745.0))
    out[log_terms < -745.0] = 0.0
    return out


def series_tail_residual(weights: np.ndarray) -> float:
    """Absolute geometric-tail residual estimate for a positive-term grid."""
    rows = weights.sum(axis=1)
    cols = weights.sum(axis=0)
    total = float(weights.sum())
    if total == 0.0:
        return 0.0
    tail_rows = _geometric_tail(rows) if rows.size >= 3 else math.inf
    tail_cols = _geometric_tail(cols) if cols.size >= 3 else math.inf
    if math.isinf(tail_rows) or math.isinf(tail_cols):
        return math.inf
    cross = tail_rows * tail_cols / total
    return tail_rows + tail_cols + cross


def kernel_reinhardt(table: MonomialNormTable, p, q) -> KernelValue:
    """Truncated Bergman kernel K(p, q) on the Reinhardt domain.

    Both points must sit inside the 0.999 radial margin; evaluations whose
    estimated relative tail exceeds KERNEL_RESIDUAL_TOL raise TruncationError.
    """
    p1, p2 = complex(p[0]), complex(p[1])
    q1, q2 = complex(q[0]), complex(q[1])
    for z, w in ((p1, p2), (q1, q2)):
        if not table.margin_ok(abs(z), abs(w)):
            raise MarginError(
                f"point ({z}, {w}) violates the {EVAL_MARGIN} interior margin"
            )
    u = p1 * q1.conjugate()
    v = p2 * q2.conjugate()
    mags = series_weight_matrix(table, abs(u), abs(v))
    residual_abs = series_tail_residual(mags)

    phase_u = np.exp(1j * np.arange(table.n_cap + 1) * np.angle(u)) if u != 0 else None
    phase_v = np.exp(1j * np.arange(table.m_cap + 1) * np.angle(v)) if v != 0 else None
    terms = mags.astype(complex)
    if phase_u is not None:
        terms = terms * phase_u[:, None]
    else:
        terms[1:, :] = 0.0
    if phase_v is not None:
        terms = terms * phase_v[None, :]
    else:
        terms[:, 1:] = 0.0
    value = complex(
        math.fsum(terms.real.ravel().tolist()), math.fsum(terms.imag.ravel().tolist())
    )
    rel = residual_abs / max(abs(value), 1e-300)
    if not rel <= KERNEL_RESIDUAL_TOL:
        raise TruncationError(
            f"estimated relative truncation residual {rel:.3g} exceeds "
            f"{KERNEL_RESIDUAL_TOL:g}; raise the caps or move inward"
        )
    return KernelValue(value=value, truncation_residual=residual_abs)


# ---------------------------------------------------------------------------
# Closed-form kernels on products of discs and balls
# ---------------------------------------------------------------------------


def _disc_kernel(z: complex, q: complex) -> complex:
    denom = 1.0 - z * q.conjugate()
    if abs(denom) < 1e-12:
        raise ZeroDivisionError("disc kernel evaluated at the boundary diagonal")
    return 1.0 / (math.pi * denom * denom)


def _ball_kernel(z, q, dim: int) -> complex:
    inner = sum(zi * qi.conjugate() for zi, qi in zip(z, q))
    denom = 1.0 - inner
    if abs(denom) < 1e-12:
        raise ZeroDivisionError("ball kernel evaluated at the boundary diagonal")
    return math.factorial(dim) / (math.pi**dim * denom ** (dim + 1))


def kernel_closed_form(spec: ProductDomainSpec, p, q) -> complex:
    """Product kernel: disc factors 1/(pi (1 - conj(q) z)^2), balls k!/(pi^k (1-<z,q>)^{k+1})."""
    p = [complex(x) for x in p]
    q = [complex(x) for x in q]
    total_dim = sum(f.dim for f in spec.factors)
    if len(p) != total_dim or len(q) != total_dim:
        raise ValueError(
            f"points must have {total_dim} coordinates, got {len(p)} and {len(q)}"
        )
    value = 1.0 + 0.0j
    offset = 0
    for factor in spec.factors:
        coords_p = p[offset : offset + factor.dim]
        coords_q = q[offset : offset + factor.dim]
        if factor.kind == "disc":
            value *= _disc_kernel(coords_p[0], coords_q[0])
        else:
            value *= _ball_kernel(coords_p, coords_q, factor.dim)
        offset += factor.dim
    return value


def normalized_kernel(kernel: Callable, q) -> Callable:
    """p -> K(p, q) / sqrt(K(q, q)); unit Bergman norm by the reproducing identity."""
    diag = kernel(q, q)
    diag_re = diag.real if isinstance(diag, complex) else float(diag)
    if not diag_re > 0.0:
        raise TruncationError(
            f"kernel diagonal K(q, q) = {diag!r} is not positive; truncation failed"
        )
    scale = 1.0 / math.sqrt(diag_re)

    def k_q(p):
        return kernel(p, q) * scale

    return k_q


def reproduce_check(table: MonomialNormTable, index: MonomialIndex, z) -> float:
    """|<f, K(., z)> - f(z)| for the monomial f = z1^n z2^m.

    Angular integrals are exact by rotation invariance, so the pairing
    collapses to the diagonal term with a freshly quadratured radial moment
    against the table's stored norm.  The deviation measures table-versus-
    quadrature consistency of the reproducing property.
    """
    n, m = index
    if n > table.n_cap or m > table.m_cap:
        raise ValueError(f"index ({n}, {m}) outside table caps")
    z1, z2 = complex(z[0]), complex(z[1])
    if not table.margin_ok(abs(z1), abs(z2)):
        raise MarginError(f"point ({z1}, {z2}) violates the interior margin")
    fresh = radial_moment(table.domain.profile, None, n, m)
    fresh_norm_sq = (TWO_PI**2) / (2.0 * m + 2.0) * fresh
    f_z = z1**n * z2**m
    pairing = f_z * fresh_norm_sq / table.delta_sq(n, m)
    return abs(pairing - f_z)
