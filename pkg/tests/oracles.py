"""Independent oracles shared by the test modules.

Everything here recomputes target quantities through routes that do not go
through the code paths under test: plain tensor cubature over the Hartogs
region, closed forms, and term-by-term series summation.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from berezinlab.quadrature import gauss_nodes

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class StubWeight:
    """Duck-typed radial weight for cases build_bump refuses (chi == 0 etc.)."""

    support_lo: float
    support_hi: float
    evaluator: Callable
    smoothing_width: float = 0.0

    def __call__(self, r):
        return self.evaluator(np.asarray(r, dtype=float))


def cubature_norm_sq(profile, n: int, m: int, r_order: int = 220, rho_order: int = 140) -> float:
    """||z^n w^m||^2 by brute-force tensor cubature over the Hartogs region.

    The radial integral is split at the plateau end so each piece is smooth.
    """
    alpha = float(profile.plateau_end)
    total = 0.0
    segments = [(0.0, alpha)] + ([(alpha, 1.0)] if alpha < 1.0 else [])
    for a, b in segments:
        r, wr = gauss_nodes(a, b, r_order)
        h = np.asarray(profile(r), dtype=float)
        for ri, wi, hi in zip(r, wr, h):
            rho, wrho = gauss_nodes(0.0, float(hi), rho_order)
            total += wi * ri ** (2 * n + 1) * float(np.sum(wrho * rho ** (2 * m + 1)))
    return TWO_PI**2 * total


def disc_abs2_transform(t: float) -> float:
    """Closed form of the disc transform of |xi|^2 at t = |z|^2.

    Derived by summing (1-t)^2 sum (n+1)^2/(n+2) t^n term by term:
    1 - (1-t) - (1-t)^2 (t + log(1-t)) / t^2, with the t -> 0 limit 1/2.
    """
    if t == 0.0:
        return 0.5
    return 1.0 - (1.0 - t) - (1.0 - t) ** 2 * (t + math.log(1.0 - t)) / t**2


def disc_series_transform(phi, t: float, n_terms: int = 4000) -> float:
    """Disc transform via the eigenvalue series sum lam_n (n+1) t^n (normalized).

    lam_n = (2n+2) int phi r^(2n+1) dr computed by high-order Gauss; an
    independent route from the integral backend.
    """
    r, w = gauss_nodes(0.0, 1.0, 600)
    vals = np.asarray(phi(r), dtype=float)
    n = np.arange(n_terms, dtype=float)
    powers = np.where(r[:, None] > 0, r[:, None] ** (2 * n[None, :] + 1), 0.0)
    lam = (2 * n + 2) * ((w * vals) @ powers)
    weights = (n + 1) * t**n
    return float(np.sum(lam * weights) / np.sum(weights))


def berezin_brute_force(profile, chi, norms, t: float, s: float,
                        r_order: int = 160, rho_order: int = 160) -> float:
    """<phi k_q, k_q> by 2-D radial cubature of chi against |k_q|^2.

    Uses the table's stored norms only to define the operator's kernel; the
    integration itself is plain nested Gauss, with radial panels split at
    the weight's ramp edges (and the plateau end when it intrudes).
    """
    alpha = float(profile.plateau_end)
    inv2 = np.exp(-2.0 * norms.log_norm_sq)  # 1 / delta^4
    n_idx = np.arange(norms.n_cap + 1, dtype=float)
    m_idx = np.arange(norms.m_cap + 1, dtype=float)
    tn = np.where(t > 0, t ** n_idx, np.where(n_idx == 0, 1.0, 0.0))
    sm = np.where(s > 0, s ** m_idx, np.where(m_idx == 0, 1.0, 0.0))

    lo, hi = float(chi.support_lo), float(chi.support_hi)
    width = float(getattr(chi, "smoothing_width", 0.0))
    breaks = {lo, hi}
    if width > 0.0:
        breaks |= {lo + width, hi - width}
    if lo < alpha < hi:
        breaks.add(alpha)
    edges = sorted(breaks)

    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        r, wr = gauss_nodes(a, b, r_order)
        h = np.asarray(profile(r), dtype=float)
        chivals = np.asarray(chi(r), dtype=float)
        for ri, wi, hi_, ci in zip(r, wr, h, chivals):
            rho, wrho = gauss_nodes(0.0, float(hi_), rho_order)
            rn = ri ** (2 * n_idx) * tn
            rm = (wrho * rho) @ np.power.outer(rho**2, m_idx) * sm
            total += wi * ri * ci * float(rn @ inv2 @ rm)
    kqq = float(np.sum(np.exp(-norms.log_norm_sq) * np.outer(tn, sm)))
    return TWO_PI**2 * total / kqq


def reinhardt_norm_of_normalized_kernel(profile, norms, q,
                                        r_order: int = 160, rho_order: int = 200) -> float:
    """|| k_q ||^2 by tensor cubature of the truncated kernel series.

    Only the angular integrals are taken in closed form (rotation invariance
    kills the cross terms exactly); the radial double integral is numeric.
    """
    alpha = float(profile.plateau_end)
    t = abs(complex(q[0])) ** 2
    s = abs(complex(q[1])) ** 2
    inv2 = np.exp(-2.0 * norms.log_norm_sq)
    n_idx = np.arange(norms.n_cap + 1, dtype=float)
    m_idx = np.arange(norms.m_cap + 1, dtype=float)
    tn = np.where(t > 0, t ** n_idx, np.where(n_idx == 0, 1.0, 0.0))
    sm = np.where(s > 0, s ** m_idx, np.where(m_idx == 0, 1.0, 0.0))

    total = 0.0
    for a, b in [(0.0, alpha)] + ([(alpha, 1.0)] if alpha < 1.0 else []):
        r, wr = gauss_nodes(a, b, r_order)
        h = np.asarray(profile(r), dtype=float)
        for ri, wi, hi in zip(r, wr, h):
            rho, wrho = gauss_nodes(0.0, float(hi), rho_order)
            rn = ri ** (2 * n_idx) * tn
            rm = (wrho * rho) @ np.power.outer(rho**2, m_idx) * sm
            total += wi * ri * float(rn @ inv2 @ rm)
    kqq = float(np.sum(np.exp(-norms.log_norm_sq) * np.outer(tn, sm)))
    return TWO_PI**2 * total / kqq


def angular_inner_product(profile, chi, n: int, m: int, j: int, k: int,
                          n_theta: int = 64) -> complex:
    """<chi(|z|) z^n w^m, z^j w^k> with numeric angular integrals.

    The angular factors are trapezoid sums (machine-exact zeros off the
    diagonal); the radial part is Gauss split at the plateau end and at the
    weight's ramp edges.
    """
    theta = TWO_PI * np.arange(n_theta) / n_theta
    ang_z = np.sum(np.exp(1j * (n - j) * theta)) * (TWO_PI / n_theta)
    ang_w = np.sum(np.exp(1j * (m - k) * theta)) * (TWO_PI / n_theta)
    alpha = float(profile.plateau_end)
    breaks = {0.0, alpha, 1.0}
    lo, hi = float(chi.support_lo), float(chi.support_hi)
    width = float(getattr(chi, "smoothing_width", 0.0))
    breaks |= {lo, hi}
    if width > 0.0:
        breaks |= {lo + width, hi - width}
    edges = sorted(b for b in breaks if 0.0 <= b <= 1.0)
    radial = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        r, w = gauss_nodes(a, b, 200)
        h = np.asarray(profile(r), dtype=float)
        radial += float(
            np.sum(
                w
                * np.asarray(chi(r), dtype=float)
                * r ** (n + j + 1)
                * h ** (m + k + 2)
                / (m + k + 2)
            )
        )
    return ang_z * ang_w * radial
