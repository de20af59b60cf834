"""Radial-symbol Toeplitz operators as diagonal operators on monomials.

A symbol phi(z, w) = chi(|z|) acts diagonally on the monomial basis of the
Bergman space of a complete Reinhardt domain:

    T_phi z^n w^m = lambda_{n,m} z^n w^m,
    lambda_{n,m} = int chi r^(2n+1) h^(2m+2) dr / int r^(2n+1) h^(2m+2) dr.

When chi is supported inside the plateau {h = 1}, the eigenvalues increase
strictly in m toward the limit

    lambda_{n,inf} = int chi r^(2n+1) dr / int_0^alpha r^(2n+1) dr,

and each limit is an essential-spectrum point (limits of eigenvalues of a
self-adjoint diagonal operator).  Operator norm and essential norm both
equal the largest limit, located at a finite argmax certified by a
decreasing tail.
"""

import csv
import json
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .domains import BumpSymbol, RadialProfile
from .quadrature import (
    adaptive_integrate,
    moment_grid,
    plateau_weighted_moments,
    radial_moment,
    weighted_moment_grid,
)


class CapError(RuntimeError):
    """The index cap is too small to certify a sup over the infinite table."""


class SupportError(ValueError):
    """Symbol support leaks outside the plateau interior."""


def toeplitz_eigenvalue(profile: RadialProfile, symbol: BumpSymbol, n: int, m: int) -> float:
    """Single eigenvalue via the scalar adaptive quadrature path."""
    num = radial_moment(profile, symbol, n, m)
    den = radial_moment(profile, None, n, m)
    if den == 0.0:
        raise ArithmeticError(
            f"moment denominator underflowed at ({n}, {m}); lower the caps"
        )
    return num / den


def eigenvalue_limit(symbol: BumpSymbol, plateau_end: float, n: int) -> float:
    """m -> infinity limit: (2n+2) / alpha^(2n+2) * int chi r^(2n+1) dr."""
    if not symbol.support_hi < plateau_end:
        raise SupportError(
            f"symbol support [{symbol.support_lo}, {symbol.support_hi}] must sit "
            f"strictly inside the plateau [0, {plateau_end})"
        )
    num = adaptive_integrate(
        lambda r: np.asarray(symbol(r), dtype=float) * r ** (2 * n + 1),
        symbol.support_lo,
        symbol.support_hi,
        1e-14,
    ).value
    return (2.0 * n + 2.0) / plateau_end ** (2 * n + 2) * num


class EigenvalueTable:
    """lambda_{n,m} grid plus the limit column and its argmax."""

    def __init__(self, profile, symbol, n_cap, m_cap, values, limits):
        self.profile = profile
        self.symbol = symbol
        self.n_cap = n_cap
        self.m_cap = m_cap
        self.values = values  # (n_cap+1, m_cap+1)
        self.limits = limits  # (n_cap+1,)
        self.n0 = int(np.argmax(limits))

    @classmethod
    def build(cls, profile: RadialProfile, symbol: BumpSymbol,
              n_cap: int, m_cap: int) -> "EigenvalueTable":
        alpha = float(profile.plateau_end)
        if not symbol.support_hi < alpha:
            raise SupportError(
                f"symbol support must sit inside the plateau [0, {alpha})"
            )
        denom = moment_grid(profile, n_cap, m_cap)
        ramps = (
            symbol.support_lo + symbol.smoothing_width,
            symbol.support_hi - symbol.smoothing_width,
        )
        numer = plateau_weighted_moments(
            profile,
            symbol,
            n_cap,
            support=(symbol.support_lo, symbol.support_hi),
            breakpoints=ramps,
        )
        values = numer[:, None] / denom
        n_exp = 2.0 * np.arange(n_cap + 1) + 2.0
        limits = numer * n_exp / np.power(alpha, n_exp)
        if not np.all(np.isfinite(limits)):
            raise CapError("limit column underflowed; lower n_cap or raise alpha")
        return cls(profile, symbol, n_cap, m_cap, values, limits)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["n", "m", "lambda"])
            for n in range(self.n_cap + 1):
                for m in range(self.m_cap + 1):
                    writer.writerow([n, m, repr(float(self.values[n, m]))])

    def summary_dict(self) -> dict:
        norm, n0 = operator_norm(self)
        return {
            "n0": n0,
            "norm": norm,
            "essential_norm": essential_norm(self),
            "lambda_inf": [float(v) for v in self.limits],
            "caps": {"n": self.n_cap, "m": self.m_cap},
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary_dict(), sort_keys=True, indent=2)


def _certify_decreasing_tail(limits: np.ndarray, window: int = 10) -> None:
    """The last ``window`` limit entries must strictly decrease.

    The sup over all n is only a finite max because lambda_{n,inf} -> 0;
    a non-decreasing tail at the cap means the argmax may lie beyond it,
    so the search refuses instead of silently truncating.
    """
    if np.all(limits == 0.0):
        return
    tail = limits[-(window + 1):]
    if tail.size < window + 1:
        raise CapError(f"need at least {window + 1} limit entries, got {tail.size}")
    if not np.all(np.diff(tail) < 0.0):
        raise CapError(
            "limit column is not decreasing over the last "
            f"{window} indices; n_cap is too small to certify the sup"
        )


def operator_norm(table: EigenvalueTable) -> Tuple[float, int]:
    """(max_n lambda_{n,inf}, argmax), certified by a decreasing tail."""
    _certify_decreasing_tail(table.limits)
    return float(table.limits[table.n0]), table.n0


def essential_norm(table: EigenvalueTable) -> float:
    """Distance to the compacts: the same largest eigenvalue limit.

    Every lambda_{n,inf} is a limit of eigenvalues, hence in the essential
    spectrum of the self-adjoint diagonal operator, and no diagonal
    perturbation by compacts can push the norm below the largest one.
    """
    value, _ = operator_norm(table)
    return value


def spectrum_approx(table: EigenvalueTable, resolution: float) -> list:
    """Sorted {lambda_{n,m}} union {lambda_{n,inf}}, deduplicated at resolution.

    A cap-limited stand-in for the closure of the eigenvalue set.
    """
    if resolution <= 0.0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    pool = np.concatenate([table.values.ravel(), table.limits])
    snapped = np.round(pool / resolution) * resolution
    return sorted(float(v) for v in np.unique(snapped))


def disc_radial_eigenvalue(phi: Callable, n: int) -> float:
    """Eigenvalue of T_phi on z^n in the Bergman space of the unit disc.

    lambda_n = (2n+2) int_0^1 phi(r) r^(2n+1) dr for a bounded radial phi.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    val = adaptive_integrate(
        lambda r: np.asarray(phi(r), dtype=float) * r ** (2 * n + 1), 0.0, 1.0, 1e-13
    ).value
    return (2.0 * n + 2.0) * val


def radial_symbol_eigenvalues(
    profile: RadialProfile,
    psi: Callable,
    n_cap: int,
    m_cap: int,
    support: Optional[tuple] = None,
    breakpoints: Sequence[float] = (),
) -> np.ndarray:
    """Eigenvalue grid for a general radial-in-z symbol psi(|z|).

    Unlike bump symbols, psi may live on all of [0, 1], so the numerator
    keeps its h-power dependence and the grid is genuinely m-dependent.
    """
    numer = weighted_moment_grid(
        profile, psi, n_cap, m_cap, support=support, breakpoints=breakpoints
    )
    denom = moment_grid(profile, n_cap, m_cap)
    return numer / denom
