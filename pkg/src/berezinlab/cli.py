"""Batch command-line front end.

Subcommands
-----------
reproduce-example   build the flagship Reinhardt-domain configuration and
                    check the norm chain
                    sup_Gamma <= interior sup < essential norm = operator
                    norm < sup |chi|,
                    writing a summary JSON; exit 0 only when every strict
                    inequality holds with margin > 1e-6.
probe               path-limit probe of a Berezin transform at a boundary
                    target (example domain or bidisc backends).
tables              export monomial-norm and eigenvalue tables plus a
                    plot-ready Berezin grid.
berezin-eval        evaluate the transform at listed (t, s) points (CSV).
mass-profile        fiberwise kernel-mass profile for a w-axis base point.

Exit codes: 0 success, 1 computation/config failure, 2 inequality failure,
3 inconclusive probe.  Identical configurations produce byte-identical
artifacts.
"""

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bergman import MonomialNormTable
from .berezin import (
    ProductBerezinEvaluator,
    ReinhardtBerezinEvaluator,
    SeparableTerm,
    reinhardt_region,
    sup_norm_search,
)
from .domains import (
    BumpSymbol,
    DomainError,
    ProductDomainSpec,
    ReinhardtDomain2D,
    build_bump,
    default_profile,
    make_domain,
    parse_domain_config,
)
from .regularity import (
    BoundaryPath,
    bc_probe,
    coordinate_path,
    mass_profile,
    path_limit,
    radial_path,
    spherical_mean,
    test_functional,
)
from .toeplitz import EigenvalueTable, essential_norm, operator_norm, radial_symbol_eigenvalues

EXIT_OK = 0
EXIT_COMPUTE = 1
EXIT_INEQUALITY = 2
EXIT_INCONCLUSIVE = 3

CONFIG_KEYS = {
    "profile.alpha": 0.95,
    "profile.kappa": 4.0,
    "bump.a": 0.52,
    "bump.b": 0.93,
    "bump.width": 0.02,
    "caps.n": 60,
    "caps.m": 60,
    "tol": 1e-10,
}

# Probe-side defaults: near-boundary path points need far larger series caps
# than the emitted tables (the n-direction decays at rate t / alpha^2 there).
PROBE_N_CAP = 2560
PROBE_M_CAP = 512
GAMMA_TARGETS = (0.96, 0.97, 0.98)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    alpha: float = 0.95
    kappa: float = 4.0
    bump_a: float = 0.52
    bump_b: float = 0.93
    bump_width: float = 0.02
    n_cap: int = 60
    m_cap: int = 60
    tol: float = 1e-10
    out_dir: str = "out"
    extras: Dict[str, float] = field(default_factory=dict)

    @classmethod
    def load(cls, path: Optional[str], caps: Optional[str], tol: Optional[float],
             out_dir: Optional[str]) -> "RunConfig":
        cfg = cls()
        if path is not None:
            with open(path) as fh:
                raw = parse_domain_config(fh.read())
            for key in raw:
                if key not in CONFIG_KEYS:
                    raise ConfigError(f"config {path}: unknown field {key!r}")
            cfg.alpha = float(raw.get("profile.alpha", cfg.alpha))
            cfg.kappa = float(raw.get("profile.kappa", cfg.kappa))
            cfg.bump_a = float(raw.get("bump.a", cfg.bump_a))
            cfg.bump_b = float(raw.get("bump.b", cfg.bump_b))
            cfg.bump_width = float(raw.get("bump.width", cfg.bump_width))
            cfg.n_cap = int(raw.get("caps.n", cfg.n_cap))
            cfg.m_cap = int(raw.get("caps.m", cfg.m_cap))
            cfg.tol = float(raw.get("tol", cfg.tol))
        if caps is not None:
            try:
                n_s, m_s = caps.split(",")
                cfg.n_cap, cfg.m_cap = int(n_s), int(m_s)
            except ValueError as exc:
                raise ConfigError(f"--caps expects N,M, got {caps!r}") from exc
        if tol is not None:
            cfg.tol = tol
        if out_dir is not None:
            cfg.out_dir = out_dir
        if cfg.n_cap < 4 or cfg.m_cap < 4:
            raise ConfigError(f"caps must be >= 4, got {cfg.n_cap},{cfg.m_cap}")
        if cfg.tol <= 0:
            raise ConfigError(f"tol must be positive, got {cfg.tol}")
        return cfg

    def build_domain(self) -> Tuple[ReinhardtDomain2D, BumpSymbol]:
        profile = default_profile(self.alpha, self.kappa)
        bump = build_bump(self.bump_a, self.bump_b, self.bump_width)
        return make_domain(profile), bump

    def describe(self) -> dict:
        return {
            "profile.alpha": self.alpha,
            "profile.kappa": self.kappa,
            "bump.a": self.bump_a,
            "bump.b": self.bump_b,
            "bump.width": self.bump_width,
            "caps.n": self.n_cap,
            "caps.m": self.m_cap,
            "tol": self.tol,
        }


# ---------------------------------------------------------------------------
# Symbol mini-grammar: sums of products of constants, abs2(z1), abs2(z2),
# and the bump preset bump(z1) / bump(z2).
# ---------------------------------------------------------------------------

_FACTOR_NAMES = ("abs2(z1)", "abs2(z2)", "bump(z1)", "bump(z2)")


@dataclass(frozen=True)
class SymbolTerm:
    coefficient: float
    powers: Tuple[int, int, int, int]  # abs2_z1, abs2_z2, bump_z1, bump_z2


class SymbolExpr:
    """Parsed separable symbol: sum of coefficient * factor products."""

    def __init__(self, text: str, terms: Sequence[SymbolTerm]):
        self.text = text
        self.terms = tuple(terms)

    def radial_in_z1(self) -> bool:
        return all(t.powers[1] == 0 and t.powers[3] == 0 for t in self.terms)

    def as_radial_fn(self, bump: Optional[BumpSymbol]):
        """psi(r) with r = |z1|, for symbols depending on z1 only."""
        if not self.radial_in_z1():
            raise ConfigError(f"symbol {self.text!r} is not radial in z1")
        terms = self.terms

        def psi(r):
            r = np.asarray(r, dtype=float)
            out = np.zeros_like(r)
            for t in terms:
                val = np.full_like(r, t.coefficient)
                if t.powers[0]:
                    val = val * r ** (2 * t.powers[0])
                if t.powers[2]:
                    if bump is None:
                        raise ConfigError("symbol uses bump(z1) but no bump is configured")
                    val = val * np.asarray(bump(r), dtype=float) ** t.powers[2]
                out = out + val
            return out

        return psi

    def separable_terms(self, bump: Optional[BumpSymbol]) -> List[SeparableTerm]:
        """Per-factor callables for the bidisc backend."""
        out = []
        for t in self.terms:
            factors = []
            for k in range(2):
                p_abs = t.powers[k]
                p_bump = t.powers[2 + k]
                if p_abs == 0 and p_bump == 0:
                    factors.append(None)
                    continue
                if p_bump and bump is None:
                    raise ConfigError("symbol uses a bump preset but no bump is configured")

                def fn(x, p_abs=p_abs, p_bump=p_bump):
                    val = np.ones_like(np.abs(x))
                    if p_abs:
                        val = val * np.abs(x) ** (2 * p_abs)
                    if p_bump:
                        val = val * np.asarray(bump(np.abs(x)), dtype=float) ** p_bump
                    return val

                factors.append(fn)
            out.append(SeparableTerm(t.coefficient, tuple(factors)))
        return out

    def value_at(self, point, bump: Optional[BumpSymbol]) -> float:
        z1, z2 = complex(point[0]), complex(point[1])
        total = 0.0
        for t in self.terms:
            val = t.coefficient
            if t.powers[0]:
                val *= abs(z1) ** (2 * t.powers[0])
            if t.powers[1]:
                val *= abs(z2) ** (2 * t.powers[1])
            if t.powers[2]:
                val *= float(bump(np.array([abs(z1)]))[0]) ** t.powers[2]
            if t.powers[3]:
                val *= float(bump(np.array([abs(z2)]))[0]) ** t.powers[3]
            total += val
        return total


def parse_symbol(text: str) -> SymbolExpr:
    """Parse the mini-grammar: e.g. "1-abs2(z1)", "0.5*abs2(z1)*abs2(z2)+1"."""
    s = text.replace(" ", "")
    if not s:
        raise ConfigError("empty symbol expression")
    # split into signed terms at top level (parentheses only in factor names)
    pieces: List[str] = []
    depth = 0
    cur = ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur not in ("", "+", "-"):
            pieces.append(cur)
            cur = ch
            continue
        cur += ch
    pieces.append(cur)

    terms = []
    for piece in pieces:
        sign = 1.0
        body = piece
        while body and body[0] in "+-":
            if body[0] == "-":
                sign = -sign
            body = body[1:]
        if not body:
            raise ConfigError(f"dangling sign in symbol {text!r}")
        coefficient = sign
        powers = [0, 0, 0, 0]
        for factor in body.split("*"):
            if factor in _FACTOR_NAMES:
                powers[_FACTOR_NAMES.index(factor)] += 1
                continue
            try:
                coefficient *= float(factor)
            except ValueError as exc:
                raise ConfigError(
                    f"symbol {text!r}: unknown factor {factor!r} "
                    f"(allowed: numbers, {', '.join(_FACTOR_NAMES)})"
                ) from exc
        terms.append(SymbolTerm(coefficient, tuple(powers)))
    return SymbolExpr(text, terms)


# ---------------------------------------------------------------------------
# Shared output helpers (deterministic bytes)
# ---------------------------------------------------------------------------


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_csv(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _fmt(x) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# reproduce-example
# ---------------------------------------------------------------------------


def _gamma_limit_survey(evaluator, profile, targets, steps: int):
    """Path limits of the transform at strongly pseudoconvex tail targets.

    Returns (per-target records, sup of |limit estimates|).  When a path's
    diagnostics never settle, the largest still-certified sample value is
    used as a conservative stand-in (the samples decrease toward the limit)
    and the record says so.
    """
    records = []
    sup_gamma = 0.0
    for r0 in targets:
        h0 = float(profile(np.array([float(r0)]))[0])
        res = path_limit(evaluator, radial_path((float(r0), h0), "radial"), steps=steps)
        if res.converged:
            estimate = abs(res.limit)
            kind = "extrapolated"
        elif res.samples:
            estimate = max(abs(v) for _, _, v in res.samples[-2:])
            kind = "last-certified-value"
        else:
            estimate = math.inf
            kind = "unreachable"
        sup_gamma = max(sup_gamma, estimate)
        records.append(
            {
                "target_r": float(r0),
                "target_h": h0,
                "limit_estimate": estimate,
                "estimate_kind": kind,
                "model": res.model,
                "converged": res.converged,
                "n_valid": res.n_valid,
                "reason": res.reason,
                "samples": [[k, u, v] for k, u, v in res.samples],
            }
        )
    return records, sup_gamma


def cmd_reproduce_example(args) -> int:
    t_start = time.time()
    cfg = RunConfig.load(args.config, args.caps, args.tol, args.out)
    if args.probe_caps is not None:
        try:
            pn, pm = (int(x) for x in args.probe_caps.split(","))
        except ValueError:
            print(f"--probe-caps expects N,M, got {args.probe_caps!r}", file=sys.stderr)
            return EXIT_COMPUTE
    else:
        pn, pm = PROBE_N_CAP, PROBE_M_CAP

    os.makedirs(cfg.out_dir, exist_ok=True)
    domain, bump = cfg.build_domain()

    eig = EigenvalueTable.build(domain.profile, bump, cfg.n_cap, cfg.m_cap)
    op_norm, n0 = operator_norm(eig)
    ess_norm = essential_norm(eig)
    sup_chi = bump.sup_norm()

    probe_norms = MonomialNormTable.build(domain, pn, pm)
    probe_eig = EigenvalueTable.build(domain.profile, bump, pn, pm)
    evaluator = ReinhardtBerezinEvaluator(probe_eig.values, probe_norms)

    search = sup_norm_search(evaluator, reinhardt_region(probe_norms))
    interior_sup = search.sup

    gamma_records, gamma_sup = _gamma_limit_survey(
        evaluator, domain.profile, args.gamma_targets, steps=12
    )

    margins = {
        "gamma_le_interior": interior_sup - gamma_sup,
        "interior_lt_essential": ess_norm - interior_sup,
        "essential_eq_operator": abs(ess_norm - op_norm),
        "operator_lt_sup_chi": sup_chi - op_norm,
    }
    failed_pairs = []
    if margins["gamma_le_interior"] < 0.0:
        failed_pairs.append("gamma_sup <= interior_sup")
    if margins["interior_lt_essential"] <= 1e-6:
        failed_pairs.append("interior_sup < essential_norm")
    if margins["essential_eq_operator"] != 0.0:
        failed_pairs.append("essential_norm == operator_norm")
    if margins["operator_lt_sup_chi"] <= 1e-6:
        failed_pairs.append("operator_norm < sup_chi")
    chain_ok = not failed_pairs

    summary = {
        "config": cfg.describe(),
        "probe_caps": {"n": pn, "m": pm},
        "logconvexity": {
            "verdict": domain.logconvex,
            "report": domain.logconvex_report,
        },
        "bump_moments": {"int_chi_r": bump.moment_r, "int_chi_r3": bump.moment_r3},
        "chain": {
            "gamma_sup": gamma_sup,
            "interior_sup": interior_sup,
            "essential_norm": ess_norm,
            "operator_norm": op_norm,
            "sup_chi": sup_chi,
        },
        "margins": margins,
        "chain_holds": chain_ok,
        "n0": n0,
        "interior_search": {
            "sup": search.sup,
            "argmax": [search.argmax[0], search.argmax[1]],
            "resolution": search.resolution,
            "evaluated": search.evaluated,
            "skipped": search.skipped,
        },
        "gamma_probes": gamma_records,
    }
    _write_json(os.path.join(cfg.out_dir, "example_summary.json"), summary)

    order = ["gamma_sup", "interior_sup", "essential_norm", "operator_norm", "sup_chi"]
    print("  ".join(f"{k}={summary['chain'][k]:.6f}" for k in order))
    print(f"runtime: {time.time() - t_start:.1f}s")
    if not chain_ok:
        print(f"inequality chain FAILED at: {', '.join(failed_pairs)}", file=sys.stderr)
        return EXIT_INEQUALITY
    print("inequality chain holds with margins > 1e-6")
    return EXIT_OK


# ---------------------------------------------------------------------------
# probe
# ---------------------------------------------------------------------------


def _parse_target(text: str) -> Tuple[complex, complex]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"--target expects re1,im1,re2,im2, got {text!r}") from exc
    if len(vals) != 4:
        raise ConfigError(f"--target expects 4 comma-separated reals, got {len(vals)}")
    return complex(vals[0], vals[1]), complex(vals[2], vals[3])


def _probe_paths(target, names: Sequence[str], lateral: float = 0.3):
    paths = []
    boundary_idx = 0 if abs(abs(target[0]) - 1.0) < 1e-9 else 1
    lateral_idx = 1 - boundary_idx

    def slanted_fn(u: float):
        coords = list(target)
        coords[boundary_idx] = (1.0 - u) * coords[boundary_idx]
        c = coords[lateral_idx]
        # move sideways too: off-axis targets are pulled inward, on-axis
        # ones pushed off the axis (e.g. (0, 1) approached along (0.3u, 1-u))
        coords[lateral_idx] = c * (1.0 - lateral * u) if abs(c) > 1e-12 else lateral * u
        return tuple(coords)

    for name in names:
        if name == "normal":
            paths.append(coordinate_path(target, boundary_idx, "normal"))
        elif name == "radial":
            paths.append(radial_path(target, "radial"))
        elif name == "slanted":
            paths.append(BoundaryPath(tuple(map(complex, target)), slanted_fn, "slanted"))
        else:
            raise ConfigError(f"unknown path preset {name!r} (normal|radial|slanted)")
    return paths


def cmd_probe(args) -> int:
    cfg = RunConfig.load(args.config, args.caps, args.tol, args.out)
    os.makedirs(cfg.out_dir, exist_ok=True)
    symbol = parse_symbol(args.symbol)
    target = _parse_target(args.target)
    path_names = [p.strip() for p in args.paths.split(",") if p.strip()]
    if len(path_names) < 2:
        raise ConfigError("--paths needs at least two presets")

    if args.domain == "bidisc":
        spec = ProductDomainSpec.bidisc()
        evaluator = ProductBerezinEvaluator(spec, symbol.separable_terms(None))
        symbol_value = symbol.value_at(target, None)
        caps_note = {"backend": "product-tensor", "margin": 0.999}
    elif args.domain == "example":
        domain, bump = cfg.build_domain()
        if not symbol.radial_in_z1():
            raise ConfigError(
                "example-domain probes support symbols radial in z1 only"
            )
        psi = symbol.as_radial_fn(bump)
        pn, pm = (cfg.n_cap, cfg.m_cap) if args.caps else (64, 3000)
        norms = MonomialNormTable.build(domain, pn, pm)
        diag = radial_symbol_eigenvalues(domain.profile, psi, pn, pm)
        evaluator = ReinhardtBerezinEvaluator(diag, norms)
        symbol_value = symbol.value_at(target, bump)
        caps_note = {"backend": "reinhardt-series", "n": pn, "m": pm, "margin": 0.999}
    else:
        raise ConfigError(f"unknown domain {args.domain!r} (example|bidisc)")

    paths = _probe_paths(target, path_names)
    report = bc_probe(
        evaluator, target, paths, symbol_value=symbol_value,
        steps=args.steps, caps=caps_note,
    )
    payload = report.to_dict()
    payload["symbol"] = symbol.text
    payload["domain"] = args.domain
    _write_json(os.path.join(cfg.out_dir, "probe_report.json"), payload)
    rows = []
    for res in report.path_results:
        for k, u, v in res.samples:
            rows.append([res.label, k, _fmt(u), _fmt(v)])
    _write_csv(
        os.path.join(cfg.out_dir, "probe_samples.csv"),
        ["path", "k", "u", "value"],
        rows,
    )
    print(f"verdict: {report.verdict}"
          + (f"  (limits match symbol: {report.matches_symbol})"
             if report.matches_symbol is not None else ""))
    return EXIT_OK if report.verdict != "inconclusive" else EXIT_INCONCLUSIVE


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


def cmd_tables(args) -> int:
    cfg = RunConfig.load(args.config, args.caps, args.tol, args.out)
    os.makedirs(cfg.out_dir, exist_ok=True)
    domain, bump = cfg.build_domain()
    norms = MonomialNormTable.build(domain, cfg.n_cap, cfg.m_cap)
    eig = EigenvalueTable.build(domain.profile, bump, cfg.n_cap, cfg.m_cap)

    norms.to_csv(os.path.join(cfg.out_dir, "monomial_norms.csv"))
    eig.to_csv(os.path.join(cfg.out_dir, "eigenvalues.csv"))
    summary = eig.summary_dict()
    summary["config"] = cfg.describe()
    _write_json(os.path.join(cfg.out_dir, "eigenvalues_summary.json"), summary)

    evaluator = ReinhardtBerezinEvaluator(eig.values, norms)
    region = reinhardt_region(norms)
    step = 0.05
    t_vals = np.arange(0.0, region.t_max + step / 2, step)
    s_vals = np.arange(0.0, float(np.max(region.s_max(t_vals))) + step / 2, step)
    values, ok = evaluator.evaluate_grid(t_vals, s_vals)
    smax = region.s_max(t_vals)
    rows = []
    for i, t in enumerate(t_vals):
        for j, s in enumerate(s_vals):
            if s <= smax[i] + 1e-15:
                rows.append([_fmt(t), _fmt(s), _fmt(values[i, j]), int(not ok[i, j])])
    _write_csv(
        os.path.join(cfg.out_dir, "berezin_grid.csv"),
        ["t", "s", "value", "residual_flag"],
        rows,
    )
    print(f"wrote tables for caps {cfg.n_cap}x{cfg.m_cap} to {cfg.out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# berezin-eval
# ---------------------------------------------------------------------------


def cmd_berezin_eval(args) -> int:
    cfg = RunConfig.load(args.config, args.caps, args.tol, args.out)
    os.makedirs(cfg.out_dir, exist_ok=True)
    domain, bump = cfg.build_domain()
    norms = MonomialNormTable.build(domain, cfg.n_cap, cfg.m_cap)
    eig = EigenvalueTable.build(domain.profile, bump, cfg.n_cap, cfg.m_cap)
    evaluator = ReinhardtBerezinEvaluator(eig.values, norms)

    rows = []
    for chunk in args.points.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            t_s = [float(x) for x in chunk.split(",")]
            t, s = t_s
        except ValueError as exc:
            raise ConfigError(f"--points chunk {chunk!r} is not 't,s'") from exc
        ev = evaluator.evaluate_ts(t, s)
        rows.append([_fmt(t), _fmt(s), _fmt(ev.value), int(not ev.ok)])
    path = os.path.join(cfg.out_dir, "berezin_eval.csv")
    _write_csv(path, ["t", "s", "value", "residual_flag"], rows)
    for row in rows:
        print(",".join(str(c) for c in row))
    return EXIT_OK


# ---------------------------------------------------------------------------
# mass-profile
# ---------------------------------------------------------------------------


def cmd_mass_profile(args) -> int:
    cfg = RunConfig.load(args.config, args.caps, args.tol, args.out)
    os.makedirs(cfg.out_dir, exist_ok=True)
    domain, _ = cfg.build_domain()
    m_cap = max(cfg.m_cap, args.m_cap)
    norms = MonomialNormTable.build(domain, 8, m_cap)
    profile = mass_profile(norms, args.t)
    means = spherical_mean(profile, profile.grid[1:])
    tf = test_functional(profile, args.eps)
    payload = profile.to_dict()
    payload.update(
        {
            "test_functional": {"eps": args.eps, "value": tf},
            "spherical_mean_nondecreasing": bool(np.all(np.diff(means) >= -1e-8)),
        }
    )
    _write_json(os.path.join(cfg.out_dir, "mass_profile.json"), payload)
    _write_csv(
        os.path.join(cfg.out_dir, "mass_profile.csv"),
        ["r", "mu", "spherical_mean"],
        (
            [_fmt(r), _fmt(v), _fmt(2.0 * math.pi * r * v)]
            for r, v in zip(profile.grid, profile.values)
        ),
    )
    print(
        f"total mass {profile.total_mass:.9f}, "
        f"test functional {tf:.6f} (eps={args.eps})"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _add_common(parser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--out", help="output directory (default: out)")
    parser.add_argument("--caps", help="table caps as N,M")
    parser.add_argument("--tol", type=float, help="quadrature tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="berezinlab",
        description="Bergman kernels, Berezin transforms, and radial Toeplitz "
        "spectra on Reinhardt and product domains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reproduce-example", help="check the norm inequality chain")
    _add_common(p)
    p.add_argument("--probe-caps", help="series caps N,M for near-boundary probes")
    p.add_argument(
        "--gamma-targets",
        type=lambda s: tuple(float(x) for x in s.split(",")),
        default=GAMMA_TARGETS,
        help="radial positions of strongly pseudoconvex probe targets",
    )
    p.set_defaults(fn=cmd_reproduce_example)

    p = sub.add_parser("probe", help="boundary path-limit probe")
    _add_common(p)
    p.add_argument("--domain", required=True, choices=("example", "bidisc"))
    p.add_argument("--symbol", required=True, help="e.g. 'abs2(z1)' or '1-abs2(z1)'")
    p.add_argument("--target", required=True, help="re1,im1,re2,im2")
    p.add_argument("--paths", default="normal,slanted", help="comma list of presets")
    p.add_argument("--steps", type=int, default=9)
    p.set_defaults(fn=cmd_probe)

    p = sub.add_parser("tables", help="export norm/eigenvalue/transform tables")
    _add_common(p)
    p.set_defaults(fn=cmd_tables)

    p = sub.add_parser("berezin-eval", help="evaluate the transform at points")
    _add_common(p)
    p.add_argument("--points", required=True, help="semicolon list of t,s pairs")
    p.set_defaults(fn=cmd_berezin_eval)

    p = sub.add_parser("mass-profile", help="fiberwise kernel mass for q=(0,t)")
    _add_common(p)
    p.add_argument("--t", type=float, default=0.99, help="base point modulus")
    p.add_argument("--eps", type=float, default=0.2, help="test functional radius")
    p.add_argument("--m-cap", type=int, default=3000, dest="m_cap")
    p.set_defaults(fn=cmd_mass_profile)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except Exception as exc:  # computation failures map to exit 1
        print(f"computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    raise SystemExit(main())
