"""Representation extraction and integral-ratio theorem checks.

A finite-order function admits the representation
``U(x) = exp(alpha(x) + eps(x) * integral_b^x beta(t)/t dt)`` with
``alpha/log x -> 0``, ``eps -> 1`` and ``beta -> rho``; the module extracts
the triple constructively (``beta = log U / log x``, ``eps`` the matching
quotient, ``alpha = 0``), switching to the ``V(x) = x U(x)`` construction
when the order vanishes. Rapid-decay and rapid-growth members instead get a
single exponent function ``alpha`` with ``alpha/log x -> inf``.

The cumulative integrals ``V_r(x) = integral_b^x t^r U dt`` and
``W_r(x) = integral_x^inf t^r U dt`` drive the generalized integral-ratio
checks (branches selected by the sign of rho + r) and the named balance
conditions C1r/C2r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ClassMismatch, DivergentTail, ParamError, SingularDenominator
from .handles import LOG2, FunctionHandle
from .labels import TAG_M_INF, TAG_M_NEG_INF
from .order import (
    DEFAULT_CLASS_TOL,
    ConditionReport,
    GridSpec,
    IndexEstimate,
    classify,
    probe_integral_convergence,
    rv_ratio_test,
    windowed_limit,
)
from .quadrature import cell_log_masses, logsumexp

# |rho| below this uses the vanishing-order representation construction
KAPPA_ZERO_EPS = 0.02

_DENOM_FLOOR = 1e-6


# ---------------------------------------------------------------------------
# cumulative integrals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CumulativeIntegral:
    """Log-space cumulative integral of t**r * U(t), forward or tail kind."""

    kind: str  # "V" (from b) or "W" (to infinity)
    r: float
    b: float
    edges_u: np.ndarray
    log_values: np.ndarray  # at edges; monotone by construction
    source: FunctionHandle

    def log_value(self, x) -> np.ndarray:
        """log integral at arbitrary x inside the grid, exact cell splits."""
        xa = np.asarray(x, dtype=float)
        u = np.log(xa)
        if np.any(u < self.edges_u[0] - 1e-12) or np.any(u > self.edges_u[-1] + 1e-12):
            raise ParamError(f"{self.kind}_r query outside integration range")
        u = np.clip(u, self.edges_u[0], self.edges_u[-1])
        idx = np.clip(np.searchsorted(self.edges_u, u, side="right") - 1, 0,
                      self.edges_u.size - 2)
        out = np.empty(u.shape if u.ndim else (1,))
        uu = np.atleast_1d(u)
        ii = np.atleast_1d(idx)
        for k in range(uu.size):
            i = int(ii[k])
            if self.kind == "V":
                base = self.log_values[i]
                part = self._partial(self.edges_u[i], uu[k])
            else:
                base = self.log_values[i + 1]
                part = self._partial(uu[k], self.edges_u[i + 1])
            out[k] = np.logaddexp(base, part)
        return out.reshape(np.shape(x)) if np.ndim(x) else float(out[0])

    def _partial(self, u0: float, u1: float) -> float:
        if u1 <= u0:
            return -math.inf
        r = self.r

        def log_f(xx):
            return (r + 1.0) * np.log(xx) + np.asarray(self.source.log_at(xx), dtype=float)

        return float(cell_log_masses(log_f, np.array([u0, u1]))[0])

    def as_handle(self) -> FunctionHandle:
        """The cumulative integral as an evaluable handle (for classification)."""
        lo = self.edges_u[0] + 0.05 if self.kind == "V" else self.edges_u[0]

        def log_at_logx(u):
            return self.log_value(np.exp(np.asarray(u, dtype=float)))

        return FunctionHandle(
            name=f"{self.kind}_{self.r:g}[{self.source.name}]",
            log_at_logx=log_at_logx,
            log_domain=(float(lo), float(self.edges_u[-1])),
            differentiable=False,
        )


def cumulative_integral(U: FunctionHandle, kind: str, r: float, b: float,
                        grid: GridSpec | None = None,
                        cells_per_octave: int = 512) -> CumulativeIntegral:
    """Build V_r (kind="V") or W_r (kind="W") on an octave-aligned log grid."""
    grid = grid or GridSpec()
    if kind not in ("V", "W"):
        raise ParamError("kind must be 'V' or 'W'")
    if b <= 0:
        raise ParamError("cumulative integral requires b > 0")
    u_b = math.log(b)
    u_max = grid.log10_x_max * math.log(10.0)
    if u_max <= u_b:
        raise ParamError("integration range is empty")
    m = cells_per_octave

    def log_f(xx):
        return (r + 1.0) * np.log(xx) + np.asarray(U.log_at(xx), dtype=float)

    n_cells = int(math.ceil((u_max - u_b) / (LOG2 / m)))
    edges = u_b + np.arange(n_cells + 1) * (LOG2 / m)
    cells = cell_log_masses(log_f, edges)
    if kind == "V":
        vals = np.empty(edges.size)
        vals[0] = -math.inf
        np.logaddexp.accumulate(cells, out=vals[1:])
        return CumulativeIntegral("V", r, b, edges, vals, U)
    # tail kind: precondition, then extend until increments are negligible
    verdict = probe_integral_convergence(U, r + 1.0, grid)
    if not verdict.is_convergent:
        raise DivergentTail(
            f"tail integral of t**{r:g} * {U.name} does not converge ({verdict.tag})"
        )
    ext_edges = [edges]
    ext_cells = [cells]
    total = logsumexp(cells)
    u_cur = edges[-1]
    for _ in range(1500):
        nxt = u_cur + np.arange(m + 1) * (LOG2 / m)
        cc = cell_log_masses(log_f, nxt)
        inc = logsumexp(cc)
        ext_edges.append(nxt[1:])
        ext_cells.append(cc)
        total = np.logaddexp(total, inc)
        u_cur = nxt[-1]
        if inc < total + math.log(1e-13):
            break
    else:
        raise DivergentTail(f"tail integral of t**{r:g} * {U.name}: no decay reached")
    all_edges = np.concatenate([ext_edges[0]] + [e for e in ext_edges[1:]])
    all_cells = np.concatenate(ext_cells)
    rev = np.empty(all_cells.size)
    np.logaddexp.accumulate(all_cells[::-1], out=rev)
    vals = np.empty(all_edges.size)
    vals[:-1] = rev[::-1]
    vals[-1] = -math.inf
    return CumulativeIntegral("W", r, b, all_edges, vals, U)


# ---------------------------------------------------------------------------
# generalized integral-ratio checks
# ---------------------------------------------------------------------------


def _clipped_grid(grid: GridSpec, b: float) -> GridSpec:
    lo = max(grid.log10_x_min, math.log10(max(4.0 * b, 10.0)))
    if lo >= grid.log10_x_max - 0.5:
        raise ParamError("grid too short beyond the base point b")
    return GridSpec(log10_x_min=lo, log10_x_max=grid.log10_x_max,
                    points=grid.points, windows=grid.windows)


def karamata_limit(U: FunctionHandle, r: float, b: float, side: str,
                   grid: GridSpec | None = None) -> IndexEstimate:
    """Windowed limit of log(cumulative)/log x.

    side "lower" uses V_{r-1} (integral from b), side "upper" uses W_{r-1}
    (tail integral, requires convergence).
    """
    grid = grid or GridSpec()
    if side not in ("lower", "upper"):
        raise ParamError("side must be 'lower' or 'upper'")
    ci = cumulative_integral(U, "V" if side == "lower" else "W", r - 1.0, b, grid)
    sub = _clipped_grid(grid, b)
    xs = sub.xs()
    ys = np.asarray(ci.log_value(xs), dtype=float) / np.log(xs)
    return windowed_limit(xs, ys, sub)


def check_condition(U: FunctionHandle, which: str, r: float, b: float,
                    grid: GridSpec | None = None,
                    tol: float = DEFAULT_CLASS_TOL) -> ConditionReport:
    """Balance condition: log(cumulative)/log x - log U/log x -> r."""
    grid = grid or GridSpec()
    if which not in ("C1r", "C2r"):
        raise ParamError("which must be 'C1r' or 'C2r'")
    ci = cumulative_integral(U, "V" if which == "C1r" else "W", r - 1.0, b, grid)
    sub = _clipped_grid(grid, b)
    xs = sub.xs()
    d = (np.asarray(ci.log_value(xs), dtype=float)
         - np.asarray(U.log_at(xs), dtype=float)) / np.log(xs)
    est = windowed_limit(xs, d, sub)
    resid = abs(est.value - r) if math.isfinite(est.value) else math.inf
    return ConditionReport(
        condition=which,
        passed=bool(resid <= tol),
        measured={"limit": est.value, "target": r, "residual": resid,
                  "spread": est.spread, "trend": est.trend.value},
        tolerance=tol,
    )


def karamata_theorem_report(U: FunctionHandle, r: float, b: float,
                            grid: GridSpec | None = None,
                            tol: float = DEFAULT_CLASS_TOL) -> ConditionReport:
    """Run the integral-ratio branch matching the sign of rho + r.

    Branch K1* (rho + r > 0) and K3* (rho + r = 0) check the growth of the
    integral from b plus condition C1r; K2* (rho + r < 0) checks the tail
    integral plus C2r. On the boundary branch the scaling-ratio test result
    is attached: the limit holding does not make U ratio-regular.
    """
    grid = grid or GridSpec()
    label = classify(U, grid, tol)
    if not label.is_m:
        raise ClassMismatch(f"{U.name}: classified {label}, finite order required")
    s = label.rho + r
    measured: dict = {"rho": label.rho, "r": r, "target": s}
    if s > tol:
        branch = "K1*"
        limit = karamata_limit(U, r, b, "lower", grid)
        cond = check_condition(U, "C1r", r, b, grid, tol)
    elif s < -tol:
        branch = "K2*"
        limit = karamata_limit(U, r, b, "upper", grid)
        cond = check_condition(U, "C2r", r, b, grid, tol)
    else:
        branch = "K3*"
        s = 0.0
        measured["target"] = 0.0
        limit = karamata_limit(U, r, b, "lower", grid)
        cond = check_condition(U, "C1r", r, b, grid, tol)
        rv = rv_ratio_test(U, grid=grid, tol=tol)
        measured["ratio_regular"] = rv.passed
    limit_ok = math.isfinite(limit.value) and abs(limit.value - s) <= tol
    measured.update({
        "branch": branch,
        "limit": limit.value,
        "limit_residual": abs(limit.value - s) if math.isfinite(limit.value) else math.inf,
        "condition": cond.measured,
        "condition_passed": cond.passed,
    })
    return ConditionReport(
        condition=branch,
        passed=bool(limit_ok and cond.passed),
        measured=measured,
        tolerance=tol,
    )


def peter_paul_partial_integral(x: float, a: int) -> float:
    """Closed form of the dyadic step tail's integral from 2**a to x.

    For 2**a < 2**n <= x < 2**(n+1) the integral equals
    n - a + x * 2**(-n) - 1; serves as the quadrature oracle.
    """
    if x < 4.0:
        raise ParamError("closed form requires x >= 4")
    if a < 0 or int(a) != a:
        raise ParamError("a must be a natural number")
    n = math.frexp(x)[1] - 1
    if a >= n:
        raise ParamError(f"requires 2**a < 2**n <= x (a={a}, n={n})")
    return (n - a) + x * math.ldexp(1.0, -n) - 1.0


# ---------------------------------------------------------------------------
# representation extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RepresentationTriple:
    """Constructive exponent decomposition of a finite-order function."""

    b: float
    b_effective: float
    kappa_zero_mode: bool
    alpha_fn: Callable
    beta_fn: Callable
    eps_fn: Callable
    beta_integral: Callable  # x -> integral_{b_eff}^x beta(t)/t dt
    rho: float


class _SignedLogIntegrator:
    """Trapezoid cumulative of f(e^u) du for a bounded signed integrand."""

    def __init__(self, f_of_u, u_lo: float, u_hi: float, n: int):
        self.us = np.linspace(u_lo, u_hi, n)
        vals = np.asarray(f_of_u(self.us), dtype=float)
        du = np.diff(self.us)
        self.cum = np.concatenate(
            [[0.0], np.cumsum(0.5 * (vals[1:] + vals[:-1]) * du)]
        )
        self.vals = vals

    def at_u(self, u):
        ua = np.asarray(u, dtype=float)
        return np.interp(ua, self.us, self.cum)


def extract_representation(U: FunctionHandle, b: float = 2.0,
                           grid: GridSpec | None = None,
                           tol: float = DEFAULT_CLASS_TOL) -> RepresentationTriple:
    """Extract (alpha, beta, eps) with beta = log U / log x by construction.

    For orders away from zero: eps(x) = log U(x) / integral_b^x beta/t dt and
    alpha = 0. For vanishing order the construction runs on V(x) = x U(x)
    (whose order is 1) and folds the change back into alpha.
    """
    grid = grid or GridSpec()
    if b <= 1.0:
        raise ParamError("representation base point requires b > 1")
    label = classify(U, grid, tol)
    if not label.is_m:
        raise ClassMismatch(f"{U.name}: classified {label}, finite order required")
    rho = label.rho
    kappa_zero = abs(rho) <= KAPPA_ZERO_EPS
    u_b = math.log(b)
    u_max = grid.log10_x_max * math.log(10.0)
    n = max(grid.points, 2000) * 4

    def beta_u(u):
        ua = np.asarray(u, dtype=float)
        return np.asarray(U.log_at_u(ua), dtype=float) / ua

    if not kappa_zero:
        integ = _SignedLogIntegrator(beta_u, u_b, u_max, n)
        denom_edges = integ.cum
        ok = np.abs(denom_edges) > _DENOM_FLOOR
        if not ok.any():
            raise SingularDenominator(
                f"{U.name}: exponent integral below {_DENOM_FLOOR} on the whole range"
            )
        first = int(np.argmax(ok))
        b_eff = float(math.exp(integ.us[first])) if first > 0 else b
        if first > 0:
            integ = _SignedLogIntegrator(beta_u, math.log(b_eff), u_max, n)

        def beta_integral(x):
            return integ.at_u(np.log(np.asarray(x, dtype=float)))

        def eps_fn(x):
            xa = np.asarray(x, dtype=float)
            return np.asarray(U.log_at(xa), dtype=float) / beta_integral(xa)

        def alpha_fn(x):
            return np.zeros_like(np.asarray(x, dtype=float))

        def beta_fn(x):
            xa = np.asarray(x, dtype=float)
            return np.asarray(U.log_at(xa), dtype=float) / np.log(xa)

        return RepresentationTriple(
            b=b, b_effective=b_eff, kappa_zero_mode=False,
            alpha_fn=alpha_fn, beta_fn=beta_fn, eps_fn=eps_fn,
            beta_integral=beta_integral, rho=rho,
        )

    # vanishing order: run the construction on V(x) = x U(x), order 1
    def beta_v_u(u):
        ua = np.asarray(u, dtype=float)
        return (ua + np.asarray(U.log_at_u(ua), dtype=float)) / ua

    integ_v = _SignedLogIntegrator(beta_v_u, u_b, u_max, n)
    d = b
    log_d = u_b

    def denom_v(x):
        return integ_v.at_u(np.log(np.asarray(x, dtype=float)))

    def eps_fn(x):
        xa = np.asarray(x, dtype=float)
        log_v = np.log(xa) + np.asarray(U.log_at(xa), dtype=float)
        return log_v / denom_v(xa)

    def alpha_fn(x):
        xa = np.asarray(x, dtype=float)
        e = eps_fn(xa)
        return (e - 1.0) * np.log(xa) - e * log_d

    def beta_fn(x):
        xa = np.asarray(x, dtype=float)
        return np.asarray(U.log_at(xa), dtype=float) / np.log(xa)

    def beta_integral(x):
        xa = np.asarray(x, dtype=float)
        return denom_v(xa) - (np.log(xa) - log_d)

    return RepresentationTriple(
        b=b, b_effective=d, kappa_zero_mode=True,
        alpha_fn=alpha_fn, beta_fn=beta_fn, eps_fn=eps_fn,
        beta_integral=beta_integral, rho=rho,
    )


RECONSTRUCTION_RTOL = 1e-7


def verify_representation(U: FunctionHandle, rep: RepresentationTriple,
                          grid: GridSpec | None = None,
                          tol: float = DEFAULT_CLASS_TOL) -> ConditionReport:
    """Check pointwise reconstruction and the three exponent limits."""
    grid = grid or GridSpec()
    lo = max(grid.log10_x_min, math.log10(rep.b_effective) + 0.3)
    sub = GridSpec(log10_x_min=lo, log10_x_max=grid.log10_x_max,
                   points=grid.points, windows=grid.windows)
    xs = sub.xs()
    log_u = np.asarray(U.log_at(xs), dtype=float)
    recon = rep.alpha_fn(xs) + rep.eps_fn(xs) * rep.beta_integral(xs)
    resid = np.max(np.abs(log_u - recon) / np.maximum(1.0, np.abs(log_u)))
    alpha_est = windowed_limit(xs, rep.alpha_fn(xs) / np.log(xs), sub)
    eps_est = windowed_limit(xs, rep.eps_fn(xs), sub)
    beta_est = windowed_limit(xs, rep.beta_fn(xs), sub)
    ok = (
        resid <= RECONSTRUCTION_RTOL
        and abs(alpha_est.value) <= tol
        and abs(eps_est.value - 1.0) <= tol
        and abs(beta_est.value - rep.rho) <= tol
    )
    return ConditionReport(
        condition="REP-LIMITS",
        passed=bool(ok),
        measured={
            "reconstruction_residual": float(resid),
            "alpha_over_logx": alpha_est.value,
            "eps": eps_est.value,
            "beta": beta_est.value,
            "rho": rep.rho,
            "kappa_zero_mode": rep.kappa_zero_mode,
            "b_effective": rep.b_effective,
        },
        tolerance=tol,
    )


@dataclass(frozen=True)
class InfRepresentation:
    """Single-exponent form U = exp(-alpha) (decay) or exp(alpha) (growth)."""

    b: float
    sign: int  # +1 rapid decay, -1 rapid growth
    alpha_fn: Callable
    report: ConditionReport


def extract_representation_inf(U: FunctionHandle, b: float = 2.0,
                               grid: GridSpec | None = None,
                               tol: float = DEFAULT_CLASS_TOL) -> InfRepresentation:
    """Exponent function for rapid-decay/growth members; alpha/log x -> inf."""
    grid = grid or GridSpec()
    label = classify(U, grid, tol)
    if label.tag == TAG_M_INF:
        sign = +1
    elif label.tag == TAG_M_NEG_INF:
        sign = -1
    else:
        raise ClassMismatch(f"{U.name}: classified {label}, rapid class required")

    def alpha_fn(x):
        return -sign * np.asarray(U.log_at(np.asarray(x, dtype=float)), dtype=float)

    xs = grid.xs()
    est = windowed_limit(xs, alpha_fn(xs) / np.log(xs), grid)
    last_mean = float(np.mean(alpha_fn(xs[grid.window_slices()[-1]])
                              / np.log(xs[grid.window_slices()[-1]])))
    report = ConditionReport(
        condition="REP-INF",
        passed=bool(est.value == math.inf or last_mean > INF_ALPHA_FLOOR),
        measured={"alpha_over_logx_limit": est.value,
                  "alpha_over_logx_last_window": last_mean,
                  "class": label.tag},
        tolerance=INF_ALPHA_FLOOR,
    )
    return InfRepresentation(b=b, sign=sign, alpha_fn=alpha_fn, report=report)


INF_ALPHA_FLOOR = 100.0
