"""Evaluable positive functions with known asymptotic ground truth.

Everything evaluates in log space: a handle maps x > support_floor to
log U(x), so members that decay or grow faster than any power remain finite
on the whole probing range (x up to 1e300). Linear values are a derived
convenience and may legitimately overflow.

Step functions follow the right-continuity convention: at a jump point the
handle returns the new level.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, FormatError, ParamError, PositivityViolation, UnknownName
from .labels import ClassLabel

LOG2 = math.log(2.0)

# Largest log-argument we ever need: x up to ~1e300.
_U_MAX = 691.0

# Relative nudge pushing a query on a float-rounded breakpoint to the correct
# (right-continuous) side.
_EDGE_NUDGE = 1e-15


@dataclass(frozen=True)
class KnownTruth:
    """Ground-truth metadata attached to corpus members."""

    label: ClassLabel
    rho: float | None = None
    kappa: float | None = None
    mu: float | None = None
    nu: float | None = None
    is_tail: bool = False
    is_rv: bool | None = None

    def __post_init__(self) -> None:
        if self.rho is not None and math.isfinite(self.rho) and self.kappa is not None:
            if abs(self.kappa + self.rho) > 1e-12:
                raise ParamError("finite rho requires kappa == -rho")
        if self.is_tail and self.kappa is not None and self.kappa < 0:
            raise ParamError("a survival-function tail has kappa >= 0")


@dataclass(frozen=True)
class FunctionHandle:
    """Immutable positive function on (support_floor, inf), log-space view.

    ``log_at_logx`` is the primitive: u = log x -> log U(exp(u)). It must be
    vectorized over numpy arrays. ``log_at_x`` optionally overrides direct-x
    evaluation with an exact path (used by step functions to decide levels
    without an exp/log round trip). ``value_at_x`` optionally provides exact
    linear values.
    """

    name: str
    log_at_logx: Callable
    support_floor: float = 0.0
    truth: KnownTruth | None = None
    differentiable: bool = True
    log_at_x: Callable | None = None
    value_at_x: Callable | None = None
    # inclusive log-x evaluation range for table-backed handles
    log_domain: tuple[float, float] | None = None
    # jump locations of step functions (float-representable ones)
    jump_xs: tuple = ()

    def _check_x(self, x) -> None:
        xa = np.asarray(x, dtype=float)
        if np.any(~np.isfinite(xa)) or np.any(xa <= self.support_floor):
            raise DomainError(
                f"{self.name}: evaluation requires x > {self.support_floor}"
            )
        if self.log_domain is not None:
            lo, hi = self.log_domain
            u = np.log(xa)
            if np.any(u < lo - 1e-12) or np.any(u > hi + 1e-12):
                raise DomainError(f"{self.name}: x outside tabulated range")

    def log_at(self, x):
        """log U(x) for x > support_floor (scalar or array)."""
        self._check_x(x)
        if self.log_at_x is not None:
            return self.log_at_x(np.asarray(x, dtype=float))
        return self.log_at_logx(np.log(np.asarray(x, dtype=float)))

    def log_at_u(self, u):
        """log U(exp(u)); safe for u beyond float-representable x."""
        ua = np.asarray(u, dtype=float)
        if self.support_floor > 0.0 and np.any(ua <= math.log(self.support_floor)):
            raise DomainError(f"{self.name}: log-argument below support floor")
        if self.log_domain is not None:
            lo, hi = self.log_domain
            if np.any(ua < lo - 1e-12) or np.any(ua > hi + 1e-12):
                raise DomainError(f"{self.name}: log-argument outside tabulated range")
        return self.log_at_logx(ua)

    def value(self, x):
        """U(x) in linear space; exact channel when available."""
        self._check_x(x)
        if self.value_at_x is not None:
            return self.value_at_x(np.asarray(x, dtype=float))
        return np.exp(self.log_at(x))


def eval_log(handle: FunctionHandle, x: float) -> float:
    """log U(x) as a plain float; DomainError outside the handle's domain."""
    return float(handle.log_at(float(x)))


# ---------------------------------------------------------------------------
# corpus constructors
# ---------------------------------------------------------------------------


def make_power_tail(alpha: float) -> FunctionHandle:
    """U = 1 on (0,1), x**alpha on [1,inf)."""
    a = float(alpha)
    truth = KnownTruth(
        label=ClassLabel.m(a), rho=a, kappa=-a, mu=a, nu=a,
        is_tail=(a <= 0.0), is_rv=True,
    )
    return FunctionHandle(
        name=f"power_tail(alpha={a:g})",
        log_at_logx=lambda u: a * np.maximum(np.asarray(u, dtype=float), 0.0),
        truth=truth,
    )


def make_ramp_power(alpha: float) -> FunctionHandle:
    """U = x**alpha on all of (0,inf); vanishes at the origin for alpha > 0."""
    a = float(alpha)
    if a <= 0.0:
        raise ParamError("ramp_power requires alpha > 0")
    truth = KnownTruth(label=ClassLabel.m(a), rho=a, kappa=-a, mu=a, nu=a, is_rv=True)
    return FunctionHandle(
        name=f"ramp_power(alpha={a:g})",
        log_at_logx=lambda u: a * np.asarray(u, dtype=float),
        truth=truth,
    )


def make_pareto_tail(alpha: float) -> FunctionHandle:
    """Survival function x**(-alpha) on [1,inf), 1 below."""
    a = float(alpha)
    if a <= 0.0:
        raise ParamError("pareto_tail requires alpha > 0")
    h = make_power_tail(-a)
    return FunctionHandle(
        name=f"pareto_tail(alpha={a:g})",
        log_at_logx=h.log_at_logx,
        truth=h.truth,
    )


def _pp_level_from_x(x):
    # exact dyadic level: x in [2^n, 2^{n+1}) -> n, for any float x >= 1
    n = np.frexp(np.asarray(x, dtype=float))[1] - 1
    return np.maximum(n, 0)


def make_peter_paul() -> FunctionHandle:
    """Dyadic step tail: 2**(-n) on [2^n, 2^(n+1)), 1 below 2."""
    truth = KnownTruth(
        label=ClassLabel.m(-1.0), rho=-1.0, kappa=1.0, mu=-1.0, nu=-1.0,
        is_tail=True, is_rv=False,
    )

    def log_at_logx(u):
        ua = np.asarray(u, dtype=float)
        n = np.floor(ua / LOG2 + 1e-12)
        return -np.maximum(n, 0.0) * LOG2

    def log_at_x(x):
        return -_pp_level_from_x(x) * LOG2

    def value_at_x(x):
        return np.ldexp(1.0, -_pp_level_from_x(x))

    return FunctionHandle(
        name="peter_paul",
        log_at_logx=log_at_logx,
        log_at_x=log_at_x,
        value_at_x=value_at_x,
        truth=truth,
        differentiable=False,
        jump_xs=tuple(2.0 ** k for k in range(1, 996)),
    )


def _step_handle(name, bps_u, levels_log, truth):
    """Right-continuous step function from breakpoints in log-x space."""
    bps = np.asarray(bps_u, dtype=float)
    lv = np.asarray(levels_log, dtype=float)

    def log_at_logx(u):
        ua = np.asarray(u, dtype=float)
        i = np.searchsorted(bps, ua * (1.0 + _EDGE_NUDGE) + _EDGE_NUDGE, side="right")
        return np.where(i == 0, 0.0, lv[np.maximum(i - 1, 0)])

    jumps = tuple(float(math.exp(u)) for u in bps if u < 690.0)
    return FunctionHandle(
        name=name, log_at_logx=log_at_logx, truth=truth, differentiable=False,
        jump_xs=jumps,
    )


def make_oset_geometric(alpha: float, beta: float, x_a: float) -> FunctionHandle:
    """Step function with breakpoints x_n = x_a**((1+alpha)**n).

    Levels x_n**(alpha*(1+beta)); oscillates between two growth orders.
    """
    a, b, xa = float(alpha), float(beta), float(x_a)
    if a <= 0.0:
        raise ParamError("oset_geometric requires alpha > 0")
    if b == -1.0:
        raise ParamError("oset_geometric requires beta != -1")
    if xa <= 1.0:
        raise ParamError("oset_geometric requires x_a > 1")
    top = a * (1.0 + b)
    bottom = top / (1.0 + a)
    if 1.0 + b > 0:
        mu, nu = bottom, top
    else:
        mu, nu = top, bottom
    truth = KnownTruth(
        label=ClassLabel.oscillating(mu, nu), mu=mu, nu=nu,
        is_tail=(1.0 + b < 0), is_rv=False,
    )
    bps, lv = [], []
    n = 1
    while True:
        un = (1.0 + a) ** n * math.log(xa)
        if un > _U_MAX:
            break
        bps.append(un)
        lv.append(top * un)
        n += 1
    return _step_handle(
        f"oset_geometric(alpha={a:g},beta={b:g},x_a={xa:g})", bps, lv, truth
    )


# x_{n+1} = 2**(x_n/c) escapes to infinity only below the tangency constant.
TOWER_C_MAX = math.e * LOG2


def make_oset_tower(c: float, alpha: float) -> FunctionHandle:
    """Step function with tower breakpoints x_1 = 1, x_{n+1} = 2**(x_n/c)."""
    cc, a = float(c), float(alpha)
    if cc <= 0.0:
        raise ParamError("oset_tower requires c > 0")
    if a == 0.0:
        raise ParamError("oset_tower requires alpha != 0")
    if cc >= TOWER_C_MAX:
        raise ParamError(
            f"oset_tower requires c < e*log(2) ~ {TOWER_C_MAX:.4f}: "
            "the breakpoint recursion stalls at a fixed point otherwise"
        )
    if a > 0:
        mu, nu = a * cc, math.inf
    else:
        mu, nu = -math.inf, a * cc
    truth = KnownTruth(
        label=ClassLabel.oscillating(mu, nu), mu=mu, nu=nu,
        is_tail=(a < 0), is_rv=False,
    )
    bps, lv = [], []
    u = 0.0
    while u <= _U_MAX:
        bps.append(u)
        lv.append(a * math.exp(u) * LOG2)
        u = math.exp(u) * LOG2 / cc
    return _step_handle(f"oset_tower(c={cc:g},alpha={a:g})", bps, lv, truth)


def make_two_plus_sin() -> FunctionHandle:
    """U = 2 + sin(x): bounded oscillation, order 0, not ratio-regular."""
    truth = KnownTruth(
        label=ClassLabel.m(0.0), rho=0.0, kappa=0.0, mu=0.0, nu=0.0, is_rv=False
    )
    return FunctionHandle(
        name="two_plus_sin",
        log_at_logx=lambda u: np.log(2.0 + np.sin(np.exp(np.asarray(u, dtype=float)))),
        log_at_x=lambda x: np.log(2.0 + np.sin(np.asarray(x, dtype=float))),
        truth=truth,
    )


def make_x_pow_sin_x() -> FunctionHandle:
    """U = x**sin(x): the order ratio equals sin(x) and never settles."""
    truth = KnownTruth(
        label=ClassLabel.oscillating(-1.0, 1.0), mu=-1.0, nu=1.0, is_rv=False
    )

    def log_at_logx(u):
        ua = np.asarray(u, dtype=float)
        return np.sin(np.exp(ua)) * ua

    return FunctionHandle(
        name="x_pow_sin_x",
        log_at_logx=log_at_logx,
        log_at_x=lambda x: np.sin(np.asarray(x, dtype=float))
        * np.log(np.asarray(x, dtype=float)),
        truth=truth,
    )


def make_exp_neg() -> FunctionHandle:
    """U = exp(-x): decays faster than any power."""
    truth = KnownTruth(
        label=ClassLabel.m_inf(), kappa=math.inf, mu=-math.inf, nu=-math.inf,
        is_tail=True, is_rv=False,
    )
    return FunctionHandle(
        name="exp_neg",
        log_at_logx=lambda u: -np.exp(np.asarray(u, dtype=float)),
        log_at_x=lambda x: -np.asarray(x, dtype=float),
        truth=truth,
    )


def make_exp_pos() -> FunctionHandle:
    """U = exp(x): grows faster than any power."""
    truth = KnownTruth(
        label=ClassLabel.m_neg_inf(), kappa=-math.inf, mu=math.inf, nu=math.inf,
        is_rv=False,
    )
    return FunctionHandle(
        name="exp_pos",
        log_at_logx=lambda u: np.exp(np.asarray(u, dtype=float)),
        log_at_x=lambda x: np.asarray(x, dtype=float).copy(),
        truth=truth,
    )


def make_floor_log_tail() -> FunctionHandle:
    """Survival function exp(-floor(x) * log x): rapid decay, jumpy."""
    truth = KnownTruth(
        label=ClassLabel.m_inf(), kappa=math.inf, mu=-math.inf, nu=-math.inf,
        is_tail=True, is_rv=False,
    )

    def log_at_x(x):
        xa = np.asarray(x, dtype=float)
        n = np.floor(xa * (1.0 + 1e-13))
        return np.where(xa < 1.0, 0.0, -n * np.log(np.maximum(xa, 1.0)))

    return FunctionHandle(
        name="floor_log_tail",
        log_at_logx=lambda u: log_at_x(np.exp(np.minimum(np.asarray(u, dtype=float), 709.0))),
        log_at_x=log_at_x,
        truth=truth,
        differentiable=False,
    )


# beyond this integer the exceptional intervals are narrower than any float gap
_REMARK_N_MAX = 50


def make_remark7_mix() -> FunctionHandle:
    """exp(-x) except 1/x on the vanishing intervals (n, n + n**-n).

    The intervals shrink so fast that every geometric probing grid misses
    them; a targeted probe at n + n**-n / 2 exposes the 1/x branch.
    """
    truth = KnownTruth(
        label=ClassLabel.oscillating(-math.inf, -1.0),
        kappa=math.inf, mu=-math.inf, nu=-1.0, is_rv=False,
    )

    def log_at_x(x):
        xa = np.asarray(x, dtype=float)
        n = np.floor(xa)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            width = np.where(
                (n >= 1) & (n <= _REMARK_N_MAX), np.exp(-n * np.log(np.maximum(n, 1))), 0.0
            )
        inside = (n >= 1) & (xa > n) & (xa - n < width)
        return np.where(inside, -np.log(xa), -xa)

    return FunctionHandle(
        name="remark7_mix",
        log_at_logx=lambda u: log_at_x(np.exp(np.minimum(np.asarray(u, dtype=float), 709.0))),
        log_at_x=log_at_x,
        truth=truth,
        differentiable=False,
    )


def make_log_perturbed_power(alpha: float = -1.0, c: float = 1.0) -> FunctionHandle:
    """U = x**alpha * (1 + c / log x) for x >= e, frozen below e."""
    a, cc = float(alpha), float(c)
    if cc < 0.0 or 1.0 + cc <= 0.0:
        raise ParamError("log_perturbed_power requires c >= 0")
    truth = KnownTruth(
        label=ClassLabel.m(a), rho=a, kappa=-a, mu=a, nu=a,
        is_tail=(a < 0), is_rv=True,
    )

    def log_at_logx(u):
        ua = np.asarray(u, dtype=float)
        safe = np.maximum(ua, 1.0)
        return np.where(ua >= 1.0, a * ua + np.log1p(cc / safe), a + np.log1p(cc))

    return FunctionHandle(
        name=f"log_perturbed_power(alpha={a:g},c={cc:g})",
        log_at_logx=log_at_logx,
        truth=truth,
    )


_CATALOG: dict[str, Callable[..., FunctionHandle]] = {
    "power_tail": make_power_tail,
    "peter_paul": make_peter_paul,
    "oset_geometric": make_oset_geometric,
    "oset_tower": make_oset_tower,
    "two_plus_sin": make_two_plus_sin,
    "x_pow_sin_x": make_x_pow_sin_x,
    "exp_neg": make_exp_neg,
    "exp_pos": make_exp_pos,
    "floor_log_tail": make_floor_log_tail,
    "remark7_mix": make_remark7_mix,
    "pareto_tail": make_pareto_tail,
    "log_perturbed_power": make_log_perturbed_power,
    "ramp_power": make_ramp_power,
}


def catalog_names() -> list[str]:
    return sorted(_CATALOG)


def make_named(name: str, params: dict | None = None) -> FunctionHandle:
    """Build a catalog member by name; UnknownName outside the catalog."""
    try:
        ctor = _CATALOG[name]
    except KeyError:
        raise UnknownName(f"unknown function {name!r}; known: {catalog_names()}") from None
    try:
        return ctor(**(params or {}))
    except TypeError as exc:
        raise ParamError(f"{name}: {exc}") from None


# ---------------------------------------------------------------------------
# tabulated data
# ---------------------------------------------------------------------------

MIN_TABLE_ROWS = 8


@dataclass(frozen=True)
class TableData:
    """Sampled positive function; interpolation is linear in log-log."""

    rows: tuple = field(default_factory=tuple)  # (x, kind, v) with kind linear|log

    def __post_init__(self) -> None:
        xs = []
        for row in self.rows:
            if len(row) != 3:
                raise FormatError("table rows must be (x, kind, v)")
            x, kind, v = row
            if kind not in ("linear", "log"):
                raise FormatError(f"unknown value kind {kind!r}")
            if not (isinstance(x, (int, float)) and math.isfinite(x) and x > 0):
                raise FormatError("table abscissas must be positive finite reals")
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise FormatError("table values must be finite reals")
            if kind == "linear" and v <= 0.0:
                raise PositivityViolation(f"non-positive linear value at x={x}")
            xs.append(float(x))
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise FormatError("table abscissas must be strictly increasing")

    def log_points(self) -> tuple[np.ndarray, np.ndarray]:
        us = np.array([math.log(x) for x, _, _ in self.rows])
        vs = np.array(
            [math.log(v) if kind == "linear" else float(v) for _, kind, v in self.rows]
        )
        return us, vs


def from_table(data: TableData) -> FunctionHandle:
    """Handle interpolating the table linearly in (log x, log U)."""
    if len(data.rows) < MIN_TABLE_ROWS:
        raise FormatError(f"need at least {MIN_TABLE_ROWS} rows, got {len(data.rows)}")
    us, vs = data.log_points()

    def log_at_logx(u):
        return np.interp(np.asarray(u, dtype=float), us, vs)

    return FunctionHandle(
        name="table",
        log_at_logx=log_at_logx,
        support_floor=0.0,
        log_domain=(float(us[0]), float(us[-1])),
        differentiable=False,
    )


def load_csv(path) -> FunctionHandle:
    """Read `x,value` or `x,logvalue` CSV into an interpolating handle."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise FormatError("empty CSV file")
            header = [h.strip() for h in header]
            if header == ["x", "value"]:
                kind = "linear"
            elif header == ["x", "logvalue"]:
                kind = "log"
            else:
                raise FormatError(f"bad CSV header {header!r}")
            rows = []
            for lineno, rec in enumerate(reader, start=2):
                if not rec:
                    continue
                if len(rec) != 2:
                    raise FormatError(f"line {lineno}: expected 2 columns")
                try:
                    x, v = float(rec[0]), float(rec[1])
                except ValueError:
                    raise FormatError(f"line {lineno}: non-numeric field") from None
                rows.append((x, kind, v))
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None
    return from_table(TableData(rows=tuple(rows)))


def corpus_m_members() -> list[FunctionHandle]:
    """Members with a finite growth order, used by invariant sweeps."""
    return [
        make_power_tail(-3.0),
        make_power_tail(-2.0),
        make_power_tail(-1.0),
        make_power_tail(-0.5),
        make_power_tail(0.0),
        make_power_tail(0.5),
        make_power_tail(2.0),
        make_power_tail(3.0),
        make_peter_paul(),
        make_two_plus_sin(),
        make_pareto_tail(2.0),
        make_log_perturbed_power(-1.0, 1.0),
    ]
