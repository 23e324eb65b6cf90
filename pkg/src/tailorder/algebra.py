"""Closure operations on handles with predicted order arithmetic.

Each operation returns a new handle evaluating the combined function in log
space, carrying the label predicted by the closure rules:

* scale/add:  order of aU + V is max(rho_U, rho_V); rapid-decay and
  rapid-growth classes are closed under addition;
* product:    orders add; an infinite class absorbs a finite partner;
* convolution: order rho_V when the lighter factor is integrable
  (rho_U <= rho_V < -1, or rho_U < -1 <= 0 <= rho_V), order
  rho_U + rho_V + 1 when both exceed -1; the -1 boundaries stay undecided;
* composition: orders multiply when the inner function diverges.

Whenever the hypotheses of a rule fail, the prediction is Undecided rather
than a guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import ArityError, DomainError, ParamError
from .handles import FunctionHandle, KnownTruth
from .labels import (
    TAG_M,
    TAG_M_INF,
    TAG_M_NEG_INF,
    TAG_OSC,
    ClassLabel,
)


class OpKind(str, Enum):
    SCALE_ADD = "ScaleAdd"
    RECIPROCAL = "Reciprocal"
    PRODUCT = "Product"
    CONVOLVE = "Convolve"
    COMPOSE = "Compose"


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-8
    max_evals: int = 100_000

    def __post_init__(self) -> None:
        if not self.rel_tol > 0 or self.max_evals < 100:
            raise ParamError("bad quadrature configuration")


# ---------------------------------------------------------------------------
# label arithmetic
# ---------------------------------------------------------------------------


def _scale_add_label(a: float, lu: ClassLabel, lv: ClassLabel) -> ClassLabel:
    if a == 0.0:
        return lv
    if lu.is_m and lv.is_m:
        return ClassLabel.m(max(lu.rho, lv.rho))
    if lu.tag == lv.tag and lu.tag in (TAG_M_INF, TAG_M_NEG_INF):
        return ClassLabel(lu.tag)
    return ClassLabel.undecided()


def _reciprocal_label(l: ClassLabel) -> ClassLabel:
    if l.is_m:
        return ClassLabel.m(-l.rho)
    if l.tag == TAG_M_INF:
        return ClassLabel.m_neg_inf()
    if l.tag == TAG_M_NEG_INF:
        return ClassLabel.m_inf()
    if l.tag == TAG_OSC:
        return ClassLabel.oscillating(-l.nu, -l.mu)
    return ClassLabel.undecided()


def _product_label(lu: ClassLabel, lv: ClassLabel) -> ClassLabel:
    tags = {lu.tag, lv.tag}
    if lu.is_m and lv.is_m:
        return ClassLabel.m(lu.rho + lv.rho)
    if tags == {TAG_M_INF}:
        return ClassLabel.m_inf()
    if tags == {TAG_M_NEG_INF}:
        return ClassLabel.m_neg_inf()
    if tags == {TAG_M_INF, TAG_M}:
        return ClassLabel.m_inf()
    if tags == {TAG_M_NEG_INF, TAG_M}:
        return ClassLabel.m_neg_inf()
    return ClassLabel.undecided()


def _convolve_label(lu: ClassLabel, lv: ClassLabel) -> ClassLabel:
    if lu.is_m and lv.is_m:
        lo, hi = sorted((lu.rho, lv.rho))
        if hi < -1.0:
            return ClassLabel.m(hi)
        if lo < -1.0 and hi >= 0.0:
            return ClassLabel.m(hi)
        if lo > -1.0:
            return ClassLabel.m(lo + hi + 1.0)
        # lo == -1 exactly, or lo < -1 with -1 <= hi < 0: no closure rule
        return ClassLabel.undecided()
    pair = {lu.tag, lv.tag}
    if pair == {TAG_M_INF}:
        return ClassLabel.m_inf()
    if TAG_M_NEG_INF in pair and pair <= {TAG_M_NEG_INF, TAG_M, TAG_M_INF}:
        return ClassLabel.m_neg_inf()
    if pair == {TAG_M_INF, TAG_M}:
        rho = lu.rho if lu.is_m else lv.rho
        if rho >= 0.0 or rho < -1.0:
            return ClassLabel.m(rho)
    return ClassLabel.undecided()


def _inner_diverges(lv: ClassLabel) -> bool:
    return (lv.is_m and lv.rho > 0.0) or lv.tag == TAG_M_NEG_INF


def _compose_label(lu: ClassLabel, lv: ClassLabel) -> ClassLabel:
    if lu.is_m and lv.is_m and lv.rho > 0.0:
        return ClassLabel.m(lu.rho * lv.rho)
    if lu.tag in (TAG_M_INF, TAG_M_NEG_INF) and _inner_diverges(lv):
        return ClassLabel(lu.tag)
    return ClassLabel.undecided()


def predicted_class(op: OpKind, operands: list[ClassLabel],
                    a: float | None = None) -> ClassLabel:
    """Pure label-arithmetic prediction for an operation."""
    op = OpKind(op)
    need = 1 if op is OpKind.RECIPROCAL else 2
    if len(operands) != need:
        raise ArityError(f"{op.value} takes {need} operand(s), got {len(operands)}")
    if op is OpKind.SCALE_ADD:
        if a is None or a < 0:
            raise ParamError("ScaleAdd requires a >= 0")
        return _scale_add_label(float(a), *operands)
    if op is OpKind.RECIPROCAL:
        return _reciprocal_label(operands[0])
    if op is OpKind.PRODUCT:
        return _product_label(*operands)
    if op is OpKind.CONVOLVE:
        return _convolve_label(*operands)
    return _compose_label(*operands)


def _label_of(h: FunctionHandle) -> ClassLabel:
    if h.truth is not None:
        return h.truth.label
    return ClassLabel.undecided()


def _derived(name: str, log_at_logx, label: ClassLabel, *,
             support_floor: float = 0.0, log_at_x=None,
             differentiable: bool = True) -> FunctionHandle:
    truth = KnownTruth(
        label=label,
        rho=label.rho if label.is_m else None,
        kappa=-label.rho if label.is_m else None,
        mu=label.mu, nu=label.nu,
    )
    return FunctionHandle(
        name=name, log_at_logx=log_at_logx, support_floor=support_floor,
        truth=truth, log_at_x=log_at_x, differentiable=differentiable,
    )


# ---------------------------------------------------------------------------
# handle constructors
# ---------------------------------------------------------------------------


def scale_add(a: float, U: FunctionHandle, V: FunctionHandle) -> FunctionHandle:
    """Handle for a*U + V via log-sum-exp; a = 0 degenerates to V."""
    if a < 0:
        raise ParamError("scale_add requires a >= 0")
    a = float(a)
    label = _scale_add_label(a, _label_of(U), _label_of(V))
    if a == 0.0:
        return _derived(f"0*{U.name}+{V.name}", V.log_at_logx, label,
                        support_floor=V.support_floor,
                        differentiable=V.differentiable)
    log_a = math.log(a)

    def log_at_logx(u):
        return np.logaddexp(log_a + U.log_at_logx(u), V.log_at_logx(u))

    return _derived(
        f"{a:g}*{U.name}+{V.name}", log_at_logx, label,
        support_floor=max(U.support_floor, V.support_floor),
        differentiable=U.differentiable and V.differentiable,
    )


def reciprocal(U: FunctionHandle) -> FunctionHandle:
    label = _reciprocal_label(_label_of(U))
    return _derived(
        f"1/({U.name})", lambda u: -U.log_at_logx(u), label,
        support_floor=U.support_floor, differentiable=U.differentiable,
    )


def product(U: FunctionHandle, V: FunctionHandle) -> FunctionHandle:
    label = _product_label(_label_of(U), _label_of(V))

    def log_at_logx(u):
        return U.log_at_logx(u) + V.log_at_logx(u)

    return _derived(
        f"({U.name})*({V.name})", log_at_logx, label,
        support_floor=max(U.support_floor, V.support_floor),
        differentiable=U.differentiable and V.differentiable,
    )


def compose(U: FunctionHandle, V: FunctionHandle) -> FunctionHandle:
    """Handle for U(V(x)); prediction requires the inner function to diverge."""
    label = _compose_label(_label_of(U), _label_of(V))
    floor_u = math.log(U.support_floor) if U.support_floor > 0 else -math.inf

    def log_at_logx(u):
        inner = np.asarray(V.log_at_logx(u), dtype=float)
        if np.any(inner <= floor_u):
            raise DomainError(
                f"compose: inner value below support floor of {U.name}"
            )
        return U.log_at_logx(inner)

    return _derived(
        f"({U.name})o({V.name})", log_at_logx, label,
        support_floor=V.support_floor,
        differentiable=U.differentiable and V.differentiable,
    )


def convolve(U: FunctionHandle, V: FunctionHandle,
             cfg: QuadratureConfig | None = None) -> FunctionHandle:
    """Handle for the convolution integral_0^x U(t) V(x-t) dt.

    Adaptive log-space quadrature, refined separately on [0, x/2] and
    [x/2, x] where the two asymptotic regimes live.
    """
    from .quadrature import adaptive_log_quad

    cfg = cfg or QuadratureConfig()
    if U.support_floor > 0 or V.support_floor > 0:
        raise DomainError("convolve requires operands defined on (0, inf)")
    label = _convolve_label(_label_of(U), _label_of(V))

    @lru_cache(maxsize=4096)
    def _log_value(x: float) -> float:
        def log_f(t):
            t = np.asarray(t, dtype=float)
            t = np.clip(t, 1e-300, x - 1e-300 if x > 2e-300 else x)
            return np.asarray(U.log_at(t), dtype=float) + np.asarray(
                V.log_at(x - t), dtype=float)

        # dyadic pre-splits toward both endpoints: power-law mass piles up
        # at every scale near t = 0 and t = x, far below what a single
        # Kronrod panel on a huge interval can see
        def dyadic(limit: float) -> list[float]:
            pts, p = [], 1.0
            while p < limit:
                pts.append(p)
                p *= 2.0
            return pts

        lo_splits = dyadic(x / 2.0)
        hi_splits = [x - p for p in dyadic(x / 2.0)]
        lo = adaptive_log_quad(log_f, 0.0, x / 2.0, cfg.rel_tol, cfg.max_evals // 2,
                               split_points=tuple(lo_splits))
        hi = adaptive_log_quad(log_f, x / 2.0, x, cfg.rel_tol, cfg.max_evals // 2,
                               split_points=tuple(hi_splits))
        return float(np.logaddexp(lo, hi))

    def log_at_x(x):
        xa = np.asarray(x, dtype=float)
        if xa.ndim == 0:
            return np.float64(_log_value(float(xa)))
        return np.array([_log_value(float(v)) for v in xa])

    def log_at_logx(u):
        ua = np.asarray(u, dtype=float)
        if np.any(ua > 700.0):
            raise DomainError("convolve: argument too large for linear quadrature")
        return log_at_x(np.exp(ua))

    return _derived(
        f"({U.name})conv({V.name})", log_at_logx, label,
        log_at_x=log_at_x, differentiable=True,
    )
