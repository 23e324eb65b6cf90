"""Growth-class labels.

A positive function U on (0, inf) is labelled by the limiting behaviour of
log U(x) / log x:

* ``M(rho)``      -- the limit exists and equals the finite number rho;
* ``MInf``        -- the limit is -inf (decay faster than any power);
* ``MNegInf``     -- the limit is +inf (growth faster than any power);
* ``Oscillating`` -- liminf mu < limsup nu (no limit);
* ``Undecided``   -- the numerics could not tell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParamError

TAG_M = "M"
TAG_M_INF = "MInf"
TAG_M_NEG_INF = "MNegInf"
TAG_OSC = "Oscillating"
TAG_UNDECIDED = "Undecided"

_TAGS = (TAG_M, TAG_M_INF, TAG_M_NEG_INF, TAG_OSC, TAG_UNDECIDED)


@dataclass(frozen=True)
class ClassLabel:
    """Classification verdict for a handle.

    ``rho`` is set only for tag ``M``; ``mu``/``nu`` (extended reals) only for
    tag ``Oscillating``, with mu < nu.
    """

    tag: str
    rho: float | None = None
    mu: float | None = None
    nu: float | None = None

    def __post_init__(self) -> None:
        if self.tag not in _TAGS:
            raise ParamError(f"unknown class tag {self.tag!r}")
        if self.tag == TAG_M:
            if self.rho is None or not math.isfinite(self.rho):
                raise ParamError("M label requires a finite rho")
        elif self.rho is not None:
            raise ParamError(f"{self.tag} label carries no rho")
        if self.tag == TAG_OSC:
            if self.mu is None or self.nu is None or not self.mu < self.nu:
                raise ParamError("Oscillating label requires mu < nu")
        elif self.mu is not None or self.nu is not None:
            raise ParamError(f"{self.tag} label carries no mu/nu")

    # -- constructors -------------------------------------------------
    @staticmethod
    def m(rho: float) -> "ClassLabel":
        return ClassLabel(TAG_M, rho=float(rho))

    @staticmethod
    def m_inf() -> "ClassLabel":
        return ClassLabel(TAG_M_INF)

    @staticmethod
    def m_neg_inf() -> "ClassLabel":
        return ClassLabel(TAG_M_NEG_INF)

    @staticmethod
    def oscillating(mu: float, nu: float) -> "ClassLabel":
        return ClassLabel(TAG_OSC, mu=float(mu), nu=float(nu))

    @staticmethod
    def undecided() -> "ClassLabel":
        return ClassLabel(TAG_UNDECIDED)

    # -- predicates ---------------------------------------------------
    @property
    def is_m(self) -> bool:
        return self.tag == TAG_M

    @property
    def is_decided(self) -> bool:
        return self.tag != TAG_UNDECIDED

    @property
    def is_infinite(self) -> bool:
        return self.tag in (TAG_M_INF, TAG_M_NEG_INF)

    # -- serialization ------------------------------------------------
    def to_dict(self) -> dict:
        out: dict = {"tag": self.tag}
        if self.tag == TAG_M:
            out["rho"] = self.rho
        if self.tag == TAG_OSC:
            out["mu"] = self.mu
            out["nu"] = self.nu
        return out

    @staticmethod
    def from_dict(d: dict) -> "ClassLabel":
        extra = set(d) - {"tag", "rho", "mu", "nu"}
        if extra:
            raise ParamError(f"unknown label fields {sorted(extra)}")
        return ClassLabel(
            d["tag"], rho=d.get("rho"), mu=d.get("mu"), nu=d.get("nu")
        )

    def __str__(self) -> str:
        if self.tag == TAG_M:
            return f"M({self.rho:g})"
        if self.tag == TAG_OSC:
            return f"Oscillating({self.mu:g}, {self.nu:g})"
        return self.tag
