"""Converse, sandwich and two-sided bounds on the Jensen and Jensen-Mercer gaps.

Every report is total: a bound that cannot be evaluated (non-convex ``f``,
unbounded ``f''``, missing characteristic number) is present with
``applicable=False`` and ``value=None`` instead of being dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterator, Optional, Tuple

import numpy as np

from .characteristic import CharacteristicEstimate, characteristic_closed_form
from .core import (Interval, WeightedSample, jensen_functional, mercer_functional,
                   mercer_quadratic_gap, quadratic_gap)
from .errors import DegenerateError, UnboundedError
from .functions import FunctionHandle, SecondDerivRange

REL_TOL = 1e-9
C_MISMATCH = 1e-6


def tolerance(value: float, bound: float) -> float:
    """Absolute slack allowed when checking ``value`` against ``bound``."""
    return REL_TOL * max(1.0, abs(value), abs(bound))


@dataclass(frozen=True)
class Bound:
    value: Optional[float]
    applicable: bool
    source: str
    reason: Optional[str] = None

    @classmethod
    def na(cls, source: str, reason: str) -> "Bound":
        return cls(None, False, source, reason)

    def to_dict(self) -> dict:
        return {"value": self.value, "applicable": self.applicable,
                "source": self.source, "reason": self.reason}

    @classmethod
    def from_dict(cls, d: dict) -> "Bound":
        return cls(d["value"], d["applicable"], d["source"], d.get("reason"))


@dataclass(frozen=True)
class Violation:
    bound: str
    source: str
    side: str
    value: float
    bound_value: float
    slack: float


class _Report:
    """Shared behaviour of the two report types."""

    def bound_items(self) -> Iterator[Tuple[str, str, Bound]]:
        """Yield ``(field name, "lower" | "upper", Bound)``."""
        for fld in fields(self):
            b = getattr(self, fld.name)
            if isinstance(b, Bound):
                yield fld.name, ("lower" if fld.name.endswith("_lower") else "upper"), b

    def slacks(self) -> Iterator[Tuple[str, str, Bound, float]]:
        """Signed slack of every applicable bound: negative means violated."""
        for name, side, b in self.bound_items():
            if not b.applicable:
                continue
            gap = b.value - self.value if side == "upper" else self.value - b.value
            yield name, side, b, gap

    def violations(self) -> list:
        out = []
        for name, side, b, gap in self.slacks():
            if gap < -tolerance(self.value, b.value):
                out.append(Violation(name, b.source, side, self.value, b.value, gap))
        return out

    def to_dict(self) -> dict:
        d = {}
        for fld in fields(self):
            v = getattr(self, fld.name)
            if hasattr(v, "to_dict"):
                v = v.to_dict()
            elif isinstance(v, tuple):
                v = list(v)
            d[fld.name] = v
        return d

    @classmethod
    def from_dict(cls, d: dict):
        kw = {}
        for fld in fields(cls):
            v = d[fld.name]
            if fld.name == "interval":
                v = Interval(**v)
            elif fld.name == "d2_range" and v is not None:
                v = SecondDerivRange(**v)
            elif fld.name == "characteristic" and v is not None:
                v = CharacteristicEstimate.from_dict(v)
            elif fld.name == "warnings":
                v = tuple(v)
            elif isinstance(v, dict) and "applicable" in v:
                v = Bound.from_dict(v)
            kw[fld.name] = v
        return cls(**kw)


@dataclass(frozen=True)
class JensenBoundReport(_Report):
    function: str
    interval: Interval
    value: float
    global_upper: Bound
    sharpened_upper: Bound
    sandwich_lower: Bound
    sandwich_upper: Bound
    converse_lower: Bound
    converse_upper: Bound
    twosided_lower: Bound
    twosided_upper: Bound
    corollary_upper: Bound
    B: float
    Q: float
    d2_range: Optional[SecondDerivRange]
    characteristic: Optional[CharacteristicEstimate]
    warnings: Tuple[str, ...] = ()


@dataclass(frozen=True)
class MercerBoundReport(_Report):
    function: str
    interval: Interval
    value: float
    global_upper: Bound
    sharpened_upper: Bound
    sandwich_lower: Bound
    sandwich_upper: Bound
    B: float
    Kq: float
    d2_range: Optional[SecondDerivRange]
    characteristic: Optional[CharacteristicEstimate]
    warnings: Tuple[str, ...] = ()


def global_converse(f: FunctionHandle, e: Interval) -> float:
    """``f(a) + f(b) - 2 f((a + b) / 2)``; exactly zero for affine ``f``."""
    if f.is_affine:
        return 0.0
    return f.eval(e.lo) + f.eval(e.hi) - 2.0 * f.eval(e.mid)


def _range_or_reason(f, e):
    try:
        return f.second_derivative_range(e), None
    except UnboundedError as exc:
        return None, str(exc)


def _is_convex(f, e, rng) -> Tuple[bool, str]:
    if rng is not None:
        if rng.m >= -1e-12 * max(abs(rng.m), abs(rng.M), 1.0):
            return True, ""
        return False, f"f is not convex on [{e.lo!r}, {e.hi!r}] (min f'' = {rng.m!r})"
    # f'' unbounded: catalog second derivatives are monotone, so the endpoint
    # values (possibly infinite) still decide the sign.
    ends = f._d2(np.array([e.lo, e.hi]))
    if np.all(ends >= 0):
        return True, ""
    return False, "convexity of f on the interval could not be established"


def _resolve_c(f, c, warnings):
    try:
        closed = characteristic_closed_form(f)
    except DegenerateError:
        closed = None
    if c is None:
        return closed
    if closed is not None and abs(c.value - closed.value) > C_MISMATCH:
        warnings.append(
            f"supplied c(f) = {c.value!r} differs from the closed form "
            f"{closed.value!r}; using the supplied value")
    return c


def jensen_bounds(s: WeightedSample, e: Interval, f: FunctionHandle,
                  c: Optional[CharacteristicEstimate] = None) -> JensenBoundReport:
    """Evaluate ``J_n(p, x; f)`` together with all of its bounds.

    With ``B = f(a) + f(b) - 2f((a+b)/2)``, ``Q = J_n(p, x; x^2)`` and
    ``m <= f'' <= M`` on ``[a, b]``:

    * ``global_upper``: ``B`` (convex f)
    * ``sharpened_upper``: ``c(f) B`` (convex f, c known)
    * ``sandwich``: ``m Q / 2 <= J <= M Q / 2`` (any C^2 f)
    * ``converse``: ``B + M(2Q - (b-a)^2)/4 <= J <= B + m(2Q - (b-a)^2)/4``
    * ``twosided``: convex combination of the two previous pairs (convex f)
    * ``corollary_upper``: ``M / (m + M) B`` (convex f)
    """
    e.require_contains(s, tag="Eq2")
    warnings: list = []
    value = jensen_functional(s, f)
    B = global_converse(f, e)
    Q = quadratic_gap(s)
    width2 = e.width ** 2
    rng, rng_reason = _range_or_reason(f, e)
    convex, convex_reason = _is_convex(f, e, rng)
    c = _resolve_c(f, c, warnings) if convex else c

    global_upper = Bound(B, True, "Eq2") if convex else Bound.na("Eq2", convex_reason)
    if not convex:
        sharpened = Bound.na("Eq4", convex_reason)
    elif c is None:
        sharpened = Bound.na("Eq4", "no characteristic number available for f")
    else:
        sharpened = Bound(c.value * B, True, "Eq4")

    if rng is None:
        sandwich_lower = sandwich_upper = Bound.na("Thm2.5", rng_reason)
        converse_lower = converse_upper = Bound.na("Thm2.6", rng_reason)
    else:
        m, M = rng.m, rng.M
        sandwich_lower = Bound(0.5 * m * Q, True, "Thm2.5")
        sandwich_upper = Bound(0.5 * M * Q, True, "Thm2.5")
        # M pairs with the lower side because 2Q - (b-a)^2 <= 0
        converse_lower = Bound(B + 0.25 * M * (2.0 * Q - width2), True, "Thm2.6")
        converse_upper = Bound(B + 0.25 * m * (2.0 * Q - width2), True, "Thm2.6")

    if rng is None:
        twosided_lower = twosided_upper = Bound.na("TwoSided", rng_reason)
        corollary = Bound.na("Cor2.8", rng_reason)
    elif not convex:
        twosided_lower = twosided_upper = Bound.na("TwoSided", convex_reason)
        corollary = Bound.na("Cor2.8", convex_reason)
    else:
        m, M = rng.m, rng.M
        total = m + M
        if not total > 1e-14 * max(abs(m), abs(M)):
            why = "m + M vanishes (f'' identically zero)"
            twosided_lower = twosided_upper = Bound.na("TwoSided", why)
            corollary = Bound.na("Cor2.8", why)
        else:
            cross = m * M / total * (Q - 0.25 * width2)
            twosided_lower = Bound(m / total * B + cross, True, "TwoSided")
            twosided_upper = Bound(M / total * B + cross, True, "TwoSided")
            corollary = Bound(M / total * B, True, "Cor2.8")

    return JensenBoundReport(
        function=f.to_spec(), interval=e, value=value,
        global_upper=global_upper, sharpened_upper=sharpened,
        sandwich_lower=sandwich_lower, sandwich_upper=sandwich_upper,
        converse_lower=converse_lower, converse_upper=converse_upper,
        twosided_lower=twosided_lower, twosided_upper=twosided_upper,
        corollary_upper=corollary, B=B, Q=Q, d2_range=rng,
        characteristic=c, warnings=tuple(warnings))


def mercer_bounds(s: WeightedSample, e: Interval, f: FunctionHandle,
                  c: Optional[CharacteristicEstimate] = None) -> MercerBoundReport:
    """Evaluate ``K_n(p, x; f)`` with its converse and second-derivative bounds.

    ``2B`` and ``(1 + c(f)) B`` need convex ``f``; the sandwich
    ``m Kq / 2 <= K_n <= M Kq / 2`` with ``Kq = K_n(p, x; x^2)`` holds for any
    C^2 function.
    """
    e.require_contains(s, tag="Eq3")
    warnings: list = []
    value = mercer_functional(s, e, f)
    B = global_converse(f, e)
    Kq = mercer_quadratic_gap(s, e)
    rng, rng_reason = _range_or_reason(f, e)
    convex, convex_reason = _is_convex(f, e, rng)
    c = _resolve_c(f, c, warnings) if convex else c

    global_upper = Bound(2.0 * B, True, "Eq3") if convex else Bound.na("Eq3", convex_reason)
    if not convex:
        sharpened = Bound.na("Eq5", convex_reason)
    elif c is None:
        sharpened = Bound.na("Eq5", "no characteristic number available for f")
    else:
        sharpened = Bound((1.0 + c.value) * B, True, "Eq5")

    if rng is None:
        lower = upper = Bound.na("Thm2.9", rng_reason)
    else:
        lower = Bound(0.5 * rng.m * Kq, True, "Thm2.9")
        upper = Bound(0.5 * rng.M * Kq, True, "Thm2.9")

    return MercerBoundReport(
        function=f.to_spec(), interval=e, value=value,
        global_upper=global_upper, sharpened_upper=sharpened,
        sandwich_lower=lower, sandwich_upper=upper, B=B, Kq=Kq,
        d2_range=rng, characteristic=c, warnings=tuple(warnings))
