"""Characteristic number ``c(f)`` of a convex function.

``c(f)`` is the supremum, over weights ``p + q = 1`` and endpoint pairs
``a < b``, of the two-point Jensen gap normalized by
``f(a) + f(b) - 2 f((a + b) / 2)``. It always lies in ``[1/2, 1]`` and sharpens
the global converse bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ._golden import golden_max
from .core import Interval
from .errors import DegenerateError, PreconditionError
from .functions import FunctionHandle, Kind, Variation

CLOSED_FORM = "closed_form"
DECLARED_VARIATION = "declared_variation"
NUMERIC = "numeric"

#: c(x log x) = 1 / (e log 2)
C_X_LOG_X = 1.0 / (math.e * math.log(2.0))


@dataclass(frozen=True)
class CharacteristicEstimate:
    value: float
    method: str
    argmax: Optional[Tuple[float, float, float]] = None  # (p, a, b)
    window: Optional[Interval] = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "argmax": list(self.argmax) if self.argmax is not None else None,
            "window": self.window.to_dict() if self.window is not None else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CharacteristicEstimate":
        return cls(
            value=d["value"],
            method=d["method"],
            argmax=tuple(d["argmax"]) if d.get("argmax") is not None else None,
            window=Interval(**d["window"]) if d.get("window") is not None else None,
        )


def power_characteristic(s: float) -> float:
    """Closed form of ``c(x^s)``."""
    if s == 0.0 or s == 1.0:
        raise DegenerateError(f"c(x^{s:g}) is undefined: x^{s:g} is affine")
    if s < 0:
        return 1.0
    if s < 1:
        return (1.0 - s) * s ** (s / (1.0 - s)) / (2.0 ** (1.0 - s) - 1.0)
    return (s - 1.0) * s ** (s / (1.0 - s)) / (1.0 - 2.0 ** (1.0 - s))


def characteristic_closed_form(f: FunctionHandle) -> Optional[CharacteristicEstimate]:
    """The known value of ``c(f)``, or ``None`` when none applies.

    A declared slowly/rapidly varying class yields 1. ``exp`` and ``-log x``
    are both such functions and also yield 1. The ratio defining ``c`` is
    invariant under ``f -> alpha f``, so the scale factor is ignored.
    """
    if f.kind is Kind.AFFINE:
        raise DegenerateError("c(f) is undefined for affine f")
    if f.variation is not Variation.NONE:
        return CharacteristicEstimate(1.0, DECLARED_VARIATION)
    if f.kind in (Kind.POW, Kind.NEG_POW):
        return CharacteristicEstimate(power_characteristic(f.exponent), CLOSED_FORM)
    if f.kind is Kind.X_LOG_X:
        return CharacteristicEstimate(C_X_LOG_X, CLOSED_FORM)
    if f.kind in (Kind.EXP, Kind.NEG_LOG):
        return CharacteristicEstimate(1.0, CLOSED_FORM)
    return None


def characteristic_oracle_power(s: float) -> float:
    """``max_q (q - q^s) / (1 - 2^(1-s))`` by golden-section search.

    Independent of :func:`power_characteristic`; used to cross-check it.
    """
    if not (s > 0 and s != 1):
        raise PreconditionError(f"oracle needs s > 0, s != 1 (got {s!r})")
    denom = 1.0 - 2.0 ** (1.0 - s)

    def ratio(q):
        return (q - q ** s) / denom

    _, best = golden_max(ratio, 0.0, 1.0, tol=1e-12)
    return best


@dataclass(frozen=True)
class GridConfig:
    n_p: int = 64
    n_ab: int = 64
    rounds: int = 4
    shrink: float = 4.0
    #: pairs whose denominator is below this fraction of max|f| are skipped
    reliable_denom: float = 1e-7
    degenerate_denom: float = 1e-14


def _grid_ratio(f, p, a, b):
    """Ratio on the (p, a, b) grid; invalid cells hold -inf."""
    fa, fb = f.eval(a), f.eval(b)
    A, B = np.meshgrid(a, b, indexing="ij")
    denom = fa[:, None] + fb[None, :] - 2.0 * f.eval(0.5 * (A + B))
    P = p[:, None, None]
    mixed = P * A[None] + (1.0 - P) * B[None]
    num = P * fa[None, :, None] + (1.0 - P) * fb[None, None, :] - f.eval(mixed)
    return num, denom, A, B


def characteristic_numeric(f: FunctionHandle, window: Interval,
                           cfg: GridConfig = GridConfig()) -> CharacteristicEstimate:
    """Grid search for ``c(f)`` restricted to endpoints inside ``window``.

    The search lays ``n_p`` weights by ``n_ab`` x ``n_ab`` endpoint pairs over
    the window, then repeatedly re-centres a box ``shrink`` times smaller on
    the best cell. Being a maximum over a subset, the result is a lower
    estimate of the true supremum. Deterministic; ties go to the
    lexicographically smallest ``(p, a, b)``.
    """
    if window.degenerate:
        raise DegenerateError("search window is a single point")
    if not f.domain.contains([window.lo, window.hi]):
        raise PreconditionError(f"window outside the domain {f.domain} of {f.to_spec()}")

    eps = 1e-12
    p_box = (eps, 1.0 - eps)
    a_box = b_box = (window.lo, window.hi)
    best = (-math.inf, None)
    degenerate = True

    for _ in range(cfg.rounds + 1):
        p = np.linspace(*p_box, cfg.n_p)
        a = np.linspace(*a_box, cfg.n_ab)
        b = np.linspace(*b_box, cfg.n_ab)
        num, denom, A, B = _grid_ratio(f, p, a, b)
        scale = max(float(np.max(np.abs(f.eval(np.concatenate([a, b]))))), 1e-300)
        if np.max(np.abs(denom)) >= cfg.degenerate_denom * scale:
            degenerate = False
        valid = (A < B) & (np.abs(denom) > cfg.reliable_denom * scale)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(valid[None], num / denom[None], -np.inf)
        idx = int(np.argmax(ratio))
        i, j, k = np.unravel_index(idx, ratio.shape)
        if ratio[i, j, k] > best[0]:
            best = (float(ratio[i, j, k]), (float(p[i]), float(a[j]), float(b[k])))
        if best[1] is None:
            break
        bp, ba, bb = best[1]

        def shrink(box, centre, lo, hi):
            half = (box[1] - box[0]) / (2.0 * cfg.shrink)
            return (max(lo, centre - half), min(hi, centre + half))

        p_box = shrink(p_box, bp, eps, 1.0 - eps)
        a_box = shrink(a_box, ba, window.lo, window.hi)
        b_box = shrink(b_box, bb, window.lo, window.hi)

    if degenerate or best[1] is None:
        raise DegenerateError(
            f"{f.to_spec()} is affine on [{window.lo!r}, {window.hi!r}]: "
            "f(a) + f(b) - 2 f((a+b)/2) vanishes for every pair")
    return CharacteristicEstimate(best[0], NUMERIC, argmax=best[1], window=window)
