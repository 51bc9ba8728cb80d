"""Consequences for classical means, power means, Ky Fan ratios and moments."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from .characteristic import power_characteristic
from .core import Interval, WeightedSample, quadratic_gap, require_positive
from .errors import DegenerateError, DomainError, PreconditionError

#: tolerance for recognising an interval of the form [a, 1 - a]
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class MeansSummary:
    arithmetic: float
    geometric: float
    harmonic: float

    def to_dict(self) -> dict:
        return asdict(self)


def classical_means(s: WeightedSample) -> MeansSummary:
    require_positive(s, "classical means", tag="Thm3.1")
    w, x = s.weights, s.points
    return MeansSummary(
        arithmetic=float(np.dot(w, x)),
        geometric=float(np.exp(np.dot(w, np.log(x)))),
        harmonic=float(1.0 / np.dot(w, 1.0 / x)),
    )


def mean_comparison_bounds(e: Interval) -> Tuple[float, float]:
    """``((a+b)^2 / 4ab, (sqrt b - sqrt a)^2)``.

    The first caps every quotient A/H, A/G, G/H of data in ``[a, b]``; the
    second caps every difference A-G, A-H, G-H.
    """
    a, b = e.lo, e.hi
    if a <= 0:
        raise DomainError(f"mean comparison needs 0 < a (got a={a!r})", tag="Thm3.1")
    return (a + b) ** 2 / (4.0 * a * b), (math.sqrt(b) - math.sqrt(a)) ** 2


def power_mean(s: WeightedSample, alpha: float) -> float:
    """Weighted power mean of order ``alpha``; ``alpha = 0`` is the geometric mean."""
    require_positive(s, "power mean", tag="Eq6")
    w, x = s.weights, s.points
    if alpha == 0:
        return float(np.exp(np.dot(w, np.log(x))))
    return float(np.dot(w, x ** alpha) ** (1.0 / alpha))


def power_mean_gap_bound(e: Interval, alpha: float) -> float:
    """Upper bound on ``A - P_alpha`` (0 < alpha < 1) or ``P_alpha - A`` (alpha > 1)
    for data in ``[a, b]``."""
    a, b = e.lo, e.hi
    if a <= 0:
        raise DomainError(f"power mean bound needs 0 < a (got a={a!r})",
                          tag="Eq6" if alpha < 1 else "Eq7")
    if alpha <= 0 or alpha == 1:
        raise DegenerateError(f"power mean bound needs alpha > 0, alpha != 1 (got {alpha!r})")
    two_point = ((a ** alpha + b ** alpha) / 2.0) ** (1.0 / alpha)
    arith = 0.5 * (a + b)
    lead = alpha ** (alpha / (1.0 - alpha))
    if alpha < 1:
        coef = 2.0 * (1.0 - alpha) * lead / (1.0 - 2.0 ** ((alpha - 1.0) / alpha))
        return coef * (arith - two_point)
    coef = 2.0 * (alpha - 1.0) * lead / (2.0 ** ((alpha - 1.0) / alpha) - 1.0)
    return coef * (two_point - arith)


def power_mean_gap(s: WeightedSample, alpha: float) -> float:
    """The gap bounded by :func:`power_mean_gap_bound`, oriented to be >= 0."""
    arith = power_mean(s, 1.0)
    pm = power_mean(s, alpha)
    return arith - pm if alpha < 1 else pm - arith


# -- Ky Fan ------------------------------------------------------------------


@dataclass(frozen=True)
class KyFanReport:
    a_ratio: float
    g_ratio: float
    quadratic_gap: float
    converse_factor: Optional[float] = None
    twosided_lower_factor: Optional[float] = None
    twosided_upper_factor: Optional[float] = None
    symmetric_factor: Optional[float] = None
    explicit_factor: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "KyFanReport":
        return cls(**d)


def kyfan_converse_factor(a: float, b: float) -> float:
    """``S(a, b) = (1-a)(1-b)(a+b)^2 / (ab (2-a-b)^2)``."""
    return (1 - a) * (1 - b) * (a + b) ** 2 / (a * b * (2 - a - b) ** 2)


def _is_symmetric(e: Interval) -> bool:
    return abs(e.lo + e.hi - 1.0) <= SYMMETRY_TOL and 0 < e.lo < 0.5


def kyfan_report(s: WeightedSample, e: Interval) -> KyFanReport:
    """Arithmetic and geometric Ky Fan ratios with every applicable factor.

    Two regimes are recognised. ``0 < a <= x_i <= b <= 1/2`` gives the
    converse factor ``S(a, b)`` and the exponential two-sided factors.
    ``e = [a, 1 - a]`` with ``0 < a < 1/2`` gives ``T_n`` and its explicit
    data-free majorant. Anything else is rejected.
    """
    a, b = e.lo, e.hi
    symmetric = _is_symmetric(e)
    if not symmetric:
        if not (0 < a and b <= 0.5):
            raise PreconditionError(
                f"Ky Fan converse needs 0 < a <= x_i <= b <= 1/2 "
                f"(got [{a!r}, {b!r}]); only [a, 1-a] intervals may exceed 1/2",
                tag="KyFan-S")
        e.require_contains(s, tag="KyFan-S")
    else:
        e.require_contains(s, tag="KyFan-T")

    x, w = s.points, s.weights
    mean = float(np.dot(w, x))
    a_ratio = mean / (1.0 - mean)
    g_ratio = float(np.exp(np.dot(w, np.log(x) - np.log1p(-x))))
    Q = quadratic_gap(s)

    if symmetric:
        aa = (a * (1 - a)) ** 2
        return KyFanReport(
            a_ratio, g_ratio, Q,
            symmetric_factor=math.exp((1 - 2 * a) / (2 * aa) * Q),
            explicit_factor=math.exp((1 - 2 * a) ** 3 / (8 * aa)),
        )
    return KyFanReport(
        a_ratio, g_ratio, Q,
        converse_factor=kyfan_converse_factor(a, b),
        twosided_lower_factor=math.exp((0.5 - b) / (b * (1 - b)) ** 2 * Q),
        twosided_upper_factor=math.exp((0.5 - a) / (a * (1 - a)) ** 2 * Q),
    )


# -- moments -----------------------------------------------------------------

EXS_MINUS_EX_POW = "Exs_minus_EXs_pow"  # E(X^s) - (EX)^s, s > 1
EX_POW_MINUS_EXS = "EXs_pow_minus_Exs"  # (EX)^s - E(X^s), 0 < s < 1


@dataclass(frozen=True)
class MomentBoundReport:
    s: float
    gap: float
    variance: float
    variance_lower: float
    variance_upper: float
    char_upper: float
    orientation: str

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MomentBoundReport":
        return cls(**d)

    @property
    def variance_source(self) -> str:
        if self.s > 2:
            return "Eq8"
        return "Eq9" if self.s > 1 else "Eq10"

    @property
    def char_source(self) -> str:
        return "Eq11" if self.s > 1 else "Eq12"


def moment_bounds(s: WeightedSample, e: Interval, order: float) -> MomentBoundReport:
    """Variance-based and characteristic-number bounds on the moment gap.

    The gap is oriented so that it is nonnegative: ``E(X^s) - (EX)^s`` for
    ``s > 1`` and ``(EX)^s - E(X^s)`` for ``0 < s < 1``.
    """
    sv = float(order)
    a, b = e.lo, e.hi
    tag = "Eq8" if sv >= 2 else ("Eq9" if sv > 1 else "Eq10")
    if not (sv > 0 and sv != 1):
        raise DomainError(f"moment order must satisfy s > 0, s != 1 (got {sv!r})", tag=tag)
    if sv < 2 and a <= 0:
        raise DomainError(f"s < 2 needs a > 0 since x^(s-2) is singular at 0", tag=tag)
    if a < 0:
        raise DomainError(f"moments need a >= 0 (got a={a!r})", tag=tag)
    e.require_contains(s, tag=tag)

    x, p = s.points, s.weights
    var = quadratic_gap(s)
    mean = float(np.dot(p, x))
    if sv == 2:
        gap = var
    else:
        gap = float(np.dot(p, x ** sv)) - mean ** sv
    half = 0.5 * sv * (sv - 1.0)
    if sv > 1:
        orientation = EXS_MINUS_EX_POW
        lo_c, hi_c = half * a ** (sv - 2), half * b ** (sv - 2)
        if sv < 2:
            lo_c, hi_c = hi_c, lo_c
    else:
        orientation = EX_POW_MINUS_EXS
        gap = -gap
        lo_c, hi_c = -half * b ** (sv - 2), -half * a ** (sv - 2)
    bracket = abs(a ** sv + b ** sv - 2.0 * (0.5 * (a + b)) ** sv)
    return MomentBoundReport(
        s=sv, gap=gap, variance=var,
        variance_lower=lo_c * var, variance_upper=hi_c * var,
        char_upper=power_characteristic(sv) * bracket,
        orientation=orientation,
    )
