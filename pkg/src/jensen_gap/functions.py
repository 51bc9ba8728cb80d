"""Catalog of scalar test functions and the range of their second derivative.

A :class:`FunctionHandle` is a small immutable description (kind plus
parameters) rather than an arbitrary callable, so that every function can be
serialized back to its CLI spec string and carries an exact second derivative.
The ``table`` kind (cubic interpolation through abscissa/ordinate pairs) is the
escape hatch for anything outside the catalog.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from ._golden import golden_max, golden_min
from .core import Interval
from .errors import DomainError, NumericError, PreconditionError, UnboundedError

#: Distance an interval must keep from an open domain boundary.
DEFAULT_MARGIN = 1e-9
#: Chebyshev-Lobatto points used by the sampled range method.
SAMPLED_POINTS = 1025
REFINE_TOL = 1e-10


class Kind(str, enum.Enum):
    POW = "pow"
    NEG_POW = "negpow"
    EXP = "exp"
    NEG_LOG = "neglog"
    X_LOG_X = "xlogx"
    LOGIT = "logit"
    AFFINE = "affine"
    TABLE = "table"


class Variation(str, enum.Enum):
    NONE = "none"
    SLOW = "slowly_varying"
    RAPID = "rapidly_varying"


class Convexity(str, enum.Enum):
    CONVEX = "convex"
    CONCAVE = "concave"
    NEITHER = "neither"


@dataclass(frozen=True)
class Domain:
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        ok_lo = (x >= self.lo) if self.lo_closed else (x > self.lo)
        ok_hi = (x <= self.hi) if self.hi_closed else (x < self.hi)
        return bool(np.all(ok_lo & ok_hi))

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


@dataclass(frozen=True)
class SecondDerivRange:
    """Minimum ``m`` and maximum ``M`` of ``f''`` on an interval."""

    m: float
    M: float
    arg_m: float
    arg_M: float
    method: str  # "analytic" | "sampled"

    def to_dict(self) -> dict:
        return {"m": self.m, "M": self.M, "arg_m": self.arg_m,
                "arg_M": self.arg_M, "method": self.method}


@dataclass(frozen=True)
class FunctionHandle:
    """A catalog function ``scale * base(x)``.

    ``params`` holds the exponent for ``pow``/``negpow``, ``(c0, c1)`` for
    ``affine`` and is empty otherwise. ``table`` handles keep their nodes in
    ``nodes``. ``variation`` is a user declaration and is never inferred.
    """

    kind: Kind
    params: Tuple[float, ...] = ()
    variation: Variation = Variation.NONE
    scale: float = 1.0
    nodes: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]] = None
    source: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "variation", Variation(self.variation))
        object.__setattr__(self, "params", tuple(float(v) for v in self.params))
        want = {Kind.POW: 1, Kind.NEG_POW: 1, Kind.AFFINE: 2}.get(self.kind, 0)
        if len(self.params) != want:
            raise PreconditionError(
                f"{self.kind.value} takes {want} parameter(s), got {len(self.params)}")
        if not math.isfinite(self.scale) or self.scale == 0:
            raise PreconditionError("scale must be finite and nonzero")
        if self.kind is Kind.TABLE:
            if self.nodes is None:
                raise PreconditionError("table function needs nodes")
            xs, ys = (tuple(float(v) for v in col) for col in self.nodes)
            if len(xs) < 4 or len(xs) != len(ys):
                raise PreconditionError("table needs at least 4 (x, y) pairs")
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise PreconditionError("table abscissae must be strictly increasing")
            object.__setattr__(self, "nodes", (xs, ys))

    # -- construction helpers -------------------------------------------------

    @classmethod
    def pow(cls, s: float, **kw) -> "FunctionHandle":
        return cls(Kind.POW, (s,), **kw)

    @classmethod
    def neg_pow(cls, s: float, **kw) -> "FunctionHandle":
        return cls(Kind.NEG_POW, (s,), **kw)

    @classmethod
    def affine(cls, c0: float, c1: float) -> "FunctionHandle":
        return cls(Kind.AFFINE, (c0, c1))

    @classmethod
    def table(cls, xs, ys, source: str | None = None) -> "FunctionHandle":
        return cls(Kind.TABLE, nodes=(tuple(xs), tuple(ys)), source=source)

    def scaled(self, alpha: float) -> "FunctionHandle":
        """The function ``alpha * f``."""
        return replace(self, scale=self.scale * alpha)

    @property
    def is_affine(self) -> bool:
        if self.kind is Kind.AFFINE:
            return True
        return self.kind in (Kind.POW, Kind.NEG_POW) and self.exponent in (0.0, 1.0)

    @property
    def exponent(self) -> float:
        return self.params[0]

    @property
    def domain(self) -> Domain:
        k = self.kind
        inf = math.inf
        if k in (Kind.POW, Kind.NEG_POW):
            return Domain(0.0, inf, self.exponent >= 0, False)
        if k in (Kind.NEG_LOG, Kind.X_LOG_X):
            return Domain(0.0, inf, False, False)
        if k is Kind.LOGIT:
            return Domain(0.0, 1.0, False, False)
        if k is Kind.TABLE:
            xs = self.nodes[0]
            return Domain(xs[0], xs[-1], True, True)
        return Domain(-inf, inf, False, False)

    @cached_property
    def _spline(self):
        from scipy.interpolate import CubicSpline
        xs, ys = self.nodes
        return CubicSpline(xs, ys)

    # -- evaluation -----------------------------------------------------------

    def _check_domain(self, x):
        if not self.domain.contains(x):
            xa = np.atleast_1d(np.asarray(x, dtype=float))
            bad = [float(v) for v in xa if not self.domain.contains(v)]
            raise DomainError(
                f"{self.to_spec()}: {bad[0]!r} is outside the domain {self.domain}")

    def _base(self, x):
        k = self.kind
        if k is Kind.POW:
            return np.power(x, self.exponent)
        if k is Kind.NEG_POW:
            return -np.power(x, self.exponent)
        if k is Kind.EXP:
            return np.exp(x)
        if k is Kind.NEG_LOG:
            return -np.log(x)
        if k is Kind.X_LOG_X:
            return x * np.log(x)
        if k is Kind.LOGIT:
            return np.log1p(-x) - np.log(x)
        if k is Kind.AFFINE:
            c0, c1 = self.params
            return c0 + c1 * x
        return self._spline(x)

    def eval(self, x):
        """``f(x)`` for a scalar or array ``x``."""
        self._check_domain(x)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            y = self.scale * self._base(np.asarray(x, dtype=float))
        if np.ndim(y) == 0:
            return float(y)
        return y

    __call__ = eval

    def _d2(self, x):
        """Unchecked second derivative (array in, array out)."""
        x = np.asarray(x, dtype=float)
        k = self.kind
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if k in (Kind.POW, Kind.NEG_POW):
                s = self.exponent
                coef = s * (s - 1.0)
                if coef == 0.0:
                    d2 = np.zeros_like(x)
                elif s == 2.0:
                    d2 = np.full_like(x, 2.0)
                else:
                    d2 = coef * np.power(x, s - 2.0)
                if k is Kind.NEG_POW:
                    d2 = -d2
            elif k is Kind.EXP:
                d2 = np.exp(x)
            elif k is Kind.NEG_LOG:
                d2 = 1.0 / (x * x)
            elif k is Kind.X_LOG_X:
                d2 = 1.0 / x
            elif k is Kind.LOGIT:
                d2 = (1.0 - 2.0 * x) / (x * (1.0 - x)) ** 2
            elif k is Kind.AFFINE:
                d2 = np.zeros_like(x)
            else:
                h = np.finfo(float).eps ** 0.25 * np.maximum(1.0, np.abs(x))
                d2 = (self._spline(x + h) - 2.0 * self._spline(x)
                      + self._spline(x - h)) / (h * h)
        return self.scale * d2

    def second_derivative(self, x):
        """``f''(x)``: exact for catalog kinds, central difference for tables."""
        self._check_domain(x)
        d2 = self._d2(x)
        if not np.all(np.isfinite(d2)):
            raise NumericError(f"{self.to_spec()}: f'' is not finite at {x!r}")
        if np.ndim(d2) == 0:
            return float(d2)
        return d2

    # -- ranges ---------------------------------------------------------------

    def _require_inside(self, e: Interval, margin: float):
        dom = self.domain
        lo_ok = e.lo >= dom.lo if dom.lo_closed else e.lo >= dom.lo + margin
        hi_ok = e.hi <= dom.hi if dom.hi_closed else e.hi <= dom.hi - margin
        if not (lo_ok and hi_ok):
            raise UnboundedError(
                f"{self.to_spec()}: [{e.lo!r}, {e.hi!r}] must lie at least "
                f"{margin:g} inside the open domain {dom}", tag="Thm2.5")

    def second_derivative_range(self, e: Interval,
                                margin: float = DEFAULT_MARGIN) -> SecondDerivRange:
        """Min and max of ``f''`` over ``e``.

        Every catalog kind has a monotone (or constant) second derivative, so
        the extremes sit at the endpoints. Tables fall back to dense
        Chebyshev sampling plus golden-section refinement.
        """
        self._require_inside(e, margin)
        if self.kind is Kind.TABLE:
            return self._sampled_range(e)
        ends = self._d2(np.array([e.lo, e.hi]))
        if not np.all(np.isfinite(ends)):
            raise UnboundedError(
                f"{self.to_spec()}: f'' is unbounded on [{e.lo!r}, {e.hi!r}]",
                tag="Thm2.5")
        d_lo, d_hi = float(ends[0]), float(ends[1])
        if d_lo <= d_hi:
            return SecondDerivRange(d_lo, d_hi, e.lo, e.hi, "analytic")
        return SecondDerivRange(d_hi, d_lo, e.hi, e.lo, "analytic")

    def _sampled_range(self, e: Interval) -> SecondDerivRange:
        if e.degenerate:
            v = float(self._d2(e.lo))
            return SecondDerivRange(v, v, e.lo, e.lo, "sampled")
        k = np.arange(SAMPLED_POINTS)
        t = np.sort(e.mid - 0.5 * e.width * np.cos(np.pi * k / (SAMPLED_POINTS - 1)))
        t[0], t[-1] = e.lo, e.hi
        vals = self._d2(t)
        if not np.all(np.isfinite(vals)):
            raise UnboundedError(f"{self.to_spec()}: f'' is not finite on the interval")

        def scalar(u):
            return float(self._d2(min(max(u, e.lo), e.hi)))

        def refine(i, finder):
            lo, hi = t[max(i - 1, 0)], t[min(i + 1, t.size - 1)]
            return finder(scalar, lo, hi, tol=REFINE_TOL)

        i_min, i_max = int(np.argmin(vals)), int(np.argmax(vals))
        arg_m, m = refine(i_min, golden_min)
        arg_M, M = refine(i_max, golden_max)
        if vals[i_min] < m:
            arg_m, m = float(t[i_min]), float(vals[i_min])
        if vals[i_max] > M:
            arg_M, M = float(t[i_max]), float(vals[i_max])
        return SecondDerivRange(m, M, arg_m, arg_M, "sampled")

    def classify_convexity(self, e: Interval) -> Convexity:
        r = self.second_derivative_range(e)
        tol = 1e-12 * max(abs(r.m), abs(r.M), 1.0)
        if r.m >= -tol:
            return Convexity.CONVEX
        if r.M <= tol:
            return Convexity.CONCAVE
        return Convexity.NEITHER

    # -- spec strings ---------------------------------------------------------

    def to_spec(self) -> str:
        k = self.kind
        if k in (Kind.POW, Kind.NEG_POW):
            body = f"{k.value}:{self.exponent!r}"
        elif k is Kind.AFFINE:
            body = f"affine:{self.params[0]!r},{self.params[1]!r}"
        elif k is Kind.TABLE:
            body = f"table:{self.source or '<inline>'}"
        else:
            body = k.value
        if self.scale != 1.0:
            body = f"{self.scale!r}*{body}"
        suffix = {Variation.SLOW: "@slow", Variation.RAPID: "@rapid"}.get(self.variation, "")
        return body + suffix


def evaluate(f: FunctionHandle, x):
    return f.eval(x)


def second_derivative(f: FunctionHandle, x):
    return f.second_derivative(x)


def second_derivative_range(f: FunctionHandle, e: Interval,
                            margin: float = DEFAULT_MARGIN) -> SecondDerivRange:
    return f.second_derivative_range(e, margin)


def classify_convexity(f: FunctionHandle, e: Interval) -> Convexity:
    return f.classify_convexity(e)


def _read_table(path: str):
    xs, ys = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip():
                continue
            try:
                x, y = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if lineno == 1:  # header
                    continue
                raise PreconditionError(f"{path}:{lineno}: expected 'x,y'")
            xs.append(x)
            ys.append(y)
    return xs, ys


def parse_function(spec: str) -> FunctionHandle:
    """Parse ``pow:<s>``, ``exp``, ``neglog``, ``xlogx``, ``logit``,
    ``negpow:<s>``, ``affine:<c0>,<c1>``, ``table:<path>``, optionally
    prefixed by ``<alpha>*`` and suffixed by ``@slow`` or ``@rapid``."""
    text = spec.strip()
    variation = Variation.NONE
    for suffix, var in (("@slow", Variation.SLOW), ("@rapid", Variation.RAPID)):
        if text.endswith(suffix):
            text, variation = text[: -len(suffix)], var
    scale = 1.0
    if "*" in text:
        head, text = text.split("*", 1)
        try:
            scale = float(head)
        except ValueError:
            raise PreconditionError(f"bad scale factor in function spec {spec!r}")
    name, _, arg = text.partition(":")
    try:
        kind = Kind(name)
    except ValueError:
        raise PreconditionError(f"unknown function kind {name!r} in {spec!r}")
    try:
        if kind in (Kind.POW, Kind.NEG_POW):
            params = (float(arg),)
        elif kind is Kind.AFFINE:
            c0, c1 = arg.split(",")
            params = (float(c0), float(c1))
        else:
            params = ()
    except ValueError:
        raise PreconditionError(f"bad parameters in function spec {spec!r}")
    if kind is Kind.TABLE:
        xs, ys = _read_table(arg)
        return FunctionHandle(Kind.TABLE, nodes=(tuple(xs), tuple(ys)),
                              variation=variation, scale=scale, source=arg)
    if kind not in (Kind.POW, Kind.NEG_POW, Kind.AFFINE) and arg:
        raise PreconditionError(f"{kind.value} takes no parameters: {spec!r}")
    return FunctionHandle(kind, params, variation=variation, scale=scale)
