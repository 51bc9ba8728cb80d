"""Weighted samples, intervals, and the Jensen / Jensen-Mercer functionals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import DomainError, PreconditionError

if TYPE_CHECKING:
    from .functions import FunctionHandle

#: Largest relative deviation of sum(weights) from 1 that is silently renormalized.
RENORMALIZE_TOL = 1e-6


def _frozen_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise PreconditionError(f"{name} must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class WeightedSample:
    """Points ``x_i`` with positive weights ``p_i`` summing to one.

    Weights are renormalized on construction when their sum is within
    ``RENORMALIZE_TOL`` (relative) of one; anything further off is rejected.
    The arrays are read-only.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = _frozen_array(self.points, "points")
        p = np.array(self.weights, dtype=float).reshape(-1)
        if x.size < 1:
            raise PreconditionError("a sample needs at least one point")
        if p.size != x.size:
            raise PreconditionError(
                f"{x.size} points but {p.size} weights")
        if not np.all(np.isfinite(p)) or np.any(p <= 0):
            raise PreconditionError("every weight must be positive and finite")
        total = math.fsum(p)
        if abs(total - 1.0) > RENORMALIZE_TOL:
            raise PreconditionError(
                f"weights sum to {total!r}; expected 1 within {RENORMALIZE_TOL}")
        p = p / total
        p.flags.writeable = False
        object.__setattr__(self, "points", x)
        object.__setattr__(self, "weights", p)

    @classmethod
    def uniform(cls, points: Sequence[float]) -> "WeightedSample":
        n = len(points)
        return cls(points, np.full(n, 1.0 / n) if n else [])

    @property
    def n(self) -> int:
        return int(self.points.size)

    @property
    def mean(self) -> float:
        return float(np.dot(self.weights, self.points))

    def __eq__(self, other):
        if not isinstance(other, WeightedSample):
            return NotImplemented
        return (np.array_equal(self.points, other.points)
                and np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash((self.points.tobytes(), self.weights.tobytes()))

    def to_dict(self) -> dict:
        return {"points": self.points.tolist(), "weights": self.weights.tolist()}


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]``; ``lo == hi`` is allowed (degenerate)."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise PreconditionError("interval endpoints must be finite")
        if lo > hi:
            raise PreconditionError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all((x >= self.lo) & (x <= self.hi)))

    def require_contains(self, s: WeightedSample, tag: str | None = None):
        if not self.contains(s.points):
            bad = s.points[(s.points < self.lo) | (s.points > self.hi)].tolist()
            raise PreconditionError(
                f"point {bad[0]!r} lies outside [{self.lo!r}, {self.hi!r}]",
                tag=tag)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi}


def jensen_functional(s: WeightedSample, f: "FunctionHandle") -> float:
    """``sum p_i f(x_i) - f(sum p_i x_i)``.

    No sign is enforced: for non-convex ``f`` the value may be negative.
    Affine ``f`` returns exactly zero.
    """
    if f.is_affine:
        f.eval(s.points)
        return 0.0
    fx = f.eval(s.points)
    return float(np.dot(s.weights, fx) - f.eval(s.mean))


def mercer_functional(s: WeightedSample, e: Interval, f: "FunctionHandle") -> float:
    """``f(a) + f(b) - sum p_i f(x_i) - f(a + b - sum p_i x_i)``."""
    e.require_contains(s, tag="Eq1")
    a, b = e.lo, e.hi
    if f.is_affine:
        f.eval(s.points)
        return 0.0
    fx = f.eval(s.points)
    reflected = a + b - s.mean
    # rounding can push the reflected mean a hair outside [a, b]
    reflected = min(max(reflected, a), b)
    return float(f.eval(a) + f.eval(b) - np.dot(s.weights, fx) - f.eval(reflected))


def quadratic_gap(s: WeightedSample) -> float:
    """Weighted variance ``sum p_i x_i^2 - (sum p_i x_i)^2``.

    Evaluated in centered form so the result is never negative.
    """
    d = s.points - s.mean
    return float(np.dot(s.weights, d * d))


def mercer_quadratic_gap(s: WeightedSample, e: Interval) -> float:
    """Jensen-Mercer functional of ``x^2``: ``2(mean - a)(b - mean) - Q``."""
    e.require_contains(s, tag="Thm2.9")
    mu = min(max(s.mean, e.lo), e.hi)
    return 2.0 * (mu - e.lo) * (e.hi - mu) - quadratic_gap(s)


def require_positive(s: WeightedSample, what: str, tag: str | None = None):
    if np.any(s.points <= 0):
        raise DomainError(f"{what} requires positive points", tag=tag)
