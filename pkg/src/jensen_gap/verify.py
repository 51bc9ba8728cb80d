"""Randomized stress test of every implemented inequality.

Each trial draws its own generator from ``(seed, trial index)``: the sample
size is uniform on ``n_range``, points are uniform on the interval and the
weights are normalized standard exponential draws (flat Dirichlet). Trials
are therefore independent of how they are scheduled, and serial and
parallel runs yield identical reports.

Every check is a triple (value, bound, side); its slack is the signed
distance to the bound (negative means the inequality failed) and its
relative slack divides by ``max(1, |value|, |bound|)``. A violation is a
relative slack below ``-1e-9``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import applications as app
from .bounds import REL_TOL, jensen_bounds, mercer_bounds
from .characteristic import characteristic_closed_form
from .core import Interval, WeightedSample
from .errors import ConfigError, DegenerateError, JensenGapError, UnboundedError
from .functions import FunctionHandle, Kind

JENSEN_TAGS = ("Jensen", "Eq2", "Eq4", "Thm2.5", "Thm2.6", "TwoSided", "Cor2.8")
MERCER_TAGS = ("Eq1", "Eq3", "Eq5", "Thm2.9")
MEANS_TAGS = ("Thm3.1", "Thm3.2", "Eq6", "Eq7")
KYFAN_TAGS = ("KyFan-S", "KyFan-Exp", "KyFan-T", "KyFan-Cor")
MOMENT_TAGS = ("Eq8", "Eq9", "Eq10", "Eq11", "Eq12")
ALL_TAGS = JENSEN_TAGS + MERCER_TAGS + MEANS_TAGS + KYFAN_TAGS + MOMENT_TAGS

CONVEX_ONLY = {"Jensen", "Eq2", "Eq4", "TwoSided", "Cor2.8", "Eq1", "Eq3", "Eq5"}
NEEDS_RANGE = {"Thm2.5", "Thm2.6", "TwoSided", "Cor2.8", "Thm2.9"}

# relative-slack histogram edges
HIST_EDGES = (-math.inf, -REL_TOL, 0.0, 1e-12, 1e-9, 1e-6, 1e-3, 1e-1, math.inf)
HIST_LABELS = ("violation", "within_tol", "[0,1e-12)", "[1e-12,1e-9)",
               "[1e-9,1e-6)", "[1e-6,1e-3)", "[1e-3,1e-1)", ">=1e-1")


@dataclass(frozen=True)
class VerificationConfig:
    function: FunctionHandle
    interval: Interval
    tags: Tuple[str, ...]
    n_range: Tuple[int, int] = (1, 10)
    trials: int = 1000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "tags", tuple(self.tags))
        object.__setattr__(self, "n_range", tuple(int(v) for v in self.n_range))
        lo, hi = self.n_range
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not (1 <= lo <= hi <= 10**6):
            raise ConfigError(f"n_range {self.n_range} must satisfy 1 <= min <= max <= 1e6")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        unknown = [t for t in self.tags if t not in ALL_TAGS]
        if unknown:
            raise ConfigError(f"unknown bound tag(s) {unknown}; known: {list(ALL_TAGS)}")
        if not self.tags:
            raise ConfigError("no bound tags selected")

    def to_dict(self) -> dict:
        return {"function": self.function.to_spec(), "interval": self.interval.to_dict(),
                "tags": list(self.tags), "n_range": list(self.n_range),
                "trials": self.trials, "seed": self.seed}


@dataclass
class BoundStats:
    checks: int = 0
    violations: int = 0
    min_slack: float = math.inf
    min_rel_slack: float = math.inf
    tightest_trial: Optional[int] = None
    tightest_value: Optional[float] = None
    tightest_bound: Optional[float] = None
    histogram: List[int] = field(default_factory=lambda: [0] * len(HIST_LABELS))

    def to_dict(self) -> dict:
        return {
            "checks": self.checks,
            "violations": self.violations,
            "min_slack": self.min_slack,
            "min_rel_slack": self.min_rel_slack,
            "tightest": {"trial": self.tightest_trial, "value": self.tightest_value,
                         "bound": self.tightest_bound},
            "histogram": dict(zip(HIST_LABELS, self.histogram)),
        }


@dataclass
class VerificationReport:
    config: dict
    trials: int
    violations: int
    worst: Optional[dict]
    per_bound: Dict[str, BoundStats]
    instances: Dict[int, dict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "trials": self.trials,
            "violations": self.violations,
            "worst": self.worst,
            "per_bound": {k: v.to_dict() for k, v in sorted(self.per_bound.items())},
            "instances": {str(k): v for k, v in sorted(self.instances.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def tightest_instance(self, key: str) -> dict:
        return self.instances[self.per_bound[key].tightest_trial]


# -- sampling ----------------------------------------------------------------


def draw_sample(cfg: VerificationConfig, trial: int) -> WeightedSample:
    rng = np.random.default_rng([cfg.seed, trial])
    lo, hi = cfg.n_range
    n = int(rng.integers(lo, hi + 1))
    e = cfg.interval
    x = rng.uniform(e.lo, e.hi, n) if not e.degenerate else np.full(n, e.lo)
    x = np.clip(x, e.lo, e.hi)
    w = rng.standard_exponential(n)
    w[w == 0] = np.finfo(float).tiny
    return WeightedSample(x, w / w.sum())


# -- hypotheses --------------------------------------------------------------


def _convex(f, e) -> bool:
    try:
        rng = f.second_derivative_range(e)
    except UnboundedError:
        return bool(np.all(f._d2(np.array([e.lo, e.hi])) >= 0))
    return rng.m >= -1e-12 * max(abs(rng.m), abs(rng.M), 1.0)


def _exponent(f: FunctionHandle, tag: str) -> float:
    if f.kind is not Kind.POW or f.scale != 1.0:
        raise ConfigError(f"{tag} is checked with f = pow:<s> carrying the order", tag=tag)
    return f.exponent


def check_hypotheses(cfg: VerificationConfig):
    """Raise :class:`ConfigError` if any selected tag's hypothesis fails."""
    f, e = cfg.function, cfg.interval
    a, b = e.lo, e.hi
    if not f.domain.contains([a, b]):
        raise ConfigError(f"interval [{a!r}, {b!r}] is outside the domain {f.domain} of {f.to_spec()}")
    tags = set(cfg.tags)
    if tags & CONVEX_ONLY and not _convex(f, e):
        bad = sorted(tags & CONVEX_ONLY)
        raise ConfigError(f"{bad} need f convex on [{a!r}, {b!r}]", tag=bad[0])
    for tag in sorted(tags & NEEDS_RANGE):
        try:
            rng = f.second_derivative_range(e)
        except UnboundedError as exc:
            raise ConfigError(str(exc), tag=tag)
        if tag in ("TwoSided", "Cor2.8") and not rng.m + rng.M > 0:
            raise ConfigError("two-sided bound needs m + M > 0", tag=tag)
    for tag in sorted(tags & {"Eq4", "Eq5"}):
        try:
            c = characteristic_closed_form(f)
        except DegenerateError as exc:
            raise ConfigError(str(exc), tag=tag)
        if c is None:
            raise ConfigError(f"no closed-form c(f) for {f.to_spec()}", tag=tag)
    if tags & set(MEANS_TAGS) and a <= 0:
        raise ConfigError("means need 0 < a", tag=sorted(tags & set(MEANS_TAGS))[0])
    if "Eq6" in tags and not 0 < _exponent(f, "Eq6") < 1:
        raise ConfigError("Eq6 needs pow:alpha with 0 < alpha < 1", tag="Eq6")
    if "Eq7" in tags and not _exponent(f, "Eq7") > 1:
        raise ConfigError("Eq7 needs pow:alpha with alpha > 1", tag="Eq7")
    if tags & {"KyFan-S", "KyFan-Exp"} and not (0 < a and b <= 0.5):
        raise ConfigError("Ky Fan converse needs 0 < a <= x_i <= b <= 1/2", tag="KyFan-S")
    if tags & {"KyFan-T", "KyFan-Cor"} and not app._is_symmetric(e):
        raise ConfigError("T_n bounds need an interval [a, 1-a] with 0 < a < 1/2", tag="KyFan-T")
    moment = tags & set(MOMENT_TAGS)
    if moment:
        s = _exponent(f, sorted(moment)[0])
        ranges = {"Eq8": s >= 2, "Eq9": 1 < s <= 2, "Eq10": 0 < s < 1,
                  "Eq11": s > 1, "Eq12": 0 < s < 1}
        for tag in sorted(moment):
            if not ranges[tag]:
                raise ConfigError(f"order s={s!r} outside the range of {tag}", tag=tag)
        if a < 0 or (s < 2 and a <= 0):
            raise ConfigError("moment bounds need a > 0 (a >= 0 when s >= 2)", tag=sorted(moment)[0])


# -- per-trial evaluation ----------------------------------------------------

Check = Tuple[str, float, float, str]  # (key, value, bound, side)


def _report_checks(report, tags) -> List[Check]:
    out = []
    for name, side, b in report.bound_items():
        if b.source in tags and b.applicable:
            out.append((f"{b.source}:{name}", report.value, b.value, side))
    return out


def trial_checks(cfg: VerificationConfig, s: WeightedSample) -> List[Check]:
    f, e, tags = cfg.function, cfg.interval, set(cfg.tags)
    out: List[Check] = []
    if tags & set(JENSEN_TAGS):
        rep = jensen_bounds(s, e, f)
        out += _report_checks(rep, tags)
        if "Jensen" in tags:
            out.append(("Jensen:nonnegative", rep.value, 0.0, "lower"))
    if tags & set(MERCER_TAGS):
        rep = mercer_bounds(s, e, f)
        out += _report_checks(rep, tags)
        if "Eq1" in tags:
            out.append(("Eq1:nonnegative", rep.value, 0.0, "lower"))
    if tags & {"Thm3.1", "Thm3.2"}:
        m = app.classical_means(s)
        qb, db = app.mean_comparison_bounds(e)
        A, G, H = m.arithmetic, m.geometric, m.harmonic
        pairs = (("A/H", A, H), ("A/G", A, G), ("G/H", G, H))
        if "Thm3.1" in tags:
            for lbl, num, den in pairs:
                out.append((f"Thm3.1:{lbl}:lower", num / den, 1.0, "lower"))
                out.append((f"Thm3.1:{lbl}:upper", num / den, qb, "upper"))
        if "Thm3.2" in tags:
            for lbl, big, small in pairs:
                lbl = lbl.replace("/", "-")
                out.append((f"Thm3.2:{lbl}:lower", big - small, 0.0, "lower"))
                out.append((f"Thm3.2:{lbl}:upper", big - small, db, "upper"))
    for tag in ("Eq6", "Eq7"):
        if tag in tags:
            alpha = f.exponent
            gap = app.power_mean_gap(s, alpha)
            out.append((f"{tag}:lower", gap, 0.0, "lower"))
            out.append((f"{tag}:upper", gap, app.power_mean_gap_bound(e, alpha), "upper"))
    if tags & set(KYFAN_TAGS):
        k = app.kyfan_report(s, e)
        A, G = k.a_ratio, k.g_ratio
        if "KyFan-S" in tags:
            out.append(("KyFan-S:kyfan_lower", A, G, "lower"))
            out.append(("KyFan-S:upper", A, k.converse_factor * G, "upper"))
        if "KyFan-Exp" in tags:
            out.append(("KyFan-Exp:lower", A, k.twosided_lower_factor * G, "lower"))
            out.append(("KyFan-Exp:upper", A, k.twosided_upper_factor * G, "upper"))
        if "KyFan-T" in tags:
            out.append(("KyFan-T:lower", A, G / k.symmetric_factor, "lower"))
            out.append(("KyFan-T:upper", A, k.symmetric_factor * G, "upper"))
        if "KyFan-Cor" in tags:
            out.append(("KyFan-Cor:lower", A, G / k.explicit_factor, "lower"))
            out.append(("KyFan-Cor:upper", A, k.explicit_factor * G, "upper"))
            out.append(("KyFan-Cor:T_le_explicit", k.symmetric_factor, k.explicit_factor, "upper"))
    if tags & set(MOMENT_TAGS):
        r = app.moment_bounds(s, e, f.exponent)
        for tag in ("Eq8", "Eq9", "Eq10"):
            if tag in tags:
                out.append((f"{tag}:lower", r.gap, r.variance_lower, "lower"))
                out.append((f"{tag}:upper", r.gap, r.variance_upper, "upper"))
        for tag in ("Eq11", "Eq12"):
            if tag in tags:
                out.append((f"{tag}:lower", r.gap, 0.0, "lower"))
                out.append((f"{tag}:upper", r.gap, r.char_upper, "upper"))
    return out


def _slack(value: float, bound: float, side: str) -> Tuple[float, float]:
    slack = bound - value if side == "upper" else value - bound
    return slack, slack / max(1.0, abs(value), abs(bound))


def _run_chunk(cfg: VerificationConfig, start: int, stop: int):
    rows = []
    for t in range(start, stop):
        checks = trial_checks(cfg, draw_sample(cfg, t))
        rows.append([(key, v, bnd, *_slack(v, bnd, side)) for key, v, bnd, side in checks])
    return rows


def _evaluate(cfg: VerificationConfig):
    if cfg.workers <= 1:
        return _run_chunk(cfg, 0, cfg.trials)
    n_chunks = min(cfg.trials, 4 * cfg.workers)
    edges = np.linspace(0, cfg.trials, n_chunks + 1).astype(int)
    rows = []
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(_run_chunk, cfg, int(lo), int(hi))
                   for lo, hi in zip(edges[:-1], edges[1:])]
        for fut in futures:
            rows.extend(fut.result())
    return rows


def _instance(cfg, trial: int) -> dict:
    s = draw_sample(cfg, trial)
    return {"trial": trial, **s.to_dict()}


def verify_inequalities(cfg: VerificationConfig) -> VerificationReport:
    """Run the seeded harness and summarize slacks per checked bound."""
    check_hypotheses(cfg)
    rows = _evaluate(cfg)
    stats: Dict[str, BoundStats] = {}
    violations = 0
    worst = None  # (rel_slack, trial, key, value, bound, slack)
    for trial, checks in enumerate(rows):
        for key, value, bound, slack, rel in checks:
            st = stats.setdefault(key, BoundStats())
            st.checks += 1
            st.min_slack = min(st.min_slack, slack)
            if rel < st.min_rel_slack:
                st.min_rel_slack = rel
                st.tightest_trial, st.tightest_value, st.tightest_bound = trial, value, bound
            st.histogram[int(np.searchsorted(HIST_EDGES, rel, side="right")) - 1] += 1
            if rel < -REL_TOL:
                st.violations += 1
                violations += 1
                if worst is None or rel < worst[0]:
                    worst = (rel, trial, key, value, bound, slack)

    instances = {st.tightest_trial: _instance(cfg, st.tightest_trial)
                 for st in stats.values() if st.tightest_trial is not None}
    worst_d = None
    if worst is not None:
        rel, trial, key, value, bound, slack = worst
        worst_d = {"bound": key, "value": value, "bound_value": bound,
                   "slack": slack, "rel_slack": rel, **_instance(cfg, trial)}
    return VerificationReport(cfg.to_dict(), cfg.trials, violations, worst_d,
                              stats, instances)


def default_tags(f: FunctionHandle, e: Interval) -> Tuple[str, ...]:
    """Every Jensen / Jensen-Mercer tag whose hypotheses hold for ``f`` on ``e``."""
    picked = []
    for tag in JENSEN_TAGS + MERCER_TAGS:
        cfg = VerificationConfig(f, e, (tag,), trials=1)
        try:
            check_hypotheses(cfg)
        except JensenGapError:
            continue
        picked.append(tag)
    return tuple(picked)


def lemma1_check(f: FunctionHandle, e: Interval, trials: int = 1000,
                 seed: int = 0) -> VerificationReport:
    """For ``x`` uniform on ``[a, b]`` and ``y = a + b - x`` check
    ``2 f((a+b)/2) <= f(x) + f(y) <= f(a) + f(b)``."""
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if not f.domain.contains([e.lo, e.hi]):
        raise ConfigError(f"interval outside the domain {f.domain}")
    if not _convex(f, e):
        raise ConfigError(f"{f.to_spec()} is not convex on [{e.lo!r}, {e.hi!r}]", tag="Lemma2.1")
    fa, fb, fm = f.eval(e.lo), f.eval(e.hi), f.eval(e.mid)
    stats = {"Lemma2.1:lower": BoundStats(), "Lemma2.1:upper": BoundStats()}
    instances = {}
    violations = 0
    worst = None
    for t in range(trials):
        x = float(np.random.default_rng([seed, t]).uniform(e.lo, e.hi))
        y = e.lo + e.hi - x
        pair = f.eval(x) + f.eval(y)
        for key, bound, side in (("Lemma2.1:lower", 2.0 * fm, "lower"),
                                 ("Lemma2.1:upper", fa + fb, "upper")):
            slack, rel = _slack(pair, bound, side)
            st = stats[key]
            st.checks += 1
            st.min_slack = min(st.min_slack, slack)
            if rel < st.min_rel_slack:
                st.min_rel_slack = rel
                st.tightest_trial, st.tightest_value, st.tightest_bound = t, pair, bound
                instances[t] = {"trial": t, "x": x, "y": y}
            st.histogram[int(np.searchsorted(HIST_EDGES, rel, side="right")) - 1] += 1
            if rel < -REL_TOL:
                st.violations += 1
                violations += 1
                if worst is None or rel < worst["rel_slack"]:
                    worst = {"bound": key, "value": pair, "bound_value": bound,
                             "slack": slack, "rel_slack": rel, "trial": t, "x": x, "y": y}
    keep = {st.tightest_trial for st in stats.values()}
    cfg = {"function": f.to_spec(), "interval": e.to_dict(), "tags": ["Lemma2.1"],
           "trials": trials, "seed": seed}
    return VerificationReport(cfg, trials, violations, worst, stats,
                              {k: v for k, v in instances.items() if k in keep})
