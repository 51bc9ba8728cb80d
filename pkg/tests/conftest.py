import math

import numpy as np
import pytest

from jensen_gap import FunctionHandle, Interval, Kind, WeightedSample

# convex catalog members together with an interval safely inside their domain
CONVEX_CATALOG = [
    (FunctionHandle(Kind.EXP), Interval(-1.0, 2.0)),
    (FunctionHandle(Kind.NEG_LOG), Interval(0.5, 2.0)),
    (FunctionHandle(Kind.X_LOG_X), Interval(0.1, 3.0)),
    (FunctionHandle.pow(2), Interval(0.0, 2.0)),
    (FunctionHandle.pow(3), Interval(0.0, 2.0)),
    (FunctionHandle.pow(-1), Interval(0.5, 3.0)),
    (FunctionHandle.pow(1.5), Interval(0.2, 3.0)),
    (FunctionHandle.neg_pow(0.5), Interval(0.2, 3.0)),
]
CATALOG = CONVEX_CATALOG + [(FunctionHandle(Kind.LOGIT), Interval(0.2, 0.8))]


def catalog_id(item):
    return item[0].to_spec()


def random_sample(rng, e: Interval, n_max: int = 8) -> WeightedSample:
    n = int(rng.integers(1, n_max + 1))
    x = rng.uniform(e.lo, e.hi, n)
    w = rng.standard_exponential(n) + 1e-12
    return WeightedSample(x, w / w.sum())


def plain(f: FunctionHandle, x: float) -> float:
    """Reference evaluation through the math module, independent of numpy paths."""
    k = f.kind
    s = f.params[0] if f.params else None
    base = {
        Kind.EXP: lambda t: math.exp(t),
        Kind.NEG_LOG: lambda t: -math.log(t),
        Kind.X_LOG_X: lambda t: t * math.log(t),
        Kind.LOGIT: lambda t: math.log((1 - t) / t),
        Kind.POW: lambda t: t ** s,
        Kind.NEG_POW: lambda t: -(t ** s),
        Kind.AFFINE: lambda t: f.params[0] + f.params[1] * t,
    }[k]
    return f.scale * base(x)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


# -- acceptance summary --------------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
