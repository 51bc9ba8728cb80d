"""Jensen and Jensen-Mercer gaps for weighted samples, with their converse,
sandwich and two-sided bounds."""

from .applications import (KyFanReport, MeansSummary, MomentBoundReport, classical_means,
                           kyfan_report, mean_comparison_bounds, moment_bounds, power_mean,
                           power_mean_gap, power_mean_gap_bound)
from .bounds import Bound, JensenBoundReport, MercerBoundReport, jensen_bounds, mercer_bounds
from .characteristic import (CharacteristicEstimate, GridConfig, characteristic_closed_form,
                             characteristic_numeric, characteristic_oracle_power)
from .core import (Interval, WeightedSample, jensen_functional, mercer_functional,
                   mercer_quadratic_gap, quadratic_gap)
from .errors import (ConfigError, DegenerateError, DomainError, JensenGapError, NumericError,
                     PreconditionError, UnboundedError)
from .functions import (Convexity, FunctionHandle, Kind, SecondDerivRange, Variation,
                        parse_function)
from .verify import VerificationConfig, VerificationReport, lemma1_check, verify_inequalities

__version__ = "0.1.0"
