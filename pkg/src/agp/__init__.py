"""Single-loop alternating gradient projection for minimax problems.

The solver handles four curvature regimes of min_x max_y f(x, y) --
nonconvex/strongly-concave, nonconvex/concave, strongly-convex/nonconcave
and convex/nonconcave -- with one update per block per iteration, and ships
runtime monitors for the descent/ascent inequalities its convergence
analysis relies on, plus calculators for the corresponding
O(eps^-2) / O(eps^-4) iteration bounds.
"""

from .geometry import (Ball, Box, ConstraintSet, Product, Simplex, UNBOUNDED,
                       WholeSpace, contains, diameter, is_unbounded, max_norm,
                       parse_set, project, sample_point)
from .objective import (MinimaxProblem, Regime, RegularizedObjective,
                        SmoothnessData, make_bilinear, make_nc_sc_sine,
                        make_quadratic, make_robust_svm_toy, make_sc_nc_sine,
                        random_quadratic, regularized_grads)
from .schedules import (CNcConfig, InfeasibleConfigError, NcCConfig, NcScConfig,
                        RegimeConfig, ScNcConfig, StepParams,
                        UnsupportedRegimeError, auto_configure, params_at,
                        validate)
from .solver import (GapVector, NumericFailureError, SolverState, SolverTrace,
                     agp_step, gda_step, potential_value, regularized_gap, run,
                     run_gda, stationarity_gap)
from .verify import (InvalidTraceError, MonitorReport, TheoryConstants,
                     compute_bound, finite_diff_check, grid_extremum,
                     lemma_monitor, rate_slope, saddle_oracle_quadratic,
                     theory_constants)
from .bench import (ConfigError, RunSpec, SummaryRecord, parse_config,
                    rate_experiment, read_trace_csv, run_suite, write_trace_csv)

__version__ = "0.1.0"
