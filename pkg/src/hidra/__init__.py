"""Evolution strategies for high-dimensional, noisy black-box optimization.

The package bundles three rank-based strategies behind one ask/tell surface
(an identity-covariance baseline, full matrix adaptation, and a limited-
memory low-rank variant), adaptive re-evaluation for noisy fitness,
restarts with population doubling, a synthetic benchmark family with
controllable conditioning and noise, a stochastic controller-design task,
and a CLI experiment harness that writes per-generation CSV traces.
"""
from .benchmarks import (
    EllipsoidSpec,
    NoiseModel,
    apply_noise,
    ellipsoid_eigs,
    ellipsoid_objective,
    eval_ellipsoid,
    make_ellipsoid,
    rosenbrock,
    rosenbrock_objective,
    sphere_objective,
)
from .control import (
    PointMassObjective,
    PointMassTask,
    PolicyNetwork,
    param_count,
    policy_forward,
    rollout,
)
from .core import Budget, Objective, RngStream, evaluate_counted, spawn_stream
from .errors import (
    BudgetExhaustedError,
    ConfigError,
    ContractViolationError,
    HidraError,
    ProtocolError,
    UpdateSkippedError,
)
from .kernels import BACKEND
from .restarts import StopCriteria, default_stop_criteria, restart_params, should_stop
from .strategies import (
    StrategyParams,
    StrategyState,
    ask,
    default_params,
    expected_norm,
    init_state,
    tell,
    transform_apply,
)
from .uncertainty import (
    UncertaintyState,
    adapt,
    evaluate_generation,
    mean_evaluate,
    rank_change,
)

__version__ = "0.1.0"
