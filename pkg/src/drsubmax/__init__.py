"""Maximization of non-monotone DR-submodular functions over down-closed polytopes."""

from ._kernels import USING_NUMBA
from .algorithms import (
    Trace,
    TwoPhaseConfig,
    nonconvex_frank_wolfe,
    nonmonotone_fw,
    nonstationarity,
    projected_gradient_ascent,
    two_phase_fw,
)
from .constraints import DownClosedPolytope, tightest_upper_bound
from .instances import (
    Instance,
    brute_force_opt,
    gen_quadratic_exponential,
    gen_quadratic_uniform,
    gen_softmax,
    generate,
    load_instance,
    save_instance,
)
from .objectives import (
    LogisticObjective,
    MeanFieldObjective,
    QuadraticObjective,
    SoftmaxObjective,
    estimate_lipschitz,
)

__version__ = "0.1.0"
