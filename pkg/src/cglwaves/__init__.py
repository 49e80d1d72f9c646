"""Numerical standing waves of the complex Ginzburg-Landau equation.

The pipeline: discretize the domain, take a simple eigenvalue of -Laplacian,
seed the branch at alpha = 0 with the closed-form (mu0, omega0), continue in
alpha with a bordered Newton corrector, scale the result into a standing wave,
and verify it through integral identities, torus extension, rescaling and
direct time evolution.
"""

from .config import RunConfig, load_config, parse_config
from .continuation import (
    BranchPoint,
    BranchTable,
    ContinuationProblem,
    continue_branch,
    initial_point,
)
from .domain import (
    dump_field,
    gradient_norm_sq,
    inner_product,
    laplacian_apply,
    load_field,
    make_domain,
)
from .eigen import EigenPair, SimplicityCertificate, check_simple, eigenpairs
from .errors import (
    AlphaZero,
    Blowup,
    CglError,
    ConfigError,
    DegenerateEigenvalue,
    EigensolverError,
    GridMismatch,
    GridTooCoarse,
    NoConvergence,
    SingularBordered,
)
from .evolution import CglIntegrator, EvolutionReport, step_cgl, verify_standing_wave
from .nonlinearity import alpha_cap, nonlinear_term, nonlinear_term_derivative
from .params import Params
from .pipeline import run_pipeline
from .postprocess import (
    StandingWave,
    extend_to_torus,
    identity_report,
    rescale_family,
    scale_to_standing_wave,
    strong_residual,
)

__version__ = "0.1.0"
