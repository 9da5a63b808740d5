"""Geometric multigrid with a cycle-counter recursion family.

A single integer counter spans the classical cycle shapes: 1 gives the
V-cycle, 2 the F-cycle, and any value at least the level count gives the
W-cycle, with new intermediate shapes in between.  The package bundles

* the recursive cycles with full execution instrumentation (`cycle`),
* the rotated anisotropic diffusion model problem, Galerkin coarsening,
  transfers, and damped-Jacobi / zebra-line smoothers (`stencil`,
  `transfer`, `smoother`, `mesh`),
* cycle-preconditioned conjugate gradients (`krylov`),
* closed-form call-count combinatorics, per-cycle operation counts, a
  two-parameter run-time model with least-squares fitting, and
  turning-point analysis (`costmodel`),
* a command-line driver (`kcycle ...` or `python -m kcycle`).
"""

from .costmodel import (
    CostModelParams,
    CostReport,
    OpCountSpec,
    RankDeficientError,
    TurningPoint,
    binom_real,
    coarse_counter_histogram,
    cost_report,
    f_factor,
    fit_params,
    level_calls,
    n_gpu_calls,
    n_ops_model,
    ops_per_unknown,
    predict_runtime,
    total_calls,
    turning_point,
)
from .cycle import (
    BREAKDOWN,
    CONVERGED,
    DIVERGED,
    MAX_CYCLES,
    BenchResult,
    CycleConfig,
    CycleStats,
    DryState,
    GridState,
    SolveReport,
    bench_cycle,
    build_state,
    coarsest_solve,
    f_cycle,
    gamma_cycle,
    kappa_cycle,
    run_cycle,
    solve_standalone,
)
from .krylov import PcgConfig, pcg_solve
from .mesh import (
    Coarsening,
    GridFunction,
    HierarchySpec,
    add_scaled,
    build_hierarchy,
    dot,
    grid_zeros,
    norm2,
    zero_fill,
)
from .smoother import (
    SmootherKind,
    SmootherSpec,
    TridiagonalSystem,
    damped_jacobi_sweep,
    relax,
    thomas_solve,
    zebra_line_sweep,
)
from .stencil import (
    ProblemSpec,
    Stencil9,
    galerkin_coarsen,
    operator_hierarchy,
    residual,
    rotated_anisotropic_stencil,
)
from .transfer import TransferPair, prolong, restrict, restriction_scale

__version__ = "0.1.0"
