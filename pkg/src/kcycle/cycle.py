"""Recursive multigrid cycles controlled by a per-call cycle counter.

`kappa_cycle` makes one recursive call that inherits its counter and, while
the counter exceeds one, a second call with the counter reduced by one.
Counter 1 reproduces the V-cycle, 2 the F-cycle, and any counter at least
the level count reproduces the W-cycle.  The classical cycle-index form
(`gamma_cycle`) and the F form (`f_cycle`) are implemented alongside as
independent cross-checks; all three execute the standard shape on every
level, including the redundant repeat at the second-coarsest level, whose
extra coarsest solves are exact no-ops numerically but are counted.

Every routine call is recorded in `CycleStats`: per-level visit counts, an
ordered (level, counter) trace, kernel-equivalent launches (nu1 + nu2 + 5
per call above the coarsest: the relaxations plus residual, restrict, zero,
prolong, and correction add; one per coarsest solve), and unknown-touch op
units (the level's unknown count per call).

A solve owns its per-level state exclusively; separate solves may run
concurrently.  Levels are numbered 1 (finest) to n (coarsest).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .mesh import Coarsening, GridFunction, HierarchySpec, build_hierarchy, norm2
from .smoother import SmootherKind, SmootherSpec, TridiagonalSystem, relax, thomas_solve
from .stencil import ProblemSpec, Stencil9, operator_hierarchy, residual
from .transfer import prolong, restrict

__all__ = [
    "CycleConfig",
    "CycleStats",
    "SolveReport",
    "DryState",
    "GridState",
    "build_state",
    "coarsest_solve",
    "kappa_cycle",
    "gamma_cycle",
    "f_cycle",
    "run_cycle",
    "solve_standalone",
    "bench_cycle",
    "BenchResult",
]


@dataclass(frozen=True)
class CycleConfig:
    """Cycle shape and smoothing configuration.

    `kappa` is the cycle counter (math.inf runs as kappa = n); `gamma` is
    used only by the classical-form oracle `gamma_cycle`.
    """

    n: int
    kappa: int | float = 1
    nu1: int = 2
    nu2: int = 2
    smoother: SmootherSpec = SmootherSpec(SmootherKind.DAMPED_JACOBI, omega=0.8)
    coarsening: Coarsening = Coarsening.FULL_STANDARD
    gamma: int = 1
    coarse_op: str = "galerkin"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"level count must be >= 1, got {self.n}")
        if self.kappa != math.inf and (self.kappa < 1 or int(self.kappa) != self.kappa):
            raise ValueError(f"kappa must be a positive integer or inf, got {self.kappa}")
        if self.gamma < 1:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")
        if self.nu1 < 0 or self.nu2 < 0:
            raise ValueError("relaxation counts must be >= 0")

    @property
    def effective_kappa(self) -> int:
        return self.n if self.kappa == math.inf else int(self.kappa)


@dataclass
class CycleStats:
    """Execution instrumentation accumulated across routine calls."""

    visits: list[int]
    kernel_launches: int = 0
    unknown_touches: float = 0.0
    trace: list[tuple[int, int]] = field(default_factory=list)

    @classmethod
    def for_levels(cls, n: int) -> "CycleStats":
        return cls(visits=[0] * n)

    def record_call(self, level: int, counter: int, unknowns: int, coarsest: bool, nu: int):
        self.visits[level - 1] += 1
        self.trace.append((level, counter))
        if coarsest:
            self.kernel_launches += 1
        else:
            self.kernel_launches += 5 + nu
        self.unknown_touches += unknowns

    def level_sequence(self) -> list[int]:
        return [level for level, _ in self.trace]

    def counter_sequence(self) -> list[int]:
        return [counter for _, counter in self.trace]


class DryState:
    """Recursion-only stand-in: exercises the cycle control flow and its
    instrumentation without allocating or touching grid data."""

    def __init__(self, n: int, nu1: int = 0, nu2: int = 0,
                 coarsening: Coarsening = Coarsening.FULL_STANDARD):
        self.spec = build_hierarchy(n, coarsening)
        self.n = n
        self.nu1 = nu1
        self.nu2 = nu2

    def unknowns(self, level: int) -> int:
        return self.spec.unknowns(level)

    def relax_level(self, level: int, count: int):
        pass

    def restrict_residual(self, level: int):
        pass

    def zero_guess(self, level: int):
        pass

    def prolong_add(self, level: int):
        pass

    def solve_coarsest(self):
        pass


class GridState:
    """Per-level (v, f, A) data plus the numerical kernels of one solve."""

    def __init__(self, spec: HierarchySpec, ops: list[Stencil9],
                 smoother: SmootherSpec, nu1: int, nu2: int):
        self.spec = spec
        self.n = spec.n
        self.ops = ops
        self.smoother = smoother
        self.nu1 = nu1
        self.nu2 = nu2
        self.v = [np.zeros((ny, nx)) for nx, ny in spec.dims]
        self.f = [np.zeros((ny, nx)) for nx, ny in spec.dims]

    def unknowns(self, level: int) -> int:
        return self.spec.unknowns(level)

    def relax_level(self, level: int, count: int):
        i = level - 1
        self.v[i] = relax(self.ops[i], self.v[i], self.f[i], self.smoother, count)

    def restrict_residual(self, level: int):
        i = level - 1
        r = residual(self.ops[i], self.v[i], self.f[i])
        self.f[i + 1] = restrict(r, self.spec.coarsening)

    def zero_guess(self, level: int):
        i = level - 1
        self.v[i] = np.zeros_like(self.v[i])

    def prolong_add(self, level: int):
        i = level - 1
        self.v[i] += prolong(self.v[i + 1], self.spec.coarsening)

    def solve_coarsest(self):
        self.v[-1] = coarsest_solve(self.ops[-1], self.f[-1], self.spec.coarsening)


def coarsest_solve(op: Stencil9, f: GridFunction, coarsening: Coarsening) -> GridFunction:
    """Exact coarsest-level solve: scalar division on a single node, Thomas
    elimination of the x-tridiagonal row operator on a single line."""
    ny, nx = f.shape
    if ny == 1 and nx == 1:
        center = op.center
        if center == 0.0:
            raise np.linalg.LinAlgError("singular coarsest operator")
        return f / center
    if coarsening is Coarsening.SEMI_Y and ny == 1:
        # cross-row stencil entries hit implicit boundary zeros
        w = op.w
        system = TridiagonalSystem(
            lower=np.full(nx, w[1, 0]),
            diag=np.full(nx, w[1, 1]),
            upper=np.full(nx, w[1, 2]),
            rhs=f[0].copy(),
        )
        return thomas_solve(system).reshape(1, nx)
    raise ValueError(f"not a coarsest grid for {coarsening}: shape {f.shape}")


def kappa_cycle(state, level: int, kappa: int, stats: CycleStats):
    """One counter-driven cycle starting at `level`; updates state in place."""
    if kappa < 1:
        raise ValueError(f"cycle counter must be >= 1, got {kappa}")
    coarsest = level == state.n
    stats.record_call(level, kappa, state.unknowns(level), coarsest, state.nu1 + state.nu2)
    if coarsest:
        state.solve_coarsest()
        return
    state.relax_level(level, state.nu1)
    state.restrict_residual(level)
    state.zero_guess(level + 1)
    kappa_cycle(state, level + 1, kappa, stats)
    if kappa > 1:
        kappa_cycle(state, level + 1, kappa - 1, stats)
    state.prolong_add(level)
    state.relax_level(level, state.nu2)


def gamma_cycle(state, level: int, gamma: int, stats: CycleStats):
    """Classical cycle-index form: `gamma` identical recursive calls per level."""
    if gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    coarsest = level == state.n
    stats.record_call(level, gamma, state.unknowns(level), coarsest, state.nu1 + state.nu2)
    if coarsest:
        state.solve_coarsest()
        return
    state.relax_level(level, state.nu1)
    state.restrict_residual(level)
    state.zero_guess(level + 1)
    for _ in range(gamma):
        gamma_cycle(state, level + 1, gamma, stats)
    state.prolong_add(level)
    state.relax_level(level, state.nu2)


def f_cycle(state, level: int, stats: CycleStats):
    """Classical F form: one recursive F call followed by a V call.

    Trace counters mirror the counter form: 2 on F calls, 1 on the embedded
    V calls.
    """
    coarsest = level == state.n
    stats.record_call(level, 2, state.unknowns(level), coarsest, state.nu1 + state.nu2)
    if coarsest:
        state.solve_coarsest()
        return
    state.relax_level(level, state.nu1)
    state.restrict_residual(level)
    state.zero_guess(level + 1)
    f_cycle(state, level + 1, stats)
    gamma_cycle(state, level + 1, 1, stats)
    state.prolong_add(level)
    state.relax_level(level, state.nu2)


def run_cycle(state, config: CycleConfig, stats: CycleStats):
    """One top-level cycle per the config's counter (inf runs as n)."""
    kappa_cycle(state, 1, config.effective_kappa, stats)


def build_state(problem: ProblemSpec, config: CycleConfig) -> GridState:
    """Hierarchy dims and per-level operators for one solve."""
    spec = build_hierarchy(config.n, config.coarsening)
    ops = operator_hierarchy(problem, spec, config.coarse_op)
    return GridState(spec, ops, config.smoother, config.nu1, config.nu2)


CONVERGED = "converged"
DIVERGED = "diverged"
MAX_CYCLES = "max_cycles"
BREAKDOWN = "breakdown"

_DIVERGENCE_STREAK = 5


@dataclass
class SolveReport:
    """Outcome of an outer solve loop."""

    status: str
    iterations: int
    initial_error_norm: float
    final_error_norm: float
    per_cycle_reduction: list[float]
    asymptotic_factor: float | None
    stats: CycleStats
    wall_time_ms: float
    solution: GridFunction | None = None


def _asymptotic_factor(reductions: list[float], window: int = 5) -> float | None:
    tail = reductions[-window:]
    if not tail or any(r <= 0.0 for r in tail):
        return None
    return float(math.exp(sum(math.log(r) for r in tail) / len(tail)))


def solve_standalone(
    problem: ProblemSpec,
    config: CycleConfig,
    target_reduction: float = 1e8,
    max_cycles: int = 10000,
    initial_guess: GridFunction | None = None,
) -> SolveReport:
    """Drive repeated cycles on the zero-solution problem.

    The right-hand side is zero and the initial guess is seeded uniform
    random in [0, 1), so the error norm is the iterate norm.  Stops when the
    initial error norm has been reduced by `target_reduction`; error growth
    on five consecutive cycles is reported as divergence, distinct from
    running out of cycles.
    """
    if target_reduction <= 1.0:
        raise ValueError(f"target reduction must exceed 1, got {target_reduction}")
    state = build_state(problem, config)
    ny, nx = state.v[0].shape
    if initial_guess is None:
        rng = np.random.default_rng(problem.seed)
        state.v[0] = rng.random((ny, nx))
    else:
        if initial_guess.shape != (ny, nx):
            raise ValueError(f"initial guess shape {initial_guess.shape} != {(ny, nx)}")
        state.v[0] = initial_guess.astype(float).copy()

    stats = CycleStats.for_levels(config.n)
    start = time.perf_counter()
    norm0 = norm2(state.v[0])
    target = norm0 / target_reduction
    reductions: list[float] = []
    status = MAX_CYCLES
    iterations = 0
    current = norm0
    growth_streak = 0

    if norm0 <= target:  # zero (or subnormal) start is already converged
        status = CONVERGED
    else:
        for iterations in range(1, max_cycles + 1):
            run_cycle(state, config, stats)
            previous, current = current, norm2(state.v[0])
            reductions.append(current / previous if previous > 0.0 else 0.0)
            if current <= target:
                status = CONVERGED
                break
            growth_streak = growth_streak + 1 if current > previous else 0
            if growth_streak >= _DIVERGENCE_STREAK:
                status = DIVERGED
                break

    wall_ms = (time.perf_counter() - start) * 1e3
    return SolveReport(
        status=status,
        iterations=iterations,
        initial_error_norm=norm0,
        final_error_norm=current,
        per_cycle_reduction=reductions,
        asymptotic_factor=_asymptotic_factor(reductions),
        stats=stats,
        wall_time_ms=wall_ms,
        solution=state.v[0],
    )


@dataclass(frozen=True)
class BenchResult:
    """Single-cycle benchmark cell: mean wall ms (None for dry runs) plus
    exact per-cycle launch and op-unit counts."""

    kappa: int | float
    n: int
    mean_ms: float | None
    launches: int
    op_units: float


def bench_cycle(problem: ProblemSpec, config: CycleConfig, reps: int) -> BenchResult:
    """Time `reps` repetitions of one cycle on fixed random data.

    reps = 0 skips numerics entirely (counts stay exact via a dry run).
    """
    if reps < 0:
        raise ValueError(f"reps must be >= 0, got {reps}")
    counts = CycleStats.for_levels(config.n)
    if reps == 0:
        dry = DryState(config.n, config.nu1, config.nu2, config.coarsening)
        run_cycle(dry, config, counts)
        return BenchResult(config.kappa, config.n, None, counts.kernel_launches, counts.unknown_touches)

    state = build_state(problem, config)
    rng = np.random.default_rng(problem.seed)
    v0 = rng.random(state.v[0].shape)
    state.v[0] = v0.copy()
    run_cycle(state, config, counts)  # warmup; also the exact per-cycle counts

    times = []
    stats = CycleStats.for_levels(config.n)
    for _ in range(reps):
        state.v[0] = v0.copy()
        t0 = time.perf_counter()
        run_cycle(state, config, stats)
        times.append(time.perf_counter() - t0)
    return BenchResult(
        config.kappa, config.n, 1e3 * float(np.mean(times)),
        counts.kernel_launches, counts.unknown_touches,
    )
