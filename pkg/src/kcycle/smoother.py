"""Relaxation sweeps: damped Jacobi and zebra line Gauss-Seidel.

Zebra relaxation solves alternating-parity grid lines exactly: all
even-indexed lines (0-based) first, simultaneously, then all odd-indexed
lines using the updated even-line values.  Each line is a tridiagonal
system built from the three stencil entries along the line axis, with
cross-line couplings moved to the right-hand side; lines are solved by
direct elimination, with no damping.  Same-parity lines are decoupled, so
their processing order is immaterial.

All sweeps are pure: they return a new grid function and never modify their
inputs, making them safe for concurrent use on distinct grids.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import solve_banded

from .mesh import GridFunction
from .stencil import Stencil9, apply

__all__ = [
    "SmootherKind",
    "SmootherSpec",
    "TridiagonalSystem",
    "thomas_solve",
    "damped_jacobi_sweep",
    "zebra_line_sweep",
    "relax",
]


class SmootherKind(Enum):
    DAMPED_JACOBI = "jacobi"
    ZEBRA_X = "zebra-x"
    ZEBRA_Y = "zebra-y"
    ZEBRA_ALTERNATING = "zebra-xy"


@dataclass(frozen=True)
class SmootherSpec:
    """Relaxation kind plus the Jacobi damping factor (ignored by zebra)."""

    kind: SmootherKind
    omega: float = 0.8

    def __post_init__(self):
        if self.kind is SmootherKind.DAMPED_JACOBI and not 0.0 < self.omega <= 1.0:
            raise ValueError(f"jacobi damping must lie in (0, 1], got {self.omega}")


@dataclass
class TridiagonalSystem:
    """Tridiagonal system; lower[0] and upper[-1] are unused."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        m = len(self.diag)
        if not (len(self.lower) == len(self.upper) == len(self.rhs) == m):
            raise ValueError("tridiagonal bands and rhs must have equal length")


def thomas_solve(system: TridiagonalSystem) -> np.ndarray:
    """Direct tridiagonal solve by forward elimination, no pivoting."""
    a, b, c, d = system.lower, system.diag, system.upper, system.rhs
    m = len(b)
    cp = np.empty(m)
    dp = np.empty(m)
    piv = b[0]
    if piv == 0.0:
        raise np.linalg.LinAlgError("zero pivot in tridiagonal elimination")
    cp[0] = c[0] / piv
    dp[0] = d[0] / piv
    for i in range(1, m):
        piv = b[i] - a[i] * cp[i - 1]
        if piv == 0.0:
            raise np.linalg.LinAlgError("zero pivot in tridiagonal elimination")
        cp[i] = c[i] / piv
        dp[i] = (d[i] - a[i] * dp[i - 1]) / piv
    x = np.empty(m)
    x[m - 1] = dp[m - 1]
    for i in range(m - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


def damped_jacobi_sweep(op: Stencil9, u: GridFunction, f: GridFunction, omega: float) -> GridFunction:
    """One damped Jacobi sweep, computed entirely from the pre-sweep u."""
    center = op.center
    if center == 0.0:
        raise ValueError("zero center coefficient")
    return u + (omega / center) * (f - apply(op, u))


def _transposed(op: Stencil9) -> Stencil9:
    return Stencil9(op.w.T)


def zebra_line_sweep(op: Stencil9, u: GridFunction, f: GridFunction, axis: str) -> GridFunction:
    """One full zebra sweep with lines along `axis` ("x" or "y")."""
    if u.shape != f.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {f.shape}")
    if axis == "y":
        return zebra_line_sweep(_transposed(op), u.T, f.T, "x").T
    if axis != "x":
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")

    ny, nx = u.shape
    w = op.w
    # cross-line part of the operator (north and south rows only)
    woff = w.copy()
    woff[1, :] = 0.0
    off = Stencil9(woff)
    # one banded matrix serves every line: constant coefficients
    ab = np.zeros((3, nx))
    ab[0, 1:] = w[1, 2]
    ab[1, :] = w[1, 1]
    ab[2, :-1] = w[1, 0]

    out = u.copy()
    for start in (0, 1):
        if start >= ny:
            break
        rhs = (f - apply(off, out))[start::2]
        sol = solve_banded((1, 1), ab, rhs.T, overwrite_ab=False, overwrite_b=False)
        out[start::2] = sol.T
    return out


def relax(op: Stencil9, u: GridFunction, f: GridFunction, spec: SmootherSpec, count: int) -> GridFunction:
    """Apply `count` relaxation units.

    For ZEBRA_ALTERNATING one x-sweep plus one y-sweep counts as two units,
    so `count` must be even.
    """
    if count < 0:
        raise ValueError(f"relaxation count must be >= 0, got {count}")
    if spec.kind is SmootherKind.DAMPED_JACOBI:
        for _ in range(count):
            u = damped_jacobi_sweep(op, u, f, spec.omega)
    elif spec.kind is SmootherKind.ZEBRA_X:
        for _ in range(count):
            u = zebra_line_sweep(op, u, f, "x")
    elif spec.kind is SmootherKind.ZEBRA_Y:
        for _ in range(count):
            u = zebra_line_sweep(op, u, f, "y")
    elif spec.kind is SmootherKind.ZEBRA_ALTERNATING:
        if count % 2 != 0:
            raise ValueError("alternating zebra needs an even relaxation count")
        for _ in range(count // 2):
            u = zebra_line_sweep(op, u, f, "x")
            u = zebra_line_sweep(op, u, f, "y")
    else:
        raise ValueError(f"unknown smoother kind: {spec.kind!r}")
    return u
