"""Constant nine-point stencils for rotated anisotropic diffusion.

The model operator is -eps*u_xx - u_yy with the (x, y) axes rotated by an
angle phi (degrees) against the grid lines, discretized on a square mesh
with a nine-point stencil.  With C = cos(phi), S = sin(phi) the entries are,
north row first,

        (1/2)(1-eps)CS     -(eps*C^2 + S^2)    -(1/2)(1-eps)CS
       -(C^2 + eps*S^2)       2(1+eps)        -(C^2 + eps*S^2)
       -(1/2)(1-eps)CS     -(eps*C^2 + S^2)     (1/2)(1-eps)CS

Stencils are kept unscaled by the mesh width: with zero right-hand side and
boundary data the overall scale is irrelevant, and Galerkin coarsening
introduces its own inter-level scaling consistently.  Each level's operator
is represented by one constant stencil; applications read implicit zeros
outside the interior, which makes the constant-stencil form exact for the
transfer pair used here.

Stencil values are immutable after construction; all functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .mesh import Coarsening, GridFunction, HierarchySpec
from . import transfer

__all__ = [
    "ProblemSpec",
    "Stencil9",
    "rotated_anisotropic_stencil",
    "apply",
    "residual",
    "galerkin_coarsen",
    "operator_hierarchy",
]


@dataclass(frozen=True)
class ProblemSpec:
    """Continuous problem data: anisotropy, rotation angle, and fields.

    `rhs` and `boundary` are constant field values; only zero is supported
    (the eliminated-boundary storage assumes homogeneous Dirichlet data).
    `seed` drives the random initial guess of the solvers.
    """

    epsilon: float
    phi: float = 0.0
    rhs: float = 0.0
    boundary: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.rhs != 0.0 or self.boundary != 0.0:
            raise ValueError("only zero right-hand side and boundary data are supported")


class Stencil9:
    """A 3x3 constant stencil; w[dy+1, dx+1] weights the (y+dy, x+dx) neighbor."""

    __slots__ = ("w",)

    def __init__(self, w):
        w = np.array(w, dtype=float)
        if w.shape != (3, 3):
            raise ValueError(f"stencil must be 3x3, got shape {w.shape}")
        w.setflags(write=False)
        self.w = w

    @property
    def center(self) -> float:
        return float(self.w[1, 1])

    def __repr__(self):
        rows = "; ".join(" ".join(f"{v:.6g}" for v in row) for row in self.w)
        return f"Stencil9([{rows}])"


def rotated_anisotropic_stencil(epsilon: float, phi: float) -> Stencil9:
    """Nine-point stencil for -eps*u_xx - u_yy rotated by phi degrees.

    For eps = 1 this reduces to the five-point Laplacian (corners vanish)
    for any angle.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    c = math.cos(math.radians(phi))
    s = math.sin(math.radians(phi))
    cross = 0.5 * (1.0 - epsilon) * c * s
    ns = -(epsilon * c * c + s * s)
    ew = -(c * c + epsilon * s * s)
    w = np.array([
        [-cross, ns, cross],   # dy = -1 (south)
        [ew, 2.0 * (1.0 + epsilon), ew],
        [cross, ns, -cross],   # dy = +1 (north)
    ])
    return Stencil9(w)


def apply(op: Stencil9, u: GridFunction) -> GridFunction:
    """Apply the stencil: out(y, x) = sum_dy,dx w[dy, dx] * u(y+dy, x+dx).

    Reads outside the interior are implicit zeros.
    """
    return ndimage.correlate(u, op.w, mode="constant", cval=0.0)


def residual(op: Stencil9, u: GridFunction, f: GridFunction) -> GridFunction:
    """f - A*u."""
    if u.shape != f.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {f.shape}")
    return f - apply(op, u)


# Auxiliary coarse grid for the Galerkin read-off.  An impulse response
# reaches at most one coarse node in each direction, so a centered impulse
# on a 7x7 coarse grid is untouched by boundary truncation.
_AUX_COARSE = 7


def galerkin_coarsen(op: Stencil9, coarsening: Coarsening) -> Stencil9:
    """Coarse operator R*A*P as a constant nine-point stencil.

    R and P are the transfer pair of `transfer` (full weighting / bilinear
    under full coarsening, their 1D-in-y analogues under y-semicoarsening).
    The stencil is read off from the response to a coarse unit impulse on an
    auxiliary grid large enough that no boundary truncation reaches the
    read-off node.
    """
    m = _AUX_COARSE
    cy = cx = m // 2
    coarse = np.zeros((m, m))
    coarse[cy, cx] = 1.0
    response = transfer.restrict(apply(op, transfer.prolong(coarse, coarsening)), coarsening)
    w = np.empty((3, 3))
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            # (R A P e_c)(p) = w[c - p], hence w[d] = response(c - d)
            w[dy + 1, dx + 1] = response[cy - dy, cx - dx]
    return Stencil9(w)


def operator_hierarchy(
    problem: ProblemSpec,
    hierarchy: HierarchySpec,
    coarse_op: str = "galerkin",
) -> list[Stencil9]:
    """Per-level operators, finest first.

    `coarse_op` selects Galerkin coarsening (default) or direct
    rediscretization of the fine stencil.  Rediscretization scales the
    stencil by 1/4 per level (the mesh-width factor under full coarsening)
    and is only meaningful there; the semicoarsened stencil on anisometric
    spacing has no such closed form.
    """
    fine = rotated_anisotropic_stencil(problem.epsilon, problem.phi)
    ops = [fine]
    if coarse_op == "galerkin":
        for _ in range(1, hierarchy.n):
            ops.append(galerkin_coarsen(ops[-1], hierarchy.coarsening))
    elif coarse_op == "rediscretize":
        if hierarchy.coarsening is not Coarsening.FULL_STANDARD:
            raise ValueError("rediscretized coarse operators require full coarsening")
        for l in range(1, hierarchy.n):
            ops.append(Stencil9(fine.w * 0.25 ** l))
    else:
        raise ValueError(f"unknown coarse operator kind: {coarse_op!r}")
    return ops
