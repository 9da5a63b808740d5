"""Grid hierarchy bookkeeping and elementary vector operations on level data.

Level data lives on vertex-centered interior nodes with eliminated Dirichlet
boundary: boundary values are never stored, and any stencil or transfer
access past the interior reads an implicit zero.  A grid function is a
float64 array of shape (ny, nx), row-major by y then x; dimension tuples are
written (nx, ny), finest level first.

All operations here are pure functions of their inputs and are safe for
concurrent use on distinct data.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "GridFunction",
    "Coarsening",
    "HierarchySpec",
    "build_hierarchy",
    "grid_zeros",
    "zero_fill",
    "add_scaled",
    "norm2",
    "dot",
]

GridFunction = np.ndarray


class Coarsening(Enum):
    """How the hierarchy shrinks from one level to the next."""

    FULL_STANDARD = "full"  # halve both coordinates
    SEMI_Y = "semi-y"       # halve y only, keep x resolution


@dataclass(frozen=True)
class HierarchySpec:
    """Level count plus per-level interior sizes (nx, ny), finest first."""

    n: int
    coarsening: Coarsening
    dims: tuple[tuple[int, int], ...]

    def unknowns(self, level: int) -> int:
        """Interior node count on 1-based `level`."""
        nx, ny = self.dims[level - 1]
        return nx * ny


def build_hierarchy(n: int, coarsening: Coarsening) -> HierarchySpec:
    """Dims for an n-level hierarchy whose finest side is 2**n - 1.

    FULL_STANDARD halves both axes per level down to a single node; SEMI_Y
    keeps nx fixed and halves ny down to a single line.
    """
    if n < 1:
        raise ValueError(f"level count must be >= 1, got {n}")
    if coarsening is Coarsening.FULL_STANDARD:
        dims = tuple((2 ** (n - l + 1) - 1, 2 ** (n - l + 1) - 1) for l in range(1, n + 1))
    elif coarsening is Coarsening.SEMI_Y:
        nx = 2 ** n - 1
        dims = tuple((nx, 2 ** (n - l + 1) - 1) for l in range(1, n + 1))
    else:
        raise ValueError(f"unknown coarsening kind: {coarsening!r}")
    if any(ny < 1 for _, ny in dims):
        raise ValueError(f"{coarsening} with {n} levels coarsens below one line")
    return HierarchySpec(n=n, coarsening=coarsening, dims=dims)


def grid_zeros(nx: int, ny: int) -> GridFunction:
    """New all-zero grid function with the given interior dims."""
    return np.zeros((ny, nx))


def zero_fill(g: GridFunction) -> GridFunction:
    """All-zero grid function with the dims of `g`."""
    return np.zeros_like(g)


def add_scaled(a: GridFunction, b: GridFunction, s: float) -> GridFunction:
    """Componentwise a + s*b."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a + s * b


def norm2(g: GridFunction) -> float:
    """Euclidean norm of the stored values."""
    return float(np.linalg.norm(g))


def dot(a: GridFunction, b: GridFunction) -> float:
    """Euclidean inner product of two grid functions."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.dot(a.ravel(), b.ravel()))
