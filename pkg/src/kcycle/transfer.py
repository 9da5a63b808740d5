"""Inter-grid transfers: full-weighting restriction and bilinear prolongation.

Under full coarsening a coarse node (q, p) coincides with fine node
(2q+1, 2p+1) (0-based interior indices).  Prolongation interpolates with
weight 1 at coincident nodes, 1/2 at edge midpoints and 1/4 at cell centers;
restriction applies the (1/16)[1 2 1; 2 4 2; 1 2 1] full-weighting stencil.
Under y-semicoarsening the same 1D pair acts in y only ([1/2, 1, 1/2] and
(1/4)[1, 2, 1]) with identity in x.  Reads outside the interior are implicit
zeros, so restriction is exactly scale * adjoint(prolongation) with scale
1/4 (full) or 1/2 (semi-y).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import Coarsening, GridFunction

__all__ = ["TransferPair", "prolong", "restrict", "restriction_scale"]


def restriction_scale(kind: Coarsening) -> float:
    """Scale making restriction equal scale * adjoint(prolongation)."""
    return 0.25 if kind is Coarsening.FULL_STANDARD else 0.5


@dataclass(frozen=True)
class TransferPair:
    """The prolongation/restriction pair for one coarsening kind."""

    kind: Coarsening

    @property
    def scale(self) -> float:
        return restriction_scale(self.kind)

    def prolong(self, coarse: GridFunction) -> GridFunction:
        return prolong(coarse, self.kind)

    def restrict(self, fine: GridFunction) -> GridFunction:
        return restrict(fine, self.kind)


def prolong(coarse: GridFunction, kind: Coarsening) -> GridFunction:
    """Interpolate a coarse grid function to the next-finer grid."""
    nyc, nxc = coarse.shape
    if kind is Coarsening.FULL_STANDARD:
        ny, nx = 2 * nyc + 1, 2 * nxc + 1
        cp = np.zeros((nyc + 2, nxc + 2))
        cp[1:-1, 1:-1] = coarse
        fine = np.zeros((ny, nx))
        fine[1::2, 1::2] = coarse
        fine[1::2, 0::2] = 0.5 * (cp[1:-1, :-1] + cp[1:-1, 1:])
        fine[0::2, 1::2] = 0.5 * (cp[:-1, 1:-1] + cp[1:, 1:-1])
        fine[0::2, 0::2] = 0.25 * (cp[:-1, :-1] + cp[:-1, 1:] + cp[1:, :-1] + cp[1:, 1:])
        return fine
    if kind is Coarsening.SEMI_Y:
        ny = 2 * nyc + 1
        cp = np.zeros((nyc + 2, nxc))
        cp[1:-1, :] = coarse
        fine = np.zeros((ny, nxc))
        fine[1::2, :] = coarse
        fine[0::2, :] = 0.5 * (cp[:-1, :] + cp[1:, :])
        return fine
    raise ValueError(f"unknown coarsening kind: {kind!r}")


def restrict(fine: GridFunction, kind: Coarsening) -> GridFunction:
    """Full-weighting restriction to the next-coarser grid."""
    ny, nx = fine.shape
    if ny < 3 or ny % 2 == 0:
        raise ValueError(f"fine ny must be odd and >= 3, got {ny}")
    if kind is Coarsening.FULL_STANDARD:
        if nx < 3 or nx % 2 == 0:
            raise ValueError(f"fine nx must be odd and >= 3, got {nx}")
        f = fine
        return (
            4.0 * f[1::2, 1::2]
            + 2.0 * (f[0:-1:2, 1::2] + f[2::2, 1::2] + f[1::2, 0:-1:2] + f[1::2, 2::2])
            + (f[0:-1:2, 0:-1:2] + f[0:-1:2, 2::2] + f[2::2, 0:-1:2] + f[2::2, 2::2])
        ) / 16.0
    if kind is Coarsening.SEMI_Y:
        f = fine
        return 0.25 * (f[0:-1:2, :] + 2.0 * f[1::2, :] + f[2::2, :])
    raise ValueError(f"unknown coarsening kind: {kind!r}")
