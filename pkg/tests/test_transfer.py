import numpy as np
import pytest

from kcycle.mesh import Coarsening, dot
from kcycle.transfer import TransferPair, prolong, restrict, restriction_scale


def test_prolong_zeros():
    for kind in Coarsening:
        assert np.all(prolong(np.zeros((3, 3)), kind) == 0.0)


def test_restrict_zeros():
    assert np.all(restrict(np.zeros((7, 7)), Coarsening.FULL_STANDARD) == 0.0)
    assert np.all(restrict(np.zeros((7, 5)), Coarsening.SEMI_Y) == 0.0)


def test_prolong_impulse_full():
    coarse = np.zeros((3, 3))
    coarse[1, 1] = 1.0
    fine = prolong(coarse, Coarsening.FULL_STANDARD)
    assert fine.shape == (7, 7)
    footprint = np.array([
        [0.25, 0.5, 0.25],
        [0.5, 1.0, 0.5],
        [0.25, 0.5, 0.25],
    ])
    assert np.array_equal(fine[2:5, 2:5], footprint)
    outside = fine.copy()
    outside[2:5, 2:5] = 0.0
    assert np.all(outside == 0.0)


def test_prolong_impulse_semi_y():
    coarse = np.zeros((3, 5))
    coarse[1, 2] = 1.0
    fine = prolong(coarse, Coarsening.SEMI_Y)
    assert fine.shape == (7, 5)
    assert np.array_equal(fine[2:5, 2], np.array([0.5, 1.0, 0.5]))
    assert fine.sum() == 2.0  # nothing anywhere else


def test_restrict_impulse_full():
    fine = np.zeros((7, 7))
    fine[3, 3] = 1.0  # coincides with coarse node (1, 1)
    coarse = restrict(fine, Coarsening.FULL_STANDARD)
    assert coarse.shape == (3, 3)
    assert coarse[1, 1] == 0.25
    assert coarse.sum() == 0.25


def test_restriction_scales():
    assert restriction_scale(Coarsening.FULL_STANDARD) == 0.25
    assert restriction_scale(Coarsening.SEMI_Y) == 0.5
    assert TransferPair(Coarsening.SEMI_Y).scale == 0.5


@pytest.mark.parametrize("kind,coarse_shape", [
    (Coarsening.FULL_STANDARD, (7, 7)),
    (Coarsening.SEMI_Y, (7, 15)),
])
def test_adjointness(kind, coarse_shape):
    rng = np.random.default_rng(77)
    pair = TransferPair(kind)
    nyc, nxc = coarse_shape
    nyf = 2 * nyc + 1
    nxf = 2 * nxc + 1 if kind is Coarsening.FULL_STANDARD else nxc
    for _ in range(20):
        v = rng.standard_normal((nyf, nxf))
        w = rng.standard_normal((nyc, nxc))
        left = dot(pair.restrict(v), w)
        right = pair.scale * dot(v, pair.prolong(w))
        assert left == pytest.approx(right, rel=1e-13, abs=1e-13)


def test_prolong_reproduces_constants_in_the_interior():
    coarse = np.full((7, 7), 2.5)
    fine = prolong(coarse, Coarsening.FULL_STANDARD)
    # footprints free of implicit boundary zeros: fine nodes 1..2n-1
    assert np.allclose(fine[1:-1, 1:-1], 2.5, atol=1e-14)
    semi = prolong(np.full((7, 5), -1.25), Coarsening.SEMI_Y)
    assert np.allclose(semi[1:-1, :], -1.25, atol=1e-14)


def test_linearity():
    rng = np.random.default_rng(31)
    a = rng.random((7, 7))
    b = rng.random((7, 7))
    for kind in Coarsening:
        left = prolong(a + 2.0 * b, kind)
        right = prolong(a, kind) + 2.0 * prolong(b, kind)
        assert np.allclose(left, right, rtol=1e-14, atol=1e-14)
    fa = rng.random((15, 15))
    fb = rng.random((15, 15))
    got = restrict(fa - 3.0 * fb, Coarsening.FULL_STANDARD)
    want = restrict(fa, Coarsening.FULL_STANDARD) - 3.0 * restrict(fb, Coarsening.FULL_STANDARD)
    assert np.allclose(got, want, rtol=1e-14, atol=1e-14)


def test_restrict_rejects_even_dims():
    with pytest.raises(ValueError):
        restrict(np.zeros((6, 7)), Coarsening.FULL_STANDARD)
    with pytest.raises(ValueError):
        restrict(np.zeros((1, 7)), Coarsening.SEMI_Y)


def test_round_trip_dims_match_hierarchy():
    from kcycle.mesh import build_hierarchy

    for kind in Coarsening:
        spec = build_hierarchy(4, kind)
        for (nxf, nyf), (nxc, nyc) in zip(spec.dims, spec.dims[1:]):
            fine = np.zeros((nyf, nxf))
            assert restrict(fine, kind).shape == (nyc, nxc)
            assert prolong(np.zeros((nyc, nxc)), kind).shape == (nyf, nxf)
