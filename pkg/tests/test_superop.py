import numpy as np
import pytest
from hypothesis import given, strategies as st

from artifact import spectral as sp
from artifact import superop as so
from artifact.errors import GapTooSmall


def rand_herm(r, n):
    A = r.normal(size=(n, n)) + 1j * r.normal(size=(n, n))
    return (A + A.conj().T) / 2


def gapped(r, n=12, rank=5):
    H = rand_herm(r, n)
    s = sp.eigendecompose(H)
    mu = (s.E[rank - 1] + s.E[rank]) / 2
    return H, s, sp.fermi_projection_spectral(s, mu)


def test_od_split_examples(rng):
    H, s, P = gapped(rng, 8, 3)
    P = P.matrix
    sp_ = so.od_split(P, P)
    assert np.abs(sp_.diagonal - P).max() <= 1e-12 and np.abs(sp_.offdiagonal).max() <= 1e-12
    B = rand_herm(rng, 8)
    assert np.abs(so.od_split(so.comm(P, B), P).diagonal).max() <= 1e-12
    A = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    x = so.od_split(A, P)
    assert np.abs(x.diagonal + x.offdiagonal - A).max() <= 1e-12
    assert np.abs(x.offdiagonal - so.comm(P, so.comm(P, A))).max() <= 1e-10
    assert np.abs(so.comm(x.diagonal, P)).max() <= 1e-10
    assert np.abs(P @ x.offdiagonal @ P).max() <= 1e-10
    assert np.abs(so.offdiag(A, P) - x.offdiagonal).max() <= 1e-12


def test_liouvillian_examples(hof12):
    H = np.diag([0.0, 1.0])
    B = np.array([[0, 1], [0, 0]], complex)
    assert np.abs(so.liouvillian(H, H @ H + 2 * H)).max() == 0
    # -i(HB - BH) = -i(0 - B) = iB
    assert np.allclose(so.liouvillian(H, B), 1j * B)
    assert np.abs(so.liouvillian(hof12.H, hof12.P.matrix)).max() <= 1e-12


def test_inverse_two_by_two():
    s = sp.eigendecompose(np.diag([0.0, 1.0]))
    P = sp.fermi_projection_spectral(s, 0.5)
    out = so.inv_liouvillian_spectral(s, P, np.array([[0, 1], [1, 0]], complex))
    assert np.allclose(out, 1j * np.array([[0, -1], [1, 0]]), atol=1e-15)
    assert np.abs(so.inv_liouvillian_spectral(s, P, np.diag([3.0, -1.0]))).max() == 0
    c = sp.build_contour(sp.find_gap(s, 0.5), s, 64)
    outc = so.inv_liouvillian_contour(np.diag([0.0, 1.0]), P, np.array([[0, 1], [1, 0]], complex), c)
    assert np.abs(outc - out).max() <= 1e-12


@given(st.integers(0, 2**31), st.booleans())
def test_round_trip_and_od_properties(seed, herm):
    r = np.random.default_rng(seed)
    H, s, P = gapped(r)
    A = rand_herm(r, 12) if herm else r.normal(size=(12, 12)) + 1j * r.normal(size=(12, 12))
    B = so.inv_liouvillian_spectral(s, P, A)
    Aod = so.od_split(A, P.matrix).offdiagonal
    assert np.linalg.norm(so.liouvillian(H, B) - Aod, 2) <= 1e-10
    assert np.abs(so.inv_liouvillian_spectral(s, P, Aod) - B).max() <= 1e-12
    assert np.abs(so.od_split(B, P.matrix).offdiagonal - B).max() <= 1e-12
    # the inverse commutes with the adjoint; Hermitian input gives Hermitian output
    assert np.abs(B.conj().T - so.inv_liouvillian_spectral(s, P, A.conj().T)).max() <= 1e-10
    if herm:
        assert np.abs(B - B.conj().T).max() <= 1e-10


def test_inverse_independent_of_eigenbasis(rng):
    H, s, P = gapped(rng)
    W = np.linalg.qr(rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12)))[0]
    s2 = sp.eigendecompose(W.conj().T @ H @ W)
    s2 = sp.Spectrum(s2.E, W @ s2.V)
    A = rand_herm(rng, 12)
    assert np.abs(so.inv_liouvillian_spectral(s, P, A) - so.inv_liouvillian_spectral(s2, P, A)).max() <= 1e-10
    # any diagonal addition D changes the Liouvillian by L(D) only
    B = so.inv_liouvillian_spectral(s, P, A)
    D = so.od_split(rand_herm(rng, 12), P.matrix).diagonal
    assert np.abs(so.liouvillian(H, B + D) - so.liouvillian(H, B) - so.liouvillian(H, D)).max() <= 1e-12


def test_gap_too_small():
    s = sp.Spectrum(np.array([0.0, 1e-10]), np.eye(2))
    with pytest.raises(GapTooSmall):
        so.LiouvillianInverse(s, 1)


def test_contour_inverse_on_hofstadter(hof12):
    P = hof12.P
    c = sp.build_contour(hof12.gap, hof12.spectrum, 128)
    A = so.comm(hof12.d.d2 * P.matrix, P.matrix)
    Bs = so.inv_liouvillian_spectral(hof12.spectrum, P, A)
    Bc = so.inv_liouvillian_contour(hof12.H, P, A, c)
    assert np.linalg.norm(Bc - Bs, 2) / np.linalg.norm(Bs, 2) <= 1e-8
    C = hof12.H @ hof12.H  # commutes with P
    assert np.abs(so.inv_liouvillian_contour(hof12.H, P, C, c)).max() <= 1e-12
