import numpy as np
import pytest

from artifact import lattice_model as lm
from artifact import spectral as sp
from artifact.errors import EnclosureFailure, FermiOnSpectrum, NoGap, QuadratureDivergence


def spec_of(E):
    E = np.asarray(E, float)
    return sp.Spectrum(E, np.eye(len(E)))


def test_eigendecompose_small():
    s = sp.eigendecompose(np.eye(3))
    assert np.allclose(s.E, 1)
    s = sp.eigendecompose(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(s.E, [-1, 1])


def test_eigendecompose_invariants(hof12):
    s = hof12.spectrum
    H = hof12.H
    assert np.linalg.norm(H @ s.V - s.V * s.E, axis=0).max() <= 1e-10
    assert np.abs(s.V.conj().T @ s.V - np.eye(len(s.E))).max() <= 1e-12


def test_eigenvalues_match_characteristic_polynomial(rng):
    f = lm.FluxConfig(1, 3)
    g = lm.build_geometry(6, 6, f)
    H = lm.build_hamiltonian(g, f).mat
    E = sp.eigendecompose(H).E
    for z in rng.normal(size=3) + 1j * rng.normal(size=3):
        sign, logdet = np.linalg.slogdet(H - z * np.eye(36))
        ref = np.sum(np.log(E - z))
        assert abs(np.exp(logdet - ref.real) * sign - np.exp(1j * ref.imag)) <= 1e-9


def test_find_gap_examples(hof12):
    gp = sp.find_gap(spec_of([0, 1]), 0.5)
    assert (gp.lower_edge, gp.upper_edge, gp.width) == (0, 1, 1)
    with pytest.raises(NoGap):
        sp.find_gap(spec_of([0, 1e-9, 1]), 5e-10)
    with pytest.raises(NoGap):
        sp.find_gap(spec_of([0, 1e-9, 1]), 0.0)
    E = hof12.spectrum.E
    gp = sp.find_gap(hof12.spectrum, (E[47] + E[48]) / 2)
    assert gp.width > 0.5 and gp.rank == 48
    assert not np.any((E > gp.lower_edge) & (E < gp.upper_edge))


def test_spectral_projection_examples(hof12):
    s = hof12.spectrum
    P = sp.fermi_projection_spectral(s, s.E.min() - 1)
    assert P.rank == 0 and np.abs(P.matrix).max() == 0
    P = sp.fermi_projection_spectral(s, s.E.max() + 1)
    assert P.rank == 144 and np.abs(P.matrix - np.eye(144)).max() <= 1e-12
    assert hof12.P.rank == 48
    with pytest.raises(FermiOnSpectrum):
        sp.fermi_projection_spectral(s, s.E[10])


def test_projection_invariants(hof12, hof12_gap2):
    for m in (hof12, hof12_gap2):
        idem, herm = sp.projection_defects(m.P.matrix)
        assert idem <= 1e-10 and herm <= 1e-10
        assert abs(np.trace(m.P.matrix).real - m.P.rank) <= 1e-8
        assert lm.mp_defect(m.P.matrix, m.g, m.flux) <= 1e-10
    assert hof12.P.rank / 144 == 1 / 3 and hof12_gap2.P.rank / 144 == 2 / 3


def test_contour_examples(hof12):
    s = spec_of([0, 1])
    c = sp.build_contour(sp.find_gap(s, 0.5), s, 16)
    assert np.sum(np.abs(s.E - c.center) < c.radius) == 1 and abs(0 - c.center) < c.radius
    s1 = spec_of([0])
    c = sp.build_contour(sp.GapInfo(0.0, np.inf, 1.0, 1), s1, 16)
    assert abs(0 - c.center) < c.radius
    s = hof12.spectrum
    c = sp.build_contour(hof12.gap, s, 64)
    assert np.sum(np.abs(s.E - c.center) < c.radius) == 48
    assert np.abs(c.nodes[:, None] - s.E[None, :]).min() >= hof12.gap.width / 4 - 1e-12
    with pytest.raises(ValueError):
        sp.build_contour(hof12.gap, s, 4)


def test_contour_rejects_inconsistent_gap():
    s = spec_of([0, 0.5, 1])
    with pytest.raises(EnclosureFailure):
        sp.build_contour(sp.GapInfo(0.0, 1.0, 0.49, 1), s, 32)


def test_riesz_examples(hof12):
    c = sp.build_contour(hof12.gap, hof12.spectrum, 64)
    Pr = sp.fermi_projection_riesz(hof12.H, c)
    assert np.linalg.norm(Pr.matrix - hof12.P.matrix, 2) <= 1e-10
    assert Pr.rank == 48
    s = spec_of([0, 1])
    # trapezoid error ~ (r/|E - c|)^n = 2^-n here
    c = sp.build_contour(sp.find_gap(s, 0.5), s, 64)
    assert np.abs(sp.fermi_projection_riesz(np.diag([0.0, 1.0]), c).matrix - np.diag([1, 0])).max() <= 1e-12
    c = sp.build_contour(sp.GapInfo(-np.inf, 0.0, -1.0, 0), s, 32)
    assert np.abs(sp.fermi_projection_riesz(np.diag([0.0, 1.0]), c).matrix).max() <= 1e-12


def test_riesz_converges_with_nodes(hof12_gap2):
    m = hof12_gap2
    errs = []
    for n in (16, 32, 64, 128):
        c = sp.build_contour(m.gap, m.spectrum, n)
        errs.append(np.linalg.norm(sp.fermi_projection_riesz(m.H, c, tol=1.0).matrix - m.P.matrix, 2))
    assert all(b <= a or b <= 1e-13 for a, b in zip(errs, errs[1:]))
    assert errs[-1] <= 1e-10


def test_too_few_nodes_diverge(hof12_gap2):
    c = sp.build_contour(hof12_gap2.gap, hof12_gap2.spectrum, 8)
    with pytest.raises(QuadratureDivergence):
        sp.fermi_projection_riesz(hof12_gap2.H, c)
