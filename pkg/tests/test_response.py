import numpy as np
import pytest
from hypothesis import given, strategies as st

from artifact import lattice_model as lm
from artifact import response as rs
from artifact import spectral as sp
from artifact.errors import DegenerateFit, GaplessAtFilling
from artifact.neass import fit_power_law, neass_state
from artifact.pipeline import hofstadter


def two_site():
    g = lm.LatticeGeometry(2, 2, 0, 1)
    x1 = np.array([0, 1])
    d = lm.DisplacementTable(np.array([[0, -1], [1, 0]], float), np.zeros((2, 2)), x1, np.zeros(2, int))
    return g, d


def test_trace_per_unit_area(hof12):
    assert rs.trace_per_unit_area(np.eye(144), hof12.g) == 1.0
    assert abs(rs.trace_per_unit_area(hof12.P, hof12.g) - 1 / 3) <= 1e-12
    assert abs(rs.cell_trace_per_unit_area(hof12.P.matrix, hof12.g)
               - rs.trace_per_unit_area(hof12.P, hof12.g)) <= 1e-12


def test_position_commutator_examples(hof12, rng):
    d = hof12.d
    assert np.abs(rs.position_commutator(np.diag(rng.normal(size=144)), d, 1)).max() == 0
    T = np.zeros((144, 144))
    T[0, 1] = 2.0  # x' - x = +1 along e1
    C = rs.position_commutator(T, d, 1)
    assert C[0, 1] == 2.0 and np.count_nonzero(C) == 1
    X = np.diag(d.x1[:12].astype(float))
    T = rng.normal(size=(12, 12))
    dd = lm.minimal_image(np.arange(12)[:, None] - np.arange(12)[None, :], 100)  # open chain
    ref = T @ X - X @ T
    assert np.allclose(-dd * T, ref)


@given(st.integers(0, 2**31))
def test_commutator_with_position_is_traceless(seed):
    r = np.random.default_rng(seed)
    f = lm.FluxConfig(1, 3)
    g = lm.build_geometry(6, 6, f)
    d = lm.displacement_table(g)
    T = r.normal(size=(36, 36)) + 1j * r.normal(size=(36, 36))
    for j in (1, 2):
        assert abs(rs.trace_per_unit_area(rs.position_commutator(T, d, j), g)) <= 1e-14


def test_current_operator_examples(hof12):
    g, d = two_site()
    H = np.array([[0, -1], [-1, 0]], complex)
    J = rs.current_operator(H, d, 1)
    # J = i[H, X]: J(1,2) = i H(1,2)(x2 - x1) = -i
    assert J[0, 1] == -1j and J[1, 0] == 1j
    X = np.diag([0.0, 1.0])
    assert np.allclose(J, 1j * (H @ X - X @ H))
    assert np.abs(rs.current_operator(np.diag([1.0, 2.0]), d, 1)).max() == 0
    J1 = rs.current_operator(hof12.H, hof12.d, 1)
    assert np.abs(J1 - J1.conj().T).max() <= 1e-14


def test_current_matches_band_velocity():
    f = lm.FluxConfig(0, 1)
    g = lm.build_geometry(8, 8, f)
    d = lm.displacement_table(g)
    H = lm.build_hamiltonian(g, f).mat
    J = rs.current_operator(H, d, 1)
    x1, x2 = g.coords()
    for n1, n2 in [(1, 0), (2, 3), (3, 5)]:
        k1, k2 = 2 * np.pi * n1 / 8, 2 * np.pi * n2 / 8
        psi = np.exp(1j * (k1 * x1 + k2 * x2)) / 8
        assert abs(psi.conj() @ H @ psi - (-2 * np.cos(k1) - 2 * np.cos(k2))) <= 1e-12
        assert abs(psi.conj() @ J @ psi - 2 * np.sin(k1)) <= 1e-12


def test_marker_examples(hof12, hof12_gap2):
    g, d = hof12.g, hof12.d
    assert rs.hall_conductivity_marker(np.zeros((144, 144)), d, g) == 0
    assert abs(rs.hall_conductivity_marker(np.eye(144), d, g)) <= 1e-15
    assert abs(2 * np.pi * rs.hall_conductivity_marker(hof12.P, d, g) - 1) <= 0.05
    assert abs(2 * np.pi * rs.hall_conductivity_marker(hof12_gap2.P, d, g) + 1) <= 0.05


def test_marker_converges_with_size(hof12, hof24):
    d12 = abs(2 * np.pi * rs.hall_conductivity_marker(hof12.P, hof12.d, hof12.g) - 1)
    d24 = abs(2 * np.pi * rs.hall_conductivity_marker(hof24.P, hof24.d, hof24.g) - 1)
    assert d24 <= d12


def test_chern_oracle_examples():
    assert rs.chern_number_momentum(lm.FluxConfig(0, 1), 1, cell=2,
                                    pot=lm.PotentialConfig(v=(1.0, -1.0))) == 0
    assert rs.chern_number_momentum(lm.FluxConfig(1, 3), 1) == 1
    assert rs.chern_number_momentum(lm.FluxConfig(1, 3), 2) == -1
    assert rs.chern_number_momentum(lm.FluxConfig(2, 3), 1) == -1
    with pytest.raises(GaplessAtFilling):
        rs.chern_number_momentum(lm.FluxConfig(1, 2), 1)


def test_hall_current_small_fields(hof12, hof24):
    gen = hof12.generators(2)
    assert abs(rs.hall_current_density(hof12.H, hof12.d, neass_state(gen, 0.0), hof12.g)) <= 1e-8
    j = rs.hall_current_density(hof12.H, hof12.d, neass_state(gen, 0.05), hof12.g)
    sig_tw = rs.hall_conductivity_twist(hof12.H, hof12.spectrum, 48, hof12.d, hof12.g)
    assert abs(j / 0.05 - sig_tw) <= 0.02 * abs(sig_tw)
    # against the kernel marker the match needs the larger torus
    j = rs.hall_current_density(hof24.H, hof24.d, neass_state(hof24.generators(2), 0.05), hof24.g)
    sig = rs.hall_conductivity_marker(hof24.P, hof24.d, hof24.g)
    assert abs(j / 0.05 - sig) <= 0.02 * abs(sig)


def test_flux_reversal_flips_current(hof12):
    m2 = hofstadter(12, 12, 2, 3)
    j1 = rs.hall_current_density(hof12.H, hof12.d, neass_state(hof12.generators(2), 0.05), hof12.g)
    j2 = rs.hall_current_density(m2.H, m2.d, neass_state(m2.generators(2), 0.05), m2.g)
    assert np.sign(j1) == -np.sign(j2) and abs(j1 + j2) <= 1e-10


@pytest.mark.parametrize("n,lo", [(1, 1.75), (2, 2.6)])
def test_kubo_defect_scaling(hof12, n, lo):
    sig = rs.hall_conductivity_twist(hof12.H, hof12.spectrum, 48, hof12.d, hof12.g)
    fit = rs.kubo_defect_scaling(hof12.H, hof12.generators(n), hof12.d, hof12.g,
                                 np.logspace(-1.5, -0.5, 7), sig)
    assert fit.slope >= lo


def test_exact_linear_current_is_degenerate():
    eps = np.logspace(-2, -1, 5)
    with pytest.raises(DegenerateFit):
        fit_power_law(eps, np.abs(0.3 * eps - eps * 0.3))


def test_kubo_intercept(hof12, hof24):
    eps = np.array([0.01, 0.02, 0.03, 0.04, 0.05])
    for m, sig in [(hof12, rs.hall_conductivity_twist(hof12.H, hof12.spectrum, 48, hof12.d, hof12.g)),
                   (hof24, rs.hall_conductivity_marker(hof24.P, hof24.d, hof24.g))]:
        gen = m.generators(2)
        j = np.array([rs.hall_current_density(m.H, m.d, neass_state(gen, e), m.g) for e in eps])
        icept = np.polyfit(eps, j / eps, 2)[-1]
        assert abs(icept - sig) <= 0.01 * abs(sig)


def test_ids_invariant_under_dressing(hof12):
    gen = hof12.generators(2)
    t0 = rs.trace_per_unit_area(hof12.P, hof12.g)
    for e in (0.02, 0.1, 0.3):
        assert abs(rs.trace_per_unit_area(neass_state(gen, e).Pi.matrix, hof12.g) - t0) <= 1e-12


def test_chern_simons(hof12, rng):
    m = hof12
    l, r = rs.chern_simons_check(m.P, np.eye(144), m.d, m.g)
    assert l == r
    U = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 144)))
    l, r = rs.chern_simons_check(m.P, U, m.d, m.g)
    assert abs(l - r) <= 1e-8
    assert abs(2 * np.pi * r.imag + 1) <= 0.05 or abs(2 * np.pi * r.imag - 1) <= 0.05


def test_cyclicity(hof12, rng):
    g = hof12.g
    a, b = np.diag(rng.normal(size=144)), np.diag(rng.normal(size=144))
    assert rs.cyclicity_defect(a, b, g) == 0
    A = lm.random_mp_operator(g, hof12.flux, rng, hermitian=False)
    B = lm.random_mp_operator(g, hof12.flux, rng, hermitian=False)
    assert rs.cyclicity_defect(A, B, g) <= 1e-12
    assert rs.cyclicity_defect(hof12.P, rs.current_operator(hof12.H, hof12.d, 1), g) <= 1e-12


def test_vanishing_trace(hof12, rng):
    m = hof12
    for j in (1, 2):
        assert rs.vanishing_trace_check(m.P, np.eye(144), m.d, j, m.g) <= 1e-14
        assert rs.vanishing_trace_check(m.P, m.H, m.d, j, m.g) <= 1e-8
        A = lm.random_mp_operator(m.g, m.flux, rng)
        assert rs.vanishing_trace_check(m.P, A, m.d, j, m.g) <= 1e-8


def test_commutator_identity_sign(hof12, hof12_gap2):
    for m in (hof12, hof12_gap2):
        lhs, rhs = rs.commutator_identity_sides(m.P, m.d, m.g)
        assert abs(lhs - rhs) <= 1e-10
        # nonzero, so the opposite sign is clearly excluded
        assert abs(lhs + rhs) >= 0.1


def test_report_serialization(hof12):
    rep = rs.ResponseReport(0.15, 1, {0.05: 0.0075}, 3.0, 1 / 3, 0.16)
    d = rep.to_dict()
    assert d["chern_oracle"] == 1 and abs(d["sigma_hall_2pi"] - 0.3 * np.pi) <= 1e-15
    assert d["j_hall"] == {"0.05": 0.0075}
