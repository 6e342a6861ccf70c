import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entmono import matcomp
from entmono.errors import DimMismatch, DomainError, SpectrumInvalid
from entmono.measures import (
    A1_A2,
    A1A2_B,
    CutSpec,
    binary_entropy,
    concurrence_2q,
    concurrence_pure_cut,
    eof_2q,
    f_of_concurrence,
    g_neg,
    g_tilde,
    max_eof_spectrum,
    max_negativity_spectrum,
    mems_concurrence,
    negativity,
    negativity_pure_cut,
)
from entmono.monogamy import family_closed_forms, reduce_a1a2
from entmono.oracle import conjugated_concurrence, conjugated_negativity, random_spectra
from entmono.states import (
    FamilyParams,
    bell_phi_plus,
    family_state,
    ghz_state,
    ket,
    maximally_mixed,
    random_pure_states,
    random_unitaries,
    to_density,
    w_state,
)

from conftest import random_density

# High-precision reference values (50-digit arithmetic).
H_0933 = 0.3545789098555845
F_HALF = 0.3545789026652699
F_075 = 0.6560575629727147
MAXNEG_75_25 = 0.2702847075210474
G_NEG_HALF = 0.3964466094067262
G_NEG_60 = 0.2297152924789526
EN_INT_30 = 0.0202847075210474
EN_INT_45 = 0.1035533905932738

spectra = st.lists(st.floats(0, 1), min_size=4, max_size=4).filter(lambda v: sum(v) > 1e-3).map(
    lambda v: np.array(v) / sum(v))


def test_binary_entropy_examples():
    assert binary_entropy(0) == 0 and binary_entropy(1) == 0
    assert binary_entropy(0.5) == pytest.approx(1, abs=1e-15)
    assert binary_entropy(0.9330127) == pytest.approx(H_0933, abs=1e-12)
    with pytest.raises(DomainError):
        binary_entropy(1.5)


def test_f_of_concurrence_examples():
    assert f_of_concurrence(0) == 0
    assert f_of_concurrence(1) == pytest.approx(1, abs=1e-15)
    assert f_of_concurrence(0.5) == pytest.approx(F_HALF, abs=1e-12)
    assert f_of_concurrence(0.75) == pytest.approx(F_075, abs=1e-12)
    with pytest.raises(DomainError):
        f_of_concurrence(-0.1)


def test_f_monotone():
    x = np.linspace(0, 1, 1001)
    assert np.all(np.diff(f_of_concurrence(x)) > 0)


def test_concurrence_examples():
    assert concurrence_2q(to_density(bell_phi_plus()).matrix) == pytest.approx(1, abs=1e-12)
    assert concurrence_2q(np.diag([1, 0, 0, 0])) == 0
    assert concurrence_2q(maximally_mixed((2, 2)).matrix) == 0
    with pytest.raises(DimMismatch):
        concurrence_2q(np.eye(8) / 8)


def test_concurrence_pure_two_qubit_formula(rng):
    psi = random_pure_states(rng, 500, 4)
    rho = psi[:, :, None] * psi[:, None, :].conj()
    expected = 2 * np.abs(psi[:, 0] * psi[:, 3] - psi[:, 1] * psi[:, 2])
    assert np.allclose(concurrence_2q(rho), expected, atol=1e-9)


def test_concurrence_local_unitary_invariance(rng):
    for _ in range(20):
        rho = random_density(rng, 4)
        u = np.kron(random_unitaries(rng, 1, 2)[0], random_unitaries(rng, 1, 2)[0])
        assert concurrence_2q(u @ rho @ u.conj().T) == pytest.approx(concurrence_2q(rho), abs=1e-9)


def test_werner_concurrence():
    bell = to_density(bell_phi_plus()).matrix
    for p in np.linspace(0, 1, 11):
        rho = p * bell + (1 - p) * np.eye(4) / 4
        assert concurrence_2q(rho) == pytest.approx(max(0, (3 * p - 1) / 2), abs=1e-12)
        assert negativity(rho, A1_A2, (2, 2)) == pytest.approx(max(0, (3 * p - 1) / 4), abs=1e-12)


def test_eof_bell():
    assert eof_2q(to_density(bell_phi_plus()).matrix) == pytest.approx(1, abs=1e-12)


def test_negativity_examples():
    assert negativity(to_density(bell_phi_plus()).matrix, A1_A2, (2, 2)) == pytest.approx(0.5, abs=1e-12)
    assert negativity(maximally_mixed((2, 2)).matrix, A1_A2, (2, 2)) == pytest.approx(0, abs=1e-15)
    ghz = to_density(ghz_state()).matrix
    assert negativity(ghz, A1A2_B, (2, 2, 2)) == pytest.approx(0.5, abs=1e-12)


def test_negativity_cut_validation():
    with pytest.raises(DimMismatch):
        negativity(np.eye(8) / 8, CutSpec((0,), (1,)), (2, 2, 2))
    with pytest.raises(DimMismatch):
        CutSpec((0, 1), (1, 2))


def test_negativity_pure_cut_matches_partial_transpose(rng):
    psi = random_pure_states(rng, 200, 8)
    rho = psi[:, :, None] * psi[:, None, :].conj()
    for cut in (A1A2_B, CutSpec((0,), (1, 2)), CutSpec((1,), (0, 2))):
        brute = negativity(rho, cut, (2, 2, 2))
        assert np.allclose(negativity_pure_cut(psi, cut, (2, 2, 2)), brute, atol=1e-12)


def test_pure_cut_examples():
    assert concurrence_pure_cut(ghz_state().amplitudes) == pytest.approx(1, abs=1e-12)
    assert negativity_pure_cut(ghz_state().amplitudes) == pytest.approx(0.5, abs=1e-12)
    assert concurrence_pure_cut(ket("110")) == 0
    w = w_state().amplitudes
    # B holds one third of the excitation: C^2 = 4 * (1/3) * (2/3).
    assert concurrence_pure_cut(w) == pytest.approx(math.sqrt(8) / 3, abs=1e-12)


def test_spectrum_maxima_examples():
    assert mems_concurrence([1, 0, 0, 0]) == pytest.approx(1)
    assert mems_concurrence([0.25] * 4) == 0
    assert mems_concurrence([0.5, 0.5, 0, 0]) == pytest.approx(0.5)
    assert max_eof_spectrum([0.5, 0.5, 0, 0]) == pytest.approx(F_HALF, abs=1e-12)
    assert max_negativity_spectrum([1, 0, 0, 0]) == pytest.approx(0.5)
    assert max_negativity_spectrum([0.75, 0.25, 0, 0]) == pytest.approx(MAXNEG_75_25, abs=1e-12)
    assert max_negativity_spectrum([0.25] * 4) == 0


def test_spectrum_order_does_not_matter():
    assert mems_concurrence([0, 0.2, 0, 0.8]) == pytest.approx(mems_concurrence([0.8, 0.2, 0, 0]))


@pytest.mark.parametrize("lam", [[0.5, 0.5, 0.5, -0.5], [0.3, 0.3, 0.3, 0.3], [0.5, 0.5], [np.nan, 1, 0, 0]])
def test_spectrum_invalid(lam):
    with pytest.raises(SpectrumInvalid):
        mems_concurrence(lam)
    with pytest.raises(SpectrumInvalid):
        max_negativity_spectrum(lam)


def test_g_examples():
    assert g_neg(0) == 0
    assert g_neg(0.5) == pytest.approx(G_NEG_HALF, abs=1e-12)
    assert g_neg(math.sin(math.radians(120)) / 2) == pytest.approx(G_NEG_60, abs=1e-12)
    assert g_tilde(0) == 0 and g_tilde(1) == 0.5
    with pytest.raises(DomainError):
        g_neg(0.6)
    with pytest.raises(DomainError):
        g_tilde(1.1)


def test_g_functions_monotone():
    x = np.arange(0, 0.5 + 1e-12, 1e-3)
    assert np.all(np.diff(g_neg(x)) > 0)
    y = np.arange(0, 1 + 1e-12, 1e-3)
    assert np.all(np.diff(g_tilde(y)) > 0)


def test_family_grid_against_closed_forms():
    for deg in range(91):
        phi = math.radians(deg)
        psi = family_state(FamilyParams(phi)).amplitudes
        r2 = reduce_a1a2(np.outer(psi, psi.conj()))
        cf = family_closed_forms(phi)
        lam = matcomp.spectrum(r2)
        assert concurrence_2q(r2) == pytest.approx(cf["c_internal"], abs=1e-9)
        assert eof_2q(r2) == pytest.approx(cf["ef_internal"], abs=1e-9)
        assert 1 - max_eof_spectrum(lam) == pytest.approx(cf["ef_external"], abs=1e-9)
        assert negativity(r2, A1_A2, (2, 2)) == pytest.approx(cf["en_internal"], abs=1e-9)
        assert 0.5 - max_negativity_spectrum(lam) == pytest.approx(cf["en_external_pair"], abs=1e-9)
        # sqrt(1 - 4x^2) has a branch point at 45 degrees, so round-off in x is amplified to ~1e-8.
        assert g_neg(negativity_pure_cut(psi)) == pytest.approx(cf["g_en"], abs=1e-6)
        assert g_tilde(concurrence_pure_cut(psi)) == pytest.approx(cf["g_tilde_c"], abs=1e-9)


def test_family_internal_negativity_values():
    for deg, expected in ((30, EN_INT_30), (45, EN_INT_45), (60, MAXNEG_75_25)):
        psi = family_state(FamilyParams(math.radians(deg))).amplitudes
        r2 = reduce_a1a2(np.outer(psi, psi.conj()))
        assert negativity(r2, A1_A2, (2, 2)) == pytest.approx(expected, abs=1e-12)


@pytest.mark.slow
def test_spectrum_maxima_bound_sampled_unitaries(rng):
    for lam in random_spectra(rng, 10):
        u = random_unitaries(rng, 10_000, 4)
        assert conjugated_concurrence(lam, u).max() <= mems_concurrence(lam) + 1e-9
        assert conjugated_negativity(lam, u).max() <= max_negativity_spectrum(lam) + 1e-9


@settings(max_examples=60, deadline=None)
@given(spectra)
def test_maxima_dominate_diagonal_state(lam):
    lam = -np.sort(-lam)
    rho = np.diag(lam).astype(complex)
    assert concurrence_2q(rho) <= mems_concurrence(lam) + 1e-12
    assert negativity(rho, A1_A2, (2, 2)) <= max_negativity_spectrum(lam) + 1e-12
    assert 0 <= max_negativity_spectrum(lam) <= 0.5


@settings(max_examples=60, deadline=None)
@given(spectra)
def test_maxima_are_permutation_invariant(lam):
    assert mems_concurrence(lam) == pytest.approx(mems_concurrence(lam[::-1]), abs=1e-15)
    assert max_negativity_spectrum(lam) == pytest.approx(max_negativity_spectrum(lam[::-1]), abs=1e-15)
