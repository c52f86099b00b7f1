import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import eigvalsh_tridiagonal, hessenberg

from gsrwa.exact import (
    TruncatedBasis,
    binary_entropy,
    build_hamiltonian,
    converge_truncation,
    exact_gap_minimum,
    exact_observables,
    lowest_eigenpairs,
    parity_diagonal,
    parity_sector_ground,
)
from gsrwa.exceptions import TruncationError
from gsrwa.transform import ModelParams

# computed by the truncated diagonalization at cutoffs 60 and 100 (agree to 1e-13)
FROZEN_E0 = -0.6332942354616422


def test_basis():
    b = TruncatedBasis(10)
    assert b.dim == 22
    assert b.index(3, True) == 7
    with pytest.raises(ValueError):
        TruncatedBasis(0)


def test_decoupled_hamiltonian_is_diagonal():
    h = build_hamiltonian(ModelParams(1.5, 0.8, 0, 0), TruncatedBasis(12))
    assert np.count_nonzero(h - np.diag(np.diag(h))) == 0
    n = np.repeat(np.arange(13), 2)
    s = np.tile([0.4, -0.4], 13)
    np.testing.assert_array_equal(np.diag(h), 1.5 * n + s)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 3), st.floats(0, 3), st.floats(0, 2), st.floats(0, 2))
def test_hamiltonian_symmetric(w, d, g1, g2):
    h = build_hamiltonian(ModelParams(w, d, g1, g2), TruncatedBasis(15))
    assert np.array_equal(h, h.T)


def test_hand_computed_4x4():
    # basis |0,+z>, |0,-z>, |1,+z>, |1,-z>; omega = delta = 1, g1 = g2 = 0.5
    expected = np.array(
        [
            [0.5, 0.0, 0.0, 0.5],
            [0.0, -0.5, 0.5, 0.0],
            [0.0, 0.5, 1.5, 0.0],
            [0.5, 0.0, 0.0, 0.5],
        ]
    )
    h = build_hamiltonian(ModelParams(1, 1, 0.5, 0.5), TruncatedBasis(1))
    np.testing.assert_allclose(h, expected, atol=1e-15)


def test_hand_computed_4x4_anisotropic():
    # g1 = 0.2, g2 = 0.6: a^dag sigma_- carries g1, a^dag sigma_+ carries g2
    h = build_hamiltonian(ModelParams(1, 1, 0.2, 0.6), TruncatedBasis(1))
    assert h[3, 0] == pytest.approx(0.2)  # <1,-z| H |0,+z>
    assert h[2, 1] == pytest.approx(0.6)  # <1,+z| H |0,-z>


def test_lowest_eigenpairs_simple():
    res = lowest_eigenpairs(np.diag([3.0, -1.0, 2.0, 0.5]), 4)
    np.testing.assert_allclose(res.eigenvalues, [-1.0, 0.5, 2.0, 3.0])
    res = lowest_eigenpairs(np.array([[0.0, 1.0], [1.0, 0.0]]), 2)
    np.testing.assert_allclose(res.eigenvalues, [-1.0, 1.0])
    assert res.converged


def test_lowest_eigenpairs_k_range():
    with pytest.raises(ValueError):
        lowest_eigenpairs(np.eye(3), 4)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_dual_method_eigenvalues(seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(50, 50))
    m = 0.5 * (m + m.T)
    # independent route: Householder tridiagonalization + Sturm bisection
    t = hessenberg(m)
    ref = eigvalsh_tridiagonal(np.diag(t), np.diag(t, -1), lapack_driver="stebz")
    res = lowest_eigenpairs(m, 50)
    np.testing.assert_allclose(res.eigenvalues, ref, atol=1e-10)
    np.testing.assert_allclose(res.eigenvectors.T @ res.eigenvectors, np.eye(50), atol=1e-10)


def test_decoupled_observables():
    res = exact_observables(ModelParams(1, 0.6, 0, 0), 20)
    assert res.eigenvalues[0] == pytest.approx(-0.3)
    assert res.photon_number == pytest.approx(0.0, abs=1e-14)
    assert res.qubit_entropy == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.2, 0.7, 1.0])
def test_displaced_oscillator_limit(alpha):
    res = exact_observables(ModelParams(1, 0, alpha, alpha), 60)
    assert res.eigenvalues[0] == pytest.approx(-(alpha**2), abs=1e-10)


def test_frozen_ground_energy():
    p = ModelParams(1, 1, 0.5, 0.5)
    assert exact_observables(p, 60).eigenvalues[0] == pytest.approx(FROZEN_E0, abs=1e-9)
    assert exact_observables(p, 100).eigenvalues[0] == pytest.approx(FROZEN_E0, abs=1e-9)


def test_exact_observables_rejects_tiny_cutoff():
    with pytest.raises(ValueError):
        exact_observables(ModelParams(1, 1, 0.1, 0.1), 5)


def test_converge_truncation_examples():
    n, res = converge_truncation(ModelParams(1, 1, 0, 0), 1e-10)
    assert n == 20
    n, res = converge_truncation(ModelParams(1, 1, 1.0, 1.0), 1e-8)
    assert n <= 160
    assert res.n_max == n


def test_converge_truncation_ceiling():
    with pytest.raises(TruncationError):
        converge_truncation(ModelParams(1, 1, 4.0, 4.0), 1e-8, ceiling=40)
    with pytest.raises(ValueError):
        converge_truncation(ModelParams(1, 1, 0.1, 0.1), 0.0)


@pytest.mark.parametrize("g", [0.5, 1.0, 1.5])
def test_truncation_error_shrinks(g):
    p = ModelParams(1, 1, g, g)
    e = [exact_observables(p, n).eigenvalues[0] for n in (10, 20, 40)]
    assert abs(e[1] - e[2]) <= abs(e[0] - e[1]) + 1e-13


@pytest.mark.parametrize("params", [ModelParams(1, 1, 0.7, 0.7), ModelParams(1, 2, 1.2, 0.6), ModelParams(1, 0.5, 0.3, 0.9)])
def test_eigenvector_parity(params):
    res = exact_observables(params, 60, k=6)
    np.testing.assert_allclose(np.abs(res.parities), 1.0, atol=1e-8)


def test_parity_commutes():
    h = build_hamiltonian(ModelParams(1, 1.3, 0.4, 1.1), TruncatedBasis(20))
    par = np.diag(parity_diagonal(h.shape[0]))
    np.testing.assert_allclose(h @ par, par @ h, atol=1e-14)


def test_degenerate_levels_rotated_into_parity_states():
    # deep-strong coupling with tiny delta: ground doublet nearly degenerate
    res = exact_observables(ModelParams(1, 1e-6, 3.0, 3.0), 160, k=2)
    np.testing.assert_allclose(np.abs(res.parities), 1.0, atol=1e-8)


def test_ground_energy_monotone_in_coupling():
    for ratio in (0.5, 1.0, 1.5):
        e = [exact_observables(ModelParams.from_ratio(1, 1, g, ratio), 60).eigenvalues[0] for g in np.arange(0, 1.01, 0.1)]
        assert np.all(np.diff(e) <= 1e-12)


def test_parity_sector_ground():
    p = ModelParams(1, 1, 0.4, 0.4)
    sectors = parity_sector_ground(p, 40)
    res = exact_observables(p, 40, k=2)
    assert min(sectors.values()) == pytest.approx(res.eigenvalues[0])
    # weak coupling ground state is |0,-z>, parity -1
    assert sectors[-1] < sectors[1]


def test_gap_minimum_known_value():
    # for g2 = g1/2 and delta = omega = 1 the crossing is at g1 = 2/sqrt(3)
    gc = exact_gap_minimum(ModelParams(1, 1, 0, 0), 0.5, (0.1, 2.0))
    assert gc == pytest.approx(2 / np.sqrt(3), abs=1e-6)


def test_binary_entropy():
    assert binary_entropy([1.0, 0.0]) == 0.0
    assert binary_entropy([0.5, 0.5]) == pytest.approx(1.0)
    assert binary_entropy([0.75, 0.25]) == pytest.approx(0.811278, abs=1e-6)
