from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from metrokit.errors import AnnihilatedState, DimensionMismatch, KOutOfRange, UnknownBasis
from metrokit.operators import build_hamiltonian, collective, spectral_decompose
from metrokit.states import (
    QuantumState,
    dicke_state,
    ghz_state,
    ground_state,
    nn_ground_superposition,
    pg_variance_closed_form,
    pretty_good_state,
    product_plus,
    raise_state,
    reference_state,
    variance,
)
from metrokit.su2 import generators_for, ladder_pair

from conftest import X, Z, kron_all, random_state, same_ray

R2 = np.sqrt(2)


def brute_variance(v, m):
    v = v / np.linalg.norm(v)
    return float((v.conj() @ m @ m @ v).real - (v.conj() @ m @ v).real ** 2)


def test_state_invariants():
    with pytest.raises(ValueError):
        QuantumState.mixed(np.array([[1, 0.5], [0.2, 0]]))
    with pytest.raises(ValueError):
        QuantumState.pure(np.array([2.0, 0.0]), normalize=False)
    s = QuantumState.pure(np.array([3.0, 4.0]))
    assert np.linalg.norm(s.vector) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(s.density(), np.outer(s.vector, s.vector.conj()))


def test_sigma_z_ground_is_one():
    assert np.allclose(np.abs(ground_state(Z).vector), [0, 1])


def test_local_s2_ground_chain():
    g = generators_for("local", 5)
    psi = ground_state(g.s2).vector
    assert np.allclose(g.s2.matrix @ psi, -2.5 * psi)
    spec = g.spectrum
    chain = spec.basis[:, spec.offsets[:-1]].conj().T @ psi
    # spin-5/2 rotated lowest weight: binomial magnitudes
    want = np.sqrt([1, 5, 10, 10, 5, 1]) / np.sqrt(32)
    assert np.allclose(np.abs(chain), want, atol=1e-9)


def test_nn_s3_ground_space_holds_fixture_chain():
    g = generators_for("nearest_neighbor", 5)
    s3 = spectral_decompose(g.s3)
    assert s3.multiplicities[-1] == 2 and s3.eigenvalues[-1] == pytest.approx(-4)
    gb = s3.level_basis(len(s3.multiplicities) - 1)
    spec = g.spectrum
    chain = np.array([1 / 4, -1 / 2, np.sqrt(3 / 8), -1 / 2, 1 / 4])
    target = spec.basis[:, spec.offsets[:-1]] @ chain
    assert np.linalg.norm(gb.conj().T @ target) == pytest.approx(1.0, abs=1e-9)
    psi = ground_state(g.s3).vector
    assert np.allclose(g.s3.matrix @ psi, -4 * psi)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_nn_ground_superposition_is_ground(n):
    h = build_hamiltonian("nn", n).matrix
    for alpha in (0.0, 0.7, np.pi / 2, 2.0):
        v = nn_ground_superposition(n, alpha).vector
        assert np.allclose(h @ v, -(n - 1) * v)


def test_nn_ground_superposition_examples():
    v = nn_ground_superposition(4, 0.0).vector
    assert abs(v[int("0101", 2)]) == pytest.approx(1.0)
    v = nn_ground_superposition(5, np.pi / 2).vector
    assert np.allclose(kron_all([X] * 5) @ v, v)
    v = nn_ground_superposition(6, np.pi / 2).vector
    assert np.vdot(v, build_hamiltonian("nn", 6).matrix @ v).real == pytest.approx(-5)


@pytest.mark.parametrize("kind,n,axis,k,var", [
    ("local", 5, 2, 2, 17 / 4),
    ("nn", 5, 3, 2, 12.0),
    ("non_local", 4, 3, 2, 17.0),
])
def test_pg_variances(kind, n, axis, k, var):
    g = generators_for(kind, n)
    pg = pretty_good_state(g, axis, k)
    assert variance(pg, build_hamiltonian(kind, n)) == pytest.approx(var, abs=1e-9)
    assert pg_variance_closed_form(g.j_max, k, g.c) == pytest.approx(var, abs=1e-12)
    # eigenstate of the ladder-axis generator with eigenvalue c(k - j)
    s = g.generator(axis)
    assert np.allclose(s @ pg.vector, g.c * (k - g.j_max) * pg.vector, atol=1e-9)


def test_closed_form_examples():
    assert pg_variance_closed_form(2.5, 2, 1) == pytest.approx(17 / 4)
    assert pg_variance_closed_form(2, 2, 2) == pytest.approx(12)
    assert pg_variance_closed_form(2.5, 3, 2) == pytest.approx(17)
    with pytest.raises(KOutOfRange):
        pg_variance_closed_form(1, 3, 1)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_local_pg_closed_form_all_k(n):
    g = generators_for("local", n)
    h = build_hamiltonian("local", n)
    for k in range(n + 1):
        got = variance(pretty_good_state(g, 2, k), h)
        assert got == pytest.approx(pg_variance_closed_form(g.j_max, k, g.c), abs=1e-9)


def test_raising_past_top_annihilates():
    g = generators_for("local", 4)
    psi = ground_state(g.s3).vector
    v = raise_state(g, psi, 3, int(2 * g.j_max) + 1)
    assert np.linalg.norm(v) < 1e-9
    with pytest.raises(AnnihilatedState):
        pretty_good_state(g, 3, 5)


def test_default_k_local5_is_two():
    g = generators_for("local", 5)
    assert same_ray(pretty_good_state(g, 2).vector, pretty_good_state(g, 2, 2).vector)


def test_reference_variances():
    h_loc = build_hamiltonian("local", 5)
    h_nn = build_hamiltonian("nn", 5)
    assert variance(ghz_state(5), h_loc) == pytest.approx(25 / 4)
    assert variance(product_plus(5), h_loc) == pytest.approx(5 / 4)
    assert variance(product_plus(5), h_nn) == pytest.approx(4)
    opt = reference_state("optimal", h_nn, hamiltonian_kind="nn")
    assert variance(opt, h_nn) == pytest.approx(16)
    d = reference_state("dicke", n=5, k=2, basis="x")
    assert variance(d, h_loc) == pytest.approx(17 / 4)


def test_dicke_basic():
    d = dicke_state(4, 2).vector
    idx = [int(b, 2) for b in ("0011", "0101", "0110", "1001", "1010", "1100")]
    assert np.allclose(np.abs(d[idx]) ** 2, 1 / 6) and np.abs(np.delete(d, idx)).max() == 0
    with pytest.raises(UnknownBasis):
        dicke_state(3, 1, "w")
    with pytest.raises(KOutOfRange):
        dicke_state(3, 4)


@pytest.mark.parametrize("basis,axis", [("x", "X"), ("y", "Y"), ("z", "Z")])
def test_dicke_eigen_and_symmetric(basis, axis):
    n, k = 5, 2
    v = dicke_state(n, k, basis).vector
    sa = collective(n, axis)
    # |1> of each basis has -1 eigenvalue of the Pauli
    assert np.allclose(sa @ v, (n - 2 * k) * v)
    perm = np.array([int(format(i, "05b")[::-1], 2) for i in range(32)])
    assert same_ray(v[perm], v)


def test_variance_errors_and_eigenstates():
    h = build_hamiltonian("local", 3)
    with pytest.raises(DimensionMismatch):
        variance(product_plus(2), h)
    spec = spectral_decompose(h)
    for i in range(8):
        assert variance(QuantumState.pure(spec.basis[:, i]), h) == pytest.approx(0, abs=1e-12)
    assert variance(QuantumState.pure(spec.basis[:, 0]), h) >= 0


@pytest.mark.parametrize("kind", ["local", "nn", "non_local", "cluster"])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_optimal_variance_brute_force(kind, n):
    if kind == "non_local" and n % 2:
        pytest.skip("non-local needs even n")
    h = build_hamiltonian(kind, n).matrix
    w, u = np.linalg.eigh(h)
    best = 0.0
    for a, b in combinations(range(2**n), 2):
        best = max(best, brute_variance(u[:, a] + u[:, b], h))
    assert best == pytest.approx((w[-1] - w[0]) ** 2 / 4, abs=1e-9)
    assert variance(reference_state("optimal", h, hamiltonian_kind=kind), h) == pytest.approx(best, abs=1e-9)


@given(st.integers(2, 5), st.integers(0, 2**31 - 1))
def test_variance_matches_brute(n, seed):
    rng = np.random.default_rng(seed)
    v = random_state(rng, n)
    h = build_hamiltonian("local", n).matrix
    assert variance(QuantumState.pure(v), h) == pytest.approx(brute_variance(v, h), abs=1e-10)
    rho = np.outer(v, v.conj()) * 0.6 + np.eye(2**n) * 0.4 / 2**n
    assert variance(QuantumState.mixed(rho), h) >= 0


def test_json_amplitudes():
    d = ghz_state(2).to_json()
    assert d["dim"] == 4 and len(d["amplitudes"]) == 4
    assert d["amplitudes"][0] == pytest.approx([1 / R2, 0])
