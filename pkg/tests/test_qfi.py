import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import sqrtm

from metrokit.channels import DephasingChannel, apply_dephasing, evolve_unitary
from metrokit.errors import DimensionMismatch, MixedInput, NonCommutingNoise, NonHermitianDerivative
from metrokit.operators import build_hamiltonian
from metrokit.qfi import qfi_dephased_spectral, qfi_from_derivative, qfi_mixed_sld, qfi_pure, sld
from metrokit.states import QuantumState, ghz_state, pretty_good_state, product_plus
from metrokit.su2 import generators_for

from conftest import I2, X, Z, random_state


def bures_qfi(rho_of, theta=0.2, d=1e-4):
    """8 (1 - sqrt fidelity) / d^2, independent of any SLD machinery."""
    a, b = rho_of(theta), rho_of(theta + d)
    sa = sqrtm(a)
    fid = np.trace(sqrtm(sa @ b @ sa)).real
    return 8 * (1 - fid) / d**2


@pytest.mark.parametrize("n", range(2, 9))
def test_ghz_pure_is_n_squared(n):
    h = build_hamiltonian("local", n)
    assert qfi_pure(ghz_state(n), h).value == pytest.approx(n**2, abs=1e-9)


def test_pure_examples():
    g = generators_for("local", 5)
    h = build_hamiltonian("local", 5)
    assert qfi_pure(pretty_good_state(g, 2, 2), h).value == pytest.approx(17)
    w, u = np.linalg.eigh(h.matrix)
    assert qfi_pure(QuantumState.pure(u[:, 3]), h).value == pytest.approx(0, abs=1e-12)
    with pytest.raises(MixedInput):
        qfi_pure(QuantumState.mixed(np.eye(2) / 2), Z)


def test_sld_textbook():
    assert np.allclose(sld(I2 / 2, X / 2), X)
    assert np.allclose(sld(I2 / 2, np.zeros((2, 2))), 0)
    with pytest.raises(NonHermitianDerivative):
        sld(I2 / 2, np.array([[0, 1], [0, 0]]))
    with pytest.raises(NonHermitianDerivative):
        sld(I2 / 2, I2)


def test_sld_pure_matches_variance(rng):
    h = build_hamiltonian("nn", 3).matrix
    v = random_state(rng, 3)
    rho = np.outer(v, v.conj())
    drho = 1j * (h @ rho - rho @ h)
    ell = sld(rho, drho)
    assert np.allclose(ell, ell.conj().T)
    # L satisfies the defining equation on the support
    assert np.allclose(0.5 * (ell @ rho + rho @ ell), drho, atol=1e-10)
    want = qfi_pure(QuantumState.pure(v), h).value
    assert np.trace(ell @ rho @ ell).real == pytest.approx(want, rel=1e-10)
    assert qfi_from_derivative(rho, drho) == pytest.approx(want, rel=1e-10)


def test_noiseless_and_full_dephasing(rng):
    h = build_hamiltonian("local", 3)
    s = QuantumState.pure(random_state(rng, 3))
    want = qfi_pure(s, h).value
    assert qfi_mixed_sld(s, h, DephasingChannel(3, 1.0)).value == pytest.approx(want, rel=1e-9)
    assert qfi_dephased_spectral(s, h, DephasingChannel(3, 1.0)).value == pytest.approx(want, rel=1e-9)
    one = QuantumState.pure(random_state(rng, 1))
    assert qfi_mixed_sld(one, Z / 2, DephasingChannel(1, 0.5)).value == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("kind", ["local", "nn"])
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_cross_formula(kind, n, rng):
    h = build_hamiltonian(kind, n)
    for _ in range(2):
        s = QuantumState.pure(random_state(rng, n))
        ch = DephasingChannel(n, float(rng.uniform(0.5, 1)))
        a = qfi_mixed_sld(s, h, ch).value
        b = qfi_dephased_spectral(s, h, ch).value
        assert abs(a - b) < 1e-9 * max(1.0, a)


def test_pg_local4_and_ghz3_cross():
    h4 = build_hamiltonian("local", 4)
    pg = pretty_good_state(generators_for("local", 4), 2, 2)
    ch = DephasingChannel(4, 0.9)
    assert qfi_mixed_sld(pg, h4, ch).value == pytest.approx(qfi_dephased_spectral(pg, h4, ch).value, abs=1e-9)
    h3 = build_hamiltonian("local", 3)
    ch = DephasingChannel(3, 0.8)
    g = ghz_state(3)
    val = qfi_mixed_sld(g, h3, ch).value
    assert val == pytest.approx(qfi_dephased_spectral(g, h3, ch).value, abs=1e-9)
    # GHZ coherence shrinks by (2p-1)^n: F = n^2 (2p-1)^{2n}
    assert val == pytest.approx(9 * 0.6**6, rel=1e-9)


def test_non_commuting_rejected():
    h = build_hamiltonian("non_local", 2)
    with pytest.raises(NonCommutingNoise):
        qfi_dephased_spectral(product_plus(2), h, DephasingChannel(2, 0.8))
    with pytest.raises(DimensionMismatch):
        qfi_mixed_sld(product_plus(3), h)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_additivity(n):
    p = 0.85
    h = build_hamiltonian("local", n) if n > 1 else Z / 2
    single = qfi_dephased_spectral(product_plus(1), Z / 2, DephasingChannel(1, p)).value
    assert single == pytest.approx((2 * p - 1) ** 2)
    total = qfi_mixed_sld(product_plus(n), h, DephasingChannel(n, p)).value
    assert total == pytest.approx(n * single, abs=1e-9)


@settings(max_examples=15)
@given(st.integers(1, 3), st.floats(0.05, 0.95), st.integers(0, 2**31 - 1))
def test_convexity(n, w, seed):
    rng = np.random.default_rng(seed)
    h = build_hamiltonian("local", n).matrix if n > 1 else Z / 2
    a, b = (np.outer(v, v.conj()) for v in (random_state(rng, n), random_state(rng, n)))
    fa, fb = (qfi_mixed_sld(QuantumState.mixed(r), h).value for r in (a, b))
    fm = qfi_mixed_sld(QuantumState.mixed(w * a + (1 - w) * b), h).value
    assert fm <= w * fa + (1 - w) * fb + 1e-9


def test_monotone_in_noise():
    h = build_hamiltonian("nn", 4)
    s = pretty_good_state(generators_for("nn", 4), 3, 1)
    vals = [qfi_dephased_spectral(s, h, DephasingChannel.from_rate(4, 1.0, t)).value
            for t in np.linspace(0, 3, 13)]
    assert all(x >= y - 1e-12 for x, y in zip(vals, vals[1:]))


def test_finite_difference_and_bures(rng):
    n = 3
    h = build_hamiltonian("nn", n)
    s = QuantumState.pure(random_state(rng, n))
    ch = DephasingChannel(n, 0.8)
    rho0 = apply_dephasing(s, ch)

    def rho_of(theta):
        return evolve_unitary(rho0, h, theta).data

    exact = qfi_mixed_sld(s, h, ch).value
    d = 1e-5
    drho = (rho_of(d) - rho_of(-d)) / (2 * d)
    assert abs(qfi_from_derivative(rho_of(0.0), drho) - exact) < 1e-5 * exact
    assert bures_qfi(rho_of) == pytest.approx(exact, rel=1e-3)


def test_theta_independent(rng):
    h = build_hamiltonian("local", 3)
    s = QuantumState.pure(random_state(rng, 3))
    ch = DephasingChannel(3, 0.7)
    assert qfi_mixed_sld(s, h, ch, 0.0).value == pytest.approx(qfi_mixed_sld(s, h, ch, 0.3).value, rel=1e-10)
