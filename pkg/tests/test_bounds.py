import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metrokit.bounds import (
    brute_force_xi_omega,
    cq_alpha,
    cq_closed_form,
    cq_from_kraus,
    cq_min_dephasing,
    reference_frequency_bounds,
    remixed_kraus,
    xi_omega,
)
from metrokit.channels import DephasingChannel, dephasing_kraus
from metrokit.errors import InvalidQ, SizeTooLargeForExplicitKraus, UnsupportedRemixGenerator
from metrokit.operators import build_hamiltonian, collective
from metrokit.qfi import qfi_mixed_sld
from metrokit.states import QuantumState, ghz_state, nn_balanced_extremal, pretty_good_state, product_plus, variance
from metrokit.su2 import generators_for

from conftest import random_state


def fixture_states(kind, n):
    g = generators_for(kind, n)
    axis = 2 if kind == "local" else 3
    return {"product": product_plus(n), "ghz": ghz_state(n), "pg": pretty_good_state(g, axis)}


def test_unremixed_kraus_is_trivial_bound(rng):
    n = 3
    h = build_hamiltonian("nn", n).matrix
    s = QuantumState.pure(random_state(rng, n))
    ks, dks = remixed_kraus(h, DephasingChannel(n, 0.8), 0.0)
    assert cq_from_kraus(s, ks, dks).cq == pytest.approx(4 * variance(s, h), rel=1e-12)
    ch = DephasingChannel(n, 1.0)
    ks, dks = remixed_kraus(h, ch, cq_min_dephasing(s, h, ch).alpha_min)
    assert cq_from_kraus(s, ks, dks).cq == pytest.approx(4 * variance(s, h), rel=1e-12)
    # any other remix only adds alpha^2 N at zero noise
    ks, dks = remixed_kraus(h, ch, 0.7)
    assert cq_from_kraus(s, ks, dks).cq == pytest.approx(4 * (variance(s, h) + 0.49 * n), rel=1e-12)


@pytest.mark.parametrize("kind", ["local", "nn"])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_kraus_path_matches_xi_omega(kind, n, rng):
    h = build_hamiltonian(kind, n)
    s = QuantumState.pure(random_state(rng, n))
    ch = DephasingChannel(n, 0.77)
    for alpha in (-0.4, 0.0, 0.3):
        ks, dks = remixed_kraus(h, ch, alpha)
        assert cq_from_kraus(s, ks, dks).cq == pytest.approx(cq_alpha(s, h, ch, alpha), rel=1e-10)
    rep = cq_min_dephasing(s, h, ch)
    ks, dks = remixed_kraus(h, ch, rep.alpha_min)
    assert cq_from_kraus(s, ks, dks).cq == pytest.approx(rep.cq, rel=1e-10)


def test_ghz_local3_cross_path():
    h = build_hamiltonian("local", 3)
    ch = DephasingChannel(3, 0.9)
    rep = cq_min_dephasing(ghz_state(3), h, ch)
    ks, dks = remixed_kraus(h, ch, rep.alpha_min)
    assert cq_from_kraus(ghz_state(3), ks, dks).cq == pytest.approx(rep.cq, rel=1e-12)


def test_remix_cap_and_generator():
    with pytest.raises(SizeTooLargeForExplicitKraus):
        remixed_kraus(build_hamiltonian("local", 7), DephasingChannel(7, 0.9), 0.1)
    with pytest.raises(UnsupportedRemixGenerator):
        xi_omega(product_plus(2), build_hamiltonian("local", 2), DephasingChannel(2, 0.9), b="s3")


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_xi_omega_brute_force(n, rng):
    h = build_hamiltonian("nn", n).matrix if n > 1 else np.diag([0.5, -0.5])
    for _ in range(3):
        s = QuantumState.pure(random_state(rng, n))
        ch = DephasingChannel(n, float(rng.uniform(0.5, 1)))
        a, b = xi_omega(s, h, ch), brute_force_xi_omega(s, h, ch)
        assert abs(a[0] - b[0]) < 1e-10 and abs(a[1] - b[1]) < 1e-10


def test_noiseless_limits(rng):
    n = 4
    s = QuantumState.pure(random_state(rng, n))
    h = build_hamiltonian("local", n)
    xi, om = xi_omega(s, h, DephasingChannel(n, 1.0))
    assert xi == 0 and om == pytest.approx(n)
    rep = cq_min_dephasing(s, h, DephasingChannel(n, 1.0))
    assert rep.cq == pytest.approx(qfi_mixed_sld(s, h).value, rel=1e-9)


@pytest.mark.parametrize("kind", ["local", "nn"])
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_bound_dominates_qfi(kind, n):
    h = build_hamiltonian(kind, n)
    for s in fixture_states(kind, n).values():
        for p in (0.6, 0.8, 0.95):
            ch = DephasingChannel(n, p)
            assert cq_min_dephasing(s, h, ch).cq >= qfi_mixed_sld(s, h, ch).value - 1e-9


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_closed_form_local_general(n, rng):
    sz = collective(n, "Z")
    for _ in range(3):
        s = QuantumState.pure(random_state(rng, n))
        ch = DephasingChannel(n, float(rng.uniform(0.5, 0.99)))
        got = cq_min_dephasing(s, sz, ch).cq
        assert got == pytest.approx(cq_closed_form("local-general", n, ch.q2, variance(s, sz)), abs=1e-9)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_nn_balanced_is_trivial(n):
    h = build_hamiltonian("nn", n)
    s = nn_balanced_extremal(n)
    for p in (0.6, 0.9):
        rep = cq_min_dephasing(s, h, DephasingChannel(n, p))
        assert abs(rep.xi) < 1e-12
        assert rep.cq == pytest.approx(4 * variance(s, h), abs=1e-12)
        assert variance(s, h) == pytest.approx((n - 1) ** 2)


def test_nn_closed_form_matches_numerics(rng):
    n = 4
    h = build_hamiltonian("nn", n)
    sz = collective(n, "Z")
    s = QuantumState.pure(random_state(rng, n))
    ch = DephasingChannel(n, 0.8)
    v = s.vector
    cov = (np.vdot(h.matrix @ v, sz @ v) - np.vdot(v, h.matrix @ v) * np.vdot(v, sz @ v)).real
    got = cq_closed_form("nn", n, ch.q2, variance(s, h), cov, variance(s, sz))
    assert got == pytest.approx(cq_min_dephasing(s, h, ch).cq, rel=1e-10)


def test_closed_form_values():
    assert cq_closed_form("local_ghz", 4, 0.0) == pytest.approx(16)
    assert cq_closed_form("local_pg", 4, 0.0) == pytest.approx(4 * 3)
    assert cq_closed_form("local_general", 5, 1.0, 3.0) == 0.0
    for bad in (-0.1, 1.1, float("nan")):
        with pytest.raises(InvalidQ):
            cq_closed_form("local_pg", 4, bad)
    with pytest.raises(ValueError):
        cq_closed_form("nn", 4, 0.5, 1.0)
    with pytest.raises(ValueError):
        cq_closed_form("bogus", 4, 0.5, 1.0)


@pytest.mark.parametrize("q2", [0.1, 0.5, 0.9])
def test_asymptotic_prefactor_pg_ghz(q2):
    lim = 4 * (1 - q2) / q2
    for n in (1_000, 10_000):
        for variant in ("local_pg", "local_ghz"):
            got = cq_closed_form(variant, n, q2) / n
            if n == 10_000 or q2 >= 0.5:
                assert got / lim == pytest.approx(1, rel=0.01)


def test_reference_bounds():
    b = reference_frequency_bounds(1, 1, 1)
    assert b["ghz_bound"] == pytest.approx(2 * np.e) and b["sss_bound"] == pytest.approx(2)
    b = reference_frequency_bounds(10, 100, 0.5)
    assert b["ghz_bound"] == pytest.approx(np.e / 1000) and b["sss_bound"] == pytest.approx(1e-3)
    with pytest.raises(ValueError):
        reference_frequency_bounds(0, 1, 1)


@settings(max_examples=20)
@given(st.integers(2, 4), st.floats(0.5, 1.0), st.floats(-0.5, 0.5), st.integers(0, 2**31 - 1))
def test_alpha_min_is_minimum(n, p, da, seed):
    rng = np.random.default_rng(seed)
    h = build_hamiltonian("local", n)
    s = QuantumState.pure(random_state(rng, n))
    ch = DephasingChannel(n, p)
    rep = cq_min_dephasing(s, h, ch)
    assert cq_alpha(s, h, ch, rep.alpha_min) == pytest.approx(rep.cq, abs=1e-9)
    assert cq_alpha(s, h, ch, rep.alpha_min + da) >= rep.cq - 1e-9
