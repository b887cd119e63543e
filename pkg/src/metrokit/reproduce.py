"""Named regression cases with per-assertion expected/actual/tolerance records."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .bounds import cq_closed_form, cq_min_dephasing, reference_frequency_bounds
from .channels import DephasingChannel
from .errors import CaseUnknown
from .operators import build_hamiltonian, collective, spectral_decompose
from .states import (
    QuantumState,
    ground_state,
    ghz_state,
    optimal_state,
    pretty_good_state,
    product_plus,
    variance,
)
from .su2 import construct_generators, verify_su2

CASES = ("local-n5", "nn-n5", "nonlocal-n4", "bounds-local", "freq-nn")


@dataclass(frozen=True)
class Check:
    name: str
    expected: object
    actual: object
    tolerance: float
    passed: bool

    def as_dict(self) -> dict:
        return {"name": self.name, "expected": self.expected, "actual": self.actual,
                "tolerance": self.tolerance, "pass": self.passed}


def load_fixture(name: str) -> dict:
    text = resources.files("metrokit.data").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def _num(name, expected, actual, tol):
    return Check(name, float(expected), float(actual), tol, bool(abs(actual - expected) <= tol))


def _arr(name, expected, actual, tol):
    expected, actual = np.asarray(expected), np.asarray(actual)
    if expected.shape != actual.shape:
        return Check(name, list(expected.shape), list(actual.shape), tol, False)
    err = float(np.abs(expected - actual).max()) if expected.size else 0.0
    return Check(name, 0.0, err, tol, err <= tol)


def chain_state(spec, chain) -> np.ndarray:
    amps = np.array([complex(re, im) for re, im in chain])
    return spec.basis[:, spec.offsets[:-1]] @ amps


def _overlap(name, a, b, tol=1e-9):
    ov = abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    return Check(name, 1.0, float(ov), tol, bool(ov > 1 - tol))


def fixture_checks(name: str) -> list[Check]:
    fx = load_fixture(name)
    h = build_hamiltonian(fx["hamiltonian"], fx["n"])
    spec = spectral_decompose(h)
    gens = construct_generators(spec)
    checks = []
    lv = np.array(fx["levels"], dtype=float)
    checks.append(_arr("eigenvalues", lv[:, 0], spec.eigenvalues, 1e-9))
    checks.append(Check("multiplicities", lv[:, 1].astype(int).tolist(), list(spec.multiplicities), 0.0,
                        list(spec.multiplicities) == lv[:, 1].astype(int).tolist()))
    checks.append(_num("gap", fx["gap"], gens.c, 1e-9))
    for k, payload in sorted(fx["s3_blocks"].items()):
        want = np.asarray(payload)[..., 0]
        checks.append(_arr(f"s3_block_{k}", want, gens.block(int(k)), 1e-9))
    rep = verify_su2(gens)
    tol = 1e-9 * spec.dim
    checks.append(Check("su2_residual", 0.0, max(rep.commutator_residual, rep.casimir_residual), tol,
                        rep.ok(tol)))
    checks.append(_num("j_max", fx["j_max"], rep.j_max, 1e-9))
    built = {}
    for label, st in fx["states"].items():
        target = chain_state(spec, st["chain"])
        if st["k"] == 0:
            # degenerate ground spaces: compare with the projection onto the ground space
            got = ground_state(gens.generator(st["axis"])).vector
            gsp = spectral_decompose(gens.generator(st["axis"]))
            g = gsp.level_basis(len(gsp.multiplicities) - 1)
            in_space = np.linalg.norm(g.conj().T @ target) / np.linalg.norm(target)
            checks.append(Check(f"{label}_in_ground_space", 1.0, float(in_space), 1e-9, in_space > 1 - 1e-9))
            if g.shape[1] == 1:
                checks.append(_overlap(f"{label}_amplitudes", target, got))
            built[label] = QuantumState.pure(target)
        else:
            ground = built.get(st.get("from"))
            pg = pretty_good_state(gens, st["axis"], st["k"], ground=ground)
            checks.append(_overlap(f"{label}_amplitudes", target, pg.vector))
            built[label] = pg
    m = h.matrix
    refs = {
        "pg": built.get("pg"),
        "ghz": ghz_state(fx["n"]),
        "product": product_plus(fx["n"]),
        "optimal": optimal_state(m, kind=fx["hamiltonian"]),
    }
    for label, want in fx["variances"].items():
        checks.append(_num(f"variance_{label}", want, variance(refs[label], m), 1e-9))
    return checks


def bounds_local_checks(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = []
    for n in (2, 3, 4, 5, 6):
        sz = collective(n, "Z")
        v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        st = QuantumState.pure(v)
        ch = DephasingChannel(n, float(rng.uniform(0.55, 0.99)))
        got = cq_min_dephasing(st, sz, ch).cq
        want = cq_closed_form("local_general", n, ch.q2, variance(st, sz))
        checks.append(_num(f"closed_form_n{n}", want, got, 1e-9))
    for n in (2, 4, 8):
        # noiseless limit equals the GHZ QFI 4 (dH)^2 = N^2
        checks.append(_num(f"ghz_noiseless_n{n}", n**2, cq_closed_form("local_ghz", n, 0.0), 1e-9))
    n = 10_000
    for q2 in (0.1, 0.5, 0.9):
        lim = 4 * (1 - q2) / q2
        for variant in ("local_pg", "local_ghz"):
            got = cq_closed_form(variant, n, q2) / n
            checks.append(Check(f"{variant}_asymptote_q2_{q2}", lim, got, 0.01, abs(got / lim - 1) <= 0.01))
    for args in ((1, 1, 1), (10, 100, 0.5)):
        b = reference_frequency_bounds(*args)
        checks.append(_num(f"reference_ratio_{args}", np.e, b["ghz_bound"] / b["sss_bound"], 1e-12))
    return checks


def freq_nn_checks(ns=(4, 5), gamma: float = 1.0, seed: int = 0) -> list[Check]:
    from .experiments import (
        FrequencyScenario,
        dense_grid_max,
        make_state,
        optimize_state_in_subspace,
        scan_state,
        subspace_for,
    )

    checks = []
    for n in ns:
        pg = {}
        for k in range(1, n // 2 + 1):
            sc = FrequencyScenario(n, "nn", gamma, make_state("nn", n, f"pg:k={k}"))
            r = scan_state(sc)
            pg[k] = r.i_rel
            checks.append(Check(f"n{n}_pg{k}_beats_product", ">1", r.i_rel, 0.0, r.i_rel > 1))
            _, g = dense_grid_max(sc)
            rel = (g - r.f_over_t_max) / r.f_over_t_max
            checks.append(Check(f"n{n}_pg{k}_golden_vs_grid", 0.0, rel, 1e-4, rel <= 1e-4))
        opt = scan_state(FrequencyScenario(n, "nn", gamma, make_state("nn", n, "optimal"))).i_rel
        checks.append(Check(f"n{n}_optimal_beats_pg", max(pg.values()), opt, 0.0, opt >= max(pg.values())))
        seeds = [make_state("nn", n, f"pg:k={k}") for k in pg] + [make_state("nn", n, "optimal")]
        res = optimize_state_in_subspace(FrequencyScenario(n, "nn", gamma, seeds[0]), subspace_for("nn", n),
                                         seed=seed, seeds=seeds)
        best = max(opt, *pg.values())
        checks.append(Check(f"n{n}_subspace_search", best, res.i_rel, 1e-9, res.i_rel >= best - 1e-9))
    return checks


def run_case(case: str, seed: int = 0) -> list[Check]:
    if case in ("local-n5", "nn-n5", "nonlocal-n4"):
        return fixture_checks(case)
    if case == "bounds-local":
        return bounds_local_checks(seed)
    if case == "freq-nn":
        return freq_nn_checks(seed=seed)
    raise CaseUnknown(f"unknown case {case!r}; expected one of {', '.join(CASES)}")
