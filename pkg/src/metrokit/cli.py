"""metrokit command line: JSON (default) or CSV reports on stdout or --out."""
from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from . import __version__
from .bounds import cq_closed_form, cq_min_dephasing
from .channels import DephasingChannel
from .errors import CaseUnknown, MetrokitError
from .operators import build_hamiltonian, canonical_kind, spectral_decompose
from .qfi import qfi_dephased_spectral, qfi_mixed_sld, qfi_pure
from .serialize import dumps, matrix_to_json
from .states import (
    default_k,
    dicke_state,
    ghz_state,
    optimal_state,
    pretty_good_state,
    product_plus,
    variance,
)
from .su2 import construct_generators, verify_su2

KIND_CHOICES = ("local", "nn", "cluster", "nonlocal")
DEFAULT_AXIS = {"local": 2}


class UsageError(Exception):
    pass


def _shared(p: argparse.ArgumentParser, state=True, noise=True):
    p.add_argument("--hamiltonian", choices=KIND_CHOICES, default="local")
    p.add_argument("--n", type=int, default=4, help="qubit count")
    if state:
        p.add_argument("--state", default="pg", help="pg[:k=K] | ghz | product | optimal | dicke:k=K")
    if noise:
        p.add_argument("--p", type=float, help="dephasing probability p in [0, 1]")
        p.add_argument("--gamma", type=float, help="dephasing rate, used with --t")
        p.add_argument("--t", type=float, help="exposure time, used with --gamma")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="metrokit", description="su(2) probe states and dephased QFI numerics")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("algebra", help="complete H into su(2) generators",
                       epilog="Anchor: block construction of S2, S3 from the level multiplicities of a "
                              "homogeneously gapped H; residuals of the su(2) commutation relations.")
    _shared(p, state=False, noise=False)
    p.add_argument("--block", type=int, help="emit S3 block between levels K and K+1 (level basis)")
    p.add_argument("--emit-generators", action="store_true", help="include S2, S3 matrices")

    p = sub.add_parser("state", help="build a probe state",
                       epilog="Anchor: raising the extremal eigenstate of a companion generator k times "
                              "(pretty good states) and reference families.")
    _shared(p, noise=False)
    p.add_argument("--axis", type=int, choices=(2, 3), help="ladder axis for pg states")

    p = sub.add_parser("variance", help="variance of H in a probe state",
                       epilog="Anchor: Hamiltonian variance, which sets the noiseless QFI 4(dH)^2.")
    _shared(p, noise=False)
    p.add_argument("--axis", type=int, choices=(2, 3))

    p = sub.add_parser("qfi", help="QFI of a probe under optional dephasing",
                       epilog="Anchor: QFI via the symmetric logarithmic derivative and the dephased "
                              "spectral formula 4 sum (li-lj)^2/(li+lj)|Hij|^2.")
    _shared(p)
    p.add_argument("--axis", type=int, choices=(2, 3))
    p.add_argument("--theta", type=float, default=0.0)

    p = sub.add_parser("bound", help="dephasing upper bound C_Q",
                       epilog="Anchor: purification bound minimized over collective S_x remixing; closed "
                              "forms for product, PG and GHZ probes and the Ising-chain case.")
    _shared(p)
    p.add_argument("--axis", type=int, choices=(2, 3))
    p.add_argument("--variant", choices=("local-general", "local-pg", "local-ghz", "nn"))
    p.add_argument("--q2", type=float, help="q^2 = 4p(1-p) for closed forms")
    p.add_argument("--dh2", type=float, help="variance of H for local-general / nn")
    p.add_argument("--cov", type=float, help="<H Sz> - <H><Sz> for nn")
    p.add_argument("--dsz2", type=float, help="variance of Sz for nn")

    p = sub.add_parser("freq-scan", help="optimized QFI per unit time and I_rel",
                       epilog="Anchor: frequency estimation with interrogation-time optimization and "
                              "relative improvement over |+>^N.")
    p.add_argument("--hamiltonian", choices=("local", "nn"), default="nn")
    p.add_argument("--n", default="4", help="INT, comma list, or range A..B")
    p.add_argument("--state", default="pg", help="pg (all k), pg:k=K, product, optimal, ghz, dicke:k=K")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--search", action="store_true", help="also run the symmetric-subspace search")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("reproduce", help="run a named regression case",
                       epilog="Anchor: worked examples for the local, Ising-chain and non-local "
                              "Hamiltonians, local bounds, and Ising-chain frequency scans.")
    p.add_argument("case")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    return ap


def _parse_state(label: str):
    name, _, arg = label.partition(":")
    k = None
    if arg:
        key, _, val = arg.partition("=")
        if key != "k" or not val.lstrip("-").isdigit():
            raise UsageError(f"cannot parse state option {arg!r}")
        k = int(val)
    if name not in ("pg", "ghz", "product", "optimal", "dicke"):
        raise UsageError(f"unknown state {label!r}")
    return name, k


def probe(args):
    kind = canonical_kind(args.hamiltonian)
    h = build_hamiltonian(kind, args.n)
    name, k = _parse_state(args.state)
    info = {}
    if name == "pg":
        gens = construct_generators(spectral_decompose(h))
        axis = getattr(args, "axis", None) or DEFAULT_AXIS.get(args.hamiltonian, 3)
        k = default_k(gens.j_max) if k is None else k
        st = pretty_good_state(gens, axis, k)
        info = {"k": k, "axis": axis, "j_max": gens.j_max, "c": gens.c}
    elif name == "ghz":
        st = ghz_state(args.n)
    elif name == "product":
        st = product_plus(args.n)
    elif name == "optimal":
        st = optimal_state(h, kind=kind)
    else:
        k = args.n // 2 if k is None else k
        st = dicke_state(args.n, k, "x")
        info = {"k": k, "basis": "x"}
    return h, st, info


def channel_of(args, n):
    if args.p is not None:
        if args.gamma is not None or args.t is not None:
            raise UsageError("give either --p or --gamma with --t")
        return DephasingChannel(n, args.p)
    if (args.gamma is None) != (args.t is None):
        raise UsageError("--gamma and --t go together")
    if args.gamma is not None:
        return DephasingChannel.from_rate(n, args.gamma, args.t)
    return None


def _ns(text: str) -> list[int]:
    try:
        if ".." in text:
            a, b = text.split("..")
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse --n {text!r}") from None


def cmd_algebra(args):
    h = build_hamiltonian(args.hamiltonian, args.n)
    spec = spectral_decompose(h)
    gens = construct_generators(spec)
    rep = verify_su2(gens)
    res = {
        "levels": [[lam, d] for lam, d in spec.levels],
        "c": gens.c,
        "j_max": gens.j_max,
        "commutator_residual": rep.commutator_residual,
        "casimir_residual": rep.casimir_residual,
    }
    if args.block is not None:
        if not 1 <= args.block < len(spec.multiplicities):
            raise UsageError(f"--block must lie in 1..{len(spec.multiplicities) - 1}")
        res["block"] = args.block
        res["s3_block"] = _rect_json(gens.block(args.block))
    if args.emit_generators:
        res["s2"] = matrix_to_json(gens.s2.matrix)
        res["s3"] = matrix_to_json(gens.s3.matrix)
    return res


def _rect_json(m):
    m = np.asarray(m, dtype=complex)
    return {"rows": m.shape[0], "cols": m.shape[1],
            "entries": [[[float(z.real), float(z.imag)] for z in row] for row in m]}


def cmd_state(args):
    h, st, info = probe(args)
    return {**info, "variance": variance(st, h), "state": st.to_json()}


def cmd_variance(args):
    h, st, info = probe(args)
    return {**info, "variance": variance(st, h)}


def cmd_qfi(args):
    h, st, info = probe(args)
    ch = channel_of(args, args.n)
    res = dict(info)
    if ch is None:
        res.update(qfi=qfi_pure(st, h).value, method="pure_variance")
        return res
    res.update(p=ch.p, q2=ch.q2)
    res["qfi"] = qfi_mixed_sld(st, h, ch, args.theta).value
    res["method"] = "sld_general"
    try:
        res["qfi_spectral"] = qfi_dephased_spectral(st, h, ch).value
    except MetrokitError:
        res["qfi_spectral"] = None
    return res


def cmd_bound(args):
    if args.variant is not None:
        if args.q2 is None:
            raise UsageError("closed forms need --q2")
        cq = cq_closed_form(args.variant, args.n, args.q2, args.dh2, args.cov, args.dsz2)
        return {"variant": args.variant, "q2": args.q2, "cq": cq}
    h, st, info = probe(args)
    ch = channel_of(args, args.n)
    if ch is None:
        raise UsageError("give --variant with --q2, or a channel via --p or --gamma/--t")
    rep = cq_min_dephasing(st, h, ch)
    out = {**info, "p": ch.p, **rep.as_dict()}
    out["qfi"] = qfi_mixed_sld(st, h, ch).value
    return out


def cmd_freq_scan(args):
    from .experiments import (
        FrequencyScenario,
        freq_scan,
        make_state,
        optimize_state_in_subspace,
        subspace_for,
    )

    ns = _ns(args.n)
    rows = freq_scan(args.hamiltonian, ns, args.gamma, args.state)
    if args.search:
        for n in ns:
            seeds = [make_state(args.hamiltonian, n, f"pg:k={k}") for k in range(1, n // 2 + 1)]
            seeds.append(make_state(args.hamiltonian, n, "optimal"))
            sc = FrequencyScenario(n, args.hamiltonian, args.gamma, seeds[0])
            r = optimize_state_in_subspace(sc, subspace_for(args.hamiltonian, n), seed=args.seed, seeds=seeds)
            rows.append({"n": n, "k": None, "t_opt": r.t_opt, "f_over_t": r.f_over_t, "i_rel": r.i_rel,
                         "coefficients": r.coefficients.tolist()})
    return {"rows": rows}


def cmd_reproduce(args):
    from .reproduce import run_case

    checks = run_case(args.case, args.seed)
    return {"case": args.case, "passed": all(c.passed for c in checks),
            "checks": [c.as_dict() for c in checks]}


COMMANDS = {
    "algebra": cmd_algebra, "state": cmd_state, "variance": cmd_variance, "qfi": cmd_qfi,
    "bound": cmd_bound, "freq-scan": cmd_freq_scan, "reproduce": cmd_reproduce,
}


def _csv(results: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")

    def cell(x):
        if isinstance(x, float):
            return format(x, ".12g")
        return "" if x is None else x

    if "rows" in results:
        cols = ["n", "k", "t_opt", "f_over_t", "i_rel"]
        w.writerow(cols)
        for r in results["rows"]:
            w.writerow([cell(r.get(c)) for c in cols])
    elif "checks" in results:
        w.writerow(["name", "expected", "actual", "tolerance", "pass"])
        for c in results["checks"]:
            w.writerow([cell(c[k]) if not isinstance(c[k], list) else str(c[k])
                        for k in ("name", "expected", "actual", "tolerance", "pass")])
    else:
        flat = {k: v for k, v in results.items() if not isinstance(v, (dict, list))}
        w.writerow(list(flat))
        w.writerow([cell(v) for v in flat.values()])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    params = {k: v for k, v in vars(args).items() if k not in ("command", "format", "out")}
    try:
        results = COMMANDS[args.command](args)
    except (UsageError, CaseUnknown) as e:
        sys.stderr.write(f"metrokit {args.command}: {e}\n")
        return 2
    except (MetrokitError, ValueError, ArithmeticError) as e:
        err = {"command": args.command, "params": params,
               "error": {"type": type(e).__name__, "message": str(e)}}
        _emit(dumps(err) + "\n", getattr(args, "out", None))
        return 1
    provenance = f"fixture:{args.case}" if args.command == "reproduce" else "computed"
    if args.format == "csv":
        _emit(_csv(results), args.out)
    else:
        env = {"command": args.command, "params": params, "results": results, "provenance": provenance}
        _emit(dumps(env) + "\n", args.out)
    if args.command == "reproduce" and not results["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
