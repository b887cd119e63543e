"""I_rel of raised probes, the balanced extremal state and the subspace optimum on the Ising chain."""
import argparse
import csv
import sys
import time
from dataclasses import dataclass, field

from metrokit.experiments import (
    FrequencyScenario,
    make_state,
    optimize_state_in_subspace,
    scan_state,
    subspace_for,
)


@dataclass
class ScanConfig:
    ns: list = field(default_factory=lambda: [4, 5, 6])
    gamma: float = 1.0
    search: bool = True
    restarts: int = 8
    seed: int = 0
    kind: str = "nn"


def run(cfg: ScanConfig):
    rows = []
    for n in cfg.ns:
        t0 = time.perf_counter()
        labels = [f"pg:k={k}" for k in range(1, n // 2 + 1)] + ["optimal"]
        states = {lab: make_state(cfg.kind, n, lab) for lab in labels}
        for lab, st in states.items():
            r = scan_state(FrequencyScenario(n, cfg.kind, cfg.gamma, st, lab))
            rows.append({"n": n, "state": lab, "t_opt": r.t_opt, "f_over_t": r.f_over_t_max, "i_rel": r.i_rel})
        if cfg.search:
            sc = FrequencyScenario(n, cfg.kind, cfg.gamma, states[labels[0]])
            res = optimize_state_in_subspace(sc, subspace_for(cfg.kind, n), seed=cfg.seed,
                                             restarts=cfg.restarts, seeds=list(states.values()))
            rows.append({"n": n, "state": "subspace", "t_opt": res.t_opt, "f_over_t": res.f_over_t,
                         "i_rel": res.i_rel})
        print(f"n={n} done in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[4, 5, 6])
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--kind", default="nn", choices=("nn", "local"))
    ap.add_argument("--no-search", action="store_true")
    ap.add_argument("--restarts", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    cfg = ScanConfig(a.n, a.gamma, not a.no_search, a.restarts, a.seed, a.kind)
    rows = run(cfg)
    w = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: format(v, ".8g") if isinstance(v, float) else v for k, v in r.items()})


if __name__ == "__main__":
    main()
