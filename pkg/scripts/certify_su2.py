"""Build the su(2) completion for every Hamiltonian family and size, and tabulate residuals."""
import argparse
from dataclasses import dataclass

from metrokit.errors import MetrokitError
from metrokit.operators import build_hamiltonian, spectral_decompose
from metrokit.su2 import construct_generators, nn_alternative_generators, verify_su2


@dataclass
class CertifyConfig:
    n_min: int = 2
    n_max: int = 8
    kinds: tuple = ("local", "nn", "cluster", "non_local")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=8)
    cfg = CertifyConfig(n_max=ap.parse_args().n_max)
    print(f"{'kind':<12}{'n':>3}  {'j_max':>6}  {'c':>5}  {'[S,S] resid':>12}  {'J^2 resid':>10}")
    for kind in cfg.kinds:
        for n in range(cfg.n_min, cfg.n_max + 1):
            if kind == "non_local" and n % 2:
                continue
            try:
                g = construct_generators(spectral_decompose(build_hamiltonian(kind, n)))
            except MetrokitError as e:
                print(f"{kind:<12}{n:>3}  {type(e).__name__}: {e}")
                continue
            r = verify_su2(g)
            print(f"{kind:<12}{n:>3}  {r.j_max:>6.2f}  {g.c:>5.2f}  {r.commutator_residual:>12.2e}  "
                  f"{r.casimir_residual:>10.2e}")
    for n in range(2, min(cfg.n_max, 6) + 1):
        r = verify_su2(nn_alternative_generators(n))
        print(f"{'nn-alt':<12}{n:>3}  {r.j_max:>6.2f}  {2.0:>5.2f}  {r.commutator_residual:>12.2e}  "
              f"{r.casimir_residual:>10.2e}")


if __name__ == "__main__":
    main()
