"""Smallest singular value of the A1 Dirac family along the unit coroot ray.

Prints one table per highest weight and the refined minimizer; pass --json
to dump the raw scans instead.
"""

import argparse
import json
import math

import numpy as np

from diracmf.dirac import cubic_dirac, kernel_locus_scan
from diracmf.lie import CartanVector, WeightVector, build_root_system
from diracmf.reps import irrep_matrices


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-weight", type=int, default=5)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--stop", type=float, default=6.0)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    rs = build_root_system("A1")
    ray = CartanVector(rs, [1 / math.sqrt(2)])
    grid = np.linspace(0.01, args.stop, args.count)
    scans = {}
    for n in range(args.max_weight + 1):
        df = cubic_dirac(irrep_matrices(rs, WeightVector(rs, (n,))))
        scans[n] = kernel_locus_scan(df, ray, grid)
    if args.json:
        print(json.dumps({str(n): s.to_json() for n, s in scans.items()}, indent=2))
        return
    print(f"{'lam':>4} {'||lam+rho||':>14} {'refined s':>18} {'sigma_min':>10} {'ker':>4}")
    for n, s in scans.items():
        print(f"{n:>4} {(n + 1) / math.sqrt(2):>14.10f} {s.refined_s:>18.15f} {s.refined_sigma:>10.1e} {s.kernel_dim:>4}")


if __name__ == "__main__":
    main()
