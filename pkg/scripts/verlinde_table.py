"""Verlinde representatives, labels and ribbon phases for a simple group."""

import argparse
import cmath
import math

from diracmf.exact import frac_str
from diracmf.lie import SIMPLE_TAGS, build_root_system
from diracmf.potential import verlinde_classes_simple


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--group", default="A1", choices=SIMPLE_TAGS)
    ap.add_argument("--levels", default="1,2,3")
    args = ap.parse_args()

    rs = build_root_system(args.group)
    for k in (int(x) for x in args.levels.split(",")):
        vd = verlinde_classes_simple(rs, k)
        print(f"{rs.tag} level {k}: {vd.count} kernel points, {sum(vd.regular)} regular, "
              f"{len(vd.representatives)} orbits, rescale {vd.rescale}")
        for x, lab, w, z in zip(vd.representatives, vd.labels, vd.critical_values, vd.normalized_phases):
            turns = cmath.phase(z) / (2 * math.pi)
            print(f"  lam={lab!s:<10} mu=({', '.join(frac_str(c) for c in x)})  W={frac_str(w):>8}  "
                  f"phase/vacuum = exp(2 pi i {turns:+.6f})")


if __name__ == "__main__":
    main()
