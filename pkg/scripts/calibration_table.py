"""Square-identity residual of all 16 candidate conventions, per group."""

import sys

from diracmf.dirac import calibration_table
from diracmf.exact import frac_str
from diracmf.lie import SIMPLE_TAGS, build_root_system

tags = sys.argv[1:] or list(SIMPLE_TAGS)
for tag in tags:
    print(tag)
    for cal, res in calibration_table(build_root_system(tag)):
        mark = "  <-" if res <= 1e-9 else ""
        print(f"  kappa={cal.kappa:+d} cubic={frac_str(cal.cubic):>6} t_sign={cal.t_sign:+d}  residual {res:.3e}{mark}")
