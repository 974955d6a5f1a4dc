"""Action-law residual of the nonabelian su(2) loop model as M doubles."""

import numpy as np

from diracmf.cocycle import ExtendedLoopVector, FourierLoop, action_law_residual, loop_algebra
from diracmf.lie import build_root_system
from diracmf.sampling import random_path

alg = loop_algebra(build_root_system("A1"))
Ms = (2, 4, 8, 16, 32)
print("seed " + " ".join(f"{'M=' + str(M):>10}" for M in Ms))
for seed in range(6):
    rng = np.random.default_rng(seed)
    g1, g2 = random_path(alg, rng, factors=1), random_path(alg, rng, factors=1)
    base = FourierLoop.random(2, 3, rng)
    x = complex(0, rng.normal())
    row = []
    for M in Ms:
        c = np.zeros((2 * M + 1, 3), dtype=complex)
        c[M - 2 : M + 3] = base.coeffs
        row.append(action_law_residual(g1, g2, ExtendedLoopVector(x, FourierLoop(c))))
    print(f"{seed:>4} " + " ".join(f"{r:>10.2e}" for r in row))
