"""
Shrinkage as the variance ratio grows
=====================================

The variance ratio ``lam`` is added to each group size on the diagonal.
Large values pull the random effects to zero and the fixed effects to
ordinary least squares.
"""

import numpy as np
import matplotlib.pyplot as plt

import fastmme

design, v_true = fastmme.simulate(fastmme.SimConfig(n=30, m=4, p=2, beta_true=[1.0, 3.0], seed=4))
ols = np.linalg.lstsq(design.X, design.y, rcond=None)[0]

lams = np.logspace(-2, 6, 30)
vmax, gap = [], []
for lam in lams:
    sol = fastmme.solve(design, lam)
    vmax.append(np.abs(sol.v).max())
    gap.append(np.abs(sol.beta - ols).max())

for lam, a, b in list(zip(lams, vmax, gap))[::6]:
    print(f"lam={lam:9.3g}  max|v_hat|={a:.3e}  max|beta_hat - ols|={b:.3e}")

fig, ax = plt.subplots()
ax.loglog(lams, vmax, label=r"$\max_i |\hat v_i|$")
ax.loglog(lams, gap, label=r"$\max_j |\hat\beta_j - \beta^{OLS}_j|$")
ax.set_xlabel("variance ratio")
ax.legend()
fig.savefig("shrinkage.png", dpi=100)
