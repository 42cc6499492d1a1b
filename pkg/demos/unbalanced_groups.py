"""
Groups of different sizes
=========================

Nothing in the elimination needs equal group sizes: each group contributes
its own diagonal entry ``m_i + lam``.
"""

import numpy as np

import fastmme

rng = np.random.default_rng(0)
sizes = rng.integers(1, 12, size=25)
config = fastmme.SimConfig(n=25, m=sizes, p=2, beta_true=[0.5, -0.5], seed=3)
design, _ = fastmme.simulate(config)
print("group sizes:", design.sizes.tolist())

sol = fastmme.solve(design, ratio=2.0)
blocks = fastmme.assemble(design, 2.0)
print("diagonal entries m_i + lam:", blocks.d[:5], "...")
print("beta_hat:", np.round(sol.beta, 3))

delta = fastmme.dense_solve(fastmme.dense_assemble(design, 2.0))
print(f"max |fast - dense| = {np.abs(sol.delta - delta).max():.1e}")
