"""Brute-force reference: materialise ``Z`` and solve the full system.

Only meant for small problems in tests. Deliberately simple.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import GroupedDesign, SingularSystemError, SizeGuardError, VarianceRatio

MAX_DIM = 2000


@dataclass(frozen=True)
class DenseSystem:
    a: np.ndarray
    c: np.ndarray
    p: int
    n: int


def incidence_matrix(sizes: np.ndarray) -> np.ndarray:
    """The ``N x n`` block indicator ``Z``."""
    sizes = np.asarray(sizes)
    Z = np.zeros((int(sizes.sum()), sizes.size))
    Z[np.arange(Z.shape[0]), np.repeat(np.arange(sizes.size), sizes)] = 1.0
    return Z


def dense_assemble(design: GroupedDesign, ratio: VarianceRatio | float = 1.0) -> DenseSystem:
    """Form ``A = [[X'X, X'Z], [Z'X, Z'Z + lambda I]]`` and ``c = [X'Y; Z'Y]``."""
    lam = VarianceRatio.coerce(ratio).value
    p, n = design.p, design.n
    if p + n > MAX_DIM:
        raise SizeGuardError(f"dense system of order {p + n} exceeds cap {MAX_DIM}")
    X, y = design.X, design.y
    Z = incidence_matrix(design.sizes)
    a = np.block([
        [X.T @ X, X.T @ Z],
        [Z.T @ X, Z.T @ Z + lam * np.eye(n)],
    ])
    c = np.concatenate([X.T @ y, Z.T @ y])
    return DenseSystem(a=a, c=c, p=p, n=n)


def gauss_solve(a: np.ndarray, b: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Gaussian elimination with partial pivoting, then back substitution."""
    a = np.array(a, dtype=np.float64, copy=True)
    b = np.array(b, dtype=np.float64, copy=True)
    n = b.size
    tol = rtol * np.abs(a).sum(axis=1).max() if n else 0.0
    for k in range(n):
        r = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[r, k]) <= tol:
            raise SingularSystemError(f"matrix is singular at column {k + 1}")
        if r != k:
            a[[k, r]] = a[[r, k]]
            b[[k, r]] = b[[r, k]]
        lam = a[k + 1:, k] / a[k, k]
        a[k + 1:, k:] -= np.outer(lam, a[k, k:])
        b[k + 1:] -= lam * b[k]
    x = np.empty(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x


def dense_solve(system: DenseSystem) -> np.ndarray:
    """Full solution ``delta = (beta, v)`` of the dense system."""
    return gauss_solve(system.a, system.c)
