"""Euclidean inner product, norm, and the shifted dense linear solve.

Vectors are 1-D float64 arrays and matrices are square 2-D arrays; values
crossing a module boundary must be finite. Solves are dense LU with partial
pivoting; gallery dimensions stay small enough (n <= 512) that no sparse or
matrix-free path is needed.
"""

from __future__ import annotations

import numpy as np

from .errors import LinearSolveError

# Relative residual certificate for solve_shifted.
EPS_LIN = 1e-10

# Largest problem dimension the dense path is intended for.
MAX_DIM = 512


def as_vector(x) -> np.ndarray:
    """Coerce to a finite 1-D float array, rejecting NaN/Inf and bad shapes."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector contains non-finite entries")
    return v


def as_matrix(x) -> np.ndarray:
    """Coerce to a finite square 2-D float array."""
    m = np.asarray(x, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


def inner(u, v) -> float:
    """Euclidean inner product sum_i u_i v_i."""
    u = as_vector(u)
    v = as_vector(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    return float(np.dot(u, v))


def norm(u) -> float:
    """Euclidean norm sqrt(inner(u, u))."""
    return float(np.linalg.norm(as_vector(u)))


def solve_shifted(J, a: float, rhs) -> np.ndarray:
    """Solve (J + a*I) x = rhs by dense LU with partial pivoting.

    The shift a must be positive and J is expected to have a positive
    semidefinite symmetric part, which makes J + a*I invertible. A
    factorization breakdown or a residual above EPS_LIN * (||rhs|| + 1)
    raises LinearSolveError: it signals that precondition was violated,
    and is never silently patched.
    """
    J = as_matrix(J)
    b = as_vector(rhs)
    if J.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {J.shape[0]}x{J.shape[1]} vs {b.shape[0]}")
    if not a > 0.0:
        raise ValueError(f"shift must be positive, got {a}")

    shifted = J + a * np.eye(J.shape[0])
    try:
        x = np.linalg.solve(shifted, b)
    except np.linalg.LinAlgError as err:
        raise LinearSolveError(
            f"factorization of J + {a}*I failed ({err}); "
            "the symmetric part of J is likely not positive semidefinite"
        ) from err

    residual = float(np.linalg.norm(shifted @ x - b))
    bound = EPS_LIN * (float(np.linalg.norm(b)) + 1.0)
    if not np.all(np.isfinite(x)) or residual > bound:
        raise LinearSolveError(
            f"shifted solve residual {residual:.3e} exceeds certificate {bound:.3e}; "
            "the symmetric part of J is likely not positive semidefinite"
        )
    return x
