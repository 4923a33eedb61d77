"""Monotone operator problems F(u) = f and a gallery of test instances.

A problem bundles the operator F, its Jacobian F', the right-hand side f,
and whatever solution structure is known by construction (the minimal-norm
solution, a null-space basis for rank-deficient linear operators). The
gallery spans the hypotheses the solver exercises:

    identity            well-posed linear baseline
    diag_cubic          componentwise u^3; Jacobian singular at 0
    psd_rank_deficient  symmetric PSD with a known null space, f in range
    fredholm_first_kind min(x, y) kernel on [0, 1]; badly ill-conditioned
    skew_perturbed      PSD plus skew part; monotone, nonsymmetric Jacobian
    convex_gradient     gradient of a strictly convex quartic potential

A deliberately non-monotone fixture lives in the same registry for
negative tests but is not part of the gallery.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import MAX_DIM, as_vector, inner, norm

# Working box for sampling-based checks; trajectories stay well inside.
R_BOX = 100.0

# Monotonicity slack per sampled pair, scaled by the pair's magnitude.
EPS_MONO = 1e-9

# Finite-difference Jacobian validation defaults.
FD_STEP = 1e-5
FD_TOL = 1e-4


@dataclass(frozen=True, eq=False)
class OperatorProblem:
    """A monotone operator equation F(u) = f in R^dim.

    fun and jac must be defined for all ||u|| <= R_BOX; fun must satisfy
    <F(u) - F(v), u - v> >= 0 (see check_monotone) and jac must match the
    finite differences of fun (see check_jacobian).
    """

    name: str
    dim: int
    fun: Callable[[np.ndarray], np.ndarray]
    jac: Callable[[np.ndarray], np.ndarray]
    rhs: np.ndarray
    symmetric_jacobian: bool
    minimal_norm_solution: np.ndarray | None = None
    null_space_basis: list[np.ndarray] | None = None

    def residual(self, a: float, u: np.ndarray) -> np.ndarray:
        """F(u) + a*u - f, the regularized residual driving the flow."""
        return self.fun(u) + a * u - self.rhs


def identity(dim: int = 10, rhs=None) -> OperatorProblem:
    """F(u) = u. Solution is f itself; default f = 0."""
    f = np.zeros(dim) if rhs is None else as_vector(rhs)
    eye = np.eye(dim)
    return OperatorProblem(
        name="identity",
        dim=dim,
        fun=lambda u: u.copy(),
        jac=lambda u: eye.copy(),
        rhs=f,
        symmetric_jacobian=True,
        minimal_norm_solution=f.copy(),
    )


def diag_cubic(dim: int = 8, rhs=None) -> OperatorProblem:
    """F(u)_i = u_i^3, monotone with F'(0) = 0.

    The default right-hand side is built from a smooth positive profile y
    so the solution (componentwise cube roots) is known exactly.
    """
    if rhs is None:
        y = np.linspace(0.6, 1.4, dim)
        f = y**3
    else:
        f = as_vector(rhs)
        y = np.cbrt(f)
    return OperatorProblem(
        name="diag_cubic",
        dim=dim,
        fun=lambda u: u**3,
        jac=lambda u: np.diag(3.0 * u**2),
        rhs=f,
        symmetric_jacobian=True,
        minimal_norm_solution=y,
    )


def psd_rank_deficient(dim: int = 20, seed: int = 0) -> OperatorProblem:
    """F(u) = A u with A symmetric PSD of rank ceil(3*dim/4).

    A = Q diag(lambda) Q^T for a seeded random orthogonal Q, with the
    trailing quarter of the spectrum zeroed. f = A u_true lies in range(A);
    the minimal-norm solution is the projection of u_true onto range(A),
    orthogonal to the stored null-space basis.
    """
    if dim < 4:
        raise ValueError("psd_rank_deficient needs dim >= 4")
    rank = (3 * dim + 3) // 4
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    lam = np.concatenate([np.linspace(0.5, 2.0, rank), np.zeros(dim - rank)])
    a_mat = (q * lam) @ q.T
    a_mat = 0.5 * (a_mat + a_mat.T)
    u_true = rng.standard_normal(dim)
    f = a_mat @ u_true
    q_range = q[:, :rank]
    y = q_range @ (q_range.T @ u_true)
    basis = [q[:, j].copy() for j in range(rank, dim)]
    return OperatorProblem(
        name="psd_rank_deficient",
        dim=dim,
        fun=lambda u: a_mat @ u,
        jac=lambda u: a_mat.copy(),
        rhs=f,
        symmetric_jacobian=True,
        minimal_norm_solution=y,
        null_space_basis=basis,
    )


def fredholm_first_kind(dim: int = 100) -> OperatorProblem:
    """Discretized first-kind integral operator with kernel min(x, y).

    Midpoint rule on [0, 1]: A_ij = (1/n) * min(x_i, x_j). The matrix is
    symmetric positive definite but its spectrum decays like 1/k^2, so the
    discrete problem is badly ill-conditioned. f = A u_true for the smooth
    profile u_true(x) = sin(pi x), keeping the equation exactly solvable.
    """
    if dim < 4:
        raise ValueError("fredholm_first_kind needs dim >= 4")
    x = (np.arange(dim) + 0.5) / dim
    a_mat = np.minimum.outer(x, x) / dim
    u_true = np.sin(np.pi * x)
    f = a_mat @ u_true
    return OperatorProblem(
        name="fredholm_first_kind",
        dim=dim,
        fun=lambda u: a_mat @ u,
        jac=lambda u: a_mat.copy(),
        rhs=f,
        symmetric_jacobian=True,
        minimal_norm_solution=u_true,
    )


def skew_perturbed(dim: int = 16) -> OperatorProblem:
    """F(u) = (S + K) u with S symmetric positive definite, K skew.

    S is a scaled second-difference matrix, K a skew bidiagonal; the skew
    part contributes nothing to <F(u), u>, so F is monotone while its
    Jacobian is genuinely nonsymmetric. f = (S + K) y for a smooth y.
    """
    if dim < 2:
        raise ValueError("skew_perturbed needs dim >= 2")
    s_mat = 0.5 * (2.0 * np.eye(dim) - np.eye(dim, k=1) - np.eye(dim, k=-1))
    k_mat = 0.5 * (np.eye(dim, k=1) - np.eye(dim, k=-1))
    op = s_mat + k_mat
    x = np.linspace(0.0, 1.0, dim)
    y = np.sin(2.0 * np.pi * x) + 0.5
    f = op @ y
    return OperatorProblem(
        name="skew_perturbed",
        dim=dim,
        fun=lambda u: op @ u,
        jac=lambda u: op.copy(),
        rhs=f,
        symmetric_jacobian=False,
        minimal_norm_solution=y,
    )


def convex_gradient(dim: int = 12) -> OperatorProblem:
    """F = grad phi for phi(u) = sum(u_i^4/4 + u_i^2/2) + u^T B u / 2.

    B is a positive definite second-difference coupling, so phi is strictly
    convex and F strictly monotone. f = F(y) for a smooth y, making y the
    unique solution.
    """
    if dim < 2:
        raise ValueError("convex_gradient needs dim >= 2")
    b_mat = 0.5 * (2.0 * np.eye(dim) - np.eye(dim, k=1) - np.eye(dim, k=-1))
    x = np.linspace(0.0, 1.0, dim)
    y = 0.8 * np.cos(np.pi * x)

    def fun(u):
        return u**3 + u + b_mat @ u

    def jac(u):
        return np.diag(3.0 * u**2 + 1.0) + b_mat

    return OperatorProblem(
        name="convex_gradient",
        dim=dim,
        fun=fun,
        jac=jac,
        rhs=fun(y),
        symmetric_jacobian=True,
        minimal_norm_solution=y,
    )


def non_monotone_fixture(dim: int = 6) -> OperatorProblem:
    """Deliberately non-monotone F(u) = -u; must fail check_monotone."""
    eye = np.eye(dim)
    return OperatorProblem(
        name="non_monotone_fixture",
        dim=dim,
        fun=lambda u: -u,
        jac=lambda u: -eye.copy(),
        rhs=np.zeros(dim),
        symmetric_jacobian=True,
    )


_GALLERY_BUILDERS: dict[str, Callable] = {
    "identity": identity,
    "diag_cubic": diag_cubic,
    "psd_rank_deficient": psd_rank_deficient,
    "fredholm_first_kind": fredholm_first_kind,
    "skew_perturbed": skew_perturbed,
    "convex_gradient": convex_gradient,
}

_FIXTURE_BUILDERS: dict[str, Callable] = {
    "non_monotone_fixture": non_monotone_fixture,
}

GALLERY_NAMES = tuple(_GALLERY_BUILDERS)


def make_problem(name: str, dim: int | None = None, seed: int = 0) -> OperatorProblem:
    """Build a registered problem by name, at an optional dimension.

    Only psd_rank_deficient consumes the seed; the other constructions are
    deterministic. Fixture names outside the gallery are accepted too.
    """
    builders = {**_GALLERY_BUILDERS, **_FIXTURE_BUILDERS}
    if name not in builders:
        raise ValueError(f"unknown problem {name!r}; known: {sorted(builders)}")
    builder = builders[name]
    kwargs = {}
    if dim is not None:
        if not 1 <= dim <= MAX_DIM:
            raise ValueError(f"dim must be in [1, {MAX_DIM}], got {dim}")
        kwargs["dim"] = dim
    if name == "psd_rank_deficient":
        kwargs["seed"] = seed
    return builder(**kwargs)


def gallery(seed: int = 0) -> list[OperatorProblem]:
    """The six stock problems at their default dimensions."""
    return [make_problem(name, seed=seed) for name in GALLERY_NAMES]


@dataclass(frozen=True)
class MonotonicityReport:
    min_pairing: float
    passed: bool
    samples: int
    radius: float
    seed: int


@dataclass(frozen=True)
class JacobianReport:
    max_entry_error: float
    passed: bool
    step: float


def _sample_in_ball(rng: np.random.Generator, dim: int, radius: float) -> np.ndarray:
    direction = rng.standard_normal(dim)
    direction /= np.linalg.norm(direction)
    return radius * rng.uniform() ** (1.0 / dim) * direction


def check_monotone(
    p: OperatorProblem, samples: int = 200, radius: float = 5.0, seed: int = 0
) -> MonotonicityReport:
    """Sample pairs (u, v) in the ball and test <F(u) - F(v), u - v> >= 0.

    Each pairing is allowed a slack of EPS_MONO * (1 + ||F(u)|| * ||u - v||)
    to absorb rounding. The seed is recorded so failing draws can be
    replayed.
    """
    if samples < 1:
        raise ValueError("need at least one sample pair")
    if not radius > 0.0:
        raise ValueError("radius must be positive")
    rng = np.random.default_rng(seed)
    min_pairing = np.inf
    passed = True
    for _ in range(samples):
        u = _sample_in_ball(rng, p.dim, radius)
        v = _sample_in_ball(rng, p.dim, radius)
        fu = p.fun(u)
        pairing = inner(fu - p.fun(v), u - v)
        min_pairing = min(min_pairing, pairing)
        slack = EPS_MONO * (1.0 + norm(fu) * norm(u - v))
        if pairing < -slack:
            passed = False
    return MonotonicityReport(
        min_pairing=float(min_pairing), passed=passed, samples=samples, radius=radius, seed=seed
    )


def check_jacobian(p: OperatorProblem, point, step: float = FD_STEP) -> JacobianReport:
    """Compare jac against central finite differences of fun at a point."""
    if not step > 0.0:
        raise ValueError("step must be positive")
    x = as_vector(point)
    analytic = np.asarray(p.jac(x), dtype=float)
    numeric = np.empty_like(analytic)
    for j in range(p.dim):
        e = np.zeros(p.dim)
        e[j] = step
        numeric[:, j] = (p.fun(x + e) - p.fun(x - e)) / (2.0 * step)
    max_entry_error = float(np.max(np.abs(numeric - analytic)))
    tol = FD_TOL * (1.0 + float(np.max(np.abs(analytic))))
    return JacobianReport(max_entry_error=max_entry_error, passed=max_entry_error <= tol, step=step)
