"""Dense Hermitian linear algebra: Cholesky, extremal singular values, and
operator norms in a Gram-matrix inner product.

Everything is computed in complex arithmetic. Matrices are plain numpy
arrays; a Hermitian matrix is any square array equal to its conjugate
transpose up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import NoConvergence, NotPositiveDefinite

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 20_000
# Restart vectors after a Krylov breakdown come from this fixed stream.
_RESTART_SEED = 20_000


def as_hermitian(m, tol: float = 1e-12) -> np.ndarray:
    """Return ``m`` as a complex square array, checking Hermitian symmetry."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a nonempty square matrix, got shape {a.shape}")
    scale = max(float(np.max(np.abs(a))), 1.0)
    if np.max(np.abs(a - a.conj().T)) > tol * scale:
        raise ValueError("matrix is not Hermitian")
    return a


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular ``L`` with ``L @ L^H`` equal to the source matrix.

    ``pivot_floor`` is the smallest pivot ``L[i, i]**2`` met during the
    factorization and ``max_diag`` the largest diagonal entry of the source;
    their ratio is the cheap conditioning estimate reported downstream.
    """

    L: np.ndarray
    pivot_floor: float
    max_diag: float

    @property
    def dim(self) -> int:
        return self.L.shape[0]

    @property
    def cond_estimate(self) -> float:
        return self.max_diag / self.pivot_floor

    @cached_property
    def inv_adjoint(self) -> np.ndarray:
        """``L^{-H}``, by back-substitution against the identity."""
        eye = np.eye(self.dim, dtype=complex)
        return scipy.linalg.solve_triangular(self.L.conj().T, eye, lower=False)

    @cached_property
    def inverse(self) -> np.ndarray:
        eye = np.eye(self.dim, dtype=complex)
        return scipy.linalg.solve_triangular(self.L, eye, lower=True)

    def reconstruct(self) -> np.ndarray:
        return self.L @ self.L.conj().T


def cholesky(m, rel_tol: float = 1e-12) -> CholeskyFactor:
    """Factor a Hermitian positive definite matrix.

    Raises
    ------
    NotPositiveDefinite
        If any pivot is at most ``rel_tol`` times the largest diagonal entry.
    """
    a = as_hermitian(m)
    diag = a.diagonal().real
    max_diag = float(diag.max())
    if not max_diag > 0.0:
        raise NotPositiveDefinite("largest diagonal entry is not positive")
    try:
        L = scipy.linalg.cholesky(a, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    pivots = L.diagonal().real ** 2
    floor = float(pivots.min())
    if floor <= rel_tol * max_diag:
        k = int(np.argmin(pivots))
        raise NotPositiveDefinite(
            f"pivot {k} is {floor:.3e}, below {rel_tol:.1e} x largest diagonal {max_diag:.3e}"
        )
    return CholeskyFactor(L=L, pivot_floor=floor, max_diag=max_diag)


def _top_ritz(alphas, betas):
    k = len(alphas)
    if k == 1:
        return alphas[0], np.ones(1)
    vals, vecs = scipy.linalg.eigh_tridiagonal(
        np.asarray(alphas), np.asarray(betas), select="i", select_range=(k - 1, k - 1)
    )
    return float(vals[0]), vecs[:, 0]


def largest_singular_value(
    m, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> float:
    """Largest singular value of a general complex matrix.

    Runs a Lanczos iteration on ``m^H m`` with full reorthogonalization,
    started from the normalized all-ones vector. A breakdown (the Krylov
    space became invariant) is continued with deterministic restart vectors,
    and early termination is then disabled until the whole space is spanned,
    so a start vector that misses the top singular direction cannot produce
    a wrong answer.

    Raises
    ------
    NoConvergence
        If ``max_iter`` steps are taken without the Ritz residual falling
        below ``tol`` times the Ritz value.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected a nonempty matrix, got shape {a.shape}")
    scale = float(np.max(np.abs(a)))
    if scale == 0.0:
        return 0.0
    a = a / scale
    ah = a.conj().T
    n = a.shape[1]
    steps = min(n, max_iter)

    basis = np.empty((n, steps), dtype=complex)
    alphas: list[float] = []
    betas: list[float] = []
    v = np.full(n, 1.0 / np.sqrt(n), dtype=complex)
    beta_prev = 0.0
    broke_down = False
    rng = None
    theta = 0.0

    for k in range(steps):
        basis[:, k] = v
        w = ah @ (a @ v)
        alpha = float(np.vdot(v, w).real)
        w = w - alpha * v
        if k > 0:
            w = w - beta_prev * basis[:, k - 1]
        q = basis[:, : k + 1]
        for _ in range(2):
            w = w - q @ (q.conj().T @ w)
        beta = float(np.linalg.norm(w))
        alphas.append(alpha)

        theta, s = _top_ritz(alphas, betas)
        if k + 1 == n:
            break
        # an invariant subspace also has zero residual, so breakdown is
        # tested before convergence
        if beta <= 1e-12 * max(theta, abs(alpha), 1e-300):
            broke_down = True
            if rng is None:
                rng = np.random.default_rng(_RESTART_SEED)
            w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            for _ in range(2):
                w = w - q @ (q.conj().T @ w)
            v = w / np.linalg.norm(w)
            beta = 0.0
        elif not broke_down and abs(beta * s[-1]) <= tol * theta:
            break
        else:
            v = w / beta
        betas.append(beta)
        beta_prev = beta
    else:
        raise NoConvergence(f"no convergence in {max_iter} Lanczos steps")

    return scale * float(np.sqrt(max(theta, 0.0)))


def whitened_matrix(d, chol: CholeskyFactor) -> np.ndarray:
    """``L^H D L^{-H}`` for a diagonal ``D`` given by its entries ``d``."""
    d = np.asarray(d, dtype=complex)
    if d.shape != (chol.dim,):
        raise ValueError(f"diagonal has shape {d.shape}, factor has dim {chol.dim}")
    return chol.L.conj().T @ (d[:, None] * chol.inv_adjoint)


def whitened_norm(
    d, g, chol: CholeskyFactor, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> float:
    """Norm of ``x -> diag(d) x`` in the inner product ``<x, y> = y^H G x``.

    ``g`` is the Gram matrix (array or :class:`~rieszlab.gram.GramBlock`)
    that ``chol`` factors; it is used only to check dimensions.
    """
    g = np.asarray(getattr(g, "matrix", g))
    if g.shape != (chol.dim, chol.dim):
        raise ValueError("Gram matrix and Cholesky factor disagree in size")
    return largest_singular_value(whitened_matrix(d, chol), tol=tol, max_iter=max_iter)
