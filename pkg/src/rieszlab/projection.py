"""Finite-section estimates of the Riesz projection norm on L2(w).

For ``E = span{e_0..e_N}`` and ``F = span{e_-N..e_-1}`` the projection onto
``E`` along ``F`` has norm ``1/sqrt(1 - s**2)``, where ``s`` is the largest
cosine between vectors of the two subspaces. ``s`` is the top singular value
of ``L_A^{-1} C L_B^{-H}`` (``A``, ``B`` the Gram matrices of ``E``, ``F``,
``C`` the cross Gram). Sections are nested, so the estimates increase with
``N`` and stay below the norm on the whole space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import kernels
from .errors import NotPositiveDefinite, RieszLabError
from .gram import BasisRange, build_gram
from .quadrature import QuadratureConfig
from .weights import FourierTable, WeightSpec, fourier_coeffs


@dataclass(frozen=True)
class AngleResult:
    N: int
    sin_phi: float
    sec_phi: float
    cond_estimate: float


def sec_from_sin(s: float) -> float:
    if not 0.0 <= s < 1.0:
        raise ValueError(f"sin(phi)={s!r} is outside [0, 1)")
    return 1.0 / math.sqrt((1.0 - s) * (1.0 + s))


def riesz_norm_section(ft: FourierTable, N: int, tol: float = kernels.DEFAULT_TOL) -> AngleResult:
    """Norm of the Riesz projection restricted to ``span{e_-N..e_N}``."""
    if N < 1:
        raise ValueError("section size N must be positive")
    E, F = BasisRange(0, N), BasisRange(-N, -1)
    cross = build_gram(ft, E, F).matrix
    la = kernels.cholesky(build_gram(ft, E).matrix)
    # Toeplitz: the Gram matrix of F is the leading N x N block of that of
    # E, so its Cholesky factor is the leading block of la.L
    lb = la.L[:N, :N]
    x = scipy.linalg.solve_triangular(la.L, cross, lower=True, check_finite=False)
    x = scipy.linalg.solve_triangular(lb, x.conj().T, lower=True, check_finite=False).conj().T
    s = kernels.largest_singular_value(x, tol=tol)
    if s >= 1.0:
        raise NotPositiveDefinite(f"sections at N={N} are numerically dependent (s={s!r})")
    # pivots of F are a subset of those of E
    return AngleResult(N, s, sec_from_sin(s), la.cond_estimate)


@dataclass(frozen=True)
class Extrapolation:
    """Aitken-accelerated limit of ``sec_phi(N)``; always experimental."""

    value: float
    raw: tuple[AngleResult, ...]
    experimental: bool = True


def aitken(x0: float, x1: float, x2: float) -> float:
    d1, d2 = x1 - x0, x2 - x1
    denom = d2 - d1
    # not contracting, or already stationary: keep the last raw value
    if denom >= 0.0 or d2 == 0.0:
        return x2
    return x2 - d2 * d2 / denom


def riesz_norm_extrapolate(ft: FourierTable, N_list, tol: float = kernels.DEFAULT_TOL) -> Extrapolation:
    N_list = [int(n) for n in N_list]
    if len(N_list) < 3 or any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError("need at least three increasing section sizes")
    raw = tuple(riesz_norm_section(ft, n, tol) for n in N_list)
    x0, x1, x2 = (r.sec_phi for r in raw[-3:])
    return Extrapolation(aitken(x0, x1, x2), raw)


def complementary_norms(g, mask, tol: float = kernels.DEFAULT_TOL) -> tuple[float, float]:
    """Norms of the coordinate projection ``diag(mask)`` and of its
    complement, in the inner product given by the Gram matrix ``g``."""
    g = np.asarray(getattr(g, "matrix", g))
    mask = np.asarray(mask, dtype=float)
    chol = kernels.cholesky(g)
    return (kernels.whitened_norm(mask, g, chol, tol),
            kernels.whitened_norm(1.0 - mask, g, chol, tol))


def projection_norm_pair(ft: FourierTable, N: int, tol: float = kernels.DEFAULT_TOL) -> tuple[float, float]:
    """``(||P||, ||I - P||)`` for the section projection onto nonnegative
    frequencies along negative ones."""
    rng = BasisRange(-N, N)
    g = build_gram(ft, rng)
    return complementary_norms(g, rng.indices >= 0, tol)


@dataclass(frozen=True)
class ScanRow:
    a: float
    result: AngleResult | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def exponent_scan(w: WeightSpec, a_grid, N: int, quad: QuadratureConfig | None = None,
                  tol: float = kernels.DEFAULT_TOL) -> list[ScanRow]:
    """``sec_phi(N)`` for ``w**a`` over ``a_grid``; failures are recorded
    per row and the scan continues."""
    rows = []
    for a in a_grid:
        try:
            ft = fourier_coeffs(WeightSpec.power_of(w, a), 2 * N, quad)
            rows.append(ScanRow(float(a), riesz_norm_section(ft, N, tol)))
        except RieszLabError as exc:
            rows.append(ScanRow(float(a), None, f"{type(exc).__name__}: {exc}"))
    return rows
