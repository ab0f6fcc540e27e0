"""Gram matrices of exponentials ``e_k(theta) = exp(i k theta)`` in L2(w)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientCoefficients, NegativeQuadraticForm
from .weights import FourierTable


@dataclass(frozen=True)
class BasisRange:
    """``span{e_k : lo <= k <= hi}``."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError(f"empty basis range [{self.lo}..{self.hi}]")

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)


@dataclass(frozen=True)
class GramBlock:
    """``matrix[j, k] = (e_{rows[j]}, e_{cols[k]}) = w_hat(cols[k] - rows[j])``."""

    rows: BasisRange
    cols: BasisRange
    matrix: np.ndarray

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols


def build_gram(ft: FourierTable, rows: BasisRange, cols: BasisRange | None = None) -> GramBlock:
    cols = rows if cols is None else cols
    gaps = cols.indices[None, :] - rows.indices[:, None]
    need = int(np.max(np.abs(gaps)))
    if need > ft.K:
        raise InsufficientCoefficients(f"need coefficients up to |m|={need}, table has K={ft.K}")
    return GramBlock(rows, cols, ft[gaps])


def weighted_norm(x, g: GramBlock, tol: float = 1e-12) -> float:
    """``sqrt(x^H G x)`` for a coefficient vector ``x``."""
    if not g.is_square:
        raise ValueError("weighted_norm needs a square Gram block")
    x = np.asarray(x, dtype=complex)
    if x.shape != (len(g.rows),):
        raise ValueError(f"vector of length {x.size} does not match Gram dim {len(g.rows)}")
    q = float(np.vdot(x, g.matrix @ x).real)
    if q < 0.0:
        bound = tol * np.linalg.norm(g.matrix) * float(np.vdot(x, x).real)
        if q < -bound:
            raise NegativeQuadraticForm(f"x^H G x = {q:.3e} is negative")
        q = 0.0
    return float(np.sqrt(q))
