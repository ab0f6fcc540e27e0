"""Similarity floor ``sec(pi/2p)`` against computed norms of a multiplier.

For a fast monotone multiplier ``T`` on H2(w), the smallest power bound
over the similarity orbit of ``T`` is ``sec(pi/2p)``, ``p`` the critical
exponent of ``w``. On a finite section this module brackets that value
from two sides:

* the *upper* leg is the basis constant ``max_n ||P_n||`` of the section,
  which dominates every ``||T**n||``;
* the *lower* leg is a section lower bound: the largest of the computed
  power norms ``||T**N||`` over a prefix of the power schedule and of the
  partial-sum norms ``||Q_n||`` for ``n < M/2``. The ``Q_n`` are what
  ``T**N_n`` approaches as ``n`` grows, so this leg only witnesses the
  floor in the limit. It is not a proof of anything.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NotEquivalent, NumericalError
from .helson_szego import offset_grid
from .multiplier import (
    MultiplierSequence,
    hardy_section,
    partial_sum_norms,
    power_norm,
    power_schedule,
)
from .weights import (  # noqa: F401  (certified_basis_constant is re-exported)
    WeightSpec,
    certified_basis_constant,
    critical_exponent,
    floor_value,
    fourier_coeffs,
)

SANDWICH_TOL = 1e-6
SCHEDULE_PREFIX = 5
EQUIVALENCE_CAP = 1e6
EQUIVALENCE_GRID = 8192
GRADED_LEVELS = 60


@dataclass(frozen=True)
class SandwichReport:
    """Floor, section lower bound and section upper bound for one weight.

    ``lower`` is labelled a section lower bound: it is a norm computed on
    ``span{e_0..e_{M-1}}``, not a bound on the similarity orbit.
    """

    weight_id: str
    p: float
    floor: float
    lower: float
    upper: float
    M: int
    powers: tuple[int, ...]
    lower_source: str
    bracketed: bool
    tol: float = SANDWICH_TOL
    label: str = "section lower bound"


@dataclass(frozen=True)
class PairedReport:
    first: SandwichReport
    second: SandwichReport
    equivalence_constant: float

    @property
    def same_floor(self) -> bool:
        return self.first.floor == self.second.floor


def sandwich(w: WeightSpec, seq: MultiplierSequence, M: int,
             tol: float = SANDWICH_TOL, lanczos_tol: float = kernels.DEFAULT_TOL) -> SandwichReport:
    """Bracket the similarity floor of ``w`` between section norms.

    Raises
    ------
    Unsupported
        If ``w`` has no closed-form critical exponent.
    NumericalError
        If the computed lower leg exceeds the upper leg by more than ``tol``.
    """
    if M < 2:
        raise ValueError("section size M must be at least 2")
    if M > len(seq):
        raise ValueError(f"M={M} exceeds the sequence length {len(seq)}")
    p = critical_exponent(w)
    floor = floor_value(p)

    sec = hardy_section(fourier_coeffs(w, M), M)
    upper = float(np.max(partial_sum_norms(sec, M, lanczos_tol)))

    count = min(SCHEDULE_PREFIX, len(seq) - 1)
    powers = (0,) + power_schedule(seq, count).N
    lower, source = -math.inf, ""
    for N in powers:
        val = power_norm(seq, sec, N, M)
        if val > lower:
            lower, source = val, f"power_norm(N={N})"
    for n in range(max(1, M // 2)):
        q = np.zeros(M)
        q[: n + 1] = 1.0
        val = sec.diagonal_norm(q, lanczos_tol)
        if val > lower:
            lower, source = val, f"Q_n(n={n})"

    if lower > upper + tol:
        raise NumericalError(f"section lower bound {lower!r} exceeds upper bound {upper!r}")
    bracketed = lower - tol <= floor <= upper + tol
    return SandwichReport(w.ident, p, floor, lower, upper, M, powers, source, bracketed, tol)


def equivalence_grid(w: WeightSpec, v: WeightSpec, M: int = EQUIVALENCE_GRID,
                     levels: int = GRADED_LEVELS) -> np.ndarray:
    """Offset grid plus points ``s +- pi 2**-k`` around every singular point
    of either weight, so that blow-ups at the singular points are seen."""
    pts = [offset_grid(M)]
    steps = math.pi * 2.0 ** -np.arange(1, levels + 1)
    for s in set(w.singular_points()) | set(v.singular_points()):
        for t in (s - steps, s + steps):
            t = np.where(t > math.pi, t - 2.0 * math.pi, t)
            pts.append(np.where(t <= -math.pi, t + 2.0 * math.pi, t))
    theta = np.concatenate(pts)
    return np.unique(theta[(theta > -math.pi) & (theta < math.pi)])


def equivalence_constant(w: WeightSpec, v: WeightSpec, M: int = EQUIVALENCE_GRID) -> float:
    """``max(sup v/w, sup w/v)`` over :func:`equivalence_grid`; ``inf`` if
    either weight is zero or infinite at a grid point."""
    theta = equivalence_grid(w, v, M)
    a, b = w.evaluate(theta), v.evaluate(theta)
    good = np.isfinite(a) & np.isfinite(b) & (a > 0) & (b > 0)
    if not np.all(good):
        return math.inf
    return float(max(np.max(b / a), np.max(a / b)))


def equivalent_weight_comparison(w: WeightSpec, v: WeightSpec, seq: MultiplierSequence, M: int,
                                 cap: float = EQUIVALENCE_CAP,
                                 tol: float = SANDWICH_TOL) -> PairedReport:
    """Sandwich reports for two weights after a grid check that ``v ~ w``.

    Raises
    ------
    NotEquivalent
        If the grid ratio ``max(v/w, w/v)`` exceeds ``cap``.
    """
    const = equivalence_constant(w, v)
    if not const <= cap:
        raise NotEquivalent(f"{w.ident} and {v.ident}: grid ratio {const:.3g} exceeds cap {cap:.3g}")
    with ThreadPoolExecutor(max_workers=2) as pool:
        fw = pool.submit(sandwich, w, seq, M, tol)
        fv = pool.submit(sandwich, v, seq, M, tol)
        return PairedReport(fw.result(), fv.result(), const)
