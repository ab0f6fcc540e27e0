"""Fast monotone multipliers on sections of H2(w).

A multiplier ``T e_k = lambda_k e_k`` is stored through
``log_nu_k = log(-log lambda_k)``. For the default family
``nu_k = exp(-c k**2)``, ``lambda_k`` rounds to 1.0 in double precision
from ``k = 7`` on (``c = 1``), and ``nu_k`` itself underflows from
``k = 28``, so every power ``lambda_k**n = exp(-exp(log n + log_nu_k))`` is
evaluated in log space.

All norms are taken on the section ``span{e_0..e_{M-1}}`` with the L2(w)
inner product and are lower bounds for the norms on H2(w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import kernels
from .errors import NotFast
from .gram import BasisRange, build_gram
from .weights import FourierTable, WeightSpec, certified_basis_constant

FAST_THRESHOLD = 0.5


@dataclass(frozen=True)
class MultiplierSequence:
    log_nu: np.ndarray = field(repr=False)
    family: str = "gauss"
    c: float | None = 1.0

    def __len__(self) -> int:
        return self.log_nu.size

    @property
    def nus(self) -> np.ndarray:
        return np.exp(self.log_nu)

    @property
    def lambdas(self) -> np.ndarray:
        return np.exp(-self.nus)

    @property
    def log_one_minus_lambdas(self) -> np.ndarray:
        """``log(1 - lambda_k)``, accurate when ``nu_k`` underflows."""
        with np.errstate(divide="ignore"):
            small = self.log_nu < -30.0
            exact = np.log(-np.expm1(-np.exp(np.where(small, 0.0, self.log_nu))))
        return np.where(small, self.log_nu, exact)

    @property
    def kappas(self) -> np.ndarray:
        """``sqrt(nu_n / nu_{n+1})`` for ``n = 0..L-2``."""
        return np.exp(0.5 * (self.log_nu[:-1] - self.log_nu[1:]))

    def fast_ratios(self) -> np.ndarray:
        """``(1 - lambda_{k+1}) / (1 - lambda_k)``."""
        lg = self.log_one_minus_lambdas
        return np.exp(lg[1:] - lg[:-1])

    def powers(self, n, M: int | None = None) -> np.ndarray:
        """``lambda_k**n`` for ``k < M``; ``n`` may be a huge Python int."""
        log_nu = self.log_nu[: len(self) if M is None else M]
        if n == 0:
            return np.ones(log_nu.size)
        return np.exp(-np.exp(math.log(n) + log_nu))

    def one_minus_powers(self, n, M: int | None = None) -> np.ndarray:
        """``1 - lambda_k**n`` without cancellation."""
        log_nu = self.log_nu[: len(self) if M is None else M]
        if n == 0:
            return np.zeros(log_nu.size)
        return -np.expm1(-np.exp(math.log(n) + log_nu))


def make_sequence(family: str = "gauss", length: int = 64, c: float = 1.0,
                  lambdas=None) -> MultiplierSequence:
    """Materialize a multiplier sequence and check it is fast.

    ``family="gauss"`` gives ``nu_k = exp(-c k**2)``; ``family="custom"``
    takes explicit ``lambdas``.

    Raises
    ------
    NotFast
        If ``(1 - lambda_{L-1}) / (1 - lambda_{L-2})`` exceeds 0.5.
    """
    if family == "gauss":
        if not c > 0:
            raise ValueError("gauss family needs c > 0")
        if length < 2:
            raise ValueError("need at least two terms")
        k = np.arange(length, dtype=float)
        seq = MultiplierSequence(-c * k * k, "gauss", float(c))
    elif family == "custom":
        lam = np.asarray(lambdas, dtype=float)
        if lam.ndim != 1 or lam.size < 2:
            raise ValueError("custom family needs at least two lambdas")
        if np.any(lam < 0) or np.any(lam >= 1):
            raise ValueError("lambdas must lie in [0, 1)")
        with np.errstate(divide="ignore"):
            seq = MultiplierSequence(np.log(-np.log(lam)), "custom", None)
    else:
        raise ValueError(f"unknown multiplier family {family!r}")
    if np.any(np.diff(seq.log_nu) >= 0):
        raise ValueError("lambdas must be strictly increasing")
    tail = float(seq.fast_ratios()[-1])
    if tail > FAST_THRESHOLD:
        raise NotFast(f"tail ratio (1-l[L-1])/(1-l[L-2]) = {tail:.3g} exceeds {FAST_THRESHOLD}")
    return seq


@dataclass(frozen=True)
class PowerSchedule:
    N: tuple[int, ...]

    def __getitem__(self, n: int) -> int:
        return self.N[n]

    def __len__(self) -> int:
        return len(self.N)


def _floor_exp(x: float) -> int:
    if x == -math.inf:
        return 0
    digits = int(abs(x) / 2.302585092994046) + 30
    with mpmath.workdps(digits):
        return int(mpmath.floor(mpmath.exp(mpmath.mpf(x))))


def power_schedule(seq: MultiplierSequence, count: int | None = None) -> PowerSchedule:
    """``N_n``: the greatest integer with ``N_n sqrt(nu_n nu_{n+1}) <= 1``.

    Only the first ``count`` entries are computed; later ones are exact
    integers with thousands of digits.
    """
    half = -0.5 * (seq.log_nu[:-1] + seq.log_nu[1:])
    if count is not None:
        half = half[:count]
    return PowerSchedule(tuple(_floor_exp(float(x)) for x in half))


@dataclass(frozen=True)
class HardySection:
    """Gram matrix of ``e_0..e_{M-1}`` in L2(w) and its Cholesky factor."""

    M: int
    gram: np.ndarray = field(repr=False)
    chol: kernels.CholeskyFactor = field(repr=False)

    def diagonal_norm(self, d, tol: float = kernels.DEFAULT_TOL) -> float:
        return kernels.whitened_norm(d, self.gram, self.chol, tol)


def hardy_section(ft: FourierTable, M: int) -> HardySection:
    g = build_gram(ft, BasisRange(0, M - 1)).matrix
    return HardySection(M, g, kernels.cholesky(g))


def _section(ft_or_section, M: int) -> HardySection:
    if isinstance(ft_or_section, HardySection):
        if ft_or_section.M != M:
            raise ValueError("section size does not match M")
        return ft_or_section
    return hardy_section(ft_or_section, M)


def power_norm(seq: MultiplierSequence, ft, n, M: int) -> float:
    """``||T**n||`` on the ``M``-section."""
    if M > len(seq):
        raise ValueError(f"M={M} exceeds the sequence length {len(seq)}")
    return _section(ft, M).diagonal_norm(seq.powers(n, M))


def power_norms(seq: MultiplierSequence, ft, powers, M: int) -> list[float]:
    sec = _section(ft, M)
    return [power_norm(seq, sec, n, M) for n in powers]


def tail_bound(b: float, lam_n_pow: float, one_minus_next_pow: float) -> float:
    """``b (b lambda_n**N + (b + 1)(1 - lambda_{n+1}**N))``."""
    return b * (b * lam_n_pow + (b + 1.0) * one_minus_next_pow)


@dataclass(frozen=True)
class TailGap:
    n: int
    power: int
    gap: float
    analytic_bound: float
    b: float
    truncation_dominated: bool = False


def tail_gap(seq: MultiplierSequence, ft, n: int, M: int, b: float | None = None,
             w: WeightSpec | None = None) -> TailGap:
    """``||T**N_n - Q_n||`` on the ``M``-section, with its analytic bound.

    ``b`` defaults to the exact basis constant of ``w`` when one is known
    (tan family, constants) and to the section's own basis constant
    otherwise.
    """
    if n < 0 or n + 1 >= M:
        raise ValueError(f"need 0 <= n and n + 1 < M (n={n}, M={M})")
    if M > len(seq):
        raise ValueError(f"M={M} exceeds the sequence length {len(seq)}")
    sec = _section(ft, M)
    N = power_schedule(seq, n + 1)[n]
    d = seq.powers(N, M)
    d[n + 1:] = -seq.one_minus_powers(N, M)[n + 1:]
    gap = sec.diagonal_norm(d)
    if b is None and w is not None:
        b = certified_basis_constant(w)
    if b is None:
        b = basis_constant_section(sec, M)
    bound = tail_bound(b, float(seq.powers(N, n + 1)[n]), float(seq.one_minus_powers(N, n + 2)[n + 1]))
    return TailGap(n, N, gap, bound, b, n >= M - 2)


def partial_sum_norms(ft, M: int, tol: float = kernels.DEFAULT_TOL) -> np.ndarray:
    """``||P_n||`` for ``n = 0..M-1`` on the ``M``-section.

    With ``G = L L^H`` split after index ``n``,
    ``||P_n|| = sqrt(1 + s**2)`` where ``s`` is the top singular value of
    ``(L^{-1})_{22} L_{21}``.
    """
    sec = _section(ft, M)
    L, Linv = sec.chol.L, sec.chol.inverse
    out = np.ones(M)
    for n in range(M - 1):
        z = Linv[n + 1:, n + 1:] @ L[n + 1:, : n + 1]
        s = kernels.largest_singular_value(z, tol=tol)
        out[n] = math.sqrt(1.0 + s * s)
    return out


def basis_constant_section(ft, M: int) -> float:
    """``max_n ||P_n||`` over the ``M``-section."""
    return float(np.max(partial_sum_norms(ft, M)))


def sign_patterns(M: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.choice(np.array([-1.0, 1.0]), size=(count, M))


def sign_multiplier_norm(ft, signs) -> float:
    signs = np.asarray(signs, dtype=float)
    if not np.all(np.abs(signs) == 1.0):
        raise ValueError("signs must be +1 or -1")
    return _section(ft, signs.size).diagonal_norm(signs)


def max_sign_multiplier_norm(ft, M: int, count: int = 64, seed: int = 0) -> float:
    sec = _section(ft, M)
    return max(sign_multiplier_norm(sec, eps) for eps in sign_patterns(M, count, seed))
