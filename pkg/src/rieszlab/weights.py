"""Weight families on the circle and their Fourier coefficients.

The circle is parametrized by ``theta`` in ``(-pi, pi]`` with normalized
measure ``d theta / 2 pi``, and coefficients follow

    w_hat(m) = integral w(theta) exp(-i m theta) d theta / 2 pi.

Supported families:

* ``constant``           w = 1
* ``tan_alpha``          w = |tan(theta/2)|**alpha, 0 < alpha < 1
* ``abs_theta_alpha``    w = |theta|**alpha, 0 < alpha < 1
* ``power_of``           w = base**a
* ``piecewise_step``     constant levels between breakpoints
* ``sampled``            values on a user grid, periodic linear interpolation

Every spec also carries a positive ``scale`` factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import DomainError, InvalidWeight, QuadratureFailure, Unsupported
from .quadrature import QuadratureConfig, cosine_moments

ANALYTIC_FAMILIES = ("tan_alpha", "abs_theta_alpha")
FAMILIES = ("constant", "tan_alpha", "abs_theta_alpha", "power_of", "piecewise_step", "sampled")
MIN_MEAN = 1e-14


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class WeightSpec:
    family: str
    alpha: float | None = None
    base: "WeightSpec | None" = None
    exponent: float | None = None
    levels: tuple[float, ...] = ()
    breakpoints: tuple[float, ...] = ()
    theta: tuple[float, ...] = field(default=(), repr=False)
    values: tuple[float, ...] = field(default=(), repr=False)
    scale: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidWeight(f"unknown weight family {self.family!r}")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise InvalidWeight("scale must be a positive finite number")
        if self.family in ANALYTIC_FAMILIES:
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise InvalidWeight(f"{self.family} needs alpha in (0, 1), got {self.alpha}")
        elif self.family == "power_of":
            if self.base is None or self.exponent is None:
                raise InvalidWeight("power_of needs a base weight and an exponent")
            if self.exponent == 0 or not math.isfinite(self.exponent):
                raise InvalidWeight("power_of exponent must be finite and nonzero")
        elif self.family == "piecewise_step":
            if len(self.levels) != len(self.breakpoints) + 1:
                raise InvalidWeight("piecewise_step needs one more level than breakpoints")
            if any(not level > 0 for level in self.levels):
                raise InvalidWeight("piecewise_step levels must be strictly positive")
            b = np.asarray(self.breakpoints, dtype=float)
            if np.any(np.diff(b) <= 0) or np.any(b <= -math.pi) or np.any(b > math.pi):
                raise InvalidWeight("breakpoints must increase strictly inside (-pi, pi]")
        elif self.family == "sampled":
            t = np.asarray(self.theta, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if t.size < 2 or t.shape != v.shape:
                raise InvalidWeight("sampled weight needs matching theta/value arrays")
            if np.any(np.diff(t) <= 0) or t[0] <= -math.pi or t[-1] > math.pi:
                raise InvalidWeight("sample abscissae must increase strictly inside (-pi, pi]")
            if np.any(v < 0) or not np.any(v > 0) or not np.all(np.isfinite(v)):
                raise InvalidWeight("sample values must be finite, nonnegative, not all zero")

    # constructors -------------------------------------------------------

    @classmethod
    def constant(cls, scale: float = 1.0) -> "WeightSpec":
        return cls("constant", scale=scale)

    @classmethod
    def tan_alpha(cls, alpha: float, scale: float = 1.0) -> "WeightSpec":
        return cls("tan_alpha", alpha=float(alpha), scale=scale)

    @classmethod
    def abs_theta_alpha(cls, alpha: float, scale: float = 1.0) -> "WeightSpec":
        return cls("abs_theta_alpha", alpha=float(alpha), scale=scale)

    @classmethod
    def power_of(cls, base: "WeightSpec", a: float) -> "WeightSpec":
        return cls("power_of", base=base, exponent=float(a))

    @classmethod
    def piecewise_step(cls, levels, breakpoints, scale: float = 1.0) -> "WeightSpec":
        return cls(
            "piecewise_step",
            levels=tuple(float(x) for x in levels),
            breakpoints=tuple(float(x) for x in breakpoints),
            scale=scale,
        )

    @classmethod
    def sampled(cls, theta, values, scale: float = 1.0) -> "WeightSpec":
        return cls(
            "sampled",
            theta=tuple(float(x) for x in theta),
            values=tuple(float(x) for x in values),
            scale=scale,
        )

    def scaled(self, c: float) -> "WeightSpec":
        return replace(self, scale=self.scale * c)

    # structure ----------------------------------------------------------

    @property
    def ident(self) -> str:
        if self.family in ANALYTIC_FAMILIES:
            core = f"{self.family}({_fmt(self.alpha)})"
        elif self.family == "power_of":
            core = f"power_of({self.base.ident},{_fmt(self.exponent)})"
        elif self.family == "piecewise_step":
            lv = "/".join(_fmt(x) for x in self.levels)
            bp = "/".join(_fmt(x) for x in self.breakpoints)
            core = f"piecewise_step({lv};{bp})"
        elif self.family == "sampled":
            core = f"sampled({len(self.theta)})"
        else:
            core = "constant"
        return core if self.scale == 1.0 else f"{_fmt(self.scale)}*{core}"

    def decompose(self) -> tuple["WeightSpec", float, float]:
        """Split into ``(leaf, a, c)`` with ``self = c * leaf**a``."""
        if self.family != "power_of":
            return replace(self, scale=1.0), 1.0, self.scale
        leaf, a, c = self.base.decompose()
        return leaf, a * self.exponent, (c ** self.exponent) * self.scale

    def singular_points(self) -> tuple[float, ...]:
        """Points where the weight vanishes, blows up, or jumps."""
        leaf, _, _ = self.decompose()
        if leaf.family == "tan_alpha":
            return (0.0, math.pi)
        if leaf.family == "abs_theta_alpha":
            return (0.0, math.pi)
        if leaf.family == "piecewise_step":
            return tuple(leaf.breakpoints) + (math.pi,)
        return ()

    def evaluate(self, theta) -> np.ndarray:
        """Vectorized pointwise values; no domain check."""
        theta = np.asarray(theta, dtype=float)
        leaf, a, c = self.decompose()
        fam = leaf.family
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if fam == "constant":
                base = np.ones_like(theta)
            elif fam == "tan_alpha":
                base = np.abs(np.tan(0.5 * theta))
                base = np.where(np.abs(theta) == math.pi, np.inf, base)
            elif fam == "abs_theta_alpha":
                base = np.abs(theta)
            elif fam == "piecewise_step":
                idx = np.searchsorted(np.asarray(leaf.breakpoints), theta, side="right")
                base = np.asarray(leaf.levels)[idx]
            else:
                t = np.asarray(leaf.theta)
                base = np.interp(theta, t, np.asarray(leaf.values), period=2 * math.pi)
            power = a * (leaf.alpha if fam in ANALYTIC_FAMILIES else 1.0)
            return c * base ** power


def eval_weight(w: WeightSpec, theta: float) -> float:
    """Value of ``w`` at ``theta``; ``+inf`` at a pole such as ``theta = pi``
    for ``tan_alpha``."""
    if not (-math.pi < theta <= math.pi):
        raise DomainError(f"theta={theta!r} is outside (-pi, pi]")
    return float(w.evaluate(theta))


@dataclass(frozen=True)
class FourierTable:
    """Coefficients ``w_hat(m)`` for ``m = -K..K``; ``coeffs[m + K]``."""

    K: int
    coeffs: np.ndarray = field(repr=False)
    weight_id: str = ""
    error_estimate: float = 0.0

    @classmethod
    def from_nonnegative(cls, half, weight_id: str = "", error_estimate: float = 0.0):
        half = np.asarray(half, dtype=complex).copy()
        half[0] = half[0].real
        if not half[0].real > MIN_MEAN:
            raise InvalidWeight(f"mean of the weight is {half[0].real:.3e}; weight is null")
        K = half.size - 1
        coeffs = np.concatenate([half[:0:-1].conj(), half])
        return cls(K=K, coeffs=coeffs, weight_id=weight_id, error_estimate=error_estimate)

    def __getitem__(self, m):
        m = np.asarray(m)
        if np.any(np.abs(m) > self.K):
            raise IndexError(f"coefficient index beyond K={self.K}")
        return self.coeffs[m + self.K]

    @property
    def mean(self) -> float:
        return float(self.coeffs[self.K].real)


def _analytic_halves(family: str, e: float):
    """Integrands on [0, pi/2] near theta = 0 and near theta = pi, each
    written in the distance to that point, plus their leading exponents."""
    if family == "tan_alpha":
        if not abs(e) < 1.0:
            raise QuadratureFailure(f"|tan(theta/2)|**{e:g} is not integrable")
        return (lambda x: np.tan(0.5 * x) ** e, e), (lambda u: np.tan(0.5 * u) ** (-e), -e)
    if not e > -1.0:
        raise QuadratureFailure(f"|theta|**{e:g} is not integrable")
    return (lambda x: x ** e, e), (lambda u: (math.pi - u) ** e, 0.0)


def _quadrature_coeffs(family: str, e: float, K: int, quad: QuadratureConfig):
    (gl, el), (gr, er) = _analytic_halves(family, e)
    panels = max(8, int(math.ceil(quad.panels_per_mode * K)))
    sign = (-1.0) ** np.arange(K + 1)
    prev = None
    for level in range(quad.start_level, quad.max_level + 1):
        cur = (cosine_moments(gl, K, level, panels, el)
               + sign * cosine_moments(gr, K, level, panels, er)) / math.pi
        if prev is not None:
            err = float(np.max(np.abs(cur - prev)))
            if err <= quad.abs_tol:
                return cur, err
        prev = cur
    raise QuadratureFailure(
        f"coefficients did not settle to {quad.abs_tol:g} by level {quad.max_level}"
    )


def _step_coeffs(levels, breakpoints, K: int) -> np.ndarray:
    edges = np.concatenate([[-math.pi], np.asarray(breakpoints, float), [math.pi]])
    lv = np.asarray(levels, float)
    m = np.arange(1, K + 1)
    a, b = edges[:-1], edges[1:]
    # (1/2pi) int_a^b e^{-i m t} dt = (e^{-i m a} - e^{-i m b}) / (2 pi i m)
    pieces = (np.exp(-1j * np.outer(m, a)) - np.exp(-1j * np.outer(m, b))) / (2j * math.pi * m[:, None])
    out = np.empty(K + 1, dtype=complex)
    out[0] = np.sum(lv * (b - a)) / (2 * math.pi)
    out[1:] = pieces @ lv
    return out


def _trapezoid_coeffs(theta, values, K: int) -> np.ndarray:
    t = np.asarray(theta, float)
    v = np.asarray(values, float)
    gaps = np.diff(np.concatenate([t, [t[0] + 2 * math.pi]]))
    cell = 0.5 * (gaps + np.roll(gaps, 1))
    m = np.arange(K + 1)
    return (np.exp(-1j * np.outer(m, t)) @ (v * cell)) / (2 * math.pi)


def fourier_coeffs(w: WeightSpec, K: int, quad: QuadratureConfig | None = None) -> FourierTable:
    """Fourier coefficients of ``w`` up to ``|m| = K``.

    Raises
    ------
    QuadratureFailure
        If the weight is not integrable or the tanh-sinh refinement cannot
        reach ``quad.abs_tol``.
    """
    if K < 0:
        raise ValueError("K must be nonnegative")
    quad = quad or QuadratureConfig()
    leaf, a, c = w.decompose()
    err = 0.0
    if leaf.family == "constant":
        half = np.zeros(K + 1, dtype=complex)
        half[0] = 1.0
    elif leaf.family in ANALYTIC_FAMILIES:
        half, err = _quadrature_coeffs(leaf.family, leaf.alpha * a, K, quad)
    elif leaf.family == "piecewise_step":
        half = _step_coeffs(np.asarray(leaf.levels) ** a, leaf.breakpoints, K)
    else:
        half = _trapezoid_coeffs(leaf.theta, np.asarray(leaf.values) ** a, K)
    return FourierTable.from_nonnegative(c * np.asarray(half), weight_id=w.ident,
                                         error_estimate=c * err)


def critical_exponent(w: WeightSpec) -> float:
    """``sup{a > 0 : w**a is an A2 weight}``, possibly ``math.inf``."""
    leaf, a, _ = w.decompose()
    if leaf.family == "sampled":
        raise Unsupported("no analytic critical exponent for sampled weights")
    if leaf.family in ("constant", "piecewise_step"):
        return math.inf
    return 1.0 / (leaf.alpha * abs(a))


def floor_value(p: float) -> float:
    """``sec(pi / 2p)``, with ``p = inf`` giving 1."""
    if not p > 0:
        raise ValueError("critical exponent must be positive")
    if math.isinf(p):
        return 1.0
    if p <= 1.0:
        return math.inf
    return 1.0 / math.cos(math.pi / (2.0 * p))


def certified_basis_constant(w: WeightSpec) -> float | None:
    """Exact ``||R||_w`` where it is known in closed form, else ``None``.

    ``1`` for constants and ``sec(|b| pi/2)`` for ``|tan(theta/2)|**b`` with
    ``|b| < 1``. Neither positive scaling nor ``w -> 1/w`` changes the norm.
    """
    leaf, a, _ = w.decompose()
    if leaf.family == "constant":
        return 1.0
    if leaf.family == "tan_alpha":
        b = abs(leaf.alpha * a)
        if b < 1.0:
            return 1.0 / math.cos(0.5 * math.pi * b)
    return None


def load_sampled(path) -> WeightSpec:
    """Read a sampled weight: one ``theta value`` pair per line; ``#``
    starts a comment."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InvalidWeight(f"{path}:{lineno}: expected 'theta value'")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise InvalidWeight(f"{path}:{lineno}: not a number") from None
    if not rows:
        raise InvalidWeight(f"{path}: no samples")
    theta, values = zip(*rows)
    return WeightSpec.sampled(theta, values)
