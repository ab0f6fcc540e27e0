"""Double-exponential (tanh-sinh) quadrature for cosine moments of functions
with an integrable algebraic singularity at the left endpoint.

The workhorse is :func:`cosine_moments`, which returns

    I[m] = integral_0^{pi/2} g(x) cos(m x) dx,   m = 0..K,

for all ``m`` at once. ``[0, pi/2]`` is cut into ``P`` equal panels and the
same tanh-sinh rule is used on each; the sum over panels is a DFT and is
done with an FFT. Nodes of the first panel are generated as distances from
``x = 0`` so that points within 1e-300 of the singularity are represented
exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureFailure

_T_MAX = 6.5


@dataclass(frozen=True)
class QuadratureConfig:
    """Accuracy target and refinement limits for Fourier coefficients.

    ``start_level``/``max_level`` bound the tanh-sinh step ``h = 2**-level``;
    ``panels_per_mode`` sets the panel count ``P = max(8, panels_per_mode*K)``.
    """

    abs_tol: float = 1e-10
    start_level: int = 3
    max_level: int = 7
    panels_per_mode: float = 1.0


def tanh_sinh_rule(level: int, width: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Nodes (measured from the left end) and weights on ``[0, width]``.

    Nodes whose distance to the left end underflows, or whose weight
    underflows, are dropped.
    """
    h = 2.0 ** -level
    n = int(math.ceil(_T_MAX / h))
    t = h * np.arange(-n, n + 1)
    u = 0.5 * math.pi * np.sinh(t)
    with np.errstate(over="ignore"):
        x = width / (1.0 + np.exp(-2.0 * u))
        wts = h * width * 0.5 * math.pi * np.cosh(t) / (2.0 * np.cosh(u) ** 2)
    keep = (x > 0.0) & (wts > 0.0) & (x < width)
    return x[keep], wts[keep]


def cosine_moments(g, K: int, level: int, panels: int, left_exponent: float = 0.0):
    """Cosine moments of ``g`` on ``[0, pi/2]`` for ``m = 0..K``.

    Parameters
    ----------
    g : callable
        Vectorized integrand, accurate for arguments close to 0.
    level : int
        tanh-sinh refinement level, step ``2**-level``.
    panels : int
        Number of equal panels; must satisfy ``4 * panels > K``.
    left_exponent : float
        Leading power of ``g`` at 0. The piece of the first panel below the
        smallest node is added as ``g(x0) * x0 / (1 + exponent)``.
    """
    if 4 * panels <= K:
        raise ValueError("too few panels for the requested number of modes")
    width = 0.5 * math.pi / panels
    y, wy = tanh_sinh_rule(level, width)
    starts = width * np.arange(panels)
    x = starts[:, None] + y[None, :]
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        vals = g(x)
    if not np.all(np.isfinite(vals)):
        raise QuadratureFailure("integrand is not finite at a quadrature node")
    weighted = vals * wy[None, :]

    # sum over panels of weighted[p, j] * exp(i m p width), width = 2 pi / (4 P)
    spectrum = np.fft.ifft(weighted, n=4 * panels, axis=0) * (4 * panels)
    m = np.arange(K + 1)
    phases = np.exp(1j * np.outer(m, y))
    moments = np.einsum("mj,mj->m", phases, spectrum[: K + 1]).real

    x0 = y[0]
    tail = vals[0, 0] * x0 / (1.0 + left_exponent)
    return moments + tail * np.cos(m * 0.5 * x0)
