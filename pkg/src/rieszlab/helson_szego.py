"""Analytic certificates for upper bounds on the Riesz projection norm.

An analytic polynomial ``h(theta) = sum_{k<=D} c_k exp(i k theta)`` with
``|w - h| <= s * w`` certifies ``||R||_w <= (1 - s**2)**-1/2``. Here ``s`` is
measured on the midpoint grid ``theta_j = -pi + (j + 1/2) 2 pi / M``, which
avoids the zeros and poles of the built-in families; bounds obtained this
way are grid-certified only.

:func:`hs_search` minimizes ``s`` over all degree-``D`` polynomials, a
complex linear Chebyshev problem. :func:`explicit_sector_certificate` builds
the closed-form candidate ``cos(phi)**2 f`` with
``f(z) = ((1 - z)/(1 + z))**alpha``, whose real part on the circle is
``cos(phi) |tan(theta/2)|**alpha`` and whose argument stays within
``phi = alpha pi / 2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import SearchDiverged, VerificationFailed
from .projection import sec_from_sin
from .weights import WeightSpec, fourier_coeffs

DEFAULT_ITERS = 2000
IRLS_STAGES = (2, 8, 32)
IRLS_STAGE_ITERS = 6
DEFAULT_GAP_TOL = 1e-4


@dataclass(frozen=True)
class AnalyticCertificate:
    """Degree-``D`` analytic polynomial and its grid ratio ``s``.

    ``lower_bound``, when known, is a proven lower bound for the best ratio
    any degree-``D`` polynomial can reach on the same grid.
    """

    degree: int
    coeffs: np.ndarray = field(repr=False)
    ratio: float
    grid_size: int
    lower_bound: float | None = None
    weight_id: str = ""

    @property
    def bound(self) -> float:
        return certificate_to_bound(self)


def offset_grid(M: int) -> np.ndarray:
    return -math.pi + (np.arange(M) + 0.5) * (2.0 * math.pi / M)


def eval_on_grid(coeffs, M: int) -> np.ndarray:
    """``h(theta_j)`` for all midpoints, by one FFT."""
    c = np.asarray(coeffs, dtype=complex)
    k = np.arange(c.size)
    b = np.zeros(M, dtype=complex)
    np.add.at(b, k % M, c * np.exp(1j * k * (-math.pi + math.pi / M)))
    return np.fft.ifft(b) * M


def grid_weight(w: WeightSpec, M: int) -> np.ndarray:
    vals = w.evaluate(offset_grid(M))
    if not np.all(np.isfinite(vals) & (vals > 0)):
        raise ValueError(f"weight {w.ident} is not finite and positive on the {M}-point grid")
    return vals


def grid_ratio(w_vals, coeffs) -> float:
    w_vals = np.asarray(w_vals, dtype=float)
    h = eval_on_grid(coeffs, w_vals.size)
    return float(np.max(np.abs(w_vals - h) / w_vals))


def _moments(v, D: int, M: int) -> np.ndarray:
    """``sum_j v_j exp(i m theta_j)`` for ``m = 0..D``."""
    m = np.arange(D + 1)
    return (np.fft.ifft(v) * M)[: D + 1] * np.exp(1j * m * (-math.pi + math.pi / M))


def _weighted_fit(u, inv_w, D: int) -> np.ndarray:
    """Minimize ``sum_j u_j |1 - h(theta_j) / w_j|**2`` over degree-D ``h``.

    The normal matrix is Hermitian Toeplitz, so it comes from one FFT.
    """
    M = inv_w.size
    s = _moments(u * inv_w * inv_w, D, M)
    normal = scipy.linalg.toeplitz(s.conj(), s)
    rhs = _moments(u * inv_w, D, M).conj()
    try:
        # late Lawson weights can be nearly singular; a poor fit is simply
        # not accepted as a new best, so the warning carries no information
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            return scipy.linalg.solve(normal, rhs, assume_a="pos")
    except (np.linalg.LinAlgError, ValueError):
        return np.linalg.lstsq(normal, rhs, rcond=None)[0]


def hs_search(w: WeightSpec, D: int, M: int, iters: int = DEFAULT_ITERS,
              gap_tol: float = DEFAULT_GAP_TOL) -> AnalyticCertificate:
    """Best degree-``D`` certificate for ``w`` on the ``M``-point grid.

    Iteratively reweighted least squares on ``sum |r_j|**q`` for ``q`` in
    ``IRLS_STAGES``, then Lawson's multiplicative reweighting, which
    converges to the minimax solution and yields a lower bound on the
    optimum along the way. The start is ``c = (w_hat(0), 0, ..., 0)``.
    Stops after ``iters`` fits or once best and lower bound agree to the
    relative ``gap_tol``.

    Raises
    ------
    SearchDiverged
        If the best ratio found is not below 1; this says the degree or grid
        is too small, not that no certificate exists.
    """
    if D < 0 or iters < 1:
        raise ValueError("degree must be >= 0 and iters >= 1")
    if M <= 2 * D:
        raise ValueError(f"grid size M={M} must exceed 2*D={2 * D}")
    w_vals = grid_weight(w, M)
    inv_w = 1.0 / w_vals

    c = np.zeros(D + 1, dtype=complex)
    try:
        c[0] = fourier_coeffs(w, 1).mean
    except Exception:
        c[0] = float(np.mean(w_vals))
    best_c = c
    r = np.abs(1.0 - eval_on_grid(c, M) * inv_w)
    best = float(r.max())
    lower = 0.0
    done = 0

    def consider(cand):
        nonlocal best, best_c
        res = np.abs(1.0 - eval_on_grid(cand, M) * inv_w)
        if res.max() < best:
            best, best_c = float(res.max()), cand
        return res

    for q in IRLS_STAGES:
        for _ in range(1 if q == 2 else IRLS_STAGE_ITERS):
            if best == 0.0 or done >= iters:
                break
            u = np.ones(M) if q == 2 else (r / r.max()) ** (q - 2)
            c = _weighted_fit(u / u.sum(), inv_w, D)
            r = consider(c)
            done += 1

    u = np.full(M, 1.0 / M)
    while done < iters and best > 0.0:
        c = _weighted_fit(u, inv_w, D)
        r = consider(c)
        lower = max(lower, float(np.sqrt(np.sum(u * r * r))))
        done += 1
        if best - lower <= gap_tol * best:
            break
        u = u * r
        total = u.sum()
        if not total > 0:
            break
        u /= total

    # report the ratio exactly as a verifier recomputes it
    best = grid_ratio(w_vals, best_c)
    if best >= 1.0:
        raise SearchDiverged(f"best ratio {best:.6f} >= 1 at degree {D}, grid {M}")
    return AnalyticCertificate(D, np.asarray(best_c), best, M, lower if lower > 0 else None, w.ident)


def certificate_to_bound(cert) -> float:
    """``(1 - s**2)**-1/2`` from a certificate or a bare ratio ``s``."""
    s = cert.ratio if isinstance(cert, AnalyticCertificate) else float(cert)
    return sec_from_sin(s)


def sector_taylor(alpha: float, D: int) -> np.ndarray:
    """Taylor coefficients of ``((1 - z)/(1 + z))**alpha`` up to degree D."""
    k = np.arange(1, D + 1)
    a = np.concatenate([[1.0], np.cumprod((k - 1 - alpha) / k)])
    b = np.concatenate([[1.0], np.cumprod((-alpha - k + 1) / k)])
    return np.convolve(a, b)[: D + 1]


def summation_window(name: str, D: int) -> np.ndarray:
    x = np.arange(D + 1) / (D + 1)
    if name == "raw":
        return np.ones(D + 1)
    if name == "fejer":
        return 1.0 - x
    if name == "hann":
        return 0.5 * (1.0 + np.cos(math.pi * x))
    raise ValueError(f"unknown summation window {name!r}")


def default_grid(D: int) -> int:
    """Smallest power of two at least ``16 (D + 1)``."""
    return 1 << int(math.ceil(math.log2(16 * (D + 1))))


def sector_weight(alpha: float) -> WeightSpec:
    """``Re f`` on the circle: ``cos(alpha pi/2) |tan(theta/2)|**alpha``."""
    return WeightSpec.tan_alpha(alpha, scale=math.cos(0.5 * math.pi * alpha))


def explicit_sector_certificate(alpha: float, D: int, M: int | None = None,
                                window: str = "hann") -> AnalyticCertificate:
    """Closed-form certificate ``cos(phi)**2 f`` truncated to degree ``D``.

    The Taylor series is summed with ``window`` (Hann by default) rather than
    cut off sharply: the sharp partial sums oscillate near the zero and the
    pole of the weight and fail on fine grids.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    M = default_grid(D) if M is None else M
    phi = 0.5 * math.pi * alpha
    w = sector_weight(alpha)
    coeffs = math.cos(phi) ** 2 * sector_taylor(alpha, D) * summation_window(window, D)
    coeffs = coeffs.astype(complex)
    return AnalyticCertificate(D, coeffs, grid_ratio(grid_weight(w, M), coeffs), M, None, w.ident)


def format_certificate(cert: AnalyticCertificate) -> str:
    lines = [f"degree {cert.degree} grid {cert.grid_size} ratio {cert.ratio!r}"]
    lines += [f"{float(c.real)!r} {float(c.imag)!r}" for c in np.asarray(cert.coeffs)]
    return "\n".join(lines) + "\n"


def write_certificate(cert: AnalyticCertificate, path) -> None:
    Path(path).write_text(format_certificate(cert))


def read_certificate(path) -> AnalyticCertificate:
    """Parse the text format; malformed files raise VerificationFailed."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    try:
        head = lines[0].split()
        if len(head) != 6 or head[0::2] != ["degree", "grid", "ratio"]:
            raise ValueError("bad header")
        D, M, s = int(head[1]), int(head[3]), float(head[5])
        coeffs = np.array([complex(float(a), float(b)) for a, b in (ln.split() for ln in lines[1:])])
    except (IndexError, ValueError) as exc:
        raise VerificationFailed(f"{path}: malformed certificate ({exc})") from None
    if coeffs.size != D + 1:
        raise VerificationFailed(f"{path}: header says degree {D} but has {coeffs.size} coefficients")
    return AnalyticCertificate(D, coeffs, s, M)


def verify_certificate(cert: AnalyticCertificate, w: WeightSpec, rel_tol: float = 1e-9) -> float:
    """Recompute the grid ratio of ``cert`` against ``w``; return it.

    Raises
    ------
    VerificationFailed
        If the recomputed ratio disagrees with the claimed one or is not
        below 1.
    """
    s = grid_ratio(grid_weight(w, cert.grid_size), cert.coeffs)
    if abs(s - cert.ratio) > rel_tol * max(1.0, cert.ratio):
        raise VerificationFailed(f"claimed ratio {cert.ratio!r}, recomputed {s!r}")
    if not s < 1.0:
        raise VerificationFailed(f"ratio {s!r} is not below 1; no bound follows")
    return s
