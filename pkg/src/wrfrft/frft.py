"""Discrete fractional Fourier transform on a symmetric dimensionless grid.

The samples x[m] are identified with the band-limited periodic interpolant
built from the n tones e^{j nu_p t}, nu_p = (p - c) * delta, on the grid
t_m = (m - c) * delta with delta = sqrt(2*pi/n) and c = (n-1)/2.  The
transform of order angle ``alpha`` is the continuous kernel

    K_alpha(t, u) = A_alpha * exp(j*(0.5*cot(alpha)*(t^2 + u^2) - u*t*csc(alpha)))
    A_alpha = sqrt((1 - j*cot(alpha)) / (2*pi))

integrated against that interpolant over one period and sampled back on the
same grid.  Two evaluation routes are provided:

* ``kernel_matrix`` / ``frft_exact``: converged Gauss-Legendre quadrature of
  the kernel (the oracle; O(n^2) once per angle).
* ``frft_fast``: chirp-multiply -> chirp-convolution -> chirp-multiply
  decomposition on an oversampled midpoint grid (O(n log n)), with angles
  outside (pi/4, 3*pi/4) reduced by composing with exact quarter turns.

At alpha = pi/2 both routes reduce exactly to the centered unitary DFT; at
multiples of pi the kernel degenerates to the identity / index reversal and
is dispatched explicitly.

``dechirp``/``tone_spectrum``/``refine_tone_peak`` expose the transform in
its factored form |F_alpha x|(u) = |S(u*csc)| / sqrt(n) with
S(w) = sum_m x[m] e^{j*0.5*cot*t_m^2} e^{-j*w*t_m}: a dense, alias-free
sampling of the output magnitude plus a Newton peak refiner.  The trajectory
search builds on these because the slow-time chirps it must focus are
heavily undersampled, which makes the n-point output grid alias the tone
axis csc(alpha)-fold.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateAngleError, ValidationError

DEGENERATE_TOL = 1e-6


@dataclass(frozen=True)
class Angle:
    """Rotation angle in radians with its equivalent transform order."""

    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha) % (2 * np.pi))

    @property
    def order(self) -> float:
        return 2 * self.alpha / np.pi

    def is_degenerate(self, tol: float = DEGENERATE_TOL) -> bool:
        r = self.alpha % np.pi
        return r < tol or np.pi - r < tol


def _as_angle(alpha) -> float:
    a = alpha.alpha if isinstance(alpha, Angle) else float(alpha)
    return a % (2 * np.pi)


def grid_coords(n: int) -> np.ndarray:
    """Dimensionless sample coordinates (m - (n-1)/2) * sqrt(2*pi/n)."""
    delta = np.sqrt(2 * np.pi / n)
    return (np.arange(n) - (n - 1) / 2) * delta


def centered_dft_matrix(n: int) -> np.ndarray:
    c = (n - 1) / 2
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k - c, k - c) / n) / np.sqrt(n)


def centered_dft(x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Centered unitary DFT along axis 0, O(n log n)."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[0]
    c = (n - 1) / 2
    k = np.arange(n)
    w = np.exp(2j * np.pi * c * k / n)
    ph = w * np.exp(-2j * np.pi * c * c / n)
    shape = (n,) + (1,) * (x.ndim - 1)
    w = w.reshape(shape)
    ph = ph.reshape(shape)
    if not inverse:
        return ph * np.fft.fft(w * x, axis=0) / np.sqrt(n)
    return np.conj(w) * np.fft.ifft(np.conj(ph) * x, axis=0) * np.sqrt(n)


def _reversal(x: np.ndarray) -> np.ndarray:
    return x[::-1].copy()


@lru_cache(maxsize=64)
def _kernel_matrix_cached(n: int, alpha: float, nodes_per_osc: float, min_nodes: int):
    delta = np.sqrt(2 * np.pi / n)
    grid = grid_coords(n)
    half = n * delta / 2
    cot = 1 / np.tan(alpha)
    csc = 1 / np.sin(alpha)
    amp = np.sqrt((1 - 1j * cot) / (2 * np.pi))
    # composite 16-node Gauss-Legendre sized to the fastest phase in the integrand
    fmax = abs(cot) * half + (abs(csc) + 1.0) * grid.max() * 1.05 + delta
    qn = max(min_nodes, int(nodes_per_osc * fmax * n * delta / (2 * np.pi)))
    panels = max(1, qn // 16)
    xg, wg = np.polynomial.legendre.leggauss(16)
    edges = np.linspace(-half, half, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    hw = 0.5 * (edges[1:] - edges[:-1])
    tq = (mid[:, None] + hw[:, None] * xg[None, :]).ravel()
    wq = (hw[:, None] * wg[None, :]).ravel()
    eu = np.exp(-1j * csc * np.outer(grid, tq))
    ev = (wq * np.exp(0.5j * cot * tq * tq))[:, None] * np.exp(1j * np.outer(tq, grid))
    tones = (amp * np.exp(0.5j * cot * grid * grid))[:, None] * (eu @ ev)
    m = tones @ centered_dft_matrix(n) / np.sqrt(n)
    m.setflags(write=False)
    return m


def kernel_matrix(n: int, alpha, nodes_per_osc: float = 8.0, min_nodes: int = 2048) -> np.ndarray:
    """Dense n x n transform matrix for a non-degenerate angle.

    Raises
    ------
    DegenerateAngleError
        If alpha is within 1e-6 of a multiple of pi; callers must use the
        identity / reversal branch instead.
    """
    if n < 2:
        raise ValidationError(f"transform length must be >= 2, got {n}")
    a = _as_angle(alpha)
    if Angle(a).is_degenerate():
        raise DegenerateAngleError(f"alpha={a} is within {DEGENERATE_TOL} of a multiple of pi")
    if abs(a - np.pi / 2) < 1e-12:
        return centered_dft_matrix(n)
    if abs(a - 3 * np.pi / 2) < 1e-12:
        return np.conj(centered_dft_matrix(n))
    if a > np.pi:
        # F_alpha = F_(alpha-pi) o reversal
        return _kernel_matrix_cached(n, a - np.pi, nodes_per_osc, min_nodes)[:, ::-1]
    return _kernel_matrix_cached(n, a, nodes_per_osc, min_nodes)


def frft_exact(x: np.ndarray, alpha) -> np.ndarray:
    """Oracle transform via the dense quadrature matrix.

    Degenerate angles collapse to the identity (alpha = 0 mod 2*pi) or the
    index reversal (alpha = pi mod 2*pi).
    """
    x = np.asarray(x, dtype=complex)
    if x.shape[0] < 2:
        raise ValidationError("input must hold at least 2 samples")
    a = _as_angle(alpha)
    if Angle(a).is_degenerate():
        r = a % (2 * np.pi)
        return _reversal(x) if abs(r - np.pi) < np.pi / 2 else x.copy()
    return kernel_matrix(x.shape[0], a) @ x


def _fast_band(x: np.ndarray, alpha: float, oversample: int) -> np.ndarray:
    """Decomposition for alpha in [pi/4, 3*pi/4] on a midpoint-aligned fine grid."""
    n = x.shape[0]
    delta = np.sqrt(2 * np.pi / n)
    d2 = delta / oversample
    half = n * delta / 2
    nf = oversample * n
    ti = -half + (np.arange(nf) + 0.5) * d2
    tana2 = np.tan(alpha / 2)
    cot = 1 / np.tan(alpha)
    csc = 1 / np.sin(alpha)
    c = (n - 1) / 2
    trail = (1,) * (x.ndim - 1)
    # exact periodic interpolation: tone analysis, then synthesis on the
    # midpoint fine grid via one zero-padded inverse FFT.
    #   coef_p = (1/n) sum_m x_m e^{-j nu_p t_m},  nu_p = (p - c) * delta
    #   x_f[i] = e^{-j c delta t_i} sum_p (coef_p (-1)^p e^{j p pi / nf}) e^{j 2 pi p i / nf}
    coef = centered_dft(x) / np.sqrt(n)
    p = np.arange(n)
    b = coef * (np.cos(np.pi * p) * np.exp(1j * np.pi * p / nf)).reshape((n,) + trail)
    pad = np.zeros((nf,) + x.shape[1:], dtype=complex)
    pad[:n] = b
    xf = np.fft.ifft(pad, axis=0) * nf
    i = np.arange(nf)
    tw = np.exp(1j * c * np.pi) * np.exp(-2j * np.pi * c * (i + 0.5) / nf)
    xf = xf * tw.reshape((nf,) + trail)
    ch1 = np.exp(-0.5j * tana2 * ti * ti)
    f = xf * ch1.reshape((nf,) + trail)
    l = np.arange(-(nf - 1), nf)
    ker = np.exp(0.5j * csc * (l * d2) ** 2)
    nlin = 1 << int(np.ceil(np.log2(3 * nf - 2)))
    kf = np.fft.fft(ker, nlin)
    ff = np.fft.fft(f, nlin, axis=0)
    conv = np.fft.ifft(ff * kf.reshape((nlin,) + trail), axis=0)[nf - 1:2 * nf - 1]
    amp = np.sqrt((1 - 1j * cot) / (2 * np.pi))
    g = amp * d2 * ch1.reshape((nf,) + trail) * conv
    sl = (oversample - 1) // 2
    return g[sl::oversample]


def frft_fast(x: np.ndarray, alpha, oversample: int = 5) -> np.ndarray:
    """Fast transform, O(n log n), any angle.

    Angles outside the well-conditioned band (pi/4, 3*pi/4) are reduced by
    composing with exact quarter turns (centered DFT and its inverse);
    angles past pi compose with the exact reversal.
    """
    x = np.asarray(x, dtype=complex)
    if x.shape[0] < 8:
        raise ValidationError("fast transform needs at least 8 samples")
    if oversample % 2 == 0:
        raise ValidationError("oversample must be odd (midpoint grid alignment)")
    a = _as_angle(alpha)
    if Angle(a).is_degenerate():
        return _reversal(x) if abs(a % (2 * np.pi) - np.pi) < np.pi / 2 else x.copy()
    if a > np.pi:
        return _reversal(frft_fast(x, a - np.pi, oversample))
    if a < np.pi / 4:
        return _fast_band(centered_dft(x, inverse=True), a + np.pi / 2, oversample)
    if a > 3 * np.pi / 4:
        return _fast_band(centered_dft(x), a - np.pi / 2, oversample)
    return _fast_band(x, a, oversample)


@dataclass(frozen=True)
class FrftPlan:
    """Reusable transform plan: length, angle, and evaluation mode."""

    n: int
    alpha: Angle
    mode: str = "exact"  # "exact" | "fast"

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError(f"transform length must be >= 2, got {self.n}")
        if self.mode not in ("exact", "fast"):
            raise ValidationError(f"unknown mode {self.mode!r}")
        if not isinstance(self.alpha, Angle):
            object.__setattr__(self, "alpha", Angle(self.alpha))

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.mode == "exact":
            return frft_exact(x, self.alpha)
        return frft_fast(x, self.alpha)


# ---------------------------------------------------------------------------
# factored (dechirp + tone) form used by the trajectory search
# ---------------------------------------------------------------------------

def dechirp(x: np.ndarray, alpha) -> np.ndarray:
    """Multiply columns by the kernel's quadratic phase e^{j*0.5*cot*t_m^2}."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[0]
    a = _as_angle(alpha)
    cot = 0.0 if abs(a - np.pi / 2) < 1e-12 else 1 / np.tan(a)
    m = np.arange(n) - (n - 1) / 2
    ch = np.exp(1j * np.pi * cot / n * m * m)
    return x * ch.reshape((n,) + (1,) * (x.ndim - 1))


def tone_spectrum(xt: np.ndarray, oversample: int = 2) -> np.ndarray:
    """|S(w)| of dechirped columns on a dense tone circle, scaled by 1/sqrt(n).

    The returned array has oversample*n rows; row q samples the magnitude at
    w = 2*pi*q/(oversample*n) rad/sample.  Up to a unit-modulus output chirp
    this is |F_alpha x| traced along the full (aliased) u axis.
    """
    xt = np.asarray(xt, dtype=complex)
    n = xt.shape[0]
    return np.abs(np.fft.fft(xt, oversample * n, axis=0)) / np.sqrt(n)


def refine_tone_peak(xt: np.ndarray, q0: np.ndarray, oversample: int = 2,
                     iters: int = 4):
    """Newton refinement of the tone-circle peak per column.

    Parameters
    ----------
    xt : [n, J] dechirped columns.
    q0 : [J] starting bin indices on the oversample*n circle.

    Returns
    -------
    (amp, w) : refined |S(w)|/sqrt(n) and peak frequencies in rad/sample.
    """
    xt = np.asarray(xt, dtype=complex)
    if xt.ndim == 1:
        xt = xt[:, None]
    n = xt.shape[0]
    m = np.arange(n)[:, None]
    q0 = np.atleast_1d(q0)
    w = 2 * np.pi * q0.astype(float) / (oversample * n)
    bound = np.pi / n  # stay inside the mainlobe around the starting bin
    for _ in range(iters):
        e = np.exp(-1j * m * w[None, :])
        s = (xt * e).sum(axis=0)
        s1 = (xt * (-1j * m) * e).sum(axis=0)
        s2 = (xt * (-(m * m)) * e).sum(axis=0)
        g = 2 * np.real(np.conj(s) * s1)
        h = 2 * (np.abs(s1) ** 2 + np.real(np.conj(s) * s2))
        step = np.where(h < 0, -g / np.where(h < 0, h, 1.0), 0.0)
        w = w + np.clip(step, -bound, bound)
    e = np.exp(-1j * m * w[None, :])
    s = (xt * e).sum(axis=0)
    return np.abs(s) / np.sqrt(n), w
