"""Full-observation-window comparison integrators.

All four baselines integrate over the whole observation [t0, t1]:

* ``mtd``   : per-range-cell slow-time DFT (no trajectory compensation).
* ``rft``   : constant-velocity trajectory extraction + slow-time DFT.
* ``rfrft`` : quadratic trajectory extraction + fractional transform over a
              grid of angles chosen independently of the extraction
              acceleration.
* ``grft``  : quadratic trajectory extraction + exact matched phase
              compensation and coherent summation.

They share the extraction kernel and the unit-energy amplitude convention of
the windowed search, so their peak values are directly comparable with the
windowed integrator's.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .frft import dechirp, refine_tone_peak, tone_spectrum
from .search import _extract_batch, alpha_for
from .signal_model import EchoMatrix, TargetTruth


@dataclass
class BaselineMap:
    """Amplitude map over a method's native axes plus its peak."""

    method: str
    amplitude: np.ndarray
    axes: dict = field(default_factory=dict)
    peak_value: float = 0.0
    peak_coords: dict = field(default_factory=dict)

    def __post_init__(self):
        amp = np.asarray(self.amplitude)
        if amp.size and not self.peak_value:
            idx = np.unravel_index(int(np.argmax(amp)), amp.shape)
            self.peak_value = float(amp[idx])
            names = list(self.axes)
            self.peak_coords = {
                names[d]: (self.axes[names[d]][idx[d]]
                           if d < len(names) and len(self.axes[names[d]]) == amp.shape[d]
                           else idx[d])
                for d in range(amp.ndim)
            }


def equivalent_full_window_params(truth: TargetTruth, t0: float):
    """(r0, v, a) of the same trajectory re-anchored at the observation start."""
    d = truth.tb - t0
    return (truth.r0 - truth.v * d + truth.a * d * d,
            truth.v - 2.0 * truth.a * d,
            truth.a)


def mtd(echo: EchoMatrix) -> BaselineMap:
    """Slow-time DFT amplitude in every range cell (cells x doppler bins)."""
    n = echo.num_pulses
    if n < 1:
        raise ValidationError("echo holds no pulses")
    spec = np.fft.fftshift(np.fft.fft(echo.data, axis=1), axes=1) / np.sqrt(n)
    amp = np.abs(spec)
    return BaselineMap("mtd", amp, axes={
        "cell": np.arange(echo.num_cells),
        "doppler_hz": np.fft.fftshift(np.fft.fftfreq(n, d=echo.radar.prt)),
    })


def _full_window_peaks(echo: EchoMatrix, a: float, alpha, r0s, vs, oversample=2):
    """Refined tone-circle peaks for full-window extraction at one (a, alpha)."""
    nw = echo.num_pulses
    x, _ = _extract_batch(echo, 0, nw, a, np.asarray(r0s, float), np.asarray(vs, float))
    xt = dechirp(x, alpha)
    amps = tone_spectrum(xt, oversample)
    q0 = np.argmax(amps, axis=0)
    amp, _ = refine_tone_peak(xt, q0, oversample)
    amp = np.where(amps[q0, np.arange(x.shape[1])] > 0, amp, 0.0)
    return amp.reshape(len(r0s), len(vs))


def rft(echo: EchoMatrix, r0s, vs) -> BaselineMap:
    """Constant-velocity extraction over the full window, then slow-time DFT."""
    amp = _full_window_peaks(echo, 0.0, np.pi / 2, r0s, vs)
    return BaselineMap("rft", amp, axes={"r0_m": np.asarray(r0s, float),
                                         "v_mps": np.asarray(vs, float)})


def default_alpha_grid(echo: EchoMatrix, a_s, count: int = 64) -> np.ndarray:
    """Transform angles spanning the acceleration search interval."""
    radar = echo.radar
    a_s = np.asarray(a_s, float)
    lo = alpha_for(float(a_s.max()), radar.t0, radar.t1 - radar.prt, radar).alpha
    hi = alpha_for(float(a_s.min()), radar.t0, radar.t1 - radar.prt, radar).alpha
    if count == 1:
        return np.array([(lo + hi) / 2])
    return np.linspace(lo, hi, count)


def rfrft(echo: EchoMatrix, r0s, vs, a_s, alpha_count: int = 64,
          alphas=None) -> BaselineMap:
    """Quadratic extraction over the full window, transformed at a grid of
    angles searched independently of the extraction acceleration."""
    a_s = np.asarray(a_s, float)
    if alphas is None:
        alphas = default_alpha_grid(echo, a_s, alpha_count)
    amp = np.zeros((len(r0s), len(vs), len(a_s)))
    for i_a, a in enumerate(a_s):
        best = np.zeros((len(np.asarray(r0s)), len(np.asarray(vs))))
        for al in np.atleast_1d(alphas):
            cur = _full_window_peaks(echo, float(a), float(al), r0s, vs)
            best = np.maximum(best, cur)
        amp[:, :, i_a] = best
    return BaselineMap("rfrft", amp, axes={"r0_m": np.asarray(r0s, float),
                                           "v_mps": np.asarray(vs, float),
                                           "a_mps2": a_s})


def grft(echo: EchoMatrix, r0s, vs, a_s) -> BaselineMap:
    """Quadratic extraction plus exact matched phase compensation and
    unit-energy coherent summation over the full window."""
    radar = echo.radar
    nw = echo.num_pulses
    tau = np.arange(nw) * radar.prt
    lam = radar.wavelength
    r0s = np.asarray(r0s, float)
    vs = np.asarray(vs, float)
    a_s = np.asarray(a_s, float)
    amp = np.zeros((len(r0s), len(vs), len(a_s)))
    for i_a, a in enumerate(a_s):
        x, _ = _extract_batch(echo, 0, nw, float(a), r0s, vs)
        traj = (r0s[None, :, None] + vs[None, None, :] * tau[:, None, None]
                + a * (tau * tau)[:, None, None]).reshape(nw, -1)
        comp = np.exp(4j * np.pi * traj / lam)
        s = np.abs((x * comp).sum(axis=0)) / np.sqrt(nw)
        amp[:, :, i_a] = s.reshape(len(r0s), len(vs))
    return BaselineMap("grft", amp, axes={"r0_m": r0s, "v_mps": vs, "a_mps2": a_s})
