"""Windowed trajectory extraction, transform-domain integration, and the
five-dimensional grid search over (eta0, eta1, r0, v, a).

A hypothesis extracts one complex sample per pulse along the quadratic range
law r(t) = r0 + v*(t - eta0) + a*(t - eta0)^2 inside the window
[eta0, eta1], then integrates the samples with the fractional-Fourier kernel
whose angle is locked to the hypothesized acceleration and window length.
The reported statistic is the refined peak of the dechirped tone spectrum,
i.e. max_u |WR(alpha, u)| with unit-energy templates, so the per-bin noise
level is independent of alpha and window length and the estimator prefers
the tightest window that still captures the whole dwell.

Velocity hypotheses are discriminated by range-cell walk: slow-time Doppler
is ambiguous at the pulse rate, so a velocity offset that leaves the
trajectory inside the same cells only translates the tone peak and keeps
its amplitude.  Grid coarsening factors should therefore be chosen so one
velocity step walks a noticeable fraction of a range cell over the dwell.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, MinDwellError, ValidationError
from .frft import Angle, dechirp, refine_tone_peak, tone_spectrum
from .signal_model import C_LIGHT, EchoMatrix, RadarParams

DEFAULT_BUDGET = 5_000_000
DEFAULT_MIN_DWELL_PULSES = 11  # ten repetition intervals


def alpha_for(a_s: float, eta0: float, eta1: float, radar: RadarParams) -> Angle:
    """Transform angle locked to a hypothesized acceleration and window.

    With the dimensionless grid used by :mod:`wrfrft.frft`, the slow-time
    quadratic phase written by an acceleration ``a_s`` over a window of
    effective length T_eta = eta1 - eta0 + PRT is cancelled exactly at

        alpha = arccot(4 * a_s * PRT * T_eta / wavelength)    in (0, pi).

    This is the nominal arccot(-2*a_s*T_eta/(lambda*f)) mapping evaluated at
    f = -prf/2; the sign and the factor two come respectively from the
    kernel's rotation direction and from the grid spacing sqrt(2*pi/n).  See
    :func:`alpha_from_formula` for the unscaled textbook form.
    """
    if eta1 <= eta0:
        raise ValidationError("need eta1 > eta0")
    t_eta = (eta1 - eta0) + radar.prt
    arg = 4.0 * a_s * radar.prt * t_eta / radar.wavelength
    return Angle(float(np.arctan2(1.0, arg)))


def alpha_from_formula(a_s: float, t_eta: float, wavelength: float, f_slow: float) -> Angle:
    """Textbook mapping arccot(-2*a_s*T_eta/(wavelength*f_slow)), range (0, pi)."""
    arg = -2.0 * a_s * t_eta / (wavelength * f_slow)
    return Angle(float(np.arctan2(1.0, arg)))


@dataclass(frozen=True)
class Hypothesis:
    """One search tuple plus its derived transform angle."""

    eta0: float
    eta1: float
    r0: float
    v: float
    a: float

    def __post_init__(self):
        if not self.eta0 < self.eta1:
            raise ValidationError("need eta0 < eta1")

    def alpha(self, radar: RadarParams) -> Angle:
        return alpha_for(self.a, self.eta0, self.eta1, radar)


@dataclass(frozen=True)
class GridAxis:
    name: str
    start: float
    step: float
    count: int

    def values(self) -> np.ndarray:
        return self.start + np.arange(self.count) * self.step


@dataclass(frozen=True)
class SearchGrid:
    eta0: GridAxis
    eta1: GridAxis
    r0: GridAxis
    v: GridAxis
    a: GridAxis
    min_dwell_pulses: int = DEFAULT_MIN_DWELL_PULSES

    def axes(self) -> dict[str, GridAxis]:
        return {ax.name: ax for ax in (self.eta0, self.eta1, self.r0, self.v, self.a)}

    @property
    def hypothesis_count(self) -> int:
        n = 1
        for ax in self.axes().values():
            n *= ax.count
        return n


def base_steps(radar: RadarParams) -> dict[str, float]:
    """Uncoarsened search steps derived from the radar constants."""
    span = radar.t1 - radar.t0
    lam = radar.wavelength
    return {
        "eta0": radar.prt,
        "eta1": radar.prt,
        "r0": C_LIGHT / (2.0 * radar.bandwidth),
        "v": lam / (2.0 * span),
        "a": lam / (2.0 * span ** 2),
    }


def build_grid(bounds: dict[str, tuple[float, float]],
               radar: RadarParams,
               coarsen: dict[str, float] | None = None,
               budget: int = DEFAULT_BUDGET,
               min_dwell_pulses: int = DEFAULT_MIN_DWELL_PULSES) -> SearchGrid:
    """Build the search grid from per-axis (min, max) bounds.

    Step sizes are the radar-derived base steps scaled by the per-axis
    coarsening factors; each axis holds round((max - min) / step) points
    starting at the lower bound (always at least one).
    """
    coarsen = dict(coarsen or {})
    steps = base_steps(radar)
    axes = {}
    for name in ("eta0", "eta1", "r0", "v", "a"):
        if name not in bounds:
            raise ValidationError(f"missing bounds for axis {name!r}")
        lo, hi = bounds[name]
        if hi < lo:
            raise ValidationError(f"axis {name!r}: max < min")
        step = steps[name] * float(coarsen.get(name, 1.0))
        if step <= 0:
            raise ValidationError(f"axis {name!r}: step must be positive")
        count = max(1, int(round((hi - lo) / step)))
        axes[name] = GridAxis(name, lo, step, count)
    grid = SearchGrid(axes["eta0"], axes["eta1"], axes["r0"], axes["v"], axes["a"],
                      min_dwell_pulses=min_dwell_pulses)
    if grid.hypothesis_count > budget:
        raise BudgetError(grid.hypothesis_count, budget,
                          {k: v.count for k, v in grid.axes().items()})
    return grid


@dataclass(frozen=True)
class PeakRecord:
    """Estimator output: the global argmax of the search."""

    amplitude: float
    eta0: float
    eta1: float
    r0: float
    v: float
    a: float
    u_bin: int
    tie_rank: tuple = ()
    clipped: bool = False

    def to_dict(self) -> dict:
        return {
            "eta0_s": self.eta0,
            "eta1_s": self.eta1,
            "r0_m": self.r0,
            "v_mps": self.v,
            "a_mps2": self.a,
            "amplitude": self.amplitude,
            "u_bin": int(self.u_bin),
        }


@dataclass
class SingleResult:
    spectrum: np.ndarray   # complex tone-circle spectrum, oversample*n bins
    peak: float            # refined peak amplitude
    u_bin: int             # argmax bin on the tone circle
    clipped: bool
    alpha: Angle


def _window_pulses(echo: EchoMatrix, eta0: float, eta1: float) -> tuple[int, int]:
    radar = echo.radar
    p0 = int(round((eta0 - radar.t0) * radar.prf))
    p1 = int(round((eta1 - radar.t0) * radar.prf))
    p0 = min(max(p0, 0), echo.num_pulses - 1)
    p1 = min(max(p1, 0), echo.num_pulses - 1)
    return p0, p1


def _extract_batch(echo: EchoMatrix, p0: int, nw: int, a: float,
                   r0s: np.ndarray, vs: np.ndarray):
    """Extraction matrix [nw, len(r0s)*len(vs)] plus per-column clip flags."""
    radar = echo.radar
    tau = np.arange(nw) * radar.prt
    traj = (r0s[None, :, None] + vs[None, None, :] * tau[:, None, None]
            + a * (tau * tau)[:, None, None])
    kc = np.rint(traj / radar.cell_size).astype(np.int64)
    ok = (kc >= 0) & (kc < echo.num_cells)
    kc_safe = np.clip(kc, 0, echo.num_cells - 1)
    pulses = (p0 + np.arange(nw))[:, None, None]
    vals = echo.data[kc_safe, pulses]
    vals = np.where(ok, vals, 0.0)
    j = len(r0s) * len(vs)
    return vals.reshape(nw, j), ~ok.all(axis=0).reshape(j)


def extract_windowed_trajectory(echo: EchoMatrix, hyp: Hypothesis,
                                min_dwell_pulses: int = DEFAULT_MIN_DWELL_PULSES):
    """Complex sample per pulse along the hypothesized trajectory.

    Pulses whose trajectory cell falls outside the range window contribute
    zero and mark the extraction as clipped.

    Returns
    -------
    (samples, clipped) : complex [num_window_pulses], bool
    """
    p0, p1 = _window_pulses(echo, hyp.eta0, hyp.eta1)
    nw = p1 - p0 + 1
    if nw < min_dwell_pulses:
        raise MinDwellError(
            f"window holds {nw} pulses, minimum is {min_dwell_pulses}")
    vals, clip = _extract_batch(echo, p0, nw, hyp.a,
                                np.array([hyp.r0]), np.array([hyp.v]))
    return vals[:, 0], bool(clip[0])


def wrfrft_single(echo: EchoMatrix, hyp: Hypothesis,
                  oversample: int = 2,
                  min_dwell_pulses: int = DEFAULT_MIN_DWELL_PULSES) -> SingleResult:
    """Windowed extraction followed by transform-domain integration.

    The spectrum is the dechirped tone circle (complex, oversample*n bins);
    its refined magnitude maximum is the detection/estimation statistic.
    """
    samples, clipped = extract_windowed_trajectory(echo, hyp, min_dwell_pulses)
    alpha = hyp.alpha(echo.radar)
    xt = dechirp(samples, alpha)
    spec = np.fft.fft(xt, oversample * len(xt)) / np.sqrt(len(xt))
    if not np.any(samples):
        return SingleResult(spec, 0.0, 0, clipped, alpha)
    q0 = int(np.argmax(np.abs(spec)))
    amp, _ = refine_tone_peak(xt, np.array([q0]), oversample)
    return SingleResult(spec, float(amp[0]), q0, clipped, alpha)


def _search_window(echo, grid, i_e0, i_e1, eta0, eta1, oversample):
    """Best hypothesis within one (eta0, eta1) window; None if infeasible."""
    radar = echo.radar
    p0, p1 = _window_pulses(echo, eta0, eta1)
    nw = p1 - p0 + 1
    if eta1 <= eta0 or nw < grid.min_dwell_pulses:
        return None
    r0s = grid.r0.values()
    vs = grid.v.values()
    best = None
    for i_a, a in enumerate(grid.a.values()):
        alpha = alpha_for(a, eta0, eta1, radar)
        x, clip = _extract_batch(echo, p0, nw, a, r0s, vs)
        xt = dechirp(x, alpha)
        amps_bins = tone_spectrum(xt, oversample)
        q0 = np.argmax(amps_bins, axis=0)
        nonzero = amps_bins[q0, np.arange(x.shape[1])] > 0
        amp, _ = refine_tone_peak(xt, q0, oversample)
        amp = np.where(nonzero, amp, 0.0)
        for j in range(x.shape[1]):
            i_r, i_v = divmod(j, len(vs))
            idx = (i_e0, i_e1, i_r, i_v, i_a)
            cand = (amp[j], idx, int(q0[j]), bool(clip[j]))
            if best is None or cand[0] > best[0] or (cand[0] == best[0] and idx < best[1]):
                best = cand
    return best


def wrfrft_search(echo: EchoMatrix, grid: SearchGrid,
                  oversample: int = 2,
                  budget: int = DEFAULT_BUDGET,
                  workers: int = 1) -> PeakRecord:
    """Evaluate every hypothesis and return the global argmax.

    Ties break lexicographically on the (eta0, eta1, r0, v, a) index tuple,
    and the window-parallel evaluation merges results in that same order, so
    the outcome is identical for any worker count.
    """
    if grid.hypothesis_count > budget:
        raise BudgetError(grid.hypothesis_count, budget,
                          {k: v.count for k, v in grid.axes().items()})
    eta0s = grid.eta0.values()
    eta1s = grid.eta1.values()
    windows = [(i0, i1, e0, e1)
               for i0, e0 in enumerate(eta0s)
               for i1, e1 in enumerate(eta1s)]

    def run(w):
        i0, i1, e0, e1 = w
        return _search_window(echo, grid, i0, i1, e0, e1, oversample)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, windows))
    else:
        results = [run(w) for w in windows]
    best = None
    for res in results:
        if res is None:
            continue
        if best is None or res[0] > best[0] or (res[0] == best[0] and res[1] < best[1]):
            best = res
    if best is None:
        raise ValidationError("grid holds no feasible window (check min dwell)")
    amp, idx, q0, clipped = best
    return PeakRecord(
        amplitude=float(amp),
        eta0=float(eta0s[idx[0]]),
        eta1=float(eta1s[idx[1]]),
        r0=float(grid.r0.values()[idx[2]]),
        v=float(grid.v.values()[idx[3]]),
        a=float(grid.a.values()[idx[4]]),
        u_bin=q0,
        tie_rank=idx,
        clipped=clipped,
    )


def reanchored(base: Hypothesis, eta0: float, eta1: float) -> Hypothesis:
    """Same physical trajectory re-referenced to a new window start."""
    dt = eta0 - base.eta0
    return Hypothesis(
        eta0=eta0,
        eta1=eta1,
        r0=base.r0 + base.v * dt + base.a * dt * dt,
        v=base.v + 2.0 * base.a * dt,
        a=base.a,
    )


def peak_profile(echo: EchoMatrix, base_hyp: Hypothesis, axis: str,
                 values: np.ndarray,
                 min_dwell_pulses: int = DEFAULT_MIN_DWELL_PULSES) -> np.ndarray:
    """Peak amplitude as one window endpoint sweeps, motion fixed.

    The hypothesized trajectory is held fixed as a physical trajectory: when
    the window start moves, (r0, v) are re-referenced to the new start so
    the sweep isolates the window-matching effect.
    """
    if axis not in ("eta0", "eta1"):
        raise ValidationError("axis must be 'eta0' or 'eta1'")
    out = np.empty(len(values))
    for i, val in enumerate(values):
        if axis == "eta0":
            hyp = reanchored(base_hyp, float(val), base_hyp.eta1)
        else:
            hyp = reanchored(base_hyp, base_hyp.eta0, float(val))
        res = wrfrft_single(echo, hyp, min_dwell_pulses=min_dwell_pulses)
        out[i] = res.peak
    return out


def amplitude_slice(echo: EchoMatrix, a: float, eta0: float, eta1: float,
                    r0s: np.ndarray, vs: np.ndarray,
                    oversample: int = 2) -> np.ndarray:
    """Refined peak amplitude over an (r0, v) plane at fixed (a, eta0, eta1)."""
    radar = echo.radar
    p0, p1 = _window_pulses(echo, eta0, eta1)
    nw = p1 - p0 + 1
    alpha = alpha_for(a, eta0, eta1, radar)
    x, _ = _extract_batch(echo, p0, nw, a, np.asarray(r0s, float), np.asarray(vs, float))
    xt = dechirp(x, alpha)
    amps = tone_spectrum(xt, oversample)
    q0 = np.argmax(amps, axis=0)
    amp, _ = refine_tone_peak(xt, q0, oversample)
    amp = np.where(amps[q0, np.arange(x.shape[1])] > 0, amp, 0.0)
    return amp.reshape(len(r0s), len(vs))


def window_projection(echo: EchoMatrix, grid: SearchGrid,
                      oversample: int = 2) -> np.ndarray:
    """Best amplitude over (r0, v, a) for every (eta0, eta1) window pair.

    Infeasible pairs (start past end, or shorter than the minimum dwell)
    hold zero.
    """
    eta0s = grid.eta0.values()
    eta1s = grid.eta1.values()
    out = np.zeros((len(eta0s), len(eta1s)))
    for i0, e0 in enumerate(eta0s):
        for i1, e1 in enumerate(eta1s):
            best = _search_window(echo, grid, i0, i1, e0, e1, oversample)
            if best is not None:
                out[i0, i1] = best[0]
    return out
