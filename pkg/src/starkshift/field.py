"""Stationary scattered light field and its observables.

With a unit-amplitude travelling wave pumping the lowest branch and the
atom at z = z_a, the stationary field is the pump plus one scattered term
per branch,

    E(x,y,z) = e^{i k0 z} f_0(x,y)
             - sum_n [L_n / (i Delta_a - Gamma + L)] e^{i k0 z_a}
                     e^{(i n0 r_n - n0 s_n) |z - z_a|}
                     (f_0(x_a,y_a) / f_n(x_a,y_a)) f_n(x,y),

with the pole parameters (r_n, s_n) of each branch setting the scattered
oscillation and decay along z.  Intensities are pump-relative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientSignalError,
    NoGuidedModeError,
    SingularConfigurationError,
    UndersampledLineError,
)
from .lightshift import pole_params, total_lightshift
from .modesolver import transverse_profile

NYQUIST_FACTOR = 16  # samples per shortest beat period


@dataclass(frozen=True)
class FieldLine:
    """Complex field samples along z at a fixed transverse point."""

    x: float
    y: float
    z: np.ndarray
    amplitude: np.ndarray        # complex E(z), pump-relative
    pump_intensity: float        # |f_0(x,y)|^2, the |z| -> inf limit of |E|^2
    k0: float
    decay_scales: tuple          # 1/(n0 s_n) per branch
    normalization: str = "pump-relative"

    @property
    def intensity(self):
        return np.abs(self.amplitude) ** 2


@dataclass(frozen=True)
class FieldAnalysis:
    """Fitted decay lengths and fringe visibilities of one or more lines."""

    decay_lengths: dict
    upstream_visibility: float
    downstream_visibility: float


class StationaryField:
    """Precomputed coefficients of the stationary field."""

    def __init__(self, geometry, branches, shifts, atom_pos, delta_a, gamma):
        """
        Parameters
        ----------
        shifts : per-branch ComplexShift list (units of Gamma), same order
            as ``branches``; the shared denominator uses their total.
        delta_a : atomic detuning in internal units (omega_p).
        """
        if len(shifts) != len(branches):
            raise ValueError("need one shift per branch")
        self.geometry = geometry
        self.branches = list(branches)
        pumped = self.branches[0]
        if pumped.qn >= 1.0:
            raise NoGuidedModeError(
                f"pumped branch threshold {pumped.qn} >= omega_p: nothing propagates"
            )
        self.k0 = geometry.n0 * math.sqrt(1.0 - pumped.qn ** 2)
        self.atom_pos = tuple(atom_pos)
        xa, ya = atom_pos[0], atom_pos[1]
        self.z_a = atom_pos[2] if len(atom_pos) > 2 else 0.0
        f0a = transverse_profile(pumped, xa, ya, geometry)
        denom = complex(-1.0, delta_a / gamma) + total_lightshift(shifts).value
        self.poles = [pole_params(b, geometry.kappa) for b in self.branches]
        pump_phase = complex(math.cos(self.k0 * self.z_a), math.sin(self.k0 * self.z_a))
        self.coefficients = []
        for branch, shift in zip(self.branches, shifts):
            fna = transverse_profile(branch, xa, ya, geometry)
            if fna == 0.0:
                if shift.value != 0:
                    raise SingularConfigurationError(
                        f"atom sits on a node of branch {branch.global_index} "
                        "but that branch carries a nonzero shift"
                    )
                self.coefficients.append(0j)
                continue
            self.coefficients.append(shift.value / denom * (f0a / fna) * pump_phase)

    def amplitude(self, x, y, z):
        """Complex pump-relative field at (x, y, z); z may be an array."""
        z = np.asarray(z, dtype=float)
        pumped = self.branches[0]
        f0 = transverse_profile(pumped, x, y, self.geometry)
        out = np.exp(1j * self.k0 * z) * f0
        n0 = self.geometry.n0
        dist = np.abs(z - self.z_a)
        for branch, pole, coef in zip(self.branches, self.poles, self.coefficients):
            if coef == 0:
                continue
            fn = transverse_profile(branch, x, y, self.geometry)
            out = out - coef * fn * np.exp((1j * n0 * pole.r - n0 * pole.s) * dist)
        return out

    def decay_scales(self):
        n0 = self.geometry.n0
        return tuple(1.0 / (n0 * p.s) for p in self.poles)


def required_samples(solution, z_min, z_max):
    """Nyquist guard: 16 samples per shortest intensity beat period."""
    n0 = solution.geometry.n0
    k_fast = 2.0 * max([solution.k0] + [n0 * p.r for p in solution.poles])
    period = 2.0 * math.pi / k_fast
    return int(math.ceil(NYQUIST_FACTOR * (z_max - z_min) / period))


def intensity_line(solution, x, y, z_min, z_max, n_samples):
    """Uniformly sampled field line with Nyquist validation."""
    if z_max <= z_min:
        raise ValueError("need z_max > z_min")
    need = required_samples(solution, z_min, z_max)
    if n_samples < need:
        raise UndersampledLineError(
            f"{n_samples} samples under-resolve the fastest beat; need >= {need}",
            required_samples=need,
        )
    z = np.linspace(z_min, z_max, n_samples)
    amp = solution.amplitude(x, y, z)
    pumped = solution.branches[0]
    f0 = transverse_profile(pumped, x, y, solution.geometry)
    return FieldLine(
        x=float(x), y=float(y), z=z, amplitude=amp,
        pump_intensity=float(f0 * f0),
        k0=solution.k0,
        decay_scales=solution.decay_scales(),
    )


def _local_extrema(values):
    """Indices of strict interior extrema (sign change of the finite difference)."""
    d = np.diff(values)
    sign = np.sign(d)
    nonzero = sign != 0
    # carry the last nonzero sign forward across plateaus
    carried = np.where(nonzero, sign, 0)
    for i in range(1, len(carried)):
        if carried[i] == 0:
            carried[i] = carried[i - 1]
    flips = np.where(carried[1:] * carried[:-1] < 0)[0] + 1
    return flips


def fit_decay_length(line, branch, window=None):
    """Exponential decay length of the scattered modulation, upstream side.

    The signal is |E|^2 minus its asymptote.  Its oscillation envelope is
    taken from consecutive local-extremum pairs (half the peak-to-trough
    amplitude, which cancels slow baselines); when the signal does not
    oscillate, the raw samples are used directly.  A linear regression of
    log(envelope) against |z| over ``window`` (defaults to 0.25..2.5 decay
    scales of the selected branch) returns -1/slope.
    """
    sig = line.intensity - line.pump_intensity
    upstream = line.z < 0
    if not np.any(upstream):
        raise InsufficientSignalError("line has no upstream (z < 0) samples")
    zs = -line.z[upstream][::-1]   # |z| ascending
    ss = sig[upstream][::-1]
    peak = float(np.max(np.abs(ss)))
    if peak < 1e-9 * line.pump_intensity:
        raise InsufficientSignalError(
            f"modulation {peak:.3e} below 1e-9 of the asymptote {line.pump_intensity:.3e}"
        )
    if window is None:
        scale = line.decay_scales[branch]
        window = (0.25 * scale, 2.5 * scale)
    lo, hi = window
    hi = min(hi, float(zs[-1]))

    ext = _local_extrema(ss)
    if len(ext) >= 8:
        mids = 0.5 * (zs[ext[1:]] + zs[ext[:-1]])
        amps = 0.5 * np.abs(ss[ext[1:]] - ss[ext[:-1]])
        keep = (mids >= lo) & (mids <= hi) & (amps > 0)
    else:
        # non-oscillating signal: use the samples themselves
        mids = zs
        amps = np.abs(ss)
        keep = (mids >= lo) & (mids <= hi) & (amps > 0)
    if np.count_nonzero(keep) < 4:
        raise InsufficientSignalError(
            f"only {np.count_nonzero(keep)} usable envelope points in window {window}"
        )
    slope, _ = np.polyfit(mids[keep], np.log(amps[keep]), 1)
    if slope >= 0.0:
        raise InsufficientSignalError("envelope does not decay over the fit window")
    return -1.0 / slope


def fringe_visibility(line, n_periods=3):
    """(upstream, downstream) visibility from local extrema.

    Uses the first ``n_periods`` pump-backscatter beat periods (period
    pi/k0) on each side of the atom; requires the line to span at least
    five periods per side.  Sides without genuine extrema report the
    max/min contrast of the window, which is ~0 for a flat side.
    """
    period = math.pi / line.k0
    span_needed = 5.0 * period
    if -line.z.min() < span_needed or line.z.max() < span_needed:
        raise ValueError(
            f"line must span >= 5 fringe periods ({span_needed:.3f}) on each side"
        )
    intensity = line.intensity

    def one_side(mask):
        vals = intensity[mask]
        ext = _local_extrema(vals)
        if len(ext) >= 2:
            top = float(np.max(vals[ext]))
            bottom = float(np.min(vals[ext]))
        else:
            top = float(np.max(vals))
            bottom = float(np.min(vals))
        if top + bottom == 0.0:
            return 0.0
        return (top - bottom) / (top + bottom)

    up = one_side((line.z < 0) & (line.z >= -n_periods * period))
    down = one_side((line.z > 0) & (line.z <= n_periods * period))
    return up, down


def spectral_component(line, k_beat, side):
    """Windowed projection amplitude of |E|^2 onto e^{i k_beat z} on one side."""
    mask = line.z < 0 if side == "upstream" else line.z > 0
    z = line.z[mask]
    vals = line.intensity[mask] - np.mean(line.intensity[mask])
    win = np.hanning(len(vals))
    norm = np.sum(win)
    return abs(np.sum(vals * win * np.exp(-1j * k_beat * z))) / norm
