"""Reflectivity spectra: closed forms, master-equation scans, mixing, sweeps.

The single-transition closed form is

    R(w) = B + S / | -i dw + kappa/2 + g^2 / (-i (dw - delta) + gamma) |^2

with dw the probe-cavity detuning, delta the dot-cavity detuning and
gamma the transverse (coherence) decay rate of the dipole; all symbols
are converted to angular units internally. The two-transition form adds
a second susceptibility term of the same shape in the denominator. Both
reduce to a Lorentzian of FWHM kappa when the couplings vanish.

The master-equation spectrum reads out the coherently scattered cavity
response |Tr(rho_ss a)|^2, normalized by the squared drive so that
scale and background mean the same thing as in the closed forms. The
total intracavity photon number Tr(rho_ss a'a) additionally contains
an incoherent fluorescence component (large near the reflectivity dips
when pure dephasing dominates spontaneous emission) which is not part
of the phase-coherent reflected probe; see hilbert.expectation_photon_number
for that observable.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import hilbert
from .errors import DomainError, ShapeError
from .hilbert import SystemParams
from .physcalc import TWO_PI, TrionLevels, transition_frequencies


@dataclass(frozen=True)
class Spectrum:
    """Sampled reflectivity versus probe frequency.

    ``freq_ghz`` must be strictly increasing with at least 3 points;
    reflectivity is non-negative and finite; per-point weights are
    positive and default to 1. ``meta`` carries free-form annotations
    such as field_T or a label.
    """

    freq_ghz: np.ndarray
    reflectivity: np.ndarray
    weight: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        f = np.asarray(self.freq_ghz, dtype=float)
        r = np.asarray(self.reflectivity, dtype=float)
        w = self.weight
        w = np.ones_like(f) if w is None else np.asarray(w, dtype=float)
        object.__setattr__(self, "freq_ghz", f)
        object.__setattr__(self, "reflectivity", r)
        object.__setattr__(self, "weight", w)
        if f.ndim != 1 or f.size < 3:
            raise DomainError(f"need at least 3 spectrum points, got {f.size}")
        if r.shape != f.shape or w.shape != f.shape:
            raise ShapeError("frequency, reflectivity and weight lengths differ")
        if not np.all(np.diff(f) > 0):
            raise DomainError("probe frequencies must be strictly increasing")
        if not np.all(np.isfinite(r)) or np.any(r < 0):
            raise DomainError("reflectivity must be finite and >= 0")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise DomainError("weights must be finite and > 0")

    @property
    def n_points(self) -> int:
        return self.freq_ghz.size


@dataclass(frozen=True)
class ScanConfig:
    """Probe grid plus the scale and background of the response."""

    start: float
    stop: float
    n_points: int
    scale: float = 1.0
    background: float = 0.0

    def __post_init__(self):
        if not self.start < self.stop:
            raise DomainError(f"need start < stop, got [{self.start}, {self.stop}]")
        if self.n_points < 3:
            raise DomainError(f"need at least 3 points, got {self.n_points}")
        if self.scale <= 0:
            raise DomainError(f"scale must be positive, got {self.scale}")
        if self.background < 0:
            raise DomainError(f"background must be >= 0, got {self.background}")

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.n_points)


@dataclass(frozen=True)
class FringeModel:
    """Multiplicative sinusoidal etalon distortion of a spectrum."""

    amplitude: float
    period: float
    phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.amplitude < 0.5:
            raise DomainError(f"fringe amplitude must be in [0, 0.5), got {self.amplitude}")
        if not self.period > 0:
            raise DomainError(f"fringe period must be positive, got {self.period}")

    def factor(self, freq_ghz: np.ndarray) -> np.ndarray:
        return 1.0 + self.amplitude * np.sin(TWO_PI * freq_ghz / self.period + self.phase)


NO_FRINGE = FringeModel(amplitude=0.0, period=1.0)


def lorentzian_response(freq, kappa, omega_c):
    """Unscaled bare-cavity response 1/|{-i dw + kappa/2}|^2 (angular)."""
    dw = TWO_PI * (np.asarray(freq, dtype=float) - omega_c)
    return 1.0 / (dw**2 + (TWO_PI * kappa / 2.0) ** 2)


def single_transition_response(freq, g, kappa, gamma, delta, omega_c):
    """Unscaled response of one transition coupled to the cavity.

    ``gamma`` is the transverse dipole decay rate (value/2pi in GHz) and
    ``delta`` the dot-cavity detuning.
    """
    dw = TWO_PI * (np.asarray(freq, dtype=float) - omega_c)
    denom = -1j * dw + TWO_PI * kappa / 2.0
    denom = denom + (TWO_PI * g) ** 2 / (-1j * (dw - TWO_PI * delta) + TWO_PI * gamma)
    return 1.0 / np.abs(denom) ** 2


def two_transition_response(freq, params: SystemParams):
    """Unscaled response with both transitions in the denominator.

    Each transition contributes g_i^2 / (-i (w - w_i) + gamma_perp_i)
    with transverse rates gamma_perp_i = gamma_i/2 + gamma_d_i.
    """
    freq = np.asarray(freq, dtype=float)
    dw = TWO_PI * (freq - params.omega_c)
    denom = -1j * dw + TWO_PI * params.kappa / 2.0
    gp3 = TWO_PI * (params.gamma3 / 2.0 + params.gamma_d3)
    gp4 = TWO_PI * (params.gamma4 / 2.0 + params.gamma_d4)
    if params.g3:
        denom = denom + (TWO_PI * params.g3) ** 2 / (
            -1j * TWO_PI * (freq - params.omega_x) + gp3)
    if params.g4:
        denom = denom + (TWO_PI * params.g4) ** 2 / (
            -1j * TWO_PI * (freq - params.omega_x + params.delta_h) + gp4)
    return 1.0 / np.abs(denom) ** 2


def lorentzian_spectrum(kappa: float, omega_c: float, cfg: ScanConfig,
                        meta: dict | None = None) -> Spectrum:
    """Bare-cavity Lorentzian with FWHM kappa, peaked at omega_c."""
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    f = cfg.grid()
    r = cfg.background + cfg.scale * lorentzian_response(f, kappa, omega_c)
    return Spectrum(f, r, meta=dict(meta or {}))


def dit_spectrum(g: float, kappa: float, gamma: float, delta: float,
                 omega_c: float, cfg: ScanConfig,
                 meta: dict | None = None) -> Spectrum:
    """Single-transition reflectivity with the transparency dip.

    Reduces exactly to :func:`lorentzian_spectrum` at g = 0. On joint
    resonance the dip is suppressed by 1/(1+C)^2 relative to the bare
    peak, with cooperativity C = 2 g^2 / (kappa gamma).
    """
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    f = cfg.grid()
    r = cfg.background + cfg.scale * single_transition_response(
        f, g, kappa, gamma, delta, omega_c)
    return Spectrum(f, r, meta=dict(meta or {}))


def two_transition_spectrum(params: SystemParams, cfg: ScanConfig,
                            meta: dict | None = None) -> Spectrum:
    """Closed-form reflectivity with both transitions of the spin-down dot."""
    f = cfg.grid()
    r = cfg.background + cfg.scale * two_transition_response(f, params)
    return Spectrum(f, r, meta=dict(meta or {}))


def master_equation_spectrum(params: SystemParams, cfg: ScanConfig,
                             real_g3: bool = False,
                             meta: dict | None = None) -> Spectrum:
    """Reflectivity from the steady state of the full master equation.

    The coherent cavity response |Tr(rho_ss a)|^2 is divided by the
    squared angular drive so the result carries the same scale and
    background conventions as the closed forms and agrees with them in
    the weak-drive limit.
    """
    if params.drive_amp <= 0:
        raise DomainError("master-equation spectrum needs a positive drive_amp")
    f = cfg.grid()
    norm = (TWO_PI * params.drive_amp) ** 2
    vals = np.empty_like(f)
    for i, probe in enumerate(f):
        rho = hilbert.steady_state(params, probe, real_g3=real_g3)
        amp = hilbert.expectation_cavity_amplitude(rho)
        vals[i] = abs(amp) ** 2 / norm
    r = cfg.background + cfg.scale * vals
    return Spectrum(f, r, meta=dict(meta or {}))


def mixed_spectrum(p_up: float, spectrum_up: Spectrum,
                   spectrum_down: Spectrum) -> Spectrum:
    """Pointwise convex combination of the two pure-spin spectra."""
    if not 0.0 <= p_up <= 1.0:
        raise DomainError(f"p_up must be in [0, 1], got {p_up}")
    if not np.array_equal(spectrum_up.freq_ghz, spectrum_down.freq_ghz):
        raise ShapeError("the two spectra are on different frequency grids")
    r = p_up * spectrum_up.reflectivity + (1.0 - p_up) * spectrum_down.reflectivity
    meta = dict(spectrum_down.meta)
    meta["p_up"] = p_up
    return Spectrum(spectrum_down.freq_ghz.copy(), r, meta=meta)


def field_sweep(levels: TrionLevels, params: SystemParams,
                fields: Sequence[float], cfg: ScanConfig) -> list[Spectrum]:
    """Closed-form spectra at each magnetic field.

    At every field the frequency of transition 3 and the excited-state
    splitting are recomputed from the Zeeman level structure; the other
    system parameters are held fixed. Spectra carry ``field_T`` metadata.
    """
    fields = list(fields)
    if not fields:
        raise DomainError("need at least one field value")
    out = []
    for b in fields:
        if b < 0:
            raise DomainError(f"field must be >= 0, got {b}")
        _, _, nu3, nu4 = transition_frequencies(replace(levels, field=float(b)))
        p = replace(params, omega_x=nu3, delta_h=nu3 - nu4)
        out.append(two_transition_spectrum(p, cfg, meta={"field_T": float(b)}))
    return out


def synthesize_noisy(spectrum: Spectrum, noise_rel: float,
                     fringe: FringeModel = NO_FRINGE,
                     seed: int = 0) -> Spectrum:
    """Deterministic synthetic measurement: etalon fringe plus shot noise.

    The signal is first multiplied by the sinusoidal fringe factor, then
    Gaussian noise with standard deviation noise_rel times the local
    (fringed) value is added. Results are floored at zero so the output
    remains a valid reflectivity. Identical seeds give identical output.
    """
    if noise_rel < 0:
        raise DomainError(f"noise_rel must be >= 0, got {noise_rel}")
    rng = np.random.default_rng(seed)
    clean = spectrum.reflectivity * fringe.factor(spectrum.freq_ghz)
    noisy = clean + rng.standard_normal(clean.size) * (noise_rel * clean)
    meta = dict(spectrum.meta)
    meta.update(noise_rel=noise_rel, seed=int(seed),
                fringe_amplitude=fringe.amplitude, fringe_period=fringe.period,
                fringe_phase=fringe.phase)
    return Spectrum(spectrum.freq_ghz.copy(), np.maximum(noisy, 0.0),
                    weight=spectrum.weight.copy(), meta=meta)


def max_relative_difference(a: Spectrum, b: Spectrum,
                            pointwise: bool = False) -> float:
    """Largest deviation between two spectra on a common grid.

    By default the deviation is normalized by the larger spectrum's
    maximum (a scale-relative measure appropriate for spectra with deep
    dips); with ``pointwise=True`` it is normalized point by point.
    """
    if not np.array_equal(a.freq_ghz, b.freq_ghz):
        raise ShapeError("spectra are on different frequency grids")
    diff = np.abs(a.reflectivity - b.reflectivity)
    if pointwise:
        ref = np.maximum(np.abs(b.reflectivity), 1e-300)
        return float(np.max(diff / ref))
    scale = max(float(np.max(a.reflectivity)), float(np.max(b.reflectivity)))
    return float(np.max(diff) / scale) if scale > 0 else 0.0
