"""Wideband observables on sampled voltage records.

Energy and photon-number functionals of a record v(t) on a matched line of
impedance Z:

    energy  = (1/Z) integral v(t)^2 dt
    photons = (2/(h Z)) integral w(t)^2 dt

where w is the causal transform of v, the convolution with the one-sided
kernel 1/sqrt(tau).  The kernel is applied spectrally: its transform is
Gamma(1/2) (i 2 pi nu)^(-1/2), i.e. magnitude 1/sqrt(2 |nu|) and phase
-pi/4 sign(nu), which is exact and O(N log N) where the time-domain
convolution (integrably singular at tau = 0, heavy tailed) is neither.
With that normalization the photon functional weights the energy spectrum
by 1/(h nu), so for a narrowband record photons * h nu0 = energy.

Records are zero-padded to a power of two at least twice their length
(linear rather than circular convolution), and the DC and Nyquist bins are
zeroed: the kernel diverges at nu = 0 and physical records are AC-coupled,
so the transform band-limits to the open interval (0, fs/2).  The photon
number also splits into two quadratures x = w and p = Hilbert(w) with
photons = (1/(h Z)) integral (x^2 + p^2) dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import h as PLANCK

from .sampler import TimeTrace

_MIN_SAMPLES = 64


class DegenerateInputError(ValueError):
    """Record too short to transform meaningfully."""


@dataclass(frozen=True)
class Spectrum:
    """Two-sided voltage spectrum in FFT bin order, V(nu) in volts/Hz.

    Convention: bins = FFT(v) * dt and df = fs / n_fft, which makes
    sum |v|^2 dt = sum |V|^2 df exact (Parseval).
    """

    df: float
    bins: np.ndarray
    impedance: float
    kind: str = "two_sided"

    @property
    def frequencies(self) -> np.ndarray:
        return np.fft.fftfreq(self.bins.size, d=1.0 / (self.df * self.bins.size))


def padded_length(n: int) -> int:
    """Smallest power of two at least twice n."""
    return 1 << (2 * n - 1).bit_length()


def spectrum_of(trace: TimeTrace, n_fft: int | None = None) -> Spectrum:
    v = trace.samples
    m = n_fft if n_fft is not None else v.size
    bins = np.fft.fft(v, m) * trace.dt
    return Spectrum(trace.fs / m, bins, trace.impedance)


def energy_of(trace: TimeTrace) -> float:
    """Record energy in joules, (1/Z) sum v^2 dt."""
    v = trace.samples
    return float(v @ v) * trace.dt / trace.impedance


def energy_spectral(trace: TimeTrace) -> float:
    """Record energy from the spectrum; equals :func:`energy_of` by Parseval."""
    sp = spectrum_of(trace)
    return float(np.abs(sp.bins) @ np.abs(sp.bins)) * sp.df / sp.impedance


def _causal_kernel(m: int, fs: float) -> np.ndarray:
    freqs = np.fft.fftfreq(m, d=1.0 / fs)
    kernel = np.zeros(m, dtype=complex)
    nz = freqs != 0.0
    kernel[nz] = math.sqrt(math.pi) * (2j * math.pi * freqs[nz]) ** -0.5
    kernel[m // 2] = 0.0  # Nyquist
    return kernel


def _check_transformable(trace: TimeTrace) -> None:
    if trace.samples.size < _MIN_SAMPLES:
        raise DegenerateInputError(
            f"need at least {_MIN_SAMPLES} samples, got {trace.samples.size}"
        )


def causal_transform(trace: TimeTrace) -> TimeTrace:
    """Convolution of the record with the causal 1/sqrt(tau) kernel.

    Returned on the zero-padded grid (the kernel's slow tail extends past
    the original window); t0 and fs are unchanged.
    """
    _check_transformable(trace)
    m = padded_length(trace.samples.size)
    w_hat = np.fft.fft(trace.samples, m) * _causal_kernel(m, trace.fs)
    w = np.fft.ifft(w_hat).real
    return TimeTrace(trace.fs, trace.impedance, w, trace.t0)


def hilbert_transform(trace: TimeTrace) -> TimeTrace:
    """Spectral multiplier -i sign(nu), with DC and Nyquist zeroed.

    Acts circularly on the record as given; feed it records already
    extended by :func:`causal_transform`.
    """
    v = trace.samples
    m = v.size
    freqs = np.fft.fftfreq(m, d=trace.dt)
    mult = -1j * np.sign(freqs)
    if m % 2 == 0:
        mult[m // 2] = 0.0
    out = np.fft.ifft(np.fft.fft(v) * mult).real
    return TimeTrace(trace.fs, trace.impedance, out, trace.t0)


def hilbert_pair(trace: TimeTrace) -> tuple[TimeTrace, TimeTrace]:
    """Quadrature pair (x, p) of a record: x is the causal transform, p its
    Hilbert transform."""
    x = causal_transform(trace)
    return x, hilbert_transform(x)


def photon_number_of(trace: TimeTrace) -> float:
    """Photon-number functional (2/(h Z)) sum w^2 dt."""
    w = causal_transform(trace).samples
    return 2.0 / (PLANCK * trace.impedance) * float(w @ w) * trace.dt


def photon_number_spectral(trace: TimeTrace) -> float:
    """Photon number from the energy spectrum weighted by 1/(h |nu|).

    Independent of the time-domain route through :func:`causal_transform`;
    the two must agree to round-off.
    """
    m = padded_length(trace.samples.size)
    sp = spectrum_of(trace, m)
    freqs = sp.frequencies
    keep = freqs != 0.0
    keep[m // 2] = False
    power = np.abs(sp.bins[keep]) ** 2
    return float(np.sum(power / np.abs(freqs[keep]))) * sp.df / (
        PLANCK * trace.impedance
    )


def photon_number_from_pair(x: TimeTrace, p: TimeTrace) -> float:
    """Photon number from a quadrature pair, (1/(h Z)) sum (x^2 + p^2) dt."""
    if x.samples.size != p.samples.size:
        raise ValueError("quadrature records must share a grid")
    sx, sp_ = x.samples, p.samples
    total = float(sx @ sx) + float(sp_ @ sp_)
    return total * x.dt / (PLANCK * x.impedance)


def spectral_centroid(trace: TimeTrace) -> float:
    """Power-weighted mean positive frequency of the record."""
    sp = spectrum_of(trace)
    freqs = sp.frequencies
    pos = freqs > 0
    power = np.abs(sp.bins[pos]) ** 2
    total = power.sum()
    if total == 0.0:
        return math.nan
    return float((freqs[pos] * power).sum() / total)
