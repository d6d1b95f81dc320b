"""Synthetic measurement generation with reproducible seeding.

Draws phase-averaged (or fixed-phase) quadrature samples for the canonical
Gaussian states, and sampled voltage records of modulated Gaussian pulses.
Quadratures are dimensionless with vacuum variance 1/2, so the cumulant
inversion in :mod:`photocount.moments` applies verbatim.

RNG streams are split per purpose (phase draws, amplitude draws, added
noise) so that components advertised as independent are independent by
construction.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

VACUUM_VARIANCE = 0.5

_KINDS = ("vacuum", "coherent", "thermal", "squeezed_vacuum")
_PHASE_MODES = ("averaged", "fixed")


class SpecError(ValueError):
    """State description is inconsistent or incomplete."""


class AliasingError(ValueError):
    """Sample rate too low for the requested carrier."""


@dataclass(frozen=True)
class StateSpec:
    """Declarative description of a canonical Gaussian state.

    Exactly the parameters relevant to ``kind`` may be set.  ``added_noise``
    is an optional independent noise power (variance, in quadrature units)
    summed onto every sample; it models a noisy measurement chain whose
    cumulants are later subtracted.
    """

    kind: str
    mean_photons: float | None = None
    squeeze_r: float | None = None
    squeeze_angle: float | None = None
    added_noise: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise SpecError(f"unknown state kind {self.kind!r}")
        needs_nbar = self.kind in ("coherent", "thermal")
        if needs_nbar:
            if self.mean_photons is None:
                raise SpecError(f"{self.kind} state requires mean_photons")
            if self.mean_photons < 0:
                raise SpecError("mean_photons must be nonnegative")
        elif self.mean_photons is not None:
            raise SpecError(f"mean_photons is not a parameter of {self.kind}")
        if self.kind == "squeezed_vacuum":
            if self.squeeze_r is None:
                raise SpecError("squeezed_vacuum requires squeeze_r")
            if self.squeeze_r < 0:
                raise SpecError("squeeze_r must be nonnegative")
            if self.squeeze_angle is None:
                object.__setattr__(self, "squeeze_angle", 0.0)
        else:
            if self.squeeze_r is not None or self.squeeze_angle is not None:
                raise SpecError(f"squeeze parameters are not valid for {self.kind}")
        if self.added_noise is not None and self.added_noise < 0:
            raise SpecError("added_noise must be nonnegative")

    @classmethod
    def vacuum(cls, added_noise=None):
        return cls("vacuum", added_noise=added_noise)

    @classmethod
    def coherent(cls, mean_photons, added_noise=None):
        return cls("coherent", mean_photons=mean_photons, added_noise=added_noise)

    @classmethod
    def thermal(cls, mean_photons, added_noise=None):
        return cls("thermal", mean_photons=mean_photons, added_noise=added_noise)

    @classmethod
    def squeezed(cls, squeeze_r, squeeze_angle=0.0, added_noise=None):
        return cls(
            "squeezed_vacuum",
            squeeze_r=squeeze_r,
            squeeze_angle=squeeze_angle,
            added_noise=added_noise,
        )

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "StateSpec":
        return cls(**d)


@dataclass(frozen=True)
class QuadratureBatch:
    """Finite sample of dimensionless quadrature measurements."""

    samples: np.ndarray
    phase_mode: str = "averaged"
    seed: int | None = None
    theta: float | None = None

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", x)
        if x.ndim != 1 or x.size < 1:
            raise ValueError("samples must be a nonempty 1-d array")
        if not np.all(np.isfinite(x)):
            raise ValueError("samples must be finite")
        if self.phase_mode not in _PHASE_MODES:
            raise ValueError(f"phase_mode must be one of {_PHASE_MODES}")
        if self.phase_mode == "fixed" and self.theta is None:
            raise ValueError("fixed phase mode requires theta")

    @property
    def count(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class TimeTrace:
    """Uniformly sampled real voltage record on a matched line."""

    fs: float
    impedance: float
    samples: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", v)
        if self.fs <= 0:
            raise ValueError("fs must be positive")
        if self.impedance <= 0:
            raise ValueError("impedance must be positive")
        if v.ndim != 1 or v.size < 2:
            raise ValueError("need at least two samples")
        if not np.all(np.isfinite(v)):
            raise ValueError("samples must be finite")

    @property
    def dt(self) -> float:
        return 1.0 / self.fs

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) / self.fs


def _quadrature_sigma_squeezed(r, theta, angle):
    """Std dev of the squeezed-vacuum quadrature at measurement phase theta."""
    rel = theta - angle
    var = (
        np.exp(2.0 * r) * np.cos(rel) ** 2 + np.exp(-2.0 * r) * np.sin(rel) ** 2
    ) / 2.0
    return np.sqrt(var)


def sample_quadratures(
    spec: StateSpec,
    phase_mode: str,
    n: int,
    seed: int,
    theta: float | None = None,
) -> QuadratureBatch:
    """Draw n independent samples from the exact quadrature marginal.

    In averaged mode each sample gets a fresh uniform phase, matching a
    detection phase that drifts randomly; samples are then i.i.d., which
    the cumulant estimators assume.  Deterministic given (spec, n, seed).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if phase_mode not in _PHASE_MODES:
        raise SpecError(f"phase_mode must be one of {_PHASE_MODES}")
    if phase_mode == "fixed" and theta is None:
        raise SpecError("fixed phase mode requires theta")

    seq = np.random.SeedSequence(seed)
    theta_rng, amp_rng, noise_rng = (np.random.default_rng(s) for s in seq.spawn(3))

    if spec.kind in ("coherent", "squeezed_vacuum"):
        thetas = (
            theta_rng.uniform(0.0, 2.0 * math.pi, n)
            if phase_mode == "averaged"
            else np.full(n, float(theta))
        )
    else:
        thetas = None  # phase-symmetric marginal; no phase draw needed

    sigma_vac = math.sqrt(VACUUM_VARIANCE)
    if spec.kind == "vacuum":
        x = amp_rng.normal(0.0, sigma_vac, n)
    elif spec.kind == "thermal":
        x = amp_rng.normal(0.0, math.sqrt(spec.mean_photons + VACUUM_VARIANCE), n)
    elif spec.kind == "coherent":
        mean = math.sqrt(2.0 * spec.mean_photons) * np.cos(thetas)
        x = mean + amp_rng.normal(0.0, sigma_vac, n)
    else:  # squeezed_vacuum
        sigma = _quadrature_sigma_squeezed(spec.squeeze_r, thetas, spec.squeeze_angle)
        x = sigma * amp_rng.standard_normal(n)

    if spec.added_noise:
        x = x + noise_rng.normal(0.0, math.sqrt(spec.added_noise), n)

    return QuadratureBatch(x, phase_mode, seed, theta if phase_mode == "fixed" else None)


@dataclass(frozen=True)
class PulseSpec:
    """Modulated Gaussian pulse: carrier (Hz), envelope width (s), peak
    amplitude (V), and optional white noise two-sided spectral density
    (V^2/Hz)."""

    carrier_hz: float
    sigma_s: float
    amplitude_v: float
    noise_floor: float = 0.0

    def __post_init__(self):
        if self.carrier_hz <= 0 or self.sigma_s <= 0:
            raise SpecError("carrier and envelope width must be positive")
        if self.noise_floor < 0:
            raise SpecError("noise_floor must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)


def sample_timetrace(
    pulse: PulseSpec,
    fs: float,
    duration: float,
    impedance: float,
    seed: int,
) -> TimeTrace:
    """Sampled record of a Gaussian pulse centered at t = 0 plus white noise.

    v(t) = A exp(-t^2 / 2 sigma^2) cos(2 pi nu0 t) + noise, with the noise
    variance per sample equal to noise_floor * fs (flat two-sided density
    across the sampled band).  Requires fs > 4 nu0 and duration >= 10 sigma.
    """
    if fs <= 4.0 * pulse.carrier_hz:
        raise AliasingError(
            f"fs = {fs:.3g} Hz undersamples carrier {pulse.carrier_hz:.3g} Hz "
            "(need fs > 4 nu0)"
        )
    if duration < 10.0 * pulse.sigma_s:
        raise ValueError("duration must cover at least 10 envelope widths")
    n = int(round(duration * fs))
    t0 = -duration / 2.0
    t = t0 + np.arange(n) / fs
    v = pulse.amplitude_v * np.exp(-(t**2) / (2.0 * pulse.sigma_s**2)) * np.cos(
        2.0 * math.pi * pulse.carrier_hz * t
    )
    if pulse.noise_floor > 0:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        v = v + rng.normal(0.0, math.sqrt(pulse.noise_floor * fs), n)
    return TimeTrace(fs, impedance, v, t0)
