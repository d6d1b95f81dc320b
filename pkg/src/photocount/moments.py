"""Streaming central moments, cumulants, and photocount-moment reconstruction.

Quadrature samples are reduced to central moments m2..m6 with a mergeable
one-pass accumulator, converted to cumulants, and inverted into the first
three moments of the discrete photocount distribution.  All estimators are
plug-in (moment relations applied to sample moments); their bias is O(1/N)
and is negligible against statistical error at the sample sizes this
package targets (N >= 1e6).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

_CHUNK = 1 << 20
_MIN_SAMPLES = 100
_MIN_RESAMPLES = 100


class InsufficientSamplesError(ValueError):
    """Batch too small for a stable moment estimate."""


class InsufficientResamplesError(ValueError):
    """Bootstrap resample count below the supported minimum."""


@dataclass(frozen=True)
class MomentSet:
    """Central moments m2..m6 of a sample; the raw mean is kept separately.

    Invariants (up to floating round-off): m2 >= 0, m4 >= m2^2 and
    m2*m6 >= m4^2 (Cauchy-Schwarz).
    """

    mean: float
    m2: float
    m3: float
    m4: float
    m5: float
    m6: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("moment set needs at least one sample")
        slack = 1e-9 * max(1.0, self.m2 * self.m2, abs(self.m4))
        if self.m2 < -slack:
            raise ValueError(f"negative second moment: {self.m2}")
        if self.m4 < self.m2**2 - slack:
            raise ValueError("m4 < m2^2 violates Cauchy-Schwarz")
        slack6 = 1e-9 * max(1.0, self.m4 * self.m4, abs(self.m6 * self.m2))
        if self.m6 * self.m2 < self.m4**2 - slack6:
            raise ValueError("m2*m6 < m4^2 violates Cauchy-Schwarz")


@dataclass(frozen=True)
class CumulantSet:
    """Cumulants c2..c6 of the sampled continuous distribution.

    Direct estimates from data have c2 >= 0; reference-subtracted sets may
    carry slightly negative c2 from statistical noise, so no sign is
    enforced here.
    """

    c2: float
    c3: float
    c4: float
    c5: float
    c6: float
    count: int


@dataclass(frozen=True)
class PhotonStats:
    """First three photocount moments: mean, variance, third central moment.

    ``fano`` is n_var/n_mean when n_mean > 0 and NaN otherwise.  Estimators
    may go slightly negative on noisy data; that is flagged, never clamped.
    """

    n_mean: float
    n_var: float
    n_skew3: float
    fano: float
    errors: dict[str, float] | None = None
    flags: tuple[str, ...] = ()


class MomentAccumulator:
    """Mergeable single-pass accumulator for central moments up to order six.

    Data are consumed in chunks; within a chunk the power sums are taken
    about the chunk mean (shifted, numerically stable) and chunks combine
    through the exact pooled-moment update.  Merging two partial
    accumulators therefore matches accumulating the concatenated data up
    to round-off.
    """

    __slots__ = ("count", "mean", "_sums")

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        # centered power sums M2..M6, index p-2
        self._sums = np.zeros(5)

    def add(self, values, chunk_size: int = _CHUNK) -> "MomentAccumulator":
        x = np.asarray(values, dtype=float).ravel()
        for start in range(0, x.size, chunk_size):
            self._add_chunk(x[start : start + chunk_size])
        return self

    def _add_chunk(self, x: np.ndarray) -> None:
        n = x.size
        if n == 0:
            return
        mean = x.mean()
        d = x - mean
        d2 = d * d
        d3 = d2 * d
        sums = np.array(
            [d2.sum(), d3.sum(), (d2 * d2).sum(), (d2 * d3).sum(), (d3 * d3).sum()]
        )
        self._combine(n, mean, sums)

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        out = MomentAccumulator()
        out.count, out.mean, out._sums = self.count, self.mean, self._sums.copy()
        out._combine(other.count, other.mean, other._sums)
        return out

    def _combine(self, nb: int, mub: float, Mb: np.ndarray) -> None:
        na, mua, Ma = self.count, self.mean, self._sums
        if nb == 0:
            return
        if na == 0:
            self.count, self.mean, self._sums = nb, mub, Mb.copy()
            return
        n = na + nb
        delta = mub - mua
        sa = -nb * delta / n  # shift of the A points to the pooled mean
        sb = na * delta / n
        new = np.zeros(5)
        for p in range(2, 7):
            # binomial expansion about the pooled mean; M1 terms vanish,
            # M0 terms are the counts
            s = Ma[p - 2] + Mb[p - 2]
            for k in range(1, p - 1):
                s += math.comb(p, k) * (
                    sa**k * Ma[p - k - 2] + sb**k * Mb[p - k - 2]
                )
            s += na * sa**p + nb * sb**p
            new[p - 2] = s
        self.count = n
        self.mean = mua + nb * delta / n
        self._sums = new

    def moments(self) -> MomentSet:
        if self.count < 1:
            raise InsufficientSamplesError("accumulator is empty")
        m = self._sums / self.count
        return MomentSet(self.mean, m[0], m[1], m[2], m[3], m[4], self.count)


def accumulate_moments(batch) -> MomentSet:
    """Central moments m2..m6 of a quadrature batch (or plain array).

    Requires at least 100 samples; below that the order-six moments are
    too noisy to be meaningful.
    """
    samples = getattr(batch, "samples", batch)
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < _MIN_SAMPLES:
        raise InsufficientSamplesError(
            f"need at least {_MIN_SAMPLES} samples, got {x.size}"
        )
    return MomentAccumulator().add(x).moments()


def cumulants_from_moments(m: MomentSet) -> CumulantSet:
    """Standard central-moment to cumulant relations up to order six."""
    c2 = m.m2
    c3 = m.m3
    c4 = m.m4 - 3.0 * m.m2**2
    c5 = m.m5 - 10.0 * m.m3 * m.m2
    c6 = m.m6 - 15.0 * m.m4 * m.m2 - 10.0 * m.m3**2 + 30.0 * m.m2**3
    return CumulantSet(c2, c3, c4, c5, c6, m.count)


def subtract_reference(total: CumulantSet, reference: CumulantSet) -> CumulantSet:
    """Cumulants of the signal alone, using additivity over independent sources.

    The reference record normally contains the vacuum contribution, so the
    result is vacuum-free: pass ``vacuum_included=False`` downstream.  The
    count is the smaller of the two, for error bookkeeping.
    """
    return CumulantSet(
        total.c2 - reference.c2,
        total.c3 - reference.c3,
        total.c4 - reference.c4,
        total.c5 - reference.c5,
        total.c6 - reference.c6,
        min(total.count, reference.count),
    )


def photon_stats_from_cumulants(
    c: CumulantSet, vacuum_included: bool = True
) -> PhotonStats:
    """Invert phase-averaged quadrature cumulants into photocount moments.

    With ``vacuum_included`` the cumulants describe the full measured
    distribution and the conversion is

        n_mean  = c2 - 1/2
        n_var   = (2/3) c4 + c2^2 - 1/4
        n_skew3 = (2/5) c6 + 4 c4 c2 + 2 c2^3 - (1/2) c2

    With ``vacuum_included=False`` (a reference-subtracted set, where the
    reference already carried the vacuum) the vacuum is restored first
    (c2 -> c2 + 1/2) and the same formulas apply.  Using the wrong flag
    double-counts the half-photon of vacuum noise.
    """
    c2 = c.c2 if vacuum_included else c.c2 + 0.5
    n_mean = c2 - 0.5
    n_var = (2.0 / 3.0) * c.c4 + c2 * c2 - 0.25
    n_skew3 = (2.0 / 5.0) * c.c6 + 4.0 * c.c4 * c2 + 2.0 * c2**3 - 0.5 * c2
    flags = []
    if n_mean < 0.0:
        flags.append("negative_n_mean")
    if n_var < 0.0:
        flags.append("negative_n_var")
    if n_mean > 0.0:
        fano = n_var / n_mean
    else:
        fano = math.nan
        flags.append("fano_undefined")
    return PhotonStats(n_mean, n_var, n_skew3, fano, errors=None, flags=tuple(flags))


def _pipeline(x: np.ndarray, ref: np.ndarray | None, vacuum_included: bool) -> PhotonStats:
    cums = cumulants_from_moments(accumulate_moments(x))
    if ref is not None:
        cums = subtract_reference(cums, cumulants_from_moments(accumulate_moments(ref)))
    return photon_stats_from_cumulants(cums, vacuum_included)


def bootstrap_errors(
    batch,
    n_resamples: int,
    seed: int,
    reference=None,
    vacuum_included: bool | None = None,
) -> PhotonStats:
    """Photocount moments with nonparametric bootstrap standard errors.

    Samples are resampled with replacement ``n_resamples`` times (the
    reference batch, when given, is resampled independently) and the full
    cumulant pipeline is rerun per resample.  Deterministic for a fixed
    seed.  ``vacuum_included`` defaults to True for a direct batch and
    False when a reference is subtracted.
    """
    if n_resamples < _MIN_RESAMPLES:
        raise InsufficientResamplesError(
            f"need at least {_MIN_RESAMPLES} resamples, got {n_resamples}"
        )
    x = np.asarray(getattr(batch, "samples", batch), dtype=float).ravel()
    ref = None
    if reference is not None:
        ref = np.asarray(getattr(reference, "samples", reference), dtype=float).ravel()
    if vacuum_included is None:
        vacuum_included = ref is None

    point = _pipeline(x, ref, vacuum_included)

    seq = np.random.SeedSequence(seed)
    rng_x, rng_ref = (np.random.default_rng(s) for s in seq.spawn(2))
    draws = np.empty((n_resamples, 4))
    for b in range(n_resamples):
        xb = x[rng_x.integers(0, x.size, x.size)]
        rb = ref[rng_ref.integers(0, ref.size, ref.size)] if ref is not None else None
        s = _pipeline(xb, rb, vacuum_included)
        draws[b] = (s.n_mean, s.n_var, s.n_skew3, s.fano)
    ses = draws.std(axis=0, ddof=1)
    errors = {
        "n_mean": float(ses[0]),
        "n_var": float(ses[1]),
        "n_skew3": float(ses[2]),
        "fano": float(ses[3]),
    }
    return replace(point, errors=errors)
