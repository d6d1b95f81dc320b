"""Classicality tests on reconstructed photocount moments.

Three conditions every classical photocount distribution satisfies:

1. variance:  n_var >= n_mean
2. limit:     n_var -> n_mean as n_mean -> 0
3. third:     n_skew3 >= n_mean + 3 (n_var - n_mean)(1 - n_mean)

Condition 2 is a statement about a family of states approaching vacuum and
is not pointwise-testable.  It is operationalized here as: in the
small-occupation regime (n_mean < n_small) the variance must not exceed
the thermal envelope n_mean (1 + n_mean).  Thermal and Poisson statistics
sit on or below that envelope at every occupation, so genuinely classical
references are never flagged, while pair-emission statistics (variance of
order n_mean at vanishing n_mean, Fano factor ~ 2) stand far above it.

Margins are signed distances in units of the condition's standard error
(positive = classical side).  Standard errors of the condition statistics
are combined from the per-field bootstrap errors in quadrature, which is
conservative (it ignores correlations and can only widen the inconclusive
band, never produce a spurious violation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .moments import PhotonStats

PASS = "pass"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"


class ConfigurationError(ValueError):
    """Statistical classification requested without error bars."""


@dataclass(frozen=True)
class ClassicalityReport:
    cond_variance: str
    cond_limit: str
    cond_third: str
    fano: float
    margins: dict[str, float] = field(default_factory=dict)
    verdict: str = "classical"
    k_sigma: float = 3.0
    n_small: float = 0.1

    def to_dict(self) -> dict:
        return {
            "cond_variance": self.cond_variance,
            "cond_limit": self.cond_limit,
            "cond_third": self.cond_third,
            "fano": self.fano,
            "margins": dict(self.margins),
            "verdict": self.verdict,
            "k_sigma": self.k_sigma,
            "n_small": self.n_small,
        }


def third_moment_floor(n_mean: float, n_var: float) -> float:
    """Classical lower bound on the third central photocount moment."""
    return n_mean + 3.0 * (n_var - n_mean) * (1.0 - n_mean)


# exact-mode (k_sigma = 0) inputs are floats: a violation smaller than
# round-off on the condition statistic cannot be certified
_ROUND_OFF = 1e-12


def _status(margin: float, k_sigma: float, scale: float = 1.0) -> str:
    if not math.isfinite(margin):
        return INCONCLUSIVE
    if k_sigma == 0.0:
        return PASS if margin >= -_ROUND_OFF * scale else VIOLATED
    if margin < -k_sigma:
        return VIOLATED
    if margin > k_sigma:
        return PASS
    return INCONCLUSIVE


def classify(
    stats: PhotonStats, k_sigma: float = 3.0, n_small: float = 0.1
) -> ClassicalityReport:
    """Evaluate the three classicality conditions on reconstructed moments.

    With k_sigma = 0 the inputs are treated as exact and margins are raw
    distances; otherwise ``stats`` must carry bootstrap errors and margins
    are measured in standard errors.  Any violated condition makes the
    overall verdict nonclassical.
    """
    if k_sigma < 0:
        raise ConfigurationError("k_sigma must be nonnegative")
    if k_sigma > 0 and not stats.errors:
        raise ConfigurationError(
            "k_sigma > 0 requires bootstrap error bars on the input stats"
        )
    err = stats.errors or {}
    se_n = err.get("n_mean", 0.0)
    se_v = err.get("n_var", 0.0)
    se_t = err.get("n_skew3", 0.0)
    n, v, t = stats.n_mean, stats.n_var, stats.n_skew3

    # condition 1: variance at or above the Poisson line
    g1 = v - n
    se1 = math.hypot(se_v, se_n)
    m1 = g1 / se1 if k_sigma > 0 else g1

    # condition 2: variance within the thermal envelope near vacuum;
    # excess variance there is the pair-emission signature
    g2 = n * (1.0 + n) - v
    se2 = math.hypot(se_v, (1.0 + 2.0 * abs(n)) * se_n)
    m2 = g2 / se2 if k_sigma > 0 else g2
    in_limit_regime = n < n_small

    # condition 3: third-moment floor
    g3 = t - third_moment_floor(n, v)
    se3 = math.sqrt(
        se_t**2
        + (3.0 * abs(1.0 - n) * se_v) ** 2
        + ((1.0 + 3.0 * abs(v - n) + 3.0 * abs(1.0 - n)) * se_n) ** 2
    )
    m3 = g3 / se3 if k_sigma > 0 else g3

    scale1 = max(1.0, abs(v), abs(n))
    scale2 = max(1.0, n * (1.0 + n), abs(v))
    scale3 = max(1.0, abs(t), abs(n), 3.0 * abs(v - n) * abs(1.0 - n))
    cond1 = _status(m1, k_sigma, scale1)
    cond2 = _status(m2, k_sigma, scale2) if in_limit_regime else PASS
    cond3 = _status(m3, k_sigma, scale3)

    statuses = (cond1, cond2, cond3)
    if VIOLATED in statuses:
        verdict = "nonclassical"
    elif INCONCLUSIVE in statuses:
        verdict = INCONCLUSIVE
    else:
        verdict = "classical"
    return ClassicalityReport(
        cond_variance=cond1,
        cond_limit=cond2,
        cond_third=cond3,
        fano=stats.fano,
        margins={"variance": float(m1), "limit": float(m2), "third": float(m3)},
        verdict=verdict,
        k_sigma=k_sigma,
        n_small=n_small,
    )


def boundary_curve(n_grid) -> np.ndarray:
    """Classical lower envelope of the variance over a mean-photon grid.

    Returns columns (n, n_var_min) with n_var_min = n: points below the
    line violate condition 1.  The small-occupation (condition 2) domain
    is not a curve in this plane; use :func:`classify` for it.
    """
    n = np.asarray(n_grid, dtype=float)
    if n.ndim != 1:
        raise ValueError("n_grid must be 1-d")
    if n.size and (np.any(n < 0) or np.any(np.diff(n) < 0)):
        raise ValueError("n_grid must be sorted and nonnegative")
    return np.column_stack([n, n])
