"""Syndrome-based QBER estimation.

After syndrome exchange the relative syndrome is free evidence about the
channel: a parity check over d independent positions flips with probability

    xor_prob(q, d) = (1 - (1 - 2q)**d) / 2.

Rows touching punctured positions see uniformly random bits and carry no
information, so they are dropped; shortened positions hold an agreed value
and simply reduce a row's effective degree. The per-row likelihood over the
remaining rows, optionally multiplied by a smooth window prior over the
plausible QBER range, is maximized on a fixed 512-point grid followed by
bounded Brent refinement.

The mixed estimator averages this syndrome estimate with the previous
block's realized error rate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .exceptions import EstimationError
from .extension import ExtensionLayout
from .ldpc import ParityCheckMatrix, as_bit_block

_LN2 = math.log(2.0)
_GRID_POINTS = 512
_GRID_LOW = 1e-4
_GRID_HIGH = 0.5 - 1e-4
_BRENT_XATOL = 1e-8


def xor_prob(q, degree: int):
    """Probability that the XOR of `degree` independent BSC(q) errors is 1.

    Closed form of the odd-term binomial sum; scalar or vector in q.
    Degree 0 gives 0 (an empty parity never flips).
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    qa = np.asarray(q, dtype=np.float64)
    if np.any(qa < 0.0) or np.any(qa > 0.5):
        raise ValueError("q outside [0, 0.5]")
    out = 0.5 * (1.0 - (1.0 - 2.0 * qa) ** degree)
    return out if isinstance(q, np.ndarray) else float(out)


def p_ml(delta_s, profile: "EffectiveDegreeProfile") -> float:
    """Mean relative-syndrome value over the usable rows."""
    delta = as_bit_block(delta_s, profile.eff_degree.size)
    if profile.m_eff == 0:
        raise EstimationError("no usable rows to average over")
    return float(delta[profile.usable].mean())


def q_ml_regular(p_est: float, degree: int) -> float:
    """Invert xor_prob for a code whose usable rows share one degree.

    p_est at or above 0.5 is clamped to 0.5 - 1e-9 with a warning; that only
    happens through sampling noise at very small row counts.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if p_est < 0.0:
        raise ValueError("p_est must be non-negative")
    if p_est >= 0.5:
        warnings.warn(
            "p_est %g >= 0.5 clamped; too few rows for a stable estimate" % p_est,
            RuntimeWarning,
            stacklevel=2,
        )
        p_est = 0.5 - 1e-9
    return 0.5 * (1.0 - (1.0 - 2.0 * p_est) ** (1.0 / degree))


@dataclass(frozen=True)
class EffectiveDegreeProfile:
    """Per-row degrees after the layout is applied.

    eff_degree: row degree minus its shortened positions (meaningful for
    non-punctured rows). punctured_row: the row touches a punctured position
    and is uniform noise. usable: rows that enter the likelihood (not
    punctured, effective degree > 0).
    """

    eff_degree: np.ndarray
    punctured_row: np.ndarray
    usable: np.ndarray

    def __post_init__(self):
        if not (
            self.eff_degree.size == self.punctured_row.size == self.usable.size
        ):
            raise ValueError("profile arrays must share one length")

    @property
    def m_eff(self) -> int:
        return int(self.usable.sum())


def effective_degrees(
    matrix: ParityCheckMatrix, layout: ExtensionLayout
) -> EffectiveDegreeProfile:
    """Classify rows of `matrix` under `layout`."""
    if layout.frame_len != matrix.n:
        raise ValueError("layout frame length differs from matrix n")
    punct = np.zeros(matrix.n, dtype=bool)
    punct[layout.punctured] = True
    short = np.zeros(matrix.n, dtype=bool)
    short[layout.shortened] = True
    starts = matrix.row_ptr[:-1]
    punct_hits = np.add.reduceat(punct[matrix.col_index].astype(np.int64), starts)
    short_hits = np.add.reduceat(short[matrix.col_index].astype(np.int64), starts)
    eff = matrix.row_degrees() - short_hits
    punctured_row = punct_hits > 0
    usable = ~punctured_row & (eff > 0)
    return EffectiveDegreeProfile(
        eff_degree=eff, punctured_row=punctured_row, usable=usable
    )


@dataclass(frozen=True)
class QberWindowPrior:
    """Smooth sigmoid window over the QBER values considered plausible."""

    alpha_low: float
    alpha_high: float
    q_min: float
    q_max: float

    def __post_init__(self):
        if self.alpha_low <= 0.0 or self.alpha_high <= 0.0:
            raise ValueError("window slopes must be positive")
        if not 0.0 < self.q_min < self.q_max < 0.5:
            raise ValueError("need 0 < q_min < q_max < 0.5")


def window_log_prior(q, prior: QberWindowPrior):
    """Log of the sigmoid window, stable for arbitrarily steep slopes."""
    qa = np.asarray(q, dtype=np.float64)
    # log sigmoid(x) = -log(1 + exp(-x)), via logaddexp for stability.
    lo = -np.logaddexp(0.0, -prior.alpha_low * (qa - prior.q_min))
    hi = -np.logaddexp(0.0, -prior.alpha_high * (prior.q_max - qa))
    out = lo + hi
    return out if isinstance(q, np.ndarray) else float(out)


class _DegreeTally:
    """Relative-syndrome counts grouped by distinct effective degree."""

    __slots__ = ("degrees", "ones", "zeros")

    def __init__(self, delta, profile):
        eff = profile.eff_degree[profile.usable]
        hits = delta[profile.usable].astype(np.float64)
        self.degrees, inverse = np.unique(eff, return_inverse=True)
        self.ones = np.bincount(inverse, weights=hits)
        self.zeros = np.bincount(inverse) - self.ones

    def log_likelihood(self, q):
        qa = np.atleast_1d(np.asarray(q, dtype=np.float64))
        w = (1.0 - 2.0 * qa)[:, None] ** self.degrees[None, :]
        terms = self.ones * (np.log1p(-w) - _LN2) + self.zeros * (np.log1p(w) - _LN2)
        return terms.sum(axis=1)


def _check_consistency(delta, profile):
    dead = ~profile.punctured_row & (profile.eff_degree == 0)
    if np.any(dead & (delta == 1)):
        raise EstimationError(
            "relative syndrome bit set on a row with no free positions; "
            "inputs are inconsistent"
        )


def log_likelihood(q, delta_s, profile: EffectiveDegreeProfile):
    """Log-likelihood of QBER q given the relative syndrome.

    Sum over usable rows of log P(delta_s_i | q, effective degree). Accepts a
    scalar or array q inside (0, 0.5). Raises EstimationError when the inputs
    are impossible under any q.
    """
    delta = as_bit_block(delta_s, profile.eff_degree.size)
    _check_consistency(delta, profile)
    qa = np.asarray(q, dtype=np.float64)
    if np.any(qa <= 0.0) or np.any(qa >= 0.5):
        raise ValueError("q outside (0, 0.5)")
    tally = _DegreeTally(delta, profile)
    out = tally.log_likelihood(qa)
    return out if isinstance(q, np.ndarray) else float(out[0])


@dataclass(frozen=True)
class EstimateResult:
    qber: float
    log_posterior: float
    m_eff: int
    iterations: int
    converged: bool


def estimate_qber_syndrome(
    delta_s, profile: EffectiveDegreeProfile, prior: QberWindowPrior | None = None
) -> EstimateResult:
    """Maximize the (windowed) syndrome likelihood over q in (0, 0.5).

    A 512-point grid scan brackets the global maximum, then bounded Brent
    refinement polishes it to ~1e-7 in q. `prior=None` runs the pure
    maximum-likelihood variant.
    """
    delta = as_bit_block(delta_s, profile.eff_degree.size)
    _check_consistency(delta, profile)
    if profile.m_eff == 0:
        raise EstimationError("no usable rows; cannot estimate")
    tally = _DegreeTally(delta, profile)

    def objective(qa):
        post = tally.log_likelihood(qa)
        if prior is not None:
            post = post + window_log_prior(np.atleast_1d(qa), prior)
        return post

    grid = np.linspace(_GRID_LOW, _GRID_HIGH, _GRID_POINTS)
    values = objective(grid)
    peak = int(np.argmax(values))
    lo = grid[max(peak - 1, 0)]
    hi = grid[min(peak + 1, _GRID_POINTS - 1)]

    res = minimize_scalar(
        lambda x: -float(objective(np.float64(x))[0]),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": _BRENT_XATOL},
    )
    best_q = float(res.x)
    best_val = -float(res.fun)
    if values[peak] > best_val:
        best_q = float(grid[peak])
        best_val = float(values[peak])
    return EstimateResult(
        qber=best_q,
        log_posterior=best_val,
        m_eff=profile.m_eff,
        iterations=int(getattr(res, "nfev", 0)),
        converged=bool(res.success),
    )


def estimate_mixed(q_prev: float, q_synd: float) -> float:
    """Average of the previous-block and syndrome estimates."""
    for name, v in (("q_prev", q_prev), ("q_synd", q_synd)):
        if not 0.0 < v < 0.5:
            raise ValueError("%s outside (0, 0.5)" % name)
    return 0.5 * (q_prev + q_synd)
