"""Counting statistics for real parts of near-real zeros and the finite-range bound check."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CoverageError, ZeroSetError
from .weights import Weight
from .zero_model import NearRealPartition, ZeroSequence

BOUNDED = "bounded"
UNBOUNDED = "unbounded_trend"
INCONCLUSIVE = "inconclusive"

THRESHOLD_SLOPE = 0.05
UNBOUNDED_FACTOR = 3.0
MIN_DECADES = 2.0


@dataclass(frozen=True)
class RatioProfile:
    xs: np.ndarray
    counts: np.ndarray
    weights: np.ndarray
    ratios: np.ndarray
    sup_ratio: float
    trend_slope: float

    def rows(self):
        """(x, m_Re, l, ratio) in probe order."""
        return list(zip(self.xs.tolist(), self.counts.tolist(), self.weights.tolist(),
                        self.ratios.tolist()))

    def to_dict(self) -> dict:
        return {"sup_ratio": self.sup_ratio, "trend_slope": self.trend_slope,
                "n_probes": int(self.xs.size)}


@dataclass(frozen=True)
class Theorem1Result:
    verdict: str
    profile: RatioProfile
    threshold_slope: float
    decades: float

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "threshold_slope": self.threshold_slope,
                "unbounded_slope": UNBOUNDED_FACTOR * self.threshold_slope,
                "decades": self.decades, **self.profile.to_dict()}


def _sorted_real_parts(p: NearRealPartition, zs: ZeroSequence) -> np.ndarray:
    if len(p) != len(zs):
        raise ZeroSetError("partition does not belong to this sequence")
    return np.sort(zs.re[p.m_prime])


def m_re(p: NearRealPartition, zs: ZeroSequence, x: float, r: float = 1.0) -> int:
    """Number of near-real zeros with Re mu in the closed segment [x - r, x + r]."""
    return int(m_re_many(p, zs, [x], r)[0])


def m_re_many(p: NearRealPartition, zs: ZeroSequence, xs, r: float = 1.0) -> np.ndarray:
    if not r > 0:
        raise ZeroSetError("r must be positive")
    re = _sorted_real_parts(p, zs)
    xs = np.asarray(xs, dtype=float)
    lo = np.searchsorted(re, xs - r, side="left")
    hi = np.searchsorted(re, xs + r, side="right")
    return (hi - lo).astype(np.int64)


def running_max_slope(xs: np.ndarray, ratios: np.ndarray) -> float:
    """Least-squares slope of ln(running max of ratio) against ln|x|."""
    order = np.argsort(np.abs(xs), kind="stable")
    ax = np.abs(xs[order])
    rm = np.maximum.accumulate(ratios[order])
    ok = (rm > 0) & (ax > 0)
    if ok.sum() < 2 or np.ptp(np.log(ax[ok])) == 0:
        return 0.0
    return float(np.polyfit(np.log(ax[ok]), np.log(rm[ok]), 1)[0])


def ratio_profile(p: NearRealPartition, zs: ZeroSequence, w: Weight,
                  xs: Sequence[float]) -> RatioProfile:
    xs = np.asarray(xs, dtype=float)
    counts = m_re_many(p, zs, xs)
    wt = np.asarray(w(np.abs(xs)), dtype=float).reshape(xs.shape)
    ratios = counts / wt
    sup = float(ratios.max()) if ratios.size else 0.0
    return RatioProfile(xs, counts, wt, ratios, sup, running_max_slope(xs, ratios))


def profile_probes(zs: ZeroSequence, p: NearRealPartition, x_range, n: int = 200) -> np.ndarray:
    """Log-spaced probes plus every candidate cluster center inside the range.

    Candidates are, within each gap between consecutive log probes, the
    real part of a near-real zero whose unit window holds the most zeros, so
    a narrow cluster cannot hide between probes.
    """
    x_min, x_max = map(float, x_range)
    base = np.geomspace(x_min, x_max, n)
    re = _sorted_real_parts(p, zs)
    re = re[(re >= x_min) & (re <= x_max)]
    extra = []
    if re.size:
        cnt = np.searchsorted(re, re + 1.0, side="right") - np.searchsorted(re, re - 1.0)
        gap = np.searchsorted(base, re)
        for g in np.unique(gap):
            sel = np.nonzero(gap == g)[0]
            extra.append(re[sel[np.argmax(cnt[sel])]])
    return np.unique(np.concatenate([base, np.asarray(extra, float)]))


def theorem1_check(p: NearRealPartition, zs: ZeroSequence, w: Weight, x_range,
                   threshold_slope: float = THRESHOLD_SLOPE, n_probes: int = 200,
                   xs: Sequence[float] | None = None) -> Theorem1Result:
    """Finite-range verdict on limsup m_Re(x, 1) / l(|x|) < inf.

    bounded:          running-max slope <= threshold_slope
    unbounded_trend:  slope > 3 * threshold_slope over at least two decades
    inconclusive:     anything else
    """
    x_min, x_max = map(float, x_range)
    if not 0 < x_min < x_max:
        raise ZeroSetError("need 0 < x_min < x_max")
    if x_max > zs.coverage_radius - 1.0:
        raise CoverageError(f"range end {x_max:g} exceeds coverage radius - 1 "
                            f"= {zs.coverage_radius - 1.0:g}")
    probes = profile_probes(zs, p, (x_min, x_max), n_probes) if xs is None else np.asarray(xs)
    prof = ratio_profile(p, zs, w, probes)
    decades = math.log10(x_max / x_min)
    s = prof.trend_slope
    if s <= threshold_slope:
        verdict = BOUNDED
    elif s > UNBOUNDED_FACTOR * threshold_slope and decades >= MIN_DECADES:
        verdict = UNBOUNDED
    else:
        verdict = INCONCLUSIVE
    return Theorem1Result(verdict, prof, float(threshold_slope), decades)
