"""Weight functions l(t) and finite-range admissibility diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import curve_fit

from .errors import NonMonotoneWeightError, ZeroSetError

FAMILIES = ("log", "power", "exp_sqrt_log", "tabulated")

# Verdict tolerance for the asymptotic conditions, shared by all three checks.
TREND_TOL = 0.05
GRID_PER_DECADE = 40
TREND_DECADES = 2.0


@dataclass(frozen=True)
class Weight:
    """A nondecreasing weight l: [0, inf) -> (0, inf) from a fixed family.

    ``log``:           c * ln(2 + t)
    ``power``:         (1 + t) ** p
    ``exp_sqrt_log``:  exp(q * sqrt(ln(e + t)))
    ``tabulated``:     linear interpolation of (t, l) samples, flat beyond the ends
    """

    family: str
    params: tuple[tuple[str, Any], ...] = ()
    _t: tuple[float, ...] = field(default=(), repr=False)
    _l: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ZeroSetError(f"unknown weight family {self.family!r}")
        p = dict(self.params)
        if self.family == "log" and not p.get("c", 0) > 0:
            raise ZeroSetError("log weight needs c > 0")
        if self.family == "power" and not p.get("p", 0) > 0:
            raise ZeroSetError("power weight needs p > 0")
        if self.family == "exp_sqrt_log" and not p.get("q", 0) > 0:
            raise ZeroSetError("exp_sqrt_log weight needs q > 0")
        if self.family == "tabulated":
            t = np.asarray(self._t, dtype=float)
            v = np.asarray(self._l, dtype=float)
            if t.ndim != 1 or t.size < 2 or t.size != v.size:
                raise ZeroSetError("tabulated weight needs matching t and l samples (>= 2)")
            if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
                raise ZeroSetError("tabulated weight samples must be finite")
            if t[0] != 0.0 or np.any(np.diff(t) <= 0):
                raise ZeroSetError("tabulated grid must start at 0 and increase strictly")
            if np.any(np.diff(v) < 0):
                raise NonMonotoneWeightError("tabulated weight decreases on its grid")
            if np.any(v < 1.0):
                raise ZeroSetError("tabulated weight must satisfy l(t) >= 1")

    @classmethod
    def log(cls, c: float = 1.0) -> "Weight":
        return cls("log", (("c", float(c)),))

    @classmethod
    def power(cls, p: float) -> "Weight":
        return cls("power", (("p", float(p)),))

    @classmethod
    def exp_sqrt_log(cls, q: float = 1.0) -> "Weight":
        return cls("exp_sqrt_log", (("q", float(q)),))

    @classmethod
    def tabulated(cls, t, values) -> "Weight":
        return cls("tabulated", (), tuple(float(x) for x in t), tuple(float(x) for x in values))

    @classmethod
    def from_spec(cls, spec: dict) -> "Weight":
        """Build from a ``{family, params}`` block (params may also be inlined)."""
        spec = dict(spec)
        family = spec.pop("family", None)
        params = dict(spec.pop("params", {}) or {})
        params.update(spec)
        if family == "log":
            return cls.log(float(params.get("c", 1.0)))
        if family == "power":
            return cls.power(float(params["p"]))
        if family == "exp_sqrt_log":
            return cls.exp_sqrt_log(float(params.get("q", 1.0)))
        if family == "tabulated":
            return cls.tabulated(_floats(params["t"]), _floats(params["l"]))
        raise ZeroSetError(f"unknown weight family {family!r}")

    def to_spec(self) -> dict:
        if self.family == "tabulated":
            return {"family": "tabulated", "params": {"t": list(self._t), "l": list(self._l)}}
        return {"family": self.family, "params": dict(self.params)}

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        p = dict(self.params)
        if self.family == "log":
            out = p["c"] * np.log(2.0 + t)
        elif self.family == "power":
            out = (1.0 + t) ** p["p"]
        elif self.family == "exp_sqrt_log":
            out = np.exp(p["q"] * np.sqrt(np.log(math.e + t)))
        else:
            out = np.interp(t, self._t, self._l)
        return float(out) if out.ndim == 0 else out


def _floats(v) -> list[float]:
    if isinstance(v, str):
        v = [x for x in v.replace(";", ",").split(",") if x.strip()]
    return [float(x) for x in v]


@dataclass(frozen=True)
class ConditionEstimate:
    """Finite-range estimate of one asymptotic condition."""

    name: str
    limit_estimate: float      # extrapolated limit of the profile as t -> inf
    trend_slope: float         # d(profile)/d(ln t) over the trend window
    value_at_tmax: float
    passed: bool
    rule: str


@dataclass(frozen=True)
class WeightReport:
    t: np.ndarray
    cond1_ratio_profile: np.ndarray     # ln t / l(t)
    cond2_ratio_profile: np.ndarray     # ln l(t) / ln t
    cond3_ratio_profile: np.ndarray     # l(k t) / l(t)
    cond1: ConditionEstimate
    cond2: ConditionEstimate
    cond3: ConditionEstimate
    t_max: float
    k: float
    min_value: float                    # min l over the grid (paper's range is [1, inf))
    tolerance: float = TREND_TOL

    @property
    def cond2_limsup_estimate(self) -> float:
        return self.cond2.limit_estimate

    @property
    def cond3_sup_estimate(self) -> float:
        return self.cond3.limit_estimate

    @property
    def verdicts(self) -> dict[str, bool]:
        return {"cond1": self.cond1.passed, "cond2": self.cond2.passed, "cond3": self.cond3.passed}

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_dict(self) -> dict:
        out = {"t_max": self.t_max, "k": self.k, "tolerance": self.tolerance,
               "min_value": self.min_value}
        for c in (self.cond1, self.cond2, self.cond3):
            out[c.name] = {"limit_estimate": c.limit_estimate, "trend_slope": c.trend_slope,
                           "value_at_tmax": c.value_at_tmax, "passed": c.passed, "rule": c.rule}
        return out


def extrapolate_limit(u: np.ndarray, g: np.ndarray, floor: float) -> float:
    """Estimate lim g as u -> inf from samples on a window of u = ln t.

    Fits ``g = A + B * u**(-s)``.  A fitted ``s <= 0`` means the profile is
    not settling: it grows without bound (``inf``) or keeps falling towards
    ``floor``, the a-priori lower bound of the profile, at which every
    estimate is clamped.
    """
    u = np.asarray(u, dtype=float)
    g = np.asarray(g, dtype=float)
    scale = max(1.0, abs(g[-1]))
    if np.ptp(g) <= 1e-12 * scale:
        return max(float(g[-1]), floor)
    p0 = (g[-1], (g[0] - g[-1]) * u[0], 1.0)
    try:
        (a, b, s), _ = curve_fit(lambda x, a, b, s: a + b * x ** (-s), u, g, p0=p0,
                                 bounds=([-np.inf, -np.inf, -4.0], [np.inf, np.inf, 8.0]),
                                 maxfev=20000)
    except (RuntimeError, ValueError):
        return max(float(g[-1]), floor)
    if s <= 1e-3:
        return math.inf if g[-1] > g[0] else floor
    return max(float(a), floor)


def _slope(u, g) -> float:
    return float(np.polyfit(u, g, 1)[0])


def check_weight(w: Weight, t_max: float = 1e6, k: float = 2.0) -> WeightReport:
    """Audit the three admissibility conditions on a geometric grid up to ``t_max``.

    Decision rules (trend window = last two decades of the grid, tol = 0.05):

    * cond1, ``ln t = O(l(t))``: pass iff ``ln t / l(t)`` has a finite
      extrapolated limit and its slope against ``ln t`` is at most tol.
    * cond2, ``limsup ln l(t) / ln t < 1/2``: pass iff the extrapolated limit
      is below ``1/2 - tol``.
    * cond3, ``limsup l(k t) / l(t) < inf``: pass iff the extrapolated limit
      is finite and the slope against ``ln t`` is at most tol.
    """
    if t_max < 1e3:
        raise ZeroSetError("t_max must be at least 1e3")
    if not k > 1:
        raise ZeroSetError("k must exceed 1")
    n = int(round(GRID_PER_DECADE * (math.log10(t_max) - math.log10(math.e)))) + 1
    t = np.geomspace(math.e, t_max, n)
    lt = np.asarray(w(t), dtype=float)
    lkt = np.asarray(w(k * t), dtype=float)
    l0 = float(w(0.0))
    if np.any(np.diff(np.concatenate([[l0], lt])) < 0) or np.any(lkt < lt):
        raise NonMonotoneWeightError(f"{w.family} weight decreases on the sampled grid")

    u = np.log(t)
    c1 = u / lt
    c2 = np.log(lt) / u
    c3 = lkt / lt

    win = t >= t_max / 10 ** TREND_DECADES
    uw = u[win]

    lim1 = extrapolate_limit(uw, c1[win], 0.0)
    s1 = _slope(uw, c1[win])
    lim2 = extrapolate_limit(uw, c2[win], 0.0)
    s2 = _slope(uw, c2[win])
    lim3 = extrapolate_limit(uw, c3[win], 1.0)
    s3 = _slope(uw, c3[win])
    tol = TREND_TOL

    cond1 = ConditionEstimate("cond1", lim1, s1, float(c1[-1]),
                              bool(math.isfinite(lim1) and s1 <= tol),
                              f"finite extrapolated limit and slope <= {tol}")
    cond2 = ConditionEstimate("cond2", lim2, s2, float(c2[-1]), bool(lim2 < 0.5 - tol),
                              f"extrapolated limit < {0.5 - tol}")
    cond3 = ConditionEstimate("cond3", lim3, s3, float(c3[-1]),
                              bool(math.isfinite(lim3) and s3 <= tol),
                              f"finite extrapolated limit and slope <= {tol}")
    return WeightReport(t, c1, c2, c3, cond1, cond2, cond3, float(t_max), float(k),
                        float(min(l0, lt.min())))
