"""Witness searches for the slowly-decreasing criterion and Prop. 1 lower bounds.

An *evaluator* is any callable mapping an array of (real or complex) points
to ln|phi| there, with NaN where the value is unavailable (non-converged
product).  Evaluators may expose ``localize(center, radius)`` returning a
faster callable valid on the disc of that radius; the searches use it when
present.  :class:`zerosets.product_engine.LineEvaluator` is the standard one.

Slowly decreasing with constant a (probe x, witness x'):

    |x - x'| <= a ln(2 + |x|)    and    ln|phi(x')| >= -a ln(a + |x'|).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ZeroSetError
from .weights import Weight
from .zero_model import ComplexPoint

GRID_CELLS = 2048
MIN_STEP = 0.01
GOLDEN_ITERS = 20
REFINE_PEAKS = 8
BLOCK = 256
FIT_FLOOR = 1e-3
FIT_REL = 0.01
A_MAX = 64.0
DISC_ANGLES = 64
DISC_RADII = 64

Evaluator = Callable[[np.ndarray], np.ndarray]


def margin(threshold: float) -> float:
    """Safety margin a witness must clear, so re-evaluation noise cannot flip it."""
    return 1e-9 * (1.0 + abs(threshold))


def sd_threshold(a: float, xp):
    return -a * np.log(a + np.abs(xp))


def sd_window(a: float, x: float) -> float:
    return a * math.log(2.0 + abs(x))


def default_step(half_width: float) -> float:
    return max(MIN_STEP, 2.0 * half_width / GRID_CELLS)


def _local(f, center, radius: float) -> Evaluator:
    loc = getattr(f, "localize", None)
    return loc(center, radius) if loc is not None else f


def _eval(g: Evaluator, pts) -> np.ndarray:
    return np.asarray(g(np.asarray(pts)), dtype=float).reshape(-1)


@dataclass(frozen=True)
class SDWitness:
    x: float
    x_prime: float
    log_mod: float
    threshold: float
    found: bool
    a: float = math.nan
    flagged: int = 0          # grid points where the evaluator returned NaN

    def to_dict(self) -> dict:
        return {k: _jf(v) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class SlowDecreaseReport:
    a: float
    probes: tuple[SDWitness, ...]
    pass_fraction: float
    range: tuple[float, float]

    @property
    def passed(self) -> bool:
        return self.pass_fraction == 1.0

    @property
    def flagged(self) -> int:
        return sum(1 for w in self.probes if w.flagged)

    def to_dict(self) -> dict:
        return {"a": self.a, "pass_fraction": self.pass_fraction, "range": list(self.range),
                "flagged_probes": self.flagged, "probes": [w.to_dict() for w in self.probes]}


@dataclass(frozen=True)
class Prop1Witness:
    x: float
    z_prime: ComplexPoint
    log_mod: float
    bound: float
    found: bool
    m1: float = math.nan
    flagged: int = 0

    def to_dict(self) -> dict:
        return {"x": self.x, "z_prime": [self.z_prime.re, self.z_prime.im],
                "log_mod": _jf(self.log_mod), "bound": self.bound, "found": self.found,
                "m1": self.m1, "flagged": self.flagged}


def _jf(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


# --- generic 1-d window search ---------------------------------------------

def _limits(x: float, half: float) -> tuple[float, float]:
    """Window ends, pulled inward until |end - x| <= half holds in floating point."""
    lo, hi = x - half, x + half
    while abs(lo - x) > half:
        lo = math.nextafter(lo, x)
    while abs(hi - x) > half:
        hi = math.nextafter(hi, x)
    return lo, hi


def _search_line(g: Evaluator, x: float, half: float, step: float,
                 bound: Callable[[np.ndarray], np.ndarray], polish: bool = False):
    """Nearest grid point x + k*step (|k*step| <= half) with g >= bound + margin.

    With ``polish`` the hit is moved to the top of its hump (grid climb away
    from x, then golden section).  Without a hit, golden-section refinement
    runs around the best local maxima of g - bound.
    Returns (point, value, bound_at_point, found, n_nan).
    """
    kmax = int(math.floor(half / step + 1e-9))
    ks = np.arange(0, kmax + 1)
    order = np.empty(2 * ks.size - 1, dtype=np.int64)
    order[0] = 0
    order[1::2] = ks[1:]
    order[2::2] = -ks[1:]
    best = (-math.inf, x, math.nan, math.nan)
    excess_all = np.full(order.size, -math.inf)
    lo_lim, hi_lim = _limits(x, half)
    n_nan = 0
    s, size = 0, 8
    while s < order.size:
        e = min(order.size, s + size)
        pts = np.clip(x + order[s:e] * step, lo_lim, hi_lim)
        vals = _eval(g, pts)
        thr = bound(pts)
        nan = np.isnan(vals)
        n_nan += int(nan.sum())
        exc = np.where(nan, -math.inf, vals - thr)
        excess_all[s:e] = exc
        ok = np.nonzero(exc >= 1e-9 * (1.0 + np.abs(thr)))[0]
        if ok.size:
            i = ok[0]
            hit = (float(pts[i]), float(vals[i]), float(thr[i]), True, n_nan)
            return _polish(g, x, half, step, bound, hit) if polish else hit
        j = int(np.argmax(exc))
        if exc[j] > best[0]:
            best = (float(exc[j]), float(pts[j]), float(vals[j]), float(thr[j]))
        s, size = e, min(2 * size, BLOCK)

    # refinement: golden section around the largest local maxima on the grid
    grid_order = np.argsort(order, kind="stable")
    ex = excess_all[grid_order]
    kk = order[grid_order]
    left = np.concatenate([[-math.inf], ex[:-1]])
    right = np.concatenate([ex[1:], [-math.inf]])
    peaks = np.nonzero(np.isfinite(ex) & (ex >= left) & (ex >= right))[0]
    peaks = peaks[np.argsort(-ex[peaks], kind="stable")][:REFINE_PEAKS]
    for i in peaks:
        c = float(np.clip(x + kk[i] * step, lo_lim, hi_lim))
        a_, b_ = max(lo_lim, c - step), min(hi_lim, c + step)

        try:
            res = minimize_scalar(lambda t: -_excess(g, bound, t), bracket=(a_, c, b_),
                                  method="golden", options={"maxiter": GOLDEN_ITERS})
            t = float(np.clip(res.x, lo_lim, hi_lim))
        except (ValueError, RuntimeError):
            continue
        v = _eval(g, [t])[0]
        thr = float(bound(np.array([t]))[0])
        if not math.isnan(v) and v - thr >= margin(thr):
            return t, float(v), thr, True, n_nan
        if not math.isnan(v) and v - thr > best[0]:
            best = (v - thr, t, float(v), thr)
    return best[1], best[2], best[3], False, n_nan


def _polish(g, x, half, step, bound, hit):
    t0, _, _, _, n_nan = hit
    d = 1.0 if t0 >= x else -1.0
    lo_lim, hi_lim = _limits(x, half)
    pts = np.clip(t0 + d * step * np.arange(0, BLOCK), lo_lim, hi_lim)
    vals = _eval(g, pts)
    vals = np.where(np.isnan(vals), -math.inf, vals)
    up = np.nonzero(~(np.diff(vals) > 0))[0]
    i = int(up[0]) if up.size else vals.size - 1
    c = float(pts[i])
    best = (float(vals[i]), c)
    a_, b_ = max(lo_lim, c - step), min(hi_lim, c + step)
    if i > 0 and a_ < c < b_:
        try:
            res = minimize_scalar(lambda t: -_value(g, t), bracket=(a_, c, b_),
                                  method="golden", options={"maxiter": GOLDEN_ITERS})
            t = float(np.clip(res.x, a_, b_))
            best = max(best, (_value(g, t), t))
        except (ValueError, RuntimeError):
            pass
    v, t = best
    b = float(bound(np.array([t]))[0])
    if not v - b >= margin(b):
        return hit
    return t, v, b, True, n_nan


def _value(g, t: float) -> float:
    v = _eval(g, [t])[0]
    return -math.inf if math.isnan(v) else float(v)


def _excess(g, bound, t: float) -> float:
    v = _eval(g, [t])[0]
    return -math.inf if math.isnan(v) else float(v - bound(np.array([t]))[0])


# --- slowly decreasing -------------------------------------------------------

def sd_witness(f: Evaluator, x: float, a: float, step: float | None = None) -> SDWitness:
    """Search [x - a ln(2+|x|), x + a ln(2+|x|)] for a point with ln|phi| >= -a ln(a+|x'|).

    The grid is anchored at x with spacing ``step`` (default
    ``max(0.01, window / 2048)``) and scanned outward, so the returned
    witness is the nearest grid point that qualifies.
    """
    if not a > 0:
        raise ZeroSetError("a must be positive")
    x = float(x)
    half = sd_window(a, x)
    step = default_step(half) if step is None else float(step)
    g = _local(f, x, half)
    xp, v, thr, found, n_nan = _search_line(g, x, half, step, lambda t: sd_threshold(a, t),
                                            polish=True)
    if math.isnan(thr):
        thr = float(sd_threshold(a, xp))
    return SDWitness(x, xp, v, thr, found, float(a), n_nan)


def sd_scan(f: Evaluator, xs: Sequence[float], a: float, step=None) -> SlowDecreaseReport:
    """Run :func:`sd_witness` at every probe; ``step`` may be a float or a callable of x."""
    xs = [float(x) for x in xs]
    if not xs:
        raise ZeroSetError("sd_scan needs at least one probe")
    out = []
    for x in xs:
        s = step(x) if callable(step) else step
        out.append(sd_witness(f, x, a, s))
    frac = sum(w.found for w in out) / len(out)
    return SlowDecreaseReport(float(a), tuple(out), frac, (min(xs), max(xs)))


def log_probes(x_min: float, x_max: float, n: int) -> np.ndarray:
    if n < 0:
        raise ZeroSetError("probe count must be nonnegative")
    if n == 0:
        return np.zeros(0)
    if n == 1:
        return np.array([float(x_min)])
    return np.geomspace(x_min, x_max, n)


def fit_step(a_max: float):
    """Probe-anchored grid step shared by every trial a, so windows are nested."""
    return lambda x: default_step(sd_window(a_max, x))


def fit_a(f: Evaluator, x_range: tuple[float, float], n_probes: int = 24,
          a_max: float = A_MAX, probes: Sequence[float] | None = None,
          floor: float = FIT_FLOOR, rel: float = FIT_REL) -> float | None:
    """Smallest a (to relative ``rel``) with pass_fraction 1 on the probe set, or None.

    Probes are ``n_probes`` log-spaced points in ``x_range`` plus ``probes``.
    Every trial a uses the grid of the widest window (a = a_max), anchored at
    the probe, so a larger a searches a superset of points against a lower
    threshold: the pass/fail predicate is monotone and bisection is exact.
    """
    x_min, x_max = map(float, x_range)
    if x_min < 2:
        raise ZeroSetError("x_min must be >= 2")
    if not (a_max > floor > 0):
        raise ZeroSetError("need a_max > floor > 0")
    extra = np.asarray(probes if probes is not None else [], float)
    xs = np.unique(np.concatenate([log_probes(x_min, x_max, n_probes), extra]))
    if xs.size == 0:
        raise ZeroSetError("fit_a needs at least one probe")
    step = fit_step(a_max)
    # one local expansion per probe at the widest window, reused by every trial
    evs = {x: _local(f, x, sd_window(a_max, x)) for x in xs}
    hard = []     # probes that failed before are tried first

    def passes(a: float) -> bool:
        for x in hard + [x for x in xs if x not in hard]:
            if not _search_line(evs[x], x, sd_window(a, x), step(x),
                                lambda t: sd_threshold(a, t))[3]:
                if x not in hard:
                    hard.insert(0, x)
                return False
        return True

    if not passes(a_max):
        return None
    if passes(floor):
        return floor
    lo, hi = floor, a_max
    while hi / lo > 1.0 + rel:
        mid = math.sqrt(lo * hi)
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi


# --- Prop. 1 ---------------------------------------------------------------

def prop1_witness(f1: Evaluator, x: float, m1: float, w: Weight,
                  search: str = "real_interval") -> Prop1Witness:
    """Look for z' with |z' - x| <= M1 l(|x|) and ln|psi_1(z')| >= -M1 l(|z'|)."""
    x = float(x)
    if not abs(x) > 2:
        raise ZeroSetError("prop1_witness needs |x| > 2")
    if not m1 > 0:
        raise ZeroSetError("M1 must be positive")
    radius = m1 * float(w(abs(x)))

    def bound(z):
        return -m1 * np.asarray(w(np.abs(z)), dtype=float)

    g = _local(f1, x, radius)
    if search in ("real", "real_interval"):
        xp, v, b, found, n_nan = _search_line(g, x, radius, default_step(radius), bound,
                                              polish=True)
        if math.isnan(b):
            b = float(bound(np.array([xp]))[0])
        return Prop1Witness(x, ComplexPoint(xp, 0.0), v, b, found, float(m1), n_nan)
    if search not in ("disc", "complex_disc"):
        raise ZeroSetError(f"unknown search mode {search!r}")
    # polar grid, innermost ring first so the nearest qualifying point wins
    r = radius * np.arange(1, DISC_RADII + 1) / DISC_RADII
    r[-1] *= 1.0 - 1e-12            # keep the outer ring inside after rounding
    th = 2.0 * math.pi * np.arange(DISC_ANGLES) / DISC_ANGLES
    pts = np.concatenate([[complex(x)], (x + r[:, None] * np.exp(1j * th)[None, :]).ravel()])
    vals = _eval(g, pts)
    bnd = bound(pts)
    nan = np.isnan(vals)
    exc = np.where(nan, -math.inf, vals - bnd)
    ok = np.nonzero(exc >= np.array([margin(t) for t in bnd]))[0]
    i = int(ok[0]) if ok.size else int(np.argmax(exc))
    z = pts[i]
    return Prop1Witness(x, ComplexPoint(float(z.real), float(z.imag)), float(vals[i]),
                        float(bnd[i]), bool(ok.size), float(m1), int(nan.sum()))


def prop1_scan(f1: Evaluator, xs: Sequence[float], m1: float, w: Weight,
               search: str = "real_interval") -> list[Prop1Witness]:
    return [prop1_witness(f1, x, m1, w, search) for x in xs]
