"""Evaluation of ln|psi(z)| for canonical products over zero sequences.

psi(z) = lim_{R -> inf} prod_{|mu| <= R} (1 - z/mu), no exponential factors.

A finite sequence only determines the product up to its coverage radius
R_max, so evaluation works on a ladder of radii R_1 < ... < R_L = R_max
(ratio ~1.5, each boundary moved into the widest modulus gap nearby so that
clusters of equal modulus, e.g. +-k, are never split).  At every rung the
partial sum is completed by a tail model: the zeros beyond the rung are
taken to repeat the last shell self-similarly (shell scaled by lambda,
weights scaled by lambda, which keeps the counting density linear).  Summing
that geometric extension in closed form gives, with w = z / R_lo,

    tail = -Re sum_{p>=2} w**p * N_p / (p * (lambda**(p-1) - 1)),
    N_p  = sum_{shell} (R_lo / mu)**p .

The p = 1 term has no finite extension: it is the per-shell drift of an
asymmetric sequence and goes into ``tail_estimate`` instead.  The Cauchy test
runs on these completed values over the rungs with R >= 2K|z|.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import CoverageError, EmptyClusterError, NonConvergenceError, ZeroSetError
from .summation import compensated_cumsum, compensated_sum, segment_sums
from .zero_model import NearRealPartition, ZeroSequence, _sort_order

CONVERGED = "converged"
NON_CONVERGED = "non_converged"
AT_ZERO = "at_zero"

K_DEFAULT = 2.0
LADDER_RATIO = 1.5
SNAP_BAND = 0.05
N_POWERS = 48          # |z/R_lo| <= 1.5 / (2K) = 0.375 for K = 2: 0.375**48 ~ 3e-21
LOCAL_POWERS = 56      # local expansion ratio <= 1/2
BLOCK_ELEMENTS = 1 << 21

KINDS = ("plain", "projected", "half_projected", "modified")


@dataclass(frozen=True)
class Modification:
    x_j: float
    m_j: int
    removed: tuple[int, ...]


@dataclass(frozen=True)
class ProductVariant:
    """Which zeros enter the product.

    plain:          mu_j as given
    projected:      near-real zeros replaced by their real parts
    half_projected: only near-real zeros with Im >= 0 replaced
    modified:       projected, times (z - x_j)**m_j, divided by (z - alpha_k) over ``removed``
    """

    kind: str = "plain"
    partition: NearRealPartition | None = None
    modification: Modification | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ZeroSetError(f"unknown product variant {self.kind!r}")
        if self.kind != "plain" and self.partition is None:
            raise ZeroSetError(f"{self.kind} variant needs a partition")
        if self.kind == "modified":
            if self.modification is None:
                raise ZeroSetError("modified variant needs a modification")
            if self.modification.m_j != len(self.modification.removed):
                raise ZeroSetError("m_j must equal the number of removed zeros")

    @classmethod
    def plain(cls) -> "ProductVariant":
        return cls("plain")

    @classmethod
    def projected(cls, p: NearRealPartition) -> "ProductVariant":
        return cls("projected", p)

    @classmethod
    def half_projected(cls, p: NearRealPartition) -> "ProductVariant":
        return cls("half_projected", p)


PLAIN = ProductVariant()


@dataclass(frozen=True)
class LogModulusResult:
    value: float
    truncation_radius: float
    tail_estimate: float
    status: str
    ladder_radii: tuple[float, ...] = ()
    ladder_values: tuple[float, ...] = ()
    drift_steps: int = 0

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    def to_dict(self) -> dict:
        return {"value": _json_float(self.value), "truncation_radius": self.truncation_radius,
                "tail_estimate": _json_float(self.tail_estimate), "status": self.status,
                "drift_steps": self.drift_steps}


def _json_float(x: float):
    return x if math.isfinite(x) else repr(x)


def make_modified_variant(zs: ZeroSequence, p: NearRealPartition, x_j: float) -> ProductVariant:
    """psi_j = psi_1 * (z - x_j)**m_j / prod_{k in M', |alpha_k - x_j| <= 1} (z - alpha_k)."""
    x_j = float(x_j)
    sel = p.m_prime[np.abs(zs.re[p.m_prime] - x_j) <= 1.0]
    if sel.size == 0:
        raise EmptyClusterError(f"no near-real zero has |Re mu - {x_j}| <= 1")
    mod = Modification(x_j, int(sel.size), tuple(int(i) for i in sel))
    return ProductVariant("modified", p, mod)


def effective_zeros(zs: ZeroSequence, variant: ProductVariant) -> np.ndarray:
    z = zs.zeros.copy()
    if variant.kind in ("projected", "modified"):
        sel = variant.partition.mask
        z[sel] = z.real[sel]
    elif variant.kind == "half_projected":
        sel = variant.partition.mask & (zs.im >= 0)
        z[sel] = z.real[sel]
    if variant.kind == "modified":
        keep = np.ones(z.size, dtype=bool)
        keep[list(variant.modification.removed)] = False
        z = z[keep]
    if np.any(z == 0):
        raise ZeroSetError("projection moved a zero onto the origin")
    return z[_sort_order(z)]


def log_abs_terms(z, zeros) -> np.ndarray:
    """ln|1 - z/zeta| for every pair; shape (len(z), len(zeros))."""
    z = np.asarray(z, dtype=complex)[:, None]
    zeta = np.asarray(zeros, dtype=complex)[None, :]
    w = z / zeta
    small = np.abs(w) < 0.5
    with np.errstate(divide="ignore", invalid="ignore"):
        near_one = np.log(np.abs(zeta - z)) - np.log(np.abs(zeta))
        tiny = 0.5 * np.log1p(w.real * (w.real - 2.0) + w.imag * w.imag)
    return np.where(small, tiny, near_one)


@dataclass(frozen=True)
class _Ladder:
    radii: np.ndarray        # ascending; last = R_max
    cuts: np.ndarray         # zeros[:cuts[i]] have modulus <= radii[i]
    upper: np.ndarray        # upper edge of each rung's window (R_top for the last)
    coef: np.ndarray         # (L, N_POWERS + 1) tail coefficients, row 0 unused
    coef2: np.ndarray        # same for the two-shell window, rows 0-1 unused
    first: np.ndarray        # N_1 per rung (asymmetry residue)
    lower: np.ndarray
    lower2: np.ndarray


class ProductEvaluator:
    """Evaluates ln|psi| for one (sequence, variant) pair; pure and reentrant."""

    def __init__(self, zs: ZeroSequence, variant: ProductVariant | None = None,
                 k: float = K_DEFAULT):
        self.zs = zs
        self.variant = variant or PLAIN
        if not k > 1:
            raise ZeroSetError("K must exceed 1")
        self.k = float(k)
        self.zeros = effective_zeros(zs, self.variant)
        self.moduli = np.abs(self.zeros)
        self.r_max = float(self.moduli[-1])
        mod = self.variant.modification
        if mod is not None:
            alphas = np.abs(zs.re[list(mod.removed)])
            self._extra_const = -compensated_sum(np.log(alphas))
        else:
            self._extra_const = 0.0

    # -- extra factor of the modified variant --------------------------------

    def _extra(self, z: np.ndarray, deflate: bool = False) -> np.ndarray:
        mod = self.variant.modification
        if mod is None:
            return np.zeros(z.shape)
        with np.errstate(divide="ignore"):
            out = mod.m_j * np.log(np.abs(z - mod.x_j)) + self._extra_const
        return _deflate(out) if deflate else out

    def _hits_zero(self, z: np.ndarray) -> np.ndarray:
        hit = np.isin(z, self.zeros)
        mod = self.variant.modification
        if mod is not None:
            hit |= z == mod.x_j
        return hit

    # -- plain partial products ---------------------------------------------

    def partial(self, z, radius: float) -> float:
        """Compensated sum of ln|1 - z/zeta| over |zeta| <= radius (plus modification)."""
        if not radius > 0:
            raise ZeroSetError("radius must be positive")
        z = complex(z)
        n = int(np.searchsorted(self.moduli, radius, side="right"))
        mod = self.variant.modification
        if np.any(self.zeros[:n] == z) or (mod is not None and z == mod.x_j):
            return -math.inf
        s = compensated_sum(log_abs_terms([z], self.zeros[:n])[0]) if n else 0.0
        return float(s + self._extra(np.array([z]))[0])

    # -- ladder ---------------------------------------------------------------

    def _snap(self, r: float) -> float:
        mod = self.moduli
        lo = int(np.searchsorted(mod, r * (1 - SNAP_BAND)))
        hi = int(np.searchsorted(mod, r * (1 + SNAP_BAND), side="right"))
        i0, i1 = max(lo, 1), min(hi, mod.size - 1)
        if i1 < i0:
            return r
        gaps = mod[i0:i1 + 1] - mod[i0 - 1:i1]
        mids = 0.5 * (mod[i0:i1 + 1] + mod[i0 - 1:i1])
        gaps = np.where(np.abs(mids - r) <= SNAP_BAND * r, gaps, 0.0)
        j = int(np.argmax(gaps))
        return float(mids[j]) if gaps[j] > 0 else r

    @cached_property
    def ladder(self) -> _Ladder:
        mod = self.moduli
        n = mod.size
        radii = [self.r_max]
        cuts = [n]
        r = self.r_max
        while True:
            r = self._snap(r / LADDER_RATIO)
            if r <= mod[0]:
                break
            c = int(np.searchsorted(mod, r, side="right"))
            if 0 < c < cuts[-1]:
                radii.append(r)
                cuts.append(c)
        radii = np.array(radii[::-1])
        cuts = np.array(cuts[::-1])
        L = radii.size
        upper = radii.copy()
        if L >= 2:
            lo_edge = radii[-2]
            count = n - cuts[-2]
            width = self.r_max - lo_edge
            s0 = width / count
            group = max(1, int(np.sum(mod[cuts[-2]:] > self.r_max - 0.5 * s0)))
            spacing = width / max(count / group - 0.5, 0.5)
            upper[-1] = self.r_max + 0.5 * spacing
        P = N_POWERS
        coef = np.zeros((L, P + 1), dtype=complex)
        coef2 = np.zeros((L, P + 1), dtype=complex)
        first = np.zeros(L, dtype=complex)
        lower = np.ones(L)
        lower2 = np.ones(L)
        p = np.arange(P + 1)
        for i in range(1, L):
            lower[i] = radii[i - 1]
            moments = _power_sums(radii[i - 1] / self.zeros[cuts[i - 1]:cuts[i]], P)
            first[i] = moments[1]
            lam = upper[i] / radii[i - 1]
            coef[i, 2:] = moments[2:] / (p[2:] * (lam ** (p[2:] - 1) - 1.0))
            if i >= 2:
                lower2[i] = radii[i - 2]
                m2 = _power_sums(radii[i - 2] / self.zeros[cuts[i - 2]:cuts[i]], P)
                lam2 = upper[i] / radii[i - 2]
                coef2[i, 2:] = m2[2:] / (p[2:] * (lam2 ** (p[2:] - 1) - 1.0))
        return _Ladder(radii, cuts, upper, coef, coef2, first, lower, lower2)

    def _tail_models(self, z: np.ndarray):
        """Tail corrections, model discrepancies and asymmetry residues, each (B, L)."""
        lad = self.ladder
        w = z[:, None] / lad.lower[None, :]
        corr = -_horner(lad.coef, w).real
        w2 = z[:, None] / lad.lower2[None, :]
        corr2 = -_horner(lad.coef2, w2).real
        asym = np.abs((w * lad.first[None, :]).real)
        disc = np.where(np.arange(lad.radii.size)[None, :] >= 2, np.abs(corr - corr2), np.abs(corr))
        return corr, disc, asym

    # -- canonical evaluation ----------------------------------------------

    def _finish(self, z: complex, partials: np.ndarray, corr, disc, asym, hit: bool,
                tol: float) -> LogModulusResult:
        lad = self.ladder
        usable = np.nonzero((np.arange(lad.radii.size) >= 1)
                            & (lad.radii >= 2.0 * self.k * abs(z)))[0]
        if usable.size == 0:
            raise CoverageError(
                f"coverage radius {self.r_max:g} < 2K|z| = {2 * self.k * abs(z):g} "
                f"(with a tail window)")
        vals = partials[usable] + corr[usable]
        tails = asym[usable] + disc[usable]
        diffs = np.abs(np.diff(vals))
        drift = int(np.sum(diffs >= tol))
        ok = usable.size >= 2 and diffs[-1] < tol and tails[-1] < tol
        if hit:
            # partials were deflated: the ladder still decides whether the
            # product converges, and a convergent product vanishes here
            return LogModulusResult(-math.inf, self.r_max, 0.0 if ok else float(tails[-1]),
                                    AT_ZERO if ok else NON_CONVERGED,
                                    tuple(float(r) for r in lad.radii[usable]),
                                    tuple(float(v) for v in vals), drift)
        return LogModulusResult(float(vals[-1]), self.r_max, float(tails[-1]),
                                CONVERGED if ok else NON_CONVERGED,
                                tuple(float(r) for r in lad.radii[usable]),
                                tuple(float(v) for v in vals), drift)

    def _shell_partials(self, z: np.ndarray) -> np.ndarray:
        lad = self.ladder
        cuts = np.concatenate([[0], lad.cuts])
        out = np.empty((z.size, lad.radii.size))
        step = max(1, BLOCK_ELEMENTS // max(1, self.zeros.size))
        for s in range(0, z.size, step):
            zb = z[s:s + step]
            shells = segment_sums(_deflate(log_abs_terms(zb, self.zeros)), cuts)
            out[s:s + step] = compensated_cumsum(shells)
        return out

    def canonical_many(self, points, tol: float, strict: bool = False) -> list[LogModulusResult]:
        if not tol > 0:
            raise ZeroSetError("tol must be positive")
        z = np.asarray([complex(p) for p in points], dtype=complex)
        if z.size == 0:
            return []
        partials = self._shell_partials(z) + self._extra(z, deflate=True)[:, None]
        corr, disc, asym = self._tail_models(z)
        hits = self._hits_zero(z)
        out = []
        for i in range(z.size):
            try:
                out.append(self._finish(z[i], partials[i], corr[i], disc[i], asym[i],
                                        bool(hits[i]), tol))
            except CoverageError:
                if strict:
                    raise
                out.append(LogModulusResult(math.nan, self.r_max, math.inf, NON_CONVERGED))
        return out

    def canonical(self, z, tol: float) -> LogModulusResult:
        return self.canonical_many([z], tol, strict=True)[0]

    def localize(self, center: complex, radius: float) -> "LocalExpansion":
        return LocalExpansion(self, complex(center), float(radius))


def _deflate(terms: np.ndarray) -> np.ndarray:
    """Drop exact-zero factors (ln 0 = -inf) so the ladder of the rest stays finite."""
    return np.where(np.isneginf(terms), 0.0, terms)


def _power_sums(r: np.ndarray, P: int) -> np.ndarray:
    """[count, sum r, sum r**2, ..., sum r**P] with compensated real/imag sums."""
    out = np.zeros(P + 1, dtype=complex)
    out[0] = r.size
    pw = np.ones_like(r)
    for p in range(1, P + 1):
        pw = pw * r
        out[p] = compensated_sum(pw.real) + 1j * compensated_sum(pw.imag)
    return out


def _horner(coef: np.ndarray, w: np.ndarray) -> np.ndarray:
    """sum_p coef[l, p] * w[b, l]**p for every (b, l)."""
    acc = np.zeros(w.shape, dtype=complex)
    for p in range(coef.shape[1] - 1, -1, -1):
        acc = acc * w + coef[None, :, p]
    return acc


class LocalExpansion:
    """Fast evaluation for points within ``radius`` of ``center``.

    Zeros closer than 2*radius are summed directly; the rest enter through
    ln(1 - z/zeta) = ln(1 - c/zeta) - sum_p (u/(zeta - c))**p / p with
    u = z - c, truncated at LOCAL_POWERS terms (ratio <= 1/2).  Results agree
    with :meth:`ProductEvaluator.canonical_many` to rounding level.
    """

    def __init__(self, ev: ProductEvaluator, center: complex, radius: float):
        if not radius > 0:
            raise ZeroSetError("radius must be positive")
        self.ev = ev
        self.center = center
        self.radius = radius
        lad = ev.ladder
        zeros = ev.zeros
        near = np.abs(zeros - center) < 2.0 * radius
        csum = np.concatenate([[0], np.cumsum(near)])
        cuts = np.concatenate([[0], lad.cuts])
        self._near = zeros[near]
        self._near_cuts = csum[cuts]
        far_idx = np.nonzero(~near)[0]
        far_cuts = np.searchsorted(far_idx, cuts)
        far = zeros[far_idx]
        L = lad.radii.size
        P = LOCAL_POWERS
        base = log_abs_terms([center], far)[0] if far.size else np.zeros(0)
        self._far0 = segment_sums(base, far_cuts)
        coef = np.zeros((L, P + 1), dtype=complex)
        r = radius / (far - center)
        pw = np.ones_like(r)
        for p in range(1, P + 1):
            pw = pw * r
            for s in range(L):
                a, b = far_cuts[s], far_cuts[s + 1]
                if b > a:
                    seg = pw[a:b]
                    coef[s, p] = (seg.real.sum() + 1j * seg.imag.sum()) / p
        self._coef = coef

    def shell_sums(self, z: np.ndarray) -> np.ndarray:
        u = (z - self.center) / self.radius
        if np.any(np.abs(u) > 1.0 + 1e-12):
            raise ZeroSetError("point outside the local expansion disc")
        near = segment_sums(_deflate(log_abs_terms(z, self._near)), self._near_cuts) \
            if self._near.size \
            else np.zeros((z.size, self.ev.ladder.radii.size))
        far = self._far0[None, :] - _horner(self._coef, np.broadcast_to(
            u[:, None], (z.size, self._coef.shape[0]))).real
        return near + far

    def canonical_many(self, points, tol: float) -> list[LogModulusResult]:
        ev = self.ev
        z = np.asarray(points, dtype=complex).ravel()
        if z.size == 0:
            return []
        partials = compensated_cumsum(self.shell_sums(z)) + ev._extra(z, deflate=True)[:, None]
        corr, disc, asym = ev._tail_models(z)
        hits = np.isin(z, self._near)
        mod = ev.variant.modification
        if mod is not None:
            hits |= z == mod.x_j
        out = []
        for i in range(z.size):
            try:
                out.append(ev._finish(z[i], partials[i], corr[i], disc[i], asym[i],
                                      bool(hits[i]), tol))
            except CoverageError:
                out.append(LogModulusResult(math.nan, ev.r_max, math.inf, NON_CONVERGED))
        return out


class LineEvaluator:
    """ln|psi| as a vectorised function for witness searches.

    Calls return canonical values with NaN where the ladder did not converge.
    ``localize`` hands out cached :class:`LocalExpansion` views, so repeated
    scans of the same window (fit_a bisection) cost one far-field setup.
    """

    def __init__(self, zs: ZeroSequence, variant: ProductVariant | None = None,
                 tol: float = 1e-2, k: float = K_DEFAULT):
        self.evaluator = ProductEvaluator(zs, variant, k)
        self.tol = tol
        self._local: dict[tuple[complex, float], LocalExpansion] = {}

    @staticmethod
    def _values(results) -> np.ndarray:
        return np.array([r.value if r.status != NON_CONVERGED else math.nan for r in results])

    def results(self, xs) -> list[LogModulusResult]:
        return self.evaluator.canonical_many(np.atleast_1d(xs), self.tol)

    def __call__(self, xs) -> np.ndarray:
        return self._values(self.results(xs))

    def localize(self, center, radius):
        key = (complex(center), float(radius))
        loc = self._local.get(key)
        if loc is None:
            loc = self.evaluator.localize(center, radius)
            self._local[key] = loc
        tol = self.tol
        return lambda zs: self._values(loc.canonical_many(zs, tol))


# --- module-level operations ----------------------------------------------

def log_abs_partial(zs: ZeroSequence, variant: ProductVariant | None, z, radius: float) -> float:
    return ProductEvaluator(zs, variant).partial(z, radius)


def log_abs_canonical(zs: ZeroSequence, variant: ProductVariant | None, z, tol: float,
                      k: float = K_DEFAULT) -> LogModulusResult:
    return ProductEvaluator(zs, variant, k).canonical(z, tol)


def eval_grid(zs: ZeroSequence, variant: ProductVariant | None, points, tol: float,
              k: float = K_DEFAULT, workers: int = 1) -> list[LogModulusResult]:
    """Element-wise :func:`log_abs_canonical`; bad points get a status, never an exception."""
    ev = ProductEvaluator(zs, variant, k)
    pts = [complex(p) for p in points]
    if workers <= 1 or len(pts) < 2 * workers:
        return ev.canonical_many(pts, tol)
    ev.ladder  # build once before fanning out
    chunk = math.ceil(len(pts) / workers)
    parts = [pts[i:i + chunk] for i in range(0, len(pts), chunk)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        done = list(pool.map(lambda p: ev.canonical_many(p, tol), parts))
    return [r for part in done for r in part]


def type_estimate(zs: ZeroSequence, y_max: float, k: float = K_DEFAULT, tol: float = 1e-3,
                  samples: int = 33) -> float:
    """max of ln|psi(iy)| / y over y in [y_max/2, y_max].

    Uses the tail-completed product when the sequence covers the probed
    heights (two usable ladder rungs); a sequence too short for that is taken
    literally as a polynomial.
    """
    if y_max < 10:
        raise ZeroSetError("y_max must be at least 10")
    ys = np.geomspace(y_max / 2.0, y_max, samples)
    ev = ProductEvaluator(zs, None, k)
    if zs.coverage_radius >= 2.0 * k * LADDER_RATIO * y_max * (1 + SNAP_BAND):
        res = ev.canonical_many(1j * ys, tol)
        bad = [r for r in res if r.status == NON_CONVERGED]
        if bad:
            raise NonConvergenceError(f"{len(bad)} of {len(res)} samples did not converge")
        vals = np.array([r.value for r in res])
    else:
        vals = np.array([ev.partial(1j * y, math.inf) for y in ys])
    return float(np.max(vals / ys))
