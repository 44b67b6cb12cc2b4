"""Zero sequences: validation, generators, near-real partition and projection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (ContainsOriginError, NonFiniteError, OverlapError, ZeroRealPartError,
                     ZeroSetError)
from .weights import Weight


class ComplexPoint(NamedTuple):
    re: float
    im: float

    def __complex__(self):
        return complex(self.re, self.im)


def _as_complex_array(raw) -> np.ndarray:
    if isinstance(raw, ZeroSequence):
        return raw.zeros.copy()
    if isinstance(raw, np.ndarray) and np.iscomplexobj(raw):
        return raw.astype(complex).ravel()
    items = list(raw)
    out = np.empty(len(items), dtype=complex)
    for i, z in enumerate(items):
        if isinstance(z, (tuple, list)) and len(z) == 2:
            out[i] = complex(float(z[0]), float(z[1]))
        else:
            out[i] = complex(z)
    return out


def _sort_order(z: np.ndarray) -> np.ndarray:
    # modulus, then principal argument in (-pi, pi], then input order
    ang = np.angle(z)
    ang = np.where(ang == -np.pi, np.pi, ang)
    return np.lexsort((np.arange(z.size), ang, np.abs(z)))


@dataclass(frozen=True, eq=False)
class ZeroSequence:
    """Finite, validated zero list sorted by nondecreasing modulus.

    Multiplicity is encoded by repetition.  Build instances with
    :func:`validate_sequence`; the constructor trusts its input.
    """

    zeros: np.ndarray
    _moduli: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        z = np.asarray(self.zeros, dtype=complex)
        z.setflags(write=False)
        object.__setattr__(self, "zeros", z)
        m = np.abs(z)
        m.setflags(write=False)
        object.__setattr__(self, "_moduli", m)

    def __len__(self):
        return self.zeros.size

    def __iter__(self):
        return iter(self.zeros.tolist())

    def __eq__(self, other):
        return isinstance(other, ZeroSequence) and np.array_equal(self.zeros, other.zeros)

    def __hash__(self):
        return hash(self.zeros.tobytes())

    @property
    def re(self) -> np.ndarray:
        return self.zeros.real

    @property
    def im(self) -> np.ndarray:
        return self.zeros.imag

    @property
    def moduli(self) -> np.ndarray:
        return self._moduli

    @property
    def coverage_radius(self) -> float:
        """R_max = |last zero|: beyond it the finite prefix says nothing."""
        return float(self._moduli[-1])

    def points(self) -> list[ComplexPoint]:
        return [ComplexPoint(float(z.real), float(z.imag)) for z in self.zeros]

    def conjugate(self) -> "ZeroSequence":
        return validate_sequence(self.zeros.conj())


def validate_sequence(raw) -> ZeroSequence:
    """Check and sort a raw zero list.

    Accepts complex numbers, ``(re, im)`` pairs or :class:`ComplexPoint`.
    Ties in modulus are broken by principal argument, then input order.
    """
    z = _as_complex_array(raw)
    if z.size == 0:
        raise ZeroSetError("zero sequence must be nonempty")
    if not (np.all(np.isfinite(z.real)) and np.all(np.isfinite(z.imag))):
        raise NonFiniteError("zero coordinates must be finite")
    z = z.real + 0.0 + 1j * (z.imag + 0.0)   # fold -0.0 into +0.0
    if np.any(z == 0):
        raise ContainsOriginError("zero sequence contains the origin")
    return ZeroSequence(z[_sort_order(z)])


@dataclass(frozen=True, eq=False)
class NearRealPartition:
    """Index split of a sequence into the near-real band and the rest.

    ``k in m_prime  <=>  |Im mu_k| <= m0 * l(|Re mu_k|)``.
    """

    m_prime: np.ndarray
    m_double_prime: np.ndarray
    m0: float
    weight: Weight
    mask: np.ndarray = field(repr=False)

    def __len__(self):
        return self.mask.size


def near_real_mask(zs: ZeroSequence, w: Weight, m0: float) -> np.ndarray:
    return np.abs(zs.im) <= m0 * np.asarray(w(np.abs(zs.re)), dtype=float)


def partition_near_real(zs: ZeroSequence, w: Weight, m0: float) -> NearRealPartition:
    if not m0 > 0:
        raise ZeroSetError("m0 must be positive")
    mask = near_real_mask(zs, w, m0)
    mask.setflags(write=False)
    idx = np.arange(len(zs))
    return NearRealPartition(idx[mask], idx[~mask], float(m0), w, mask)


def project_real_parts(zs: ZeroSequence, p: NearRealPartition) -> ZeroSequence:
    """Replace every near-real zero by its real part; keep the others."""
    if len(p) != len(zs):
        raise ZeroSetError("partition does not belong to this sequence")
    z = zs.zeros.copy()
    sel = p.mask
    if np.any(z.real[sel] == 0):
        raise ZeroRealPartError("a near-real zero has zero real part; projection hits the origin")
    z[sel] = z.real[sel]
    return validate_sequence(z)


# --- generators -----------------------------------------------------------

def gen_integer_lattice(n: int) -> ZeroSequence:
    """{+-1, ..., +-n}: the zeros of sin(pi z) / (pi z)."""
    if n < 1:
        raise ZeroSetError("n must be >= 1")
    k = np.arange(1, n + 1, dtype=float)
    return validate_sequence(np.concatenate([k, -k]).astype(complex))


def gen_one_sided(n: int) -> ZeroSequence:
    """{1, ..., n}: a sequence whose canonical product does not converge."""
    if n < 1:
        raise ZeroSetError("n must be >= 1")
    return validate_sequence(np.arange(1, n + 1, dtype=float).astype(complex))


def gen_perturbed_lattice(n: int, band: Weight, m0: float, seed: int) -> ZeroSequence:
    """Lattice zeros k + i*delta_k with |delta_k| <= m0 * l(|k|), reproducible in ``seed``."""
    if n < 1:
        raise ZeroSetError("n must be >= 1")
    k = np.arange(1, n + 1, dtype=float)
    re = np.concatenate([k, -k])
    bound = m0 * np.asarray(band(np.abs(re)), dtype=float)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))
    u = rng.uniform(-1.0, 1.0, size=re.size)
    return validate_sequence(re + 1j * (u * bound))


@dataclass(frozen=True)
class ClusterSpec:
    centers: tuple[float, ...]
    multiplicities: tuple[int, ...]
    background: ZeroSequence | None = None

    def __post_init__(self):
        c = tuple(float(x) for x in self.centers)
        m = tuple(int(x) for x in self.multiplicities)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "multiplicities", m)
        if len(c) != len(m) or not c:
            raise ZeroSetError("centers and multiplicities must be nonempty and of equal length")
        if any(x <= 2 for x in c):
            raise ZeroSetError("cluster centers must exceed 2")
        if any(b <= a for a, b in zip(c, c[1:])):
            raise ZeroSetError("cluster centers must increase strictly")
        if any(x < 1 for x in m):
            raise ZeroSetError("multiplicities must be >= 1")


def cluster_points(center: float, m: int, spacing: float) -> np.ndarray:
    return center + (np.arange(m) - (m - 1) / 2.0) * spacing


def gen_clustered(spec: ClusterSpec, spacing: float) -> ZeroSequence:
    """m_j real zeros, evenly spaced by ``spacing``, centred at each x_j."""
    if not spacing > 0:
        raise ZeroSetError("spacing must be positive")
    if spacing * max(spec.multiplicities) > 2:
        raise ZeroSetError("spacing * max(m_j) must be <= 2 so clusters fit in [x_j-1, x_j+1]")
    c = spec.centers
    for a, b in zip(c, c[1:]):
        if b - a <= 2:
            raise OverlapError(f"cluster windows around {a} and {b} intersect")
    parts = [cluster_points(x, m, spacing) for x, m in zip(c, spec.multiplicities)]
    z = np.concatenate(parts).astype(complex)
    if spec.background is not None:
        z = np.concatenate([spec.background.zeros, z])
    return validate_sequence(z)


def exp_cluster_spec(j_max: int, background: ZeroSequence | None = None) -> ClusterSpec:
    """x_j = e**j, m_j = j**2 for j = 1..j_max."""
    j = np.arange(1, j_max + 1)
    return ClusterSpec(tuple(np.exp(j.astype(float))), tuple(int(v) for v in j * j), background)


def displaced_lattice(n: int, spec: ClusterSpec) -> ZeroSequence:
    """Integer lattice with, for each cluster, the m_j positive integers nearest x_j removed.

    Used as the background for cluster counterexamples: the cluster zeros are
    then moved in from the neighbourhood rather than added, so the counting
    density (and hence the exponential type) matches the plain lattice.
    """
    keep = np.ones(n + 1, dtype=bool)
    keep[0] = False
    for x, m in zip(spec.centers, spec.multiplicities):
        ints = np.arange(max(1, int(x) - m - 1), min(n, int(x) + m + 2) + 1)
        nearest = ints[np.argsort(np.abs(ints - x), kind="stable")[:m]]
        if not keep[nearest].all():
            raise OverlapError(f"displacement around {x} reuses removed integers")
        keep[nearest] = False
    k = np.nonzero(keep)[0].astype(float)
    neg = np.arange(1, n + 1, dtype=float)
    return validate_sequence(np.concatenate([k, -neg]).astype(complex))


def gen_cluster_counterexample(n: int, j_max: int = 9, spacing: float | None = None) -> ZeroSequence:
    """j^2 zeros collapsed near each e^j on an integer-lattice background of size n."""
    spec = exp_cluster_spec(j_max)
    if spacing is None:
        spacing = 1.9 / max(spec.multiplicities)
    bg = displaced_lattice(n, spec)
    return gen_clustered(ClusterSpec(spec.centers, spec.multiplicities, bg), spacing)


def beta_growth_diagnostic(zs: ZeroSequence) -> float:
    """max |Im mu| / ln(2 + |mu|): a bounded value is the beta_j = O(ln|mu_j|) premise."""
    return float(np.max(np.abs(zs.im) / np.log(2.0 + zs.moduli)))
