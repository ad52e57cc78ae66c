"""Sparse trigonometric polynomials on products of tori.

Frequencies are stacked integer tuples of length d*clusters; coefficients are
complex vectors in the value space. Multiplier operators act coefficientwise
and exactly; dense grids appear only in test oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

TWO_PI = 2.0 * math.pi

# quarter arcs A_n = [n pi/2, (n+1) pi/2) in this fixed order
ARC_NS = (-2, -1, 0, 1)

# exact values of the ideal square waves on (A_-2, A_-1, A_0, A_1)
SQCOS_ARC_VALUES = {-2: -1.0, -1: 1.0, 0: 1.0, 1: -1.0}
SQSIN_ARC_VALUES = {-2: -1.0, -1: -1.0, 0: 1.0, 1: 1.0}

_I_POWERS = (1.0 + 0.0j, 0.0 + 1.0j, -1.0 + 0.0j, 0.0 - 1.0j)


def arc_exp_integral(k, n):
    """Integral of e^{ik theta} over A_n = [n pi/2, (n+1) pi/2), in closed form."""
    if n not in ARC_NS:
        raise InvalidInputError(f"arc label must be one of {ARC_NS}, got {n}")
    if k == 0:
        return complex(math.pi / 2.0)
    hi = _I_POWERS[(k * (n + 1)) % 4]
    lo = _I_POWERS[(k * n) % 4]
    return (hi - lo) / (1j * k)


def arc_average(k, n):
    """Average of e^{ik theta} over the quarter arc A_n."""
    return arc_exp_integral(k, n) / (math.pi / 2.0)


def arc_of_angle(theta):
    """Label of the quarter arc containing theta (reduced to [-pi, pi))."""
    red = math.remainder(theta, TWO_PI)
    if red >= math.pi:
        red -= TWO_PI
    n = math.floor(red / (math.pi / 2.0))
    return int(min(max(n, -2), 1))


def _clean_terms(terms, value_dim):
    out = {}
    for freq, coeff in terms.items():
        arr = np.asarray(coeff, dtype=np.complex128)
        if arr.ndim == 0:
            arr = arr[None]
        if arr.shape != (value_dim,):
            raise InvalidInputError(
                f"coefficient shape {arr.shape} does not match value_dim {value_dim}"
            )
        if np.any(arr):
            key = tuple(int(x) for x in freq)
            out[key] = out.get(key, np.zeros(value_dim, dtype=np.complex128)) + arr
    return {k: v for k, v in out.items() if np.any(v)}


@dataclass(frozen=True)
class TrigPoly:
    """Finite sum of coeff(l) * e^{i <l, theta>} over stacked frequencies l."""

    d: int
    clusters: int
    terms: dict
    value_dim: int = 1

    def __post_init__(self):
        if self.d < 1 or self.clusters < 1:
            raise InvalidInputError("d and clusters must be >= 1")
        object.__setattr__(self, "terms", _clean_terms(self.terms, self.value_dim))
        dim = self.d * self.clusters
        for freq in self.terms:
            if len(freq) != dim:
                raise InvalidInputError(
                    f"frequency {freq} has length {len(freq)}, expected {dim}"
                )

    @property
    def total_dim(self):
        return self.d * self.clusters

    def map_terms(self, fn):
        """New poly with coefficient at l replaced by fn(l, coeff) (None drops)."""
        new = {}
        for freq, coeff in self.terms.items():
            val = fn(freq, coeff)
            if val is not None:
                new[freq] = val
        return TrigPoly(self.d, self.clusters, new, self.value_dim)

    def scale(self, factor):
        return self.map_terms(lambda _f, c: c * factor)

    def add(self, other):
        if (self.d, self.clusters, self.value_dim) != (other.d, other.clusters, other.value_dim):
            raise InvalidInputError("cluster structure mismatch in addition")
        new = {f: c.copy() for f, c in self.terms.items()}
        for f, c in other.terms.items():
            new[f] = new.get(f, np.zeros(self.value_dim, dtype=np.complex128)) + c
        return TrigPoly(self.d, self.clusters, new, self.value_dim)

    def evaluate(self, theta):
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (self.total_dim,):
            raise InvalidInputError(
                f"point has shape {theta.shape}, expected ({self.total_dim},)"
            )
        acc = np.zeros(self.value_dim, dtype=np.complex128)
        for freq, coeff in self.terms.items():
            acc += coeff * np.exp(1j * float(np.dot(freq, theta)))
        return acc

    def is_real_valued(self, tol=0.0):
        for freq, coeff in self.terms.items():
            neg = tuple(-x for x in freq)
            other = self.terms.get(neg)
            if other is None or np.max(np.abs(np.conj(other) - coeff)) > tol:
                return False
        return True

    def max_frequency(self):
        return max((max(abs(x) for x in f) for f in self.terms), default=0)


def make_poly(d, clusters, terms, value_dim=1):
    return TrigPoly(d, clusters, dict(terms), value_dim)


def cos_poly(var_index, d, clusters=1):
    e = [0] * (d * clusters)
    e[var_index] = 1
    plus, minus = tuple(e), tuple(-x for x in e)
    return make_poly(d, clusters, {plus: 0.5 + 0.0j, minus: 0.5 + 0.0j})


def sin_poly(var_index, d, clusters=1):
    e = [0] * (d * clusters)
    e[var_index] = 1
    plus, minus = tuple(e), tuple(-x for x in e)
    return make_poly(d, clusters, {plus: -0.5j, minus: 0.5j})


def embed_variable(p: TrigPoly, var_index, d, clusters=1):
    """Re-house a single-variable poly as depending on one coordinate of a stack."""
    if p.d * p.clusters != 1:
        raise InvalidInputError("embed_variable expects a single-variable poly")
    dim = d * clusters
    if not 0 <= var_index < dim:
        raise InvalidInputError(f"variable index {var_index} out of range for {dim}")
    new = {}
    for (k,), coeff in p.terms.items():
        freq = [0] * dim
        freq[var_index] = k
        new[tuple(freq)] = coeff.copy()
    return TrigPoly(d, clusters, new, p.value_dim)


def square_wave(kind, harmonic_cutoff):
    """Fourier truncation of sign(sin) or sign(cos) at |frequency| <= cutoff.

    Odd harmonics only: sign(sin) has sine coefficients 4/(pi k), sign(cos)
    the alternating cosine series.
    """
    if kind not in ("sqsin", "sqcos"):
        raise InvalidInputError(f"kind must be 'sqsin' or 'sqcos', got {kind!r}")
    if harmonic_cutoff < 1:
        raise InvalidInputError("harmonic cutoff must be >= 1")
    terms = {}
    for k in range(1, harmonic_cutoff + 1, 2):
        if kind == "sqsin":
            c = -2.0j / (math.pi * k)
            terms[(k,)] = c
            terms[(-k,)] = -c
        else:
            c = 2.0 * (-1.0) ** ((k - 1) // 2) / (math.pi * k)
            terms[(k,)] = c
            terms[(-k,)] = c
    return make_poly(1, 1, terms)


def square_wave_exact(kind, theta):
    """Pointwise sign(sin theta) or sign(cos theta), with sign(0) = 0."""
    val = math.sin(theta) if kind == "sqsin" else math.cos(theta)
    return float(np.sign(val))


def square_wave_arc_values(kind):
    table = SQSIN_ARC_VALUES if kind == "sqsin" else SQCOS_ARC_VALUES
    return dict(table)


def riesz_apply(j, p: TrigPoly):
    """Multiplier -i n_j / |n| on a single-cluster poly; the zero mode is killed."""
    if p.clusters != 1:
        raise InvalidInputError("riesz_apply expects a single-cluster poly")
    if not 1 <= j <= p.d:
        raise InvalidInputError(f"j must be in [1, {p.d}], got {j}")

    def mul(freq, coeff):
        norm = math.sqrt(sum(x * x for x in freq))
        if norm == 0.0:
            return None
        factor = -1j * freq[j - 1] / norm
        return coeff * factor if factor != 0 else None

    return p.map_terms(mul)


def directional_hilbert(j, p: TrigPoly):
    """Multiplier -i sign(n_j) in the j-th coordinate of the stack; sign(0) = 0."""
    if not 1 <= j <= p.total_dim:
        raise InvalidInputError(f"j must be in [1, {p.total_dim}], got {j}")

    def mul(freq, coeff):
        s = (freq[j - 1] > 0) - (freq[j - 1] < 0)
        if s == 0:
            return None
        return coeff * (-1j * s)

    return p.map_terms(mul)


def inner_product(p: TrigPoly, q: TrigPoly):
    """Parseval pairing sum_l <p(l), conj(q(l))>; the normalized torus integral."""
    if (p.d, p.clusters, p.value_dim) != (q.d, q.clusters, q.value_dim):
        raise InvalidInputError("cluster structure mismatch in inner product")
    total = 0.0 + 0.0j
    small, large = (p.terms, q.terms) if len(p.terms) <= len(q.terms) else (q.terms, p.terms)
    flipped = small is q.terms
    for freq, coeff in small.items():
        other = large.get(freq)
        if other is not None:
            if flipped:
                total += complex(np.sum(other * np.conj(coeff)))
            else:
                total += complex(np.sum(coeff * np.conj(other)))
    return total


def poly_norm(p: TrigPoly):
    return math.sqrt(max(inner_product(p, p).real, 0.0))


@dataclass(frozen=True)
class ArcBundle:
    """Arc-indexed family of polys, the image of the quarter-arc projection.

    Each member poly carries frequency 0 in the projected coordinate; the
    bundle as a function selects the member whose arc contains that
    coordinate of the evaluation point.
    """

    var: int  # 1-based projected variable
    arcs: dict  # arc label -> TrigPoly

    def evaluate(self, theta):
        n = arc_of_angle(float(np.asarray(theta)[self.var - 1]))
        return self.arcs[n].evaluate(theta)

    def member(self, n):
        return self.arcs[n]


def quarter_arc_project(j, p: TrigPoly):
    """Replace dependence on variable j by arc averages; one poly per arc."""
    if p.clusters != 1:
        raise InvalidInputError("quarter_arc_project expects a single-cluster poly")
    if not 1 <= j <= p.d:
        raise InvalidInputError(f"j must be in [1, {p.d}], got {j}")
    arcs = {}
    for n in ARC_NS:
        terms = {}
        for freq, coeff in p.terms.items():
            k = freq[j - 1]
            zeroed = freq[: j - 1] + (0,) + freq[j:]
            add = coeff * arc_average(k, n)
            if zeroed in terms:
                terms[zeroed] = terms[zeroed] + add
            else:
                terms[zeroed] = add
        arcs[n] = TrigPoly(p.d, p.clusters, terms, p.value_dim)
    return ArcBundle(j, arcs)


def bundle_inner(a: ArcBundle, b: ArcBundle):
    """Normalized integral of a * conj(b) over the torus, arc by arc."""
    if a.var != b.var:
        raise InvalidInputError("bundles project different variables")
    total = 0.0 + 0.0j
    for n in ARC_NS:
        total += 0.25 * inner_product(a.arcs[n], b.arcs[n])
    return total


def bundle_poly_inner(a: ArcBundle, q: TrigPoly):
    """Normalized integral of a * conj(q) with q an ordinary poly."""
    total = 0.0 + 0.0j
    for n in ARC_NS:
        member = a.arcs[n]
        for freq, coeff in q.terms.items():
            k = freq[a.var - 1]
            zeroed = freq[: a.var - 1] + (0,) + freq[a.var :]
            mine = member.terms.get(zeroed)
            if mine is not None:
                weight = np.conj(arc_exp_integral(k, n)) / TWO_PI
                total += complex(np.sum(mine * np.conj(coeff))) * weight
    return total


def bundle_norm(a: ArcBundle):
    return math.sqrt(max(bundle_inner(a, a).real, 0.0))


def bundle_combine(a: ArcBundle, b: ArcBundle, ca=1.0, cb=1.0):
    if a.var != b.var:
        raise InvalidInputError("bundles project different variables")
    arcs = {n: a.arcs[n].scale(ca).add(b.arcs[n].scale(cb)) for n in ARC_NS}
    return ArcBundle(a.var, arcs)
