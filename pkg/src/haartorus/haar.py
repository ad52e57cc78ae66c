"""L2-normalized dyadic Haar system on the unit interval and unit cube.

Conventions (global for the whole package):
  * h_I = (chi_left - chi_right) / sqrt|I|, the LEFT half is the "+" child;
  * node (t, i) is the dyadic interval [i 2^-t, (i+1) 2^-t);
  * basis order: mean mode first, then position(t, i) = 2^t + i;
  * functions are represented by their averages on the finest dyadic grid.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInputError
from .valuespace import as_components


@dataclass(frozen=True)
class DyadicNode:
    """A dyadic interval (or cube-splitting node when split_dim is set)."""

    depth: int
    index: int
    split_dim: int | None = None

    def __post_init__(self):
        if self.depth < 0:
            raise InvalidInputError(f"depth must be nonnegative, got {self.depth}")
        if not 0 <= self.index < (1 << self.depth):
            raise InvalidInputError(
                f"index {self.index} out of range for depth {self.depth}"
            )

    def parent(self):
        if self.depth == 0:
            raise InvalidInputError("the root node has no parent")
        return DyadicNode(self.depth - 1, self.index // 2)

    def children(self):
        return (
            DyadicNode(self.depth + 1, 2 * self.index),
            DyadicNode(self.depth + 1, 2 * self.index + 1),
        )

    def sibling(self):
        if self.depth == 0:
            raise InvalidInputError("the root node has no sibling")
        return DyadicNode(self.depth, self.index ^ 1)

    @property
    def is_left(self):
        return self.index % 2 == 0


def slice_of(node, d):
    """Residue class of the node's depth mod d (which slice it belongs to)."""
    if d < 1:
        raise InvalidInputError(f"slicing dimension must be >= 1, got {d}")
    return node.depth % d


def basis_position(depth, index):
    # mean mode occupies position 0; Haar modes follow in breadth-first order
    return (1 << depth) + index


@dataclass(frozen=True)
class HaarCoeffs:
    """Sparse Haar expansion; the two root modes are kept out of the tree map.

    mean_part is the coefficient of the constant mode, root_part the
    coefficient of the depth-0 Haar function; entries maps (depth, index)
    with depth >= 1 to coefficient vectors.
    """

    depth_limit: int
    value_dim: int
    mean_part: np.ndarray
    root_part: np.ndarray
    entries: dict

    def __post_init__(self):
        object.__setattr__(self, "mean_part", as_components(self.mean_part, self.value_dim))
        object.__setattr__(self, "root_part", as_components(self.root_part, self.value_dim))
        for (t, i), _ in self.entries.items():
            if t < 1 or t > self.depth_limit:
                raise InvalidInputError(f"entry depth {t} outside [1, {self.depth_limit}]")
            if not 0 <= i < (1 << t):
                raise InvalidInputError(f"entry index {i} out of range at depth {t}")

    def entry(self, depth, index):
        if depth == 0:
            return self.root_part
        return self.entries.get((depth, index), np.zeros(self.value_dim))

    def zeros_like(self, entries=None):
        z = np.zeros(self.value_dim)
        return HaarCoeffs(self.depth_limit, self.value_dim, z, z.copy(), entries or {})

    def coefficient_norm_sq(self):
        """Sum of squared coefficient norms, mean and root modes included."""
        total = float(np.sum(np.abs(self.mean_part) ** 2))
        total += float(np.sum(np.abs(self.root_part) ** 2))
        for v in self.entries.values():
            total += float(np.sum(np.abs(v) ** 2))
        return total


def coeff_inner(a: HaarCoeffs, b: HaarCoeffs):
    """Coefficient pairing sum_modes <a_m, conj(b_m)> (equals the grid L2 pairing)."""
    if a.value_dim != b.value_dim:
        raise InvalidInputError("value dimensions differ")
    total = np.sum(a.mean_part * np.conj(b.mean_part))
    total += np.sum(a.root_part * np.conj(b.root_part))
    for key, v in a.entries.items():
        w = b.entries.get(key)
        if w is not None:
            total += np.sum(v * np.conj(w))
    return complex(total) if np.iscomplexobj(a.mean_part) or np.iscomplexobj(b.mean_part) else float(np.real(total))


def _as_sample_array(samples):
    if isinstance(samples, np.ndarray):
        arr = samples
    else:
        rows = [as_components(getattr(s, "components", s)) for s in samples]
        arr = np.stack(rows, axis=0)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InvalidInputError(f"samples must be 1-d or 2-d, got shape {arr.shape}")
    if not np.iscomplexobj(arr):
        arr = arr.astype(np.float64)
    return arr


def haar_analyze(samples, depth_limit=None):
    """Expand finest-grid averages into Haar coefficients.

    samples holds 2^(depth_limit+1) grid averages; the coefficient at node
    (t, i) is (avg_left - avg_right) * 2^(-t/2 - 1).
    """
    arr = _as_sample_array(samples)
    n = arr.shape[0]
    if n < 2 or n & (n - 1):
        raise InvalidInputError(f"sample count must be a power of two >= 2, got {n}")
    inferred = n.bit_length() - 2
    if depth_limit is None:
        depth_limit = inferred
    elif depth_limit != inferred:
        raise InvalidInputError(
            f"depth_limit {depth_limit} needs {1 << (depth_limit + 1)} samples, got {n}"
        )
    value_dim = arr.shape[1]
    entries = {}
    avg = arr
    for t in range(depth_limit, -1, -1):
        left, right = avg[0::2], avg[1::2]
        scale = 0.5 * 2.0 ** (-t / 2.0)
        coeffs = (left - right) * scale
        for i in range(coeffs.shape[0]):
            c = coeffs[i]
            if t >= 1 and np.any(c):
                entries[(t, i)] = c.copy()
        avg = (left + right) * 0.5
        if t == 0:
            root = coeffs[0].copy()
    mean = avg[0].copy()
    return HaarCoeffs(depth_limit, value_dim, mean, root, entries)


def haar_synthesize(coeffs: HaarCoeffs):
    """Exact left inverse of haar_analyze; returns the grid-average array."""
    parts = [coeffs.mean_part, coeffs.root_part, *coeffs.entries.values()]
    dtype = np.result_type(*parts)
    cur = np.array([coeffs.mean_part], dtype=dtype)
    for t in range(coeffs.depth_limit + 1):
        nxt = np.repeat(cur, 2, axis=0)
        scale = 2.0 ** (t / 2.0)
        if t == 0:
            if np.any(coeffs.root_part):
                nxt[0] = nxt[0] + coeffs.root_part * scale
                nxt[1] = nxt[1] - coeffs.root_part * scale
        else:
            for (tt, i), c in coeffs.entries.items():
                if tt == t:
                    nxt[2 * i] = nxt[2 * i] + c * scale
                    nxt[2 * i + 1] = nxt[2 * i + 1] - c * scale
        cur = nxt
    return cur


def haar_basis_function(depth_limit, mode):
    """Grid samples of one basis element; mode is 'mean' or a (depth, index) pair."""
    n = 1 << (depth_limit + 1)
    if mode == "mean":
        return np.ones(n)
    t, i = mode
    coeffs = HaarCoeffs(
        depth_limit,
        1,
        np.zeros(1),
        np.ones(1) if t == 0 else np.zeros(1),
        {} if t == 0 else {(t, i): np.ones(1)},
    )
    return haar_synthesize(coeffs)[:, 0]


def interval_cube_bijection(node: DyadicNode, d):
    """Swap a node between interval mode and cube mode (slice = split direction)."""
    if d < 1:
        raise InvalidInputError(f"dimension must be >= 1, got {d}")
    if node.split_dim is None:
        return replace(node, split_dim=node.depth % d)
    if node.split_dim != node.depth % d:
        raise InvalidInputError(
            f"cube node split_dim {node.split_dim} inconsistent with depth {node.depth} mod {d}"
        )
    return replace(node, split_dim=None)


def cube_haar_eval(node: DyadicNode, point, root_mode=False):
    """Evaluate the iterated cube Haar function h_Q at a point of [0,1)^d.

    Splits cycle through the dimensions in order 0..d-1; the value is
    +-2^(depth/2) inside the node's cube (sign from the next split), else 0.
    The constant mode (root_mode=True) is identically 1 on the unit cube.
    """
    point = np.asarray(point, dtype=np.float64)
    d = point.shape[0]
    if np.any(point < 0.0) or np.any(point >= 1.0):
        raise InvalidInputError("point must lie in the half-open unit cube")
    if root_mode:
        return 1.0
    if node.split_dim is not None and node.split_dim != node.depth % d:
        raise InvalidInputError("node split_dim inconsistent with point dimension")
    lo = np.zeros(d)
    hi = np.ones(d)
    t = node.depth
    for s in range(1, t + 1):
        u = (s - 1) % d
        bit = (node.index >> (t - s)) & 1
        mid = 0.5 * (lo[u] + hi[u])
        if bit == 0:
            hi[u] = mid
        else:
            lo[u] = mid
        if not lo[u] <= point[u] < hi[u]:
            return 0.0
    u = t % d
    mid = 0.5 * (lo[u] + hi[u])
    sign = 1.0 if point[u] < mid else -1.0
    return sign * 2.0 ** (t / 2.0)
