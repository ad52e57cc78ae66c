"""Finite-dimensional value vectors with a selectable norm."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

NORM_TAGS = ("euclidean", "max", "one")


def as_components(value, dim=None):
    """Coerce a scalar or sequence to a 1-d numpy array of components."""
    arr = np.atleast_1d(np.asarray(value))
    if arr.ndim != 1:
        raise InvalidInputError(f"value must be scalar or 1-d, got shape {arr.shape}")
    if not np.iscomplexobj(arr):
        arr = arr.astype(np.float64)
    if dim is not None and arr.shape[0] != dim:
        raise InvalidInputError(f"expected {dim} components, got {arr.shape[0]}")
    return arr


def vec_norm(components, norm_tag="euclidean"):
    arr = np.asarray(components)
    if norm_tag == "euclidean":
        return float(np.sqrt(np.sum(np.abs(arr) ** 2)))
    if norm_tag == "max":
        return float(np.max(np.abs(arr))) if arr.size else 0.0
    if norm_tag == "one":
        return float(np.sum(np.abs(arr)))
    raise InvalidInputError(f"unknown norm tag {norm_tag!r}; choose from {NORM_TAGS}")


@dataclass(frozen=True)
class ValueVec:
    """Element of the finite-dimensional value space standing in for X."""

    components: np.ndarray
    norm_tag: str = "euclidean"

    def __post_init__(self):
        object.__setattr__(self, "components", as_components(self.components))
        if self.norm_tag not in NORM_TAGS:
            raise InvalidInputError(f"unknown norm tag {self.norm_tag!r}")

    @property
    def dim(self):
        return int(self.components.shape[0])

    def norm(self):
        return vec_norm(self.components, self.norm_tag)
