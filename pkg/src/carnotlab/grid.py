"""Scalar fields sampled on rectangular boxes, and the horizontal calculus.

GridFunction is the common currency of every solver in the package: a box
(per-axis min/max), a shape (per-axis node counts), and a value per node.
Nodes are the tensor grid of np.linspace along each axis, so spacing is
uniform per axis.

The sub-gradient of a field is computed by applying the group frame's
coordinate coefficients to centered finite differences (one-sided at the box
faces); the sub-Laplacian is the sum of squares of the frame fields, realised
by applying the first-order stencil twice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass
class GridFunction:
    box: np.ndarray        # (dim, 2) per-axis [min, max]
    values: np.ndarray     # shape == self.shape

    def __post_init__(self):
        self.box = np.asarray(self.box, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.box.ndim != 2 or self.box.shape[1] != 2:
            raise InputError("box must have shape (dim, 2)")
        if self.values.ndim != self.box.shape[0]:
            raise InputError("values rank must equal box dimension")
        if np.any(self.box[:, 1] <= self.box[:, 0]):
            raise InputError("box must have positive extent on every axis")
        if not np.all(np.isfinite(self.values)):
            raise InputError("grid values must be finite")

    @property
    def dim(self):
        return self.box.shape[0]

    @property
    def shape(self):
        return self.values.shape

    @property
    def spacing(self):
        return np.array(
            [
                (self.box[a, 1] - self.box[a, 0]) / (self.shape[a] - 1)
                for a in range(self.dim)
            ]
        )

    def axes(self):
        return [
            np.linspace(self.box[a, 0], self.box[a, 1], self.shape[a])
            for a in range(self.dim)
        ]

    def mesh(self):
        """Node coordinates as an array of shape (*shape, dim)."""
        grids = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack(grids, axis=-1)

    def with_values(self, values):
        return GridFunction(self.box.copy(), np.asarray(values, dtype=float))

    def cell_volume(self):
        return float(np.prod(self.spacing))

    # -- serialization ---------------------------------------------------

    def to_dict(self, include_values=True):
        d = {"box": self.box.tolist(), "shape": list(self.shape)}
        if include_values:
            d["values"] = self.values.ravel().tolist()
        return d

    @classmethod
    def from_dict(cls, d):
        box = np.asarray(d["box"], dtype=float)
        shape = tuple(int(n) for n in d["shape"])
        values = np.asarray(d["values"], dtype=float).reshape(shape)
        return cls(box, values)


def grid_from_callable(box, shape, fn):
    """Sample ``fn`` (taking an (..., dim) coordinate array) on the grid."""
    box = np.asarray(box, dtype=float)
    g = GridFunction(box, np.zeros(tuple(int(n) for n in shape)))
    g.values = np.asarray(fn(g.mesh()), dtype=float)
    return g


def _partials(f: GridFunction):
    """Coordinate partial derivatives, centered inside / one-sided at faces."""
    if any(n < 3 for n in f.shape):
        raise InputError("every axis needs at least 3 nodes for differences")
    if f.dim == 1:
        return [np.gradient(f.values, f.axes()[0])]
    return list(np.gradient(f.values, *f.axes()))


def horizontal_gradient(f: GridFunction, group):
    """Sub-gradient (Z_1 f, ..., Z_{N1} f) as a list of GridFunctions."""
    parts = _partials(f)
    coeff = group.frame_coefficients(f.mesh())  # (*shape, N1, dim)
    out = []
    for i in range(group.n_horizontal):
        acc = np.zeros(f.shape)
        for a in range(f.dim):
            c = coeff[..., i, a]
            if np.any(c != 0):
                acc += c * parts[a]
        out.append(f.with_values(acc))
    return out


def horizontal_gradient_norm(f: GridFunction, group):
    comps = horizontal_gradient(f, group)
    acc = np.zeros(f.shape)
    for c in comps:
        acc += c.values ** 2
    return f.with_values(np.sqrt(acc))


def sub_laplacian(f: GridFunction, group):
    """Sum of squares of the frame fields, by repeated stencil application."""
    first = horizontal_gradient(f, group)
    acc = np.zeros(f.shape)
    for i, zi_f in enumerate(first):
        second = horizontal_gradient(zi_f, group)
        acc += second[i].values
    return f.with_values(acc)


def interior_mask(shape, margin=1):
    """Boolean mask of nodes at least ``margin`` nodes away from every face."""
    mask = np.zeros(shape, dtype=bool)
    sl = tuple(slice(margin, n - margin) for n in shape)
    mask[sl] = True
    return mask
