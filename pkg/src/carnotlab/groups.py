"""Stratified (Carnot) group structures on R^N.

A group is described by its strata dimensions (N_1, ..., N_r), a closed-form
polynomial composition law, and the horizontal frame: the N_1 left-invariant
vector fields Z_1, ..., Z_{N_1} that reduce to the coordinate directions at
the origin.  Dilations scale the coordinates of stratum i by lambda^i.

Two concrete instances are provided: the abelian group R^n (step 1) and the
first Heisenberg group H^1 (step 2, N = 3) with the antisymmetric convention

    (x1, y1, z1) o (x2, y2, z2) = (x1+x2, y1+y2, z1+z2 + (x1*y2 - y1*x2)/2)

whose frame is X1 = d/dx - (y/2) d/dz, X2 = d/dy + (x/2) d/dz, so that
[X1, X2] = d/dz.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class StratifiedPoint:
    """A group element carried as graded coordinates.

    ``weights[j]`` is the stratum index of coordinate j, i.e. the exponent
    with which dilation acts on that coordinate.
    """

    coords: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=int))
        if self.coords.shape != self.weights.shape:
            raise InputError("coords and weights must have equal length")
        if np.any(np.diff(self.weights) < 0):
            raise InputError("weights must be non-decreasing")


class CarnotGroup:
    """Base class: holds strata bookkeeping, delegates the group law."""

    name: str
    strata: tuple

    def __init__(self, name, strata):
        self.name = name
        self.strata = tuple(int(n) for n in strata)
        if any(n <= 0 for n in self.strata):
            raise InputError("strata dimensions must be positive")
        w = []
        for i, n in enumerate(self.strata, start=1):
            w.extend([i] * n)
        self.weights = np.array(w, dtype=int)

    @property
    def dim(self):
        return int(sum(self.strata))

    @property
    def n_horizontal(self):
        return self.strata[0]

    @property
    def step(self):
        return len(self.strata)

    @property
    def homogeneous_dim(self):
        return int(sum((i + 1) * n for i, n in enumerate(self.strata)))

    # -- group law -------------------------------------------------------

    def identity(self):
        return np.zeros(self.dim)

    def point(self, coords):
        return StratifiedPoint(np.asarray(coords, dtype=float), self.weights)

    def _check(self, *arrays):
        out = []
        for a in arrays:
            if isinstance(a, StratifiedPoint):
                a = a.coords
            a = np.asarray(a, dtype=float)
            if a.shape[-1] != self.dim:
                raise InputError(
                    f"expected coordinate length {self.dim}, got {a.shape[-1]}"
                )
            out.append(a)
        return out if len(out) > 1 else out[0]

    def compose(self, a, b):
        a, b = self._check(a, b)
        return self._compose(a, b)

    def inverse(self, a):
        a = self._check(a)
        return self._inverse(a)

    def dilate(self, lam, a):
        if np.any(np.asarray(lam) <= 0):
            raise InputError("dilation parameter must be positive")
        a = self._check(a)
        return a * np.asarray(lam) ** self.weights

    # -- horizontal frame ------------------------------------------------

    def frame_coefficients(self, coords):
        """Coefficients of Z_1..Z_{N1} in the coordinate basis.

        ``coords`` has shape (..., dim); the result has shape
        (..., N1, dim) with result[..., i, a] the d/dx_a coefficient of Z_i.
        """
        coords = self._check(coords)
        return self._frame(coords)

    # subclass hooks
    def _compose(self, a, b):
        raise NotImplementedError

    def _inverse(self, a):
        raise NotImplementedError

    def _frame(self, coords):
        raise NotImplementedError


class AbelianGroup(CarnotGroup):
    """R^n with vector addition; the step-1 sanity instance."""

    def __init__(self, n):
        super().__init__(f"abelian:{n}", (n,))

    def _compose(self, a, b):
        return a + b

    def _inverse(self, a):
        return -a

    def _frame(self, coords):
        shape = coords.shape[:-1]
        eye = np.eye(self.dim)
        return np.broadcast_to(eye, shape + (self.dim, self.dim)).copy()


class Heisenberg1(CarnotGroup):
    """First Heisenberg group H^1 on R^3, strata (2, 1)."""

    def __init__(self):
        super().__init__("heisenberg1", (2, 1))

    def _compose(self, a, b):
        out = a + b
        out[..., 2] += 0.5 * (a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0])
        return out

    def _inverse(self, a):
        # z-term is antisymmetric, so negation inverts exactly
        return -a

    def _frame(self, coords):
        shape = coords.shape[:-1]
        out = np.zeros(shape + (2, 3))
        out[..., 0, 0] = 1.0
        out[..., 0, 2] = -0.5 * coords[..., 1]
        out[..., 1, 1] = 1.0
        out[..., 1, 2] = 0.5 * coords[..., 0]
        return out


def get_group(name):
    """Resolve a group by configuration name: "abelian:n" or "heisenberg1"."""
    name = name.strip().lower()
    if name == "heisenberg1":
        return Heisenberg1()
    if name.startswith("abelian:"):
        try:
            n = int(name.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad abelian dimension in group name {name!r}")
        if n < 1:
            raise InputError("abelian dimension must be >= 1")
        return AbelianGroup(n)
    raise InputError(f"unknown group {name!r}")
