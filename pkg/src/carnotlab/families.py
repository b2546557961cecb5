"""Seeded families of bounded test functions on a grid.

The inequalities quantify over all bounded f; the laboratory tests them on a
reproducible family drawn from four generator classes:

    bump         radial bumps in the homogeneous gauge
    exp          clipped exponentials of horizontal-linear forms
    fourier      smoothed random cosine fields
    calibration  e^{a x / 2} clipped, a in [0.1, 1] -- the near-extremal
                 class for the Gaussian log-Sobolev constant

Member idx is generated from a substream seeded by (family seed, idx), so a
family of count 2m contains the count-m family as its first half; fitted
constants should be stable under that doubling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .grid import GridFunction
from .metric import koranyi_gauge


@dataclass
class TestFunctionFamily:
    kinds: tuple = ("bump", "exp", "fourier")
    count: int = 12
    seed: int = 0
    bound: float = 3.0

    def __post_init__(self):
        self.kinds = tuple(self.kinds)
        known = {"bump", "exp", "fourier", "calibration"}
        bad = set(self.kinds) - known
        if bad:
            raise InputError(f"unknown generator kinds {sorted(bad)}")
        if self.count < 1:
            raise InputError("family count must be positive")
        if self.bound <= 0:
            raise InputError("family bound must be positive")

    def doubled(self):
        return TestFunctionFamily(self.kinds, 2 * self.count, self.seed, self.bound)

    def members(self, box, shape, group):
        """List of (label, GridFunction) with sup |f| <= bound."""
        template = GridFunction(np.asarray(box, float), np.zeros(tuple(shape)))
        mesh = template.mesh()
        out = []
        for idx in range(self.count):
            kind = self.kinds[idx % len(self.kinds)]
            rng = np.random.default_rng([self.seed, idx])
            vals = _GENERATORS[kind](mesh, group, rng, self.bound, idx, self.count)
            out.append((f"{kind}-{idx}", template.with_values(vals)))
        return out


def _bump(mesh, group, rng, bound, idx, count):
    rho = koranyi_gauge(group, mesh)
    scale = 0.5 * float(np.max(rho))
    r0 = rng.uniform(0.2, 1.0) * scale
    w = rng.uniform(0.3, 0.8) * scale
    amp = rng.uniform(0.3, 1.0) * bound
    return amp * np.exp(-(((rho - r0) / w) ** 2))


def _exp(mesh, group, rng, bound, idx, count):
    n1 = group.n_horizontal
    a = rng.normal(size=n1)
    a *= rng.uniform(0.2, 0.8) / max(np.linalg.norm(a), 1e-12)
    lin = np.tensordot(mesh[..., :n1], a, axes=([-1], [0]))
    return np.minimum(np.exp(lin), bound)


def _fourier(mesh, group, rng, bound, idx, count):
    acc = np.zeros(mesh.shape[:-1])
    # wavevectors scaled per stratum so oscillation is comparable per axis
    inv_w = 1.0 / group.weights.astype(float)
    for _ in range(4):
        k = rng.normal(size=group.dim) * 0.8 * inv_w
        phase = rng.uniform(0.0, 2.0 * np.pi)
        acc += rng.normal() * np.cos(np.tensordot(mesh, k, axes=([-1], [0])) + phase)
    amp = rng.uniform(0.3, 1.0) * bound
    return acc * amp / max(float(np.max(np.abs(acc))), 1e-12)


def _calibration(mesh, group, rng, bound, idx, count):
    # a sweeps [0.1, 1] deterministically across the family
    frac = (idx // 1) / max(count - 1, 1)
    a = 0.1 + 0.9 * frac
    return np.minimum(np.exp(0.5 * a * mesh[..., 0]), bound)


_GENERATORS = {
    "bump": _bump,
    "exp": _exp,
    "fourier": _fourier,
    "calibration": _calibration,
}
