"""Gibbs measures dmu = e^{-U(d)}/Z dlambda on grids and as sample clouds.

Grid measures use midpoint (cell-volume) quadrature so every node weight is
positive -- a hard requirement for the entropy and transport functionals
downstream.  The mass the box truncates away is estimated with a radial
integral of s^{Q-1} e^{-U(s)} (Q the homogeneous dimension) and configurations
whose tail estimate exceeds the threshold are refused rather than silently
normalized.

Sample clouds come from random-walk Metropolis in coordinates; the proposal
variance on a stratum-2 axis is the square of the stratum-1 variance, matching
how dilations scale the two strata.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import InputError, NumericError
from .grid import GridFunction
from .metric import DistanceField, cc_distance_origin
from .potentials import PotentialSpec


@dataclass
class RadialMeasure:
    """Normalized node weights for e^{-U(d)}/Z dlambda on a grid."""

    group: object
    potential: PotentialSpec
    distance: GridFunction     # d(0, .) on the box
    weights: GridFunction      # node masses, sum exactly 1
    Z: float                   # partition value before normalization
    tail_bound: float          # estimated relative mass outside the box

    def __post_init__(self):
        if np.any(self.weights.values < 0):
            raise InputError("measure weights must be non-negative")
        total = float(self.weights.values.sum())
        if abs(total - 1.0) > 1e-9:
            raise InputError(f"measure weights must sum to 1, got {total}")

    @property
    def box(self):
        return self.weights.box

    def to_dict(self):
        d = self.weights.to_dict()
        d["weights"] = d.pop("values")
        d["Z"] = self.Z
        d["tail_bound"] = self.tail_bound
        return d


def _radial_tail_fraction(potential, Q, R, s_max=None):
    """Fraction of integral s^{Q-1} e^{-U(s)} ds lying beyond R."""
    u0 = float(potential.u(max(R, 1.0)))

    def dens(s):
        return s ** (Q - 1) * np.exp(-(potential.u(s) - u0))

    total, _ = integrate.quad(dens, 0.0, np.inf, limit=200)
    tail, _ = integrate.quad(dens, R, np.inf, limit=200)
    if total <= 0:
        return 1.0
    return tail / total


def _boundary_min(values):
    """Minimum of an array over its boundary faces."""
    m = np.inf
    for a in range(values.ndim):
        for side in (0, -1):
            m = min(m, float(np.min(np.take(values, side, axis=a))))
    return m


def build_measure(group, distance, potential, tail_threshold=1e-6):
    """Construct the normalized grid measure for e^{-U(d)}.

    ``distance`` is a DistanceField (or plain GridFunction carrying d); the
    tail estimate uses the smallest distance reached on the box faces as the
    truncation radius.  Raises InputError with a box-enlargement hint when the
    estimated tail mass exceeds ``tail_threshold``.
    """
    if isinstance(distance, DistanceField):
        dgrid = distance.grid
    elif isinstance(distance, GridFunction):
        dgrid = distance
    else:
        raise InputError("distance must be a DistanceField or GridFunction")

    d = dgrid.values
    R = _boundary_min(d)
    tail = _radial_tail_fraction(potential, group.homogeneous_dim, R)
    if tail > tail_threshold:
        raise InputError(
            f"estimated truncated mass {tail:.2e} exceeds threshold "
            f"{tail_threshold:.2e}; enlarge the box (boundary distance {R:.3g})"
        )

    w = np.exp(-potential.u(d)) * dgrid.cell_volume()
    Z = float(w.sum())
    if not np.isfinite(Z) or Z <= 0:
        raise NumericError("partition value is not positive finite", residual=Z)
    w = w / w.sum()
    # nudge so the weights sum to 1 exactly regardless of rounding
    w = w / w.sum()
    return RadialMeasure(group, potential, dgrid, dgrid.with_values(w), Z, tail)


@dataclass
class SampleCloud:
    """Empirical measure: points with weights and sampling provenance."""

    points: np.ndarray        # (n, dim)
    weights: np.ndarray       # (n,), sums to 1
    provenance: dict

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.points.ndim != 2 or self.points.shape[0] != self.weights.shape[0]:
            raise InputError("points and weights must have matching length")
        if abs(self.weights.sum() - 1.0) > 1e-9:
            raise InputError("cloud weights must sum to 1")

    @property
    def n(self):
        return self.points.shape[0]

    def to_dict(self):
        return {
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
            "provenance": self.provenance,
        }


def mcmc_sample(measure: RadialMeasure, n, seed, thin=5, step_scale=0.5):
    """Random-walk Metropolis cloud targeting e^{-U(d(0, .))}.

    The chain runs burn-in (20% of the kept-sample budget) plus n*thin steps
    and keeps every ``thin``-th state.  The proposal is an independent normal
    per axis; stratum-1 axes use scale step_scale * r_typ with r_typ the
    quadrature mean of d under the measure, and stratum-i axes use that scale
    to the i-th power.
    """
    if n < 1000:
        raise InputError("need at least 1000 samples for a usable cloud")
    group = measure.group
    pot = measure.potential
    rng = np.random.default_rng(seed)

    r_typ = float((measure.weights.values * measure.distance.values).sum())
    base = step_scale * max(r_typ, 1e-3)
    scales = base ** group.weights.astype(float)

    steps = n * thin
    burn = max(1, steps // 5)
    total = burn + steps

    x = np.zeros(group.dim)
    logp = -float(pot.u(cc_distance_origin(group, x)))
    kept = np.empty((n, group.dim))
    n_acc = 0
    k = 0
    for it in range(total):
        prop = x + rng.normal(size=group.dim) * scales
        lp = -float(pot.u(cc_distance_origin(group, prop)))
        if lp - logp >= np.log(rng.uniform()):
            x = prop
            logp = lp
            n_acc += 1
        if it >= burn and (it - burn) % thin == thin - 1:
            kept[k] = x
            k += 1
    rate = n_acc / total
    if n_acc == 0:
        raise NumericError("Metropolis chain accepted no proposals", residual=0.0)
    warnings = []
    if not (0.1 <= rate <= 0.7):
        warnings.append(f"acceptance rate {rate:.3f} outside [0.1, 0.7]")
    prov = {
        "seed": int(seed),
        "chain_length": int(total),
        "burn_in": int(burn),
        "thin": int(thin),
        "acceptance_rate": rate,
        "warnings": warnings,
    }
    return SampleCloud(kept[:k], np.full(k, 1.0 / k), prov)


def expectation(measure, f):
    """Integral of f against a RadialMeasure or SampleCloud.

    ``f`` may be a callable of coordinates (shape (..., dim)), a GridFunction
    on the measure's grid, or a plain array of node/point values.
    """
    if isinstance(measure, RadialMeasure):
        if callable(f):
            vals = np.asarray(f(measure.weights.mesh()), dtype=float)
        elif isinstance(f, GridFunction):
            vals = f.values
        else:
            vals = np.asarray(f, dtype=float)
        if vals.shape != measure.weights.shape:
            raise InputError("observable shape does not match the grid")
        if not np.all(np.isfinite(vals)):
            raise InputError("observable must be finite on the support")
        return float((measure.weights.values * vals).sum())
    if isinstance(measure, SampleCloud):
        if callable(f):
            vals = np.asarray(f(measure.points), dtype=float)
        else:
            vals = np.asarray(f, dtype=float)
        if vals.shape != (measure.n,):
            raise InputError("observable must produce one value per point")
        if not np.all(np.isfinite(vals)):
            raise InputError("observable must be finite on the support")
        return float((measure.weights * vals).sum())
    raise InputError("expectation needs a RadialMeasure or SampleCloud")
