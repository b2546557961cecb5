"""Carnot-Caratheodory distance: geodesic shooting, eikonal oracle, gauge.

The H^1 distance from the origin is computed from the geodesic structure of
the group: unit-speed geodesics from the origin are lifts of circular arcs,

    x(t) + i y(t) = e^{i alpha} (e^{i k t} - 1) / (i k),
    z(t) = (k t - sin k t) / (2 k^2),

so a target with planar radius r = |(x, y)| and height z > 0 determines the
arc angle theta = k t through

    z / r^2 = (theta - sin theta) / (8 sin^2(theta/2)),

which is strictly increasing on (0, 2pi) and is solved by bisection; the
length is then d = theta * r / (2 sin(theta/2)).  Points on the center axis
take the limit d = 2 sqrt(pi |z|); points with z = 0 are reached by straight
horizontal segments, d = r.

The eikonal field solves |grad_H u| = 1 with a monotone Lax-Friedrichs
sweeping scheme and never touches the shooting solver: its only seed data are
u = 0 at the origin and the elementary exact values on the z = 0 plane
(straight horizontal lines), so the two methods cross-validate each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError
from .grid import (
    GridFunction,
    horizontal_gradient_norm,
    interior_mask,
    sub_laplacian,
)
from .groups import AbelianGroup, CarnotGroup, Heisenberg1

_AXIS_SWITCH = 1e12   # use the center-axis formula once z / r^2 exceeds this
_PLANE_SWITCH = 1e-12


def _phase_ratio(theta):
    s = np.sin(0.5 * theta)
    return (theta - np.sin(theta)) / (8.0 * s * s)


def heisenberg_distance_origin(coords):
    """Vectorized CC distance d(0, x) on H^1 by geodesic shooting."""
    coords = np.asarray(coords, dtype=float)
    x = coords[..., 0]
    y = coords[..., 1]
    z = np.abs(coords[..., 2])
    r = np.hypot(x, y)
    out = np.array(r, dtype=float, copy=True)

    with np.errstate(divide="ignore", invalid="ignore"):
        m = np.where(r > 0.0, z / (r * r), np.inf)
    m = np.where((r == 0.0) & (z == 0.0), 0.0, m)

    on_axis = m >= _AXIS_SWITCH
    out = np.where(on_axis, 2.0 * np.sqrt(np.pi * z), out)

    solve = (~on_axis) & (m > _PLANE_SWITCH)
    if np.any(solve):
        target = m[solve]
        lo = np.full(target.shape, 1e-12)
        hi = np.full(target.shape, 2.0 * np.pi - 1e-12)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            too_low = _phase_ratio(mid) < target
            lo = np.where(too_low, mid, lo)
            hi = np.where(too_low, hi, mid)
        theta = 0.5 * (lo + hi)
        resid = np.abs(_phase_ratio(theta) - target) / (1.0 + target)
        if np.any(resid > 1e-6):
            raise NumericError(
                "geodesic phase bisection failed to converge",
                residual=float(np.max(resid)),
            )
        out_solve = theta * r[solve] / (2.0 * np.sin(0.5 * theta))
        out = np.asarray(out, dtype=float)
        out[solve] = out_solve
    return out if out.shape else float(out)


def cc_distance_origin(group: CarnotGroup, x):
    """CC distance from the identity; abelian groups reduce to the norm."""
    coords = group._check(x)
    if isinstance(group, AbelianGroup):
        return np.linalg.norm(coords, axis=-1)
    if isinstance(group, Heisenberg1):
        return heisenberg_distance_origin(coords)
    raise InputError(f"no distance solver for group {group.name!r}")


def cc_distance(group: CarnotGroup, a, b):
    """d(a, b) = d(0, a^{-1} o b); left-invariant by construction."""
    return cc_distance_origin(group, group.compose(group.inverse(a), b))


def koranyi_gauge(group: CarnotGroup, x):
    """Homogeneous gauge comparable to d; cheap surrogate for scales."""
    coords = group._check(x)
    if isinstance(group, AbelianGroup):
        return np.linalg.norm(coords, axis=-1)
    if isinstance(group, Heisenberg1):
        r2 = coords[..., 0] ** 2 + coords[..., 1] ** 2
        return (r2 * r2 + 16.0 * coords[..., 2] ** 2) ** 0.25
    raise InputError(f"no gauge for group {group.name!r}")


@dataclass
class DistanceField:
    """d(0, .) sampled on a box, tagged with the method that produced it."""

    grid: GridFunction
    method: str  # "shooting" | "eikonal"

    def __post_init__(self):
        if np.any(self.grid.values < -1e-12):
            raise InputError("distance field must be non-negative")

    def to_dict(self):
        d = self.grid.to_dict()
        d["method"] = self.method
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(GridFunction.from_dict(d), d.get("method", "shooting"))


def _origin_index(g: GridFunction):
    axes = g.axes()
    idx = []
    for a, ax in enumerate(axes):
        i = int(np.argmin(np.abs(ax)))
        if abs(ax[i]) > 1e-9 * max(1.0, ax[-1] - ax[0]):
            raise InputError("the origin must be a grid node")
        idx.append(i)
    return tuple(idx)


def shooting_distance_field(group, box, shape):
    g = GridFunction(np.asarray(box, float), np.zeros(tuple(int(n) for n in shape)))
    g.values = np.asarray(cc_distance_origin(group, g.mesh()), dtype=float)
    return DistanceField(g, "shooting")


def eikonal_distance_field(group, box, shape, tol=1e-8, max_cycles=3000):
    """Fast-sweeping solution of |grad_H u| = 1, u(0) = 0.

    Seeds: the origin node, plus (step-2 groups) the exact values u = r on
    the z = 0 node plane and (abelian) the exact spacing values on the axis
    neighbors of the origin.
    """
    from . import _sweep

    box = np.asarray(box, dtype=float)
    shape = tuple(int(n) for n in shape)
    g = GridFunction(box, np.zeros(shape))
    if np.any(box[:, 0] > 0) or np.any(box[:, 1] < 0):
        raise InputError("box must contain the origin")
    org = _origin_index(g)
    h = g.spacing
    big = 10.0 * float(np.sum(box[:, 1] - box[:, 0]))
    u = np.full(shape, big)
    frozen = np.zeros(shape, dtype=bool)
    u[org] = 0.0
    frozen[org] = True

    if isinstance(group, Heisenberg1):
        mesh = g.mesh()
        plane = np.abs(mesh[..., 2]) < 1e-12
        u[plane] = np.hypot(mesh[..., 0], mesh[..., 1])[plane]
        frozen[plane] = True
    else:
        for a in range(g.dim):
            for step in (-1, 1):
                idx = list(org)
                idx[a] += step
                if 0 <= idx[a] < shape[a]:
                    u[tuple(idx)] = h[a]
                    frozen[tuple(idx)] = True

    coeff = group.frame_coefficients(g.mesh())          # (*shape, N1, dim)
    C = np.ascontiguousarray(np.moveaxis(coeff, (-2, -1), (0, 1)))
    # local LF viscosities: |dH/dp_a| <= sqrt(sum_i C[i,a,x]^2) at each node
    sigma = np.ascontiguousarray(np.maximum(np.sqrt((C ** 2).sum(axis=0)), 1e-3))

    if g.dim == 3:
        cycles, err = _sweep.lf_sweep_3d(
            u, frozen, C, h[0], h[1], h[2], sigma, tol, max_cycles,
        )
        # third-order correction cycles on top of the monotone solution
        cycles_w, err = _sweep.weno_sweep_3d(
            u, frozen, C, h[0], h[1], h[2], sigma, tol, max_cycles,
        )
    elif g.dim == 2:
        cycles, err = _sweep.lf_sweep_2d(
            u, frozen, C, h[0], h[1], sigma, tol, max_cycles,
        )
    else:
        raise InputError("eikonal solver supports 2D and 3D grids")
    if err >= tol:
        raise NumericError("eikonal sweeping did not converge", residual=float(err))
    return DistanceField(g.with_values(u), "eikonal")


@dataclass
class GeometryConditionReport:
    """Measured standing assumptions on d outside the unit ball.

    ``k_geom`` is the smallest constant such that
    Lap d <= k_geom + U'(d) (|grad d|^2 - c0) at every tested node.
    """

    sup_grad: float
    inf_grad: float
    k_geom: float
    c0: float
    n_nodes: int
    grad_bound_ok: bool

    def to_dict(self):
        return {
            "sup_grad": self.sup_grad,
            "inf_grad": self.inf_grad,
            "k_geom": self.k_geom,
            "c0": self.c0,
            "n_nodes": self.n_nodes,
            "grad_bound_ok": self.grad_bound_ok,
        }


def check_metric_assumptions(
    field: DistanceField,
    potential,
    group,
    c0=0.5,
    grad_slack=0.1,
    axis_tube_factor=2.0,
):
    """Test |grad_H d| in [inf, sup] and fit the sub-Laplacian comparison.

    Nodes inside the unit ball {d < 1}, near the box faces, and (step >= 2)
    in a tube of radius ``axis_tube_factor * max(h)`` around the center axis
    are excluded: d is not smooth there.
    """
    g = field.grid
    h = g.spacing
    grad = horizontal_gradient_norm(g, group).values
    lap = sub_laplacian(g, group).values
    mask = interior_mask(g.shape, margin=2) & (g.values > 1.0)
    if group.step >= 2:
        mesh = g.mesh()
        r = np.hypot(mesh[..., 0], mesh[..., 1])
        mask &= r > axis_tube_factor * float(np.max(h[:2]))
    if not np.any(mask):
        raise InputError("no nodes left in the test region")
    d = g.values[mask]
    gm = grad[mask]
    lm = lap[mask]
    up = potential.du(d)
    k_geom = float(np.max(lm - up * (gm ** 2 - c0)))
    sup_g = float(np.max(gm))
    inf_g = float(np.min(gm))
    return GeometryConditionReport(
        sup_grad=sup_g,
        inf_grad=inf_g,
        k_geom=k_geom,
        c0=float(c0),
        n_nodes=int(np.count_nonzero(mask)),
        grad_bound_ok=bool(sup_g <= 1.0 + grad_slack),
    )
