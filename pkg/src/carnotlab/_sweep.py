"""Lax-Friedrichs fast-sweeping kernels for |A(x) grad u| = 1.

The Hamiltonian is H(p, x) = sqrt(sum_i (sum_a C[i,a,x] p_a)^2) with C the
horizontal-frame coefficients sampled on the grid.  The update is the
standard monotone LF sweeping scheme (Kao-Osher-Qian): central differences,
per-axis artificial viscosities bounding |dH/dp_a|, Gauss-Seidel passes over
all sweep orderings, linear extrapolation ghost values at the box faces.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def lf_sweep_3d(u, frozen, C, hx, hy, hz, sig, tol, max_cycles):
    # sig: per-node viscosities, shape (3, nx, ny, nz) (local LF)
    nx, ny, nz = u.shape
    nf = C.shape[0]
    for cycle in range(max_cycles):
        err = 0.0
        for sweep in range(8):
            if sweep & 1:
                xr = range(nx - 1, -1, -1)
            else:
                xr = range(nx)
            for i in xr:
                if sweep & 2:
                    yr = range(ny - 1, -1, -1)
                else:
                    yr = range(ny)
                for j in yr:
                    if sweep & 4:
                        zr = range(nz - 1, -1, -1)
                    else:
                        zr = range(nz)
                    for k in zr:
                        if frozen[i, j, k]:
                            continue
                        uc = u[i, j, k]
                        uxm = u[i - 1, j, k] if i > 0 else 2.0 * uc - u[i + 1, j, k]
                        uxp = u[i + 1, j, k] if i < nx - 1 else 2.0 * uc - u[i - 1, j, k]
                        uym = u[i, j - 1, k] if j > 0 else 2.0 * uc - u[i, j + 1, k]
                        uyp = u[i, j + 1, k] if j < ny - 1 else 2.0 * uc - u[i, j - 1, k]
                        uzm = u[i, j, k - 1] if k > 0 else 2.0 * uc - u[i, j, k + 1]
                        uzp = u[i, j, k + 1] if k < nz - 1 else 2.0 * uc - u[i, j, k - 1]
                        px = (uxp - uxm) / (2.0 * hx)
                        py = (uyp - uym) / (2.0 * hy)
                        pz = (uzp - uzm) / (2.0 * hz)
                        ham = 0.0
                        for f in range(nf):
                            v = (
                                C[f, 0, i, j, k] * px
                                + C[f, 1, i, j, k] * py
                                + C[f, 2, i, j, k] * pz
                            )
                            ham += v * v
                        ham = np.sqrt(ham)
                        sx = sig[0, i, j, k]
                        sy = sig[1, i, j, k]
                        sz = sig[2, i, j, k]
                        denom = sx / hx + sy / hy + sz / hz
                        cand = (
                            1.0
                            - ham
                            + sx * (uxp + uxm) / (2.0 * hx)
                            + sy * (uyp + uym) / (2.0 * hy)
                            + sz * (uzp + uzm) / (2.0 * hz)
                        ) / denom
                        if cand < uc:
                            if uc - cand > err:
                                err = uc - cand
                            u[i, j, k] = cand
        if err < tol:
            return cycle + 1, err
    return max_cycles, err


@numba.njit(cache=True, inline="always")
def _weno_pair(um2, um1, uc, up1, up2, h):
    """WENO3 one-sided derivative approximations (p_minus, p_plus) at uc."""
    eps = 1e-6
    central = (up1 - um1) / (2.0 * h)
    # minus side
    a = uc - 2.0 * um1 + um2
    b = up1 - 2.0 * uc + um1
    rm = (eps + a * a) / (eps + b * b)
    wm = 1.0 / (1.0 + 2.0 * rm * rm)
    pm = (1.0 - wm) * central + wm * (3.0 * uc - 4.0 * um1 + um2) / (2.0 * h)
    # plus side
    c = up2 - 2.0 * up1 + uc
    rp = (eps + c * c) / (eps + b * b)
    wp = 1.0 / (1.0 + 2.0 * rp * rp)
    pp = (1.0 - wp) * central + wp * (-3.0 * uc + 4.0 * up1 - up2) / (2.0 * h)
    return pm, pp


@numba.njit(cache=True)
def weno_sweep_3d(u, frozen, C, hx, hy, hz, sig, tol, max_cycles):
    """Third-order refinement cycles; run after lf_sweep_3d has converged.

    One-sided derivatives are WENO3 away from the faces and first-order
    differences in the two-node face margin.  The update rewrites the WENO
    derivatives as surrogate neighbor values and reuses the monotone LF
    solve for the node value.
    """
    nx, ny, nz = u.shape
    nf = C.shape[0]
    err = 0.0
    for cycle in range(max_cycles):
        err = 0.0
        for sweep in range(8):
            if sweep & 1:
                xr = range(nx - 1, -1, -1)
            else:
                xr = range(nx)
            for i in xr:
                if sweep & 2:
                    yr = range(ny - 1, -1, -1)
                else:
                    yr = range(ny)
                for j in yr:
                    if sweep & 4:
                        zr = range(nz - 1, -1, -1)
                    else:
                        zr = range(nz)
                    for k in zr:
                        if frozen[i, j, k]:
                            continue
                        uc = u[i, j, k]
                        if 2 <= i < nx - 2:
                            pxm, pxp = _weno_pair(
                                u[i - 2, j, k], u[i - 1, j, k], uc,
                                u[i + 1, j, k], u[i + 2, j, k], hx,
                            )
                        else:
                            uxm = u[i - 1, j, k] if i > 0 else 2.0 * uc - u[i + 1, j, k]
                            uxp = u[i + 1, j, k] if i < nx - 1 else 2.0 * uc - u[i - 1, j, k]
                            pxm = (uc - uxm) / hx
                            pxp = (uxp - uc) / hx
                        if 2 <= j < ny - 2:
                            pym, pyp = _weno_pair(
                                u[i, j - 2, k], u[i, j - 1, k], uc,
                                u[i, j + 1, k], u[i, j + 2, k], hy,
                            )
                        else:
                            uym = u[i, j - 1, k] if j > 0 else 2.0 * uc - u[i, j + 1, k]
                            uyp = u[i, j + 1, k] if j < ny - 1 else 2.0 * uc - u[i, j - 1, k]
                            pym = (uc - uym) / hy
                            pyp = (uyp - uc) / hy
                        if 2 <= k < nz - 2:
                            pzm, pzp = _weno_pair(
                                u[i, j, k - 2], u[i, j, k - 1], uc,
                                u[i, j, k + 1], u[i, j, k + 2], hz,
                            )
                        else:
                            uzm = u[i, j, k - 1] if k > 0 else 2.0 * uc - u[i, j, k + 1]
                            uzp = u[i, j, k + 1] if k < nz - 1 else 2.0 * uc - u[i, j, k - 1]
                            pzm = (uc - uzm) / hz
                            pzp = (uzp - uc) / hz
                        # surrogate neighbors reproducing the WENO slopes
                        vxm = uc - hx * pxm
                        vxp = uc + hx * pxp
                        vym = uc - hy * pym
                        vyp = uc + hy * pyp
                        vzm = uc - hz * pzm
                        vzp = uc + hz * pzp
                        px = (vxp - vxm) / (2.0 * hx)
                        py = (vyp - vym) / (2.0 * hy)
                        pz = (vzp - vzm) / (2.0 * hz)
                        ham = 0.0
                        for f in range(nf):
                            v = (
                                C[f, 0, i, j, k] * px
                                + C[f, 1, i, j, k] * py
                                + C[f, 2, i, j, k] * pz
                            )
                            ham += v * v
                        ham = np.sqrt(ham)
                        sx = sig[0, i, j, k]
                        sy = sig[1, i, j, k]
                        sz = sig[2, i, j, k]
                        denom = sx / hx + sy / hy + sz / hz
                        cand = (
                            1.0
                            - ham
                            + sx * (vxp + vxm) / (2.0 * hx)
                            + sy * (vyp + vym) / (2.0 * hy)
                            + sz * (vzp + vzm) / (2.0 * hz)
                        ) / denom
                        diff = cand - uc
                        if diff < 0.0:
                            diff = -diff
                        if diff > err:
                            err = diff
                        u[i, j, k] = cand
        if err < tol:
            return cycle + 1, err
    return max_cycles, err


@numba.njit(cache=True)
def lf_sweep_2d(u, frozen, C, hx, hy, sig, tol, max_cycles):
    # sig: per-node viscosities, shape (2, nx, ny) (local LF)
    nx, ny = u.shape
    nf = C.shape[0]
    for cycle in range(max_cycles):
        err = 0.0
        for sweep in range(4):
            if sweep & 1:
                xr = range(nx - 1, -1, -1)
            else:
                xr = range(nx)
            for i in xr:
                if sweep & 2:
                    yr = range(ny - 1, -1, -1)
                else:
                    yr = range(ny)
                for j in yr:
                    if frozen[i, j]:
                        continue
                    uc = u[i, j]
                    uxm = u[i - 1, j] if i > 0 else 2.0 * uc - u[i + 1, j]
                    uxp = u[i + 1, j] if i < nx - 1 else 2.0 * uc - u[i - 1, j]
                    uym = u[i, j - 1] if j > 0 else 2.0 * uc - u[i, j + 1]
                    uyp = u[i, j + 1] if j < ny - 1 else 2.0 * uc - u[i, j - 1]
                    px = (uxp - uxm) / (2.0 * hx)
                    py = (uyp - uym) / (2.0 * hy)
                    ham = 0.0
                    for f in range(nf):
                        v = C[f, 0, i, j] * px + C[f, 1, i, j] * py
                        ham += v * v
                    ham = np.sqrt(ham)
                    sx = sig[0, i, j]
                    sy = sig[1, i, j]
                    denom = sx / hx + sy / hy
                    cand = (
                        1.0
                        - ham
                        + sx * (uxp + uxm) / (2.0 * hx)
                        + sy * (uyp + uym) / (2.0 * hy)
                    ) / denom
                    if cand < uc:
                        if uc - cand > err:
                            err = uc - cand
                        u[i, j] = cand
        if err < tol:
            return cycle + 1, err
    return max_cycles, err
