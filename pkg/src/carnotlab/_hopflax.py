"""Numba kernel for the discrete Hopf-Lax infimal convolution on H^1.

The per-pair CC distance uses the homogeneous factorization

    d(0, (x, y, z)) = rho * G(phi),
    rho = ((x^2+y^2)^2 + 16 z^2)^{1/4},   phi = atan2(4|z|, x^2+y^2),

where G is a smooth profile on [0, pi/2] tabulated once from the geodesic
shooting solver (G(0) = 1, G(pi/2) = sqrt(pi)).  The search at each node is
restricted to the window that any minimizer must lie in:

    cost(d) <= f(x) - min f   with cost(d) = d^p / denom,

combined with the lower bounds d >= |planar offset| and d >= sqrt(pi |z|)
(isoperimetry).  The windowing and pruning never change the minimum; ties
are broken toward the smallest flat index by scanning in ascending order.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def hopflax_h1(fv, xs, ys, zs, G, ds, denom, p, out, arg, clipped):
    # G is tabulated uniformly in s = sqrt(pi/2 - phi)
    nx = xs.shape[0]
    ny = ys.shape[0]
    nz = zs.shape[0]
    hx = xs[1] - xs[0]
    hy = ys[1] - ys[0]
    hz = zs[1] - zs[0]
    nG = G.shape[0]
    fmin = fv[0, 0, 0]
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                if fv[i, j, k] < fmin:
                    fmin = fv[i, j, k]
    pinv = 1.0 / p
    for ix in range(nx):
        x1 = xs[ix]
        for iy in range(ny):
            y1 = ys[iy]
            for iz in range(nz):
                z1 = zs[iz]
                fself = fv[ix, iy, iz]
                cmax = denom * (fself - fmin)
                if cmax < 0.0:
                    cmax = 0.0
                dmax = cmax ** pinv
                zspan = dmax * dmax / np.pi
                clip = False
                jx0 = int(np.ceil((x1 - dmax - xs[0]) / hx - 1e-12))
                jx1 = int(np.floor((x1 + dmax - xs[0]) / hx + 1e-12))
                if jx0 < 0:
                    jx0 = 0
                    clip = True
                if jx1 > nx - 1:
                    jx1 = nx - 1
                    clip = True
                jy0 = int(np.ceil((y1 - dmax - ys[0]) / hy - 1e-12))
                jy1 = int(np.floor((y1 + dmax - ys[0]) / hy + 1e-12))
                if jy0 < 0:
                    jy0 = 0
                    clip = True
                if jy1 > ny - 1:
                    jy1 = ny - 1
                    clip = True
                best = np.inf
                barg = -1
                for jx in range(jx0, jx1 + 1):
                    xj = xs[jx]
                    dx = xj - x1
                    for jy in range(jy0, jy1 + 1):
                        yj = ys[jy]
                        dy = yj - y1
                        rr2 = dx * dx + dy * dy
                        rr = np.sqrt(rr2)
                        if rr > dmax:
                            continue
                        zc = z1 - 0.5 * (y1 * xj - x1 * yj)
                        jz0 = int(np.ceil((zc - zspan - zs[0]) / hz - 1e-12))
                        jz1 = int(np.floor((zc + zspan - zs[0]) / hz + 1e-12))
                        if jz0 < 0:
                            jz0 = 0
                            clip = True
                        if jz1 > nz - 1:
                            jz1 = nz - 1
                            clip = True
                        base = (jx * ny + jy) * nz
                        for jz in range(jz0, jz1 + 1):
                            fy = fv[jx, jy, jz]
                            zd = zs[jz] - zc
                            az = -zd if zd < 0.0 else zd
                            lb = np.sqrt(np.pi * az)
                            if rr > lb:
                                lb = rr
                            if lb ** p + denom * (fy - best) >= 0.0:
                                continue
                            rho = (rr2 * rr2 + 16.0 * az * az) ** 0.25
                            phi = np.arctan2(4.0 * az, rr2)
                            sv = 0.5 * np.pi - phi
                            if sv < 0.0:
                                sv = 0.0
                            tpos = np.sqrt(sv) / ds
                            it = int(tpos)
                            if it >= nG - 1:
                                it = nG - 2
                            w = tpos - it
                            d = rho * ((1.0 - w) * G[it] + w * G[it + 1])
                            tot = d ** p / denom + fy
                            if tot < best:
                                best = tot
                                barg = base + jz
                out[ix, iy, iz] = best
                arg[ix, iy, iz] = barg
                clipped[ix, iy, iz] = clip
