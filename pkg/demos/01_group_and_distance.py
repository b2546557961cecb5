"""Tour of the group layer and the two distance solvers.

Walks through the Heisenberg group law, dilations, and the
Carnot-Caratheodory distance computed two independent ways: geodesic
shooting (the reference) and a fast-sweeping eikonal solve (the oracle).
"""

import numpy as np

from carnotlab import (
    cc_distance,
    cc_distance_origin,
    eikonal_distance_field,
    get_group,
    koranyi_gauge,
    shooting_distance_field,
)

H = get_group("heisenberg1")

print("== group law ==")
a, b = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
print("(1,0,0) o (0,1,0) =", H.compose(a, b))          # z picks up 1/2
print("a o a^-1          =", H.compose(a, H.inverse(a)))
print("dilate(2, (1,1,1))=", H.dilate(2.0, [1.0, 1.0, 1.0]))  # z scales by 4

print("\n== distances ==")
print("d(0, (2,0,0))   =", cc_distance_origin(H, [2.0, 0.0, 0.0]), " (straight line)")
print("d(0, (0,0,1))   =", cc_distance_origin(H, [0.0, 0.0, 1.0]),
      " vs 2 sqrt(pi) =", 2.0 * np.sqrt(np.pi))
g = np.array([0.3, -0.2, 0.1])
print("left-invariance:",
      cc_distance(H, H.compose(g, a), H.compose(g, b)), "=", cc_distance(H, a, b))

# dilation 1-homogeneity
x = np.array([0.7, -0.4, 0.25])
for lam in (0.5, 2.0):
    print(f"d(0, delta_{lam} x) / d(0, x) =",
          cc_distance_origin(H, H.dilate(lam, x)) / cc_distance_origin(H, x))

print("\n== gauge vs distance ==")
rng = np.random.default_rng(1)
pts = rng.normal(size=(1000, 3))
ratio = cc_distance_origin(H, pts) / koranyi_gauge(H, pts)
print("d / gauge ratio over 1000 points: [%.4f, %.4f]" % (ratio.min(), ratio.max()))

print("\n== eikonal oracle ==")
box = [[-2.0, 2.0], [-2.0, 2.0], [-1.0, 1.0]]
shoot = shooting_distance_field(H, box, (49, 49, 49))
eik = eikonal_distance_field(H, box, (49, 49, 49))
diff = np.abs(shoot.grid.values - eik.grid.values)
mesh = shoot.grid.mesh()
away = np.hypot(mesh[..., 0], mesh[..., 1]) > 0.25   # skip the center-axis tube
print("max |shooting - eikonal| away from the axis:", diff[away].max(),
      " (grid spacing %.3f)" % shoot.grid.spacing.max())
