"""Calibration against the standard Gaussian, where the constants are known.

For dmu = e^{-x^2/2}/sqrt(2 pi) dx the log-Sobolev constant is exactly 2,
attained in the limit by exponential tilts e^{a x / 2}; the matching
Talagrand constant is K = 1.  Everything below should reproduce those
numbers up to quadrature error.
"""

import numpy as np

from carnotlab import (
    HopfLaxOperator,
    TestFunctionFamily,
    build_measure,
    dual_talagrand_check,
    entropy,
    estimate_lsi_constant,
    get_group,
    hypercontractivity_trace,
    make_potential,
    phi_trace,
    poincare_check,
    shooting_distance_field,
)
from carnotlab.hopflax import default_times

R = get_group("abelian:1")
box, shape = [[-8.0, 8.0]], (257,)
mu = build_measure(R, shooting_distance_field(R, box, shape),
                   make_potential("gaussian-euclid"))

print("== entropy oracle ==")
print("Ent(e^{x - 1/2}) =", entropy(mu, lambda m: np.exp(m[..., 0] - 0.5)).value,
      " (shifted-Gaussian KL = 1/2)")

print("\n== log-Sobolev constant ==")
fam = TestFunctionFamily(kinds=("calibration", "bump", "exp", "fourier"),
                         count=52, seed=7, bound=6.0)
members = fam.members(box, shape, R)
est = estimate_lsi_constant(mu, members, 2.0, R)
print("c_hat =", est.c_hat, " (Gaussian constant: 2)")
print("derived K =", est.K, " (Gaussian Talagrand: 1)")

print("\n== Poincare ==")
print("empirical constant:", poincare_check(mu, members, 2.0, R).summary["constant"],
      " (spectral gap: 1)")

print("\n== dual Talagrand, K = 1 ==")
op = HopfLaxOperator(R, t=1.0)
rep = dual_talagrand_check(mu, members, 1.0, op)
print("max slack over", len(members), "functions:", rep.summary["max_slack"])

print("\n== monotone traces ==")
f = members[1][1]
tr = phi_trace(mu, f, 1.0, 2.0, op, default_times())
print("phi(t) max upward jump:", tr.max_upward_jump,
      " small-t gap:", tr.parameters["limit_gap"])
hr = hypercontractivity_trace(mu, f, 1.0, 1.0, op, default_times())
print("F(t) max upward jump:", hr.max_upward_jump)
