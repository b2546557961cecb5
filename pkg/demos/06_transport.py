"""Wasserstein distances and the primal Talagrand inequality.

The exact linear program is the oracle; Sinkhorn with epsilon-scaling should
agree to within a percent.  The primal inequality W_p^p / p <= Ent / K is
checked in its near-equality regimes: the Gaussian shift, and on the
Heisenberg group the right translation x -> x o g (whose transport cost is
exactly d(0, g)).
"""

import numpy as np

from carnotlab import (
    SampleCloud,
    build_measure,
    expectation,
    get_group,
    make_potential,
    primal_talagrand_check,
    shooting_distance_field,
    wasserstein_p,
)
from carnotlab.metric import cc_distance_origin
from carnotlab.transport import cc_pairwise

print("== solver oracle ==")
rng = np.random.default_rng(0)
R = get_group("abelian:1")
A = SampleCloud(rng.normal(size=(100, 1)), np.full(100, 0.01), {})
B = SampleCloud(rng.normal(1.0, 1.2, size=(100, 1)), np.full(100, 0.01), {})
dist = cc_pairwise(R)
exact = wasserstein_p(A, B, 2, dist, "exact-lp")
sink = wasserstein_p(A, B, 2, dist, "sinkhorn")
print(f"W_2 exact-lp {exact.value:.6f}  sinkhorn {sink.value:.6f}"
      f"  rel diff {abs(sink.value / exact.value - 1):.2e}")

print("\n== Gaussian shift (equality regime) ==")
mu = build_measure(R, shooting_distance_field(R, [[-8.0, 8.0]], (257,)),
                   make_potential("gaussian-euclid"))
a = 0.8
c = 1.0 / expectation(mu, lambda m: np.exp(a * m[..., 0]))
rep = primal_talagrand_check(mu, lambda m: c * np.exp(a * m[..., 0]), 1.0, 2,
                             n_points=257)
s = rep.summary
print(f"W_2^2/2 = {s['lhs']:.4f}  Ent/K = {s['rhs']:.4f}  slack = {s['slack']:.4f}"
      f"  (both sides -> a^2/2 = {a * a / 2:.4f})")

print("\n== Heisenberg right translation ==")
H = get_group("heisenberg1")
muh = build_measure(H, shooting_distance_field(
    H, [[-5.0, 5.0], [-5.0, 5.0], [-3.0, 3.0]], (33,) * 3),
    make_potential("power", p=2.0))
g = np.array([0.9, 0.0, 0.0])
pot = muh.potential


def density(m):
    flat = m.reshape(-1, 3)
    shifted = H.compose(flat, np.broadcast_to(-g, flat.shape))
    d_sh = cc_distance_origin(H, shifted).reshape(m.shape[:-1])
    return np.exp(pot.u(cc_distance_origin(H, m)) - pot.u(d_sh))


cn = 1.0 / expectation(muh, density)
rep = primal_talagrand_check(muh, lambda m: cn * density(m), 1.4810, 2,
                             n_points=500)
s = rep.summary
print(f"W_2^2/2 = {s['lhs']:.4f}  (translation cost d(0,g)^2/2 = {0.9 ** 2 / 2:.4f})")
print(f"Ent/K  = {s['rhs']:.4f}  slack = {s['slack']:.4f}")
