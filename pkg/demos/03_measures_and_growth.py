"""Gibbs measures e^{-U(d)}/Z: quadrature, growth conditions, MCMC.

The growth conditions beta_hat = sup U''/U' and gamma_hat = sup U/U'^q,
taken outside the unit ball, are the hypotheses under which the measure
satisfies the q-Poincare and q-log-Sobolev inequalities.  The table below
reproduces the known bounds for the three standard potential families.
"""

import numpy as np

from carnotlab import (
    build_measure,
    check_growth_conditions,
    expectation,
    get_group,
    make_potential,
    mcmc_sample,
    shooting_distance_field,
)
from carnotlab.metric import cc_distance_origin

print("== growth conditions on (1, 20] ==")
print(f"{'potential':<16}{'q':>5}{'beta_hat':>12}{'gamma_hat':>12}  bound")
for name, params, q, note in [
    ("power", {"p": 2.0}, 2.0, "beta <= p-1, gamma = 1/p^q"),
    ("power", {"p": 3.0}, 1.5, "beta <= p-1, gamma = 1/p^q"),
    ("powerlog", {"p": 2.0}, 2.0, "beta <= p^2 - 1/2, gamma <= 1"),
    ("sinh", {}, 2.0, "both <= 1"),
]:
    rep = check_growth_conditions(make_potential(name, **params), q, 20.0)
    print(f"{name:<16}{q:>5}{rep.beta_hat:>12.4f}{rep.gamma_hat:>12.4f}  {note}")

print("\n== quadrature ==")
R = get_group("abelian:1")
df = shooting_distance_field(R, [[-8.0, 8.0]], (513,))
mu = build_measure(R, df, make_potential("gaussian-euclid"))
print("Z =", mu.Z, " vs sqrt(2 pi) =", np.sqrt(2 * np.pi))
print("E[x^2] =", expectation(mu, lambda m: m[..., 0] ** 2))

print("\n== Heisenberg measure and MCMC ==")
H = get_group("heisenberg1")
dfh = shooting_distance_field(H, [[-5.0, 5.0], [-5.0, 5.0], [-3.0, 3.0]], (33,) * 3)
muh = build_measure(H, dfh, make_potential("power", p=2.0))
print("Z =", muh.Z, " truncation tail ~", muh.tail_bound)

cloud = mcmc_sample(muh, 2000, seed=42)
print("acceptance rate:", cloud.provenance["acceptance_rate"])
d2_grid = expectation(muh, muh.distance.values ** 2)
d2_cloud = float((cc_distance_origin(H, cloud.points) ** 2).mean())
print(f"E[d^2]: quadrature {d2_grid:.4f}  vs  chain {d2_cloud:.4f}")
