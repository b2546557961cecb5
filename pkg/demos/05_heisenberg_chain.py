"""The full inequality chain on the Heisenberg group with U = d^2.

U-bound  ->  Poincare  ->  log-Sobolev  ->  dual Talagrand  ->  traces.
Each constant is fitted empirically over a seeded function family; the
chain's only free input is the measure.
"""

from carnotlab import (
    HopfLaxOperator,
    TestFunctionFamily,
    build_measure,
    dual_talagrand_check,
    estimate_lsi_constant,
    get_group,
    hypercontractivity_trace,
    make_potential,
    phi_trace,
    poincare_check,
    shooting_distance_field,
    ubound_check,
)
from carnotlab.hopflax import default_times

H = get_group("heisenberg1")
box, shape = [[-5.0, 5.0], [-5.0, 5.0], [-3.0, 3.0]], (33, 33, 33)
mu = build_measure(H, shooting_distance_field(H, box, shape),
                   make_potential("power", p=2.0))

fam = TestFunctionFamily(kinds=("bump", "exp", "fourier"), count=24, seed=5,
                         bound=2.0)
members = fam.members(box, shape, H)
members2 = fam.doubled().members(box, shape, H)

print("== U-bound (eta = U'^q) ==")
ub = ubound_check(mu, members, 2.0, "uprime_q", H)
ub2 = ubound_check(mu, members2, 2.0, "uprime_q", H)
print(f"fit (C, D) = ({ub.C:.4f}, {ub.D:.4f});"
      f" doubled family ({ub2.C:.4f}, {ub2.D:.4f})")

print("\n== Poincare ==")
p1 = poincare_check(mu, members, 2.0, H).summary["constant"]
p2 = poincare_check(mu, members2, 2.0, H).summary["constant"]
print(f"constant {p1:.4f}; doubled family {p2:.4f}")

print("\n== log-Sobolev ==")
est = estimate_lsi_constant(mu, members, 2.0, H)
print(f"c_hat = {est.c_hat:.4f}  ->  K = {est.K:.4f}")

print("\n== dual Talagrand with the derived K ==")
op = HopfLaxOperator(H, t=1.0)
rep = dual_talagrand_check(mu, members, est.K, op)
print("max slack:", rep.summary["max_slack"])

print("\n== traces ==")
f = members[2][1]
tr = phi_trace(mu, f, est.K, 2.0, op, default_times())
hr = hypercontractivity_trace(mu, f, 2.0 / est.c_hat, 1.0, op, default_times())
print("phi max upward jump:", tr.max_upward_jump)
print("F   max upward jump:", hr.max_upward_jump)
