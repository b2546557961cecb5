"""End-to-end acceptance gate.

Each test covers one numbered criterion, computes every sub-check at pinned
tolerances, prints a single ``criterion N: PASS|FAIL`` line, and asserts.
Run with ``pytest -s`` to see the lines for passing criteria too.
"""

import json
import sys
from pathlib import Path

import numpy as np
import pytest

from carnotlab import (
    HopfLaxOperator,
    cc_distance,
    cc_distance_origin,
    check_growth_conditions,
    dual_talagrand_check,
    eikonal_distance_field,
    estimate_lsi_constant,
    get_group,
    hopf_lax_apply,
    hypercontractivity_trace,
    make_potential,
    phi_trace,
    poincare_check,
    primal_talagrand_check,
    semigroup_defect,
    shooting_distance_field,
    ubound_check,
    wasserstein_p,
)
from carnotlab import TestFunctionFamily as FunctionFamily
from carnotlab.cli import ExperimentConfig, run
from carnotlab.grid import grid_from_callable
from carnotlab.hopflax import compute_trace, pde_residual
from carnotlab.measures import SampleCloud, build_measure
from carnotlab.transport import cc_pairwise

GAUSS_BOX = [[-8.0, 8.0]]
GAUSS_SHAPE = (257,)

CONFIG_DIR = Path(__file__).resolve().parents[1] / "src" / "carnotlab" / "configs"


def verdict(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line, file=sys.stderr)
    assert ok, line


def smooth_field(box, shape, seed, amp=0.25, kscale=0.5):
    rng = np.random.default_rng(seed)

    def fn(m):
        acc = np.zeros(m.shape[:-1])
        for _ in range(4):
            k = rng.normal(size=m.shape[-1]) * kscale
            acc += rng.normal() * np.cos((m * k).sum(-1) + rng.uniform(0, 2 * np.pi))
        return amp * acc / np.abs(acc).max()

    return grid_from_callable(box, shape, fn)


def test_criterion_1_group_metric_properties(heis):
    rng = np.random.default_rng(0)
    a, b, c = rng.normal(size=(3, 10_000, 3)) * 3.0
    lhs = heis.compose(heis.compose(a, b), c)
    rhs = heis.compose(a, heis.compose(b, c))
    assoc = float(np.max(np.abs(lhs - rhs) / (1.0 + np.abs(lhs))))

    ident = float(np.max(np.abs(heis.compose(a, heis.identity()) - a)))
    inv = float(np.max(np.abs(heis.compose(a, heis.inverse(a)))))

    g, x, y = rng.normal(size=(3, 200, 3))
    li = float(np.max(np.abs(
        cc_distance(heis, heis.compose(g, x), heis.compose(g, y))
        - cc_distance(heis, x, y)
    )))

    pts = rng.normal(size=(100, 3))
    dil = 0.0
    for lam in (0.5, 2.0):
        d1 = cc_distance_origin(heis, heis.dilate(lam, pts))
        d0 = lam * cc_distance_origin(heis, pts)
        dil = max(dil, float(np.max(np.abs(d1 - d0) / d0)))

    ta, tb, tc = rng.normal(size=(3, 1000, 3)) * 2.0
    tri = float(np.max(
        cc_distance(heis, ta, tc)
        - cc_distance(heis, ta, tb) - cc_distance(heis, tb, tc)
    ))

    ok = (assoc <= 1e-12 and ident == 0.0 and inv <= 1e-12
          and li <= 1e-9 and dil <= 1e-3 and tri <= 1e-6)
    verdict(1, ok,
            f"assoc {assoc:.2e}, inverse {inv:.2e}, left-inv {li:.2e}, "
            f"dilation {dil:.2e}, triangle slack {tri:.2e}")


def test_criterion_2_eikonal_vs_shooting(heis):
    box = [[-2.0, 2.0], [-2.0, 2.0], [-1.0, 1.0]]
    rng = np.random.default_rng(1)
    pts = rng.uniform([-1.6, -1.6, -0.8], [1.6, 1.6, 0.8], size=(300, 3))
    pts = pts[np.hypot(pts[:, 0], pts[:, 1]) > 0.4][:100]
    assert len(pts) == 100
    exact = cc_distance_origin(heis, pts)

    discrepancies = {}
    for n in (25, 49):
        field = eikonal_distance_field(heis, box, (n, n, n))
        axes = field.grid.axes()
        vals = np.empty(len(pts))
        for i, x in enumerate(pts):
            idx = tuple(int(np.argmin(np.abs(ax - v))) for ax, v in zip(axes, x))
            node = np.array([ax[j] for ax, j in zip(axes, idx)])
            vals[i] = field.grid.values[idx] - (
                cc_distance_origin(heis, node) - exact[i]
            ) - exact[i]
        discrepancies[n] = float(np.max(np.abs(vals)))

    h49 = 4.0 / 48
    ok_abs = discrepancies[49] <= 2.0 * h49
    ratio = discrepancies[49] / discrepancies[25]
    ok = ok_abs and ratio <= 0.7
    verdict(2, ok,
            f"49^3 max discrepancy {discrepancies[49]:.4f} (<= {2*h49:.4f}), "
            f"refinement ratio {ratio:.2f} (<= 0.7)")


def test_criterion_3_hopf_lax(heis, line):
    # constants and constant shifts are exact
    fc = grid_from_callable([[-1, 1]] * 3, (9, 9, 9),
                            lambda m: np.full(m.shape[:-1], 1.3))
    op_h = HopfLaxOperator(heis, t=0.5)
    const_err = float(np.max(np.abs(
        hopf_lax_apply(fc, op_h).field.values - 1.3
    )))
    rng = np.random.default_rng(2)
    fr = grid_from_callable([[-1, 1]] * 3, (9, 9, 9),
                            lambda m: rng.normal(size=m.shape[:-1]))
    shift_err = float(np.max(np.abs(
        hopf_lax_apply(fr.with_values(fr.values + 2.0), op_h).field.values
        - hopf_lax_apply(fr, op_h).field.values - 2.0
    )))

    # abelian closed form
    fx = grid_from_callable([[-4, 4]], (401,), lambda m: m[..., 0] ** 2)
    h = float(fx.spacing[0])
    closed_err = 0.0
    for t in (0.25, 1.0):
        out = hopf_lax_apply(fx, HopfLaxOperator(line, t=t)).field.values
        exact = fx.mesh()[..., 0] ** 2 / (1.0 + 2.0 * t)
        closed_err = max(closed_err, float(np.max(np.abs(out - exact)[50:351])))

    # semigroup defect on the frozen random field
    fh = smooth_field([[-2.0, 2.0]] * 3, (33, 33, 33), seed=0)
    defect = semigroup_defect(fh, HopfLaxOperator(heis, t=1.0), 0.5, 0.5)

    # PDE residual shrinks under joint halving (abelian closed form)
    def residual(n, dt):
        f = grid_from_callable([[-4, 4]], (n,), lambda m: m[..., 0] ** 2)
        tr = compute_trace(f, HopfLaxOperator(line, t=1.0),
                           [1.0 - dt, 1.0, 1.0 + dt])
        return pde_residual(tr, line, margin=n // 8)[0][1]

    ratio = residual(201, 0.1) / residual(101, 0.2)

    ok = (const_err == 0.0 and shift_err <= 1e-12
          and closed_err <= 2.0 * h ** 2 and defect <= 5e-2 and ratio <= 0.7)
    verdict(3, ok,
            f"const {const_err:.1e}, shift {shift_err:.1e}, closed-form "
            f"{closed_err:.2e} (<= {2*h**2:.2e}), defect {defect:.4f} "
            f"(<= 0.05), residual ratio {ratio:.2f} (<= 0.7)")


def test_criterion_4_growth_bounds():
    checks = []
    for p in (2.0, 3.0):
        q = p / (p - 1.0)
        rep = check_growth_conditions(make_potential("power", p=p), q, 20.0)
        checks.append(rep.beta_hat <= (p - 1.0) + 1e-6)
        checks.append(abs(rep.gamma_hat - p ** (-q)) <= 1e-9)
    for p, q in ((2.0, 2.0), (3.0, 2.0)):
        rep = check_growth_conditions(make_potential("powerlog", p=p), q, 20.0)
        checks.append(rep.beta_hat <= p * p - 0.5 + 1e-9)
        checks.append(rep.gamma_hat <= 1.0 + 1e-9)
    for q in (1.5, 2.0):
        rep = check_growth_conditions(make_potential("sinh"), q, 20.0)
        checks.append(rep.beta_hat <= 1.0 + 1e-9)
        checks.append(rep.gamma_hat <= 1.0 + 1e-9)
    ok = all(checks)
    verdict(4, ok, f"{sum(checks)}/{len(checks)} potential bounds hold")


def calibration_family():
    return FunctionFamily(
        kinds=("calibration", "bump", "exp", "fourier"),
        count=52, seed=7, bound=6.0,
    )


def test_criterion_5_gaussian_lsi(line, gauss_measure):
    members = calibration_family().members(GAUSS_BOX, GAUSS_SHAPE, line)
    est = estimate_lsi_constant(gauss_measure, members, 2.0, line)
    worst = max(r["ratio"] for r in est.ratios)
    ok = 1.8 <= est.c_hat <= 2.05 and worst <= 2.05
    verdict(5, ok,
            f"c_hat {est.c_hat:.4f} in [1.8, 2.05], max ratio {worst:.4f} <= 2.05")


def test_criterion_6_gaussian_dual_talagrand(line, gauss_measure):
    fam = FunctionFamily(kinds=("bump", "exp", "fourier"), count=50, seed=11,
                         bound=3.0)
    members = fam.members(GAUSS_BOX, GAUSS_SHAPE, line)
    op = HopfLaxOperator(line, t=1.0)
    rep = dual_talagrand_check(gauss_measure, members, 1.0, op)
    slack = rep.summary["max_slack"]
    ok = slack <= 1e-2
    verdict(6, ok, f"max slack over 50 members {slack:.2e} <= 1e-2")


def test_criterion_7_gaussian_traces(line):
    times = np.geomspace(0.1, 2.0, 16)
    jumps = {}
    for n in (129, 257):
        field = shooting_distance_field(line, GAUSS_BOX, (n,))
        mu = build_measure(line, field, make_potential("gaussian-euclid"))
        f = grid_from_callable(GAUSS_BOX, (n,),
                               lambda m: np.minimum(np.exp(0.5 * m[..., 0]), 3.0))
        op = HopfLaxOperator(line, t=1.0)
        phi = phi_trace(mu, f, 1.0, 2.0, op, times)
        hyp = hypercontractivity_trace(mu, f, 1.0, 1.0, op, times)
        jumps[n] = (phi.max_upward_jump, hyp.max_upward_jump)

    jp, jh = jumps[257]
    ok_level = jp <= 1e-3 and jh <= 1e-3
    ratios = []
    for i in range(2):
        coarse, fine = jumps[129][i], jumps[257][i]
        if fine == 0.0:
            ratios.append(0.0)       # already at the floor
        elif coarse == 0.0:
            ratios.append(np.inf)
        else:
            ratios.append(fine / coarse)
    ok_ratio = all(r <= 0.8 for r in ratios)
    ok = ok_level and ok_ratio
    verdict(7, ok,
            f"phi jump {jp:.2e}, F jump {jh:.2e} (<= 1e-3), "
            f"refinement ratios {ratios[0]:.2f}/{ratios[1]:.2f} (<= 0.8)")


def test_criterion_8_heisenberg_end_to_end(heis, h1_measure):
    box = h1_measure.box
    shape = h1_measure.weights.shape
    fam = FunctionFamily(kinds=("bump", "exp", "fourier"), count=24, seed=5,
                         bound=2.0)
    members = fam.members(box, shape, heis)
    members2 = fam.doubled().members(box, shape, heis)

    fit = ubound_check(h1_measure, members, 2.0, "uprime_q", heis)
    fit2 = ubound_check(h1_measure, members2, 2.0, "uprime_q", heis)
    scale = max(fit.C + fit.D, 1e-12)
    cd_drift = max(abs(fit2.C - fit.C), abs(fit2.D - fit.D)) / scale

    poin = poincare_check(h1_measure, members, 2.0, heis)
    poin2 = poincare_check(h1_measure, members2, 2.0, heis)
    p1 = poin.summary["constant"]
    p_drift = abs(poin2.summary["constant"] - p1) / p1

    est = estimate_lsi_constant(h1_measure, members, 2.0, heis)
    op = HopfLaxOperator(heis, t=1.0)
    dual = dual_talagrand_check(h1_measure, members, est.K, op)
    slack = dual.summary["max_slack"]

    times = np.geomspace(0.1, 2.0, 16)
    f = members[2][1]
    jp = phi_trace(h1_measure, f, est.K, 2.0, op, times).max_upward_jump
    jh = hypercontractivity_trace(
        h1_measure, f, 2.0 / est.c_hat, 1.0, op, times
    ).max_upward_jump

    ok = (np.isfinite(fit.C + fit.D) and fit.max_residual <= 1e-8
          and cd_drift <= 0.10 and p_drift <= 0.10
          and slack <= 5e-2 and jp <= 5e-3 and jh <= 5e-3)
    verdict(8, ok,
            f"(C, D) = ({fit.C:.3f}, {fit.D:.3f}) drift {cd_drift:.1%}, "
            f"Poincare {p1:.3f} drift {p_drift:.1%} (<= 10%), dual slack "
            f"{slack:.4f} (<= 0.05) at K = {est.K:.3f}, jumps "
            f"{jp:.2e}/{jh:.2e} (<= 5e-3)")


def test_criterion_9_transport_oracle(heis):
    rng = np.random.default_rng(9)
    pts_a = rng.normal(size=(100, 3))
    pts_b = rng.normal(size=(100, 3)) * 1.2 + [0.5, 0.0, 0.0]
    a = SampleCloud(pts_a, np.full(100, 0.01), {})
    b = SampleCloud(pts_b, np.full(100, 0.01), {})
    dist = cc_pairwise(heis)

    lp = wasserstein_p(a, b, 2.0, dist, solver="exact-lp")
    sk = wasserstein_p(a, b, 2.0, dist, solver="sinkhorn")
    rel = abs(sk.value - lp.value) / lp.value
    self_w = wasserstein_p(a, a, 2.0, dist).value
    marg = max(lp.marginal_error, sk.marginal_error)

    ok = rel <= 0.01 and self_w <= 1e-8 and marg <= 1e-8
    verdict(9, ok,
            f"sinkhorn vs lp {rel:.2%} (<= 1%), W(mu,mu) {self_w:.1e}, "
            f"marginal error {marg:.1e}")


def test_criterion_10_primal_talagrand(heis, gauss_measure, h1_measure):
    a = 0.8
    shift = primal_talagrand_check(
        gauss_measure,
        lambda m: np.exp(a * m[..., 0] - 0.5 * a * a),
        K=1.0, p=2.0, n_points=257,
    )
    s_gauss = shift.summary["slack"]

    g = np.array([0.9, 0.0, 0.0])
    pot = h1_measure.potential
    mesh = h1_measure.weights.mesh()
    flat = mesh.reshape(-1, 3)
    shifted = heis.compose(flat, np.broadcast_to(-g, flat.shape))
    d_sh = cc_distance_origin(heis, shifted).reshape(mesh.shape[:-1])
    d = h1_measure.distance.values
    raw = np.exp(pot.u(d) - pot.u(d_sh))
    h = raw / float((h1_measure.weights.values * raw).sum())
    trans = primal_talagrand_check(h1_measure, h, K=1.0, p=2.0, n_points=500)
    s_h1 = trans.summary["slack"]

    ok = s_gauss >= -1e-2 and s_h1 >= -5e-2
    verdict(10, ok,
            f"gaussian shift slack {s_gauss:.4f} (>= -1e-2), "
            f"heisenberg translation slack {s_h1:.4f} (>= -5e-2)")


def test_criterion_11_determinism(tmp_path):
    ok = True
    details = []
    for name in ("gaussian_calibration.json", "heisenberg_endtoend.json"):
        cfg = ExperimentConfig.load(CONFIG_DIR / name)
        outs = []
        for rep in (0, 1):
            out = tmp_path / f"{name}-{rep}"
            manifest = run(cfg, out)
            if not all(manifest["passed"].values()):
                ok = False
                details.append(f"{name}: checks failed {manifest['passed']}")
            outs.append(out)
        same = True
        for path in sorted(outs[0].iterdir()):
            other = outs[1] / path.name
            if path.name == "manifest.json":
                m1 = json.loads(path.read_text())
                m2 = json.loads(other.read_text())
                m1.pop("seconds"), m2.pop("seconds")
                same &= m1 == m2
            else:
                same &= path.read_bytes() == other.read_bytes()
        ok &= same
        details.append(f"{name}: byte-identical={same}")
    verdict(11, ok, "; ".join(details))
