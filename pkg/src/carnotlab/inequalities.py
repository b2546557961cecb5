"""Functional-inequality checks: entropy, Poincare, U-bounds, log-Sobolev,
dual Talagrand, and the two monotone traces.

Conventions used throughout:

    Ent_mu(g) = int g log g dmu - (int g dmu) log int g dmu,  0 log 0 = 0
    q-energy  = int |grad_H f|^q dmu
    q-LSI     Ent_mu(f^q) <= c int |grad_H f|^q dmu
    c <-> K   c = (q-1) (q/K)^{q-1}   (so K = q ((q-1)/c)^{1/(q-1)})

Every exponential moment goes through log-sum-exp with the measure weights,
so large K Q_t f never overflows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import InputError, NumericError
from .grid import GridFunction, horizontal_gradient_norm
from .hopflax import HopfLaxOperator, hopf_lax_apply
from .measures import RadialMeasure, expectation
from .reports import InequalityReport

_ENERGY_FLOOR = 1e-12


# -- entropy and energy --------------------------------------------------


@dataclass
class EntropyReport:
    value: float
    mean: float          # int g dmu
    observable: str

    def to_dict(self):
        return {"value": self.value, "mean": self.mean, "observable": self.observable}


def _grid_values(measure, g):
    if callable(g):
        vals = np.asarray(g(measure.weights.mesh()), dtype=float)
    elif isinstance(g, GridFunction):
        vals = g.values
    else:
        vals = np.asarray(g, dtype=float)
    if vals.shape != measure.weights.shape:
        raise InputError("observable shape does not match the measure grid")
    return vals


def entropy(measure: RadialMeasure, g, label="g"):
    vals = _grid_values(measure, g)
    if np.any(vals < 0):
        raise InputError("entropy needs a non-negative observable")
    mean = float(expectation(measure, vals))
    if mean <= 0:
        raise InputError("entropy needs int g dmu > 0")
    glogg = np.where(vals > 0, vals * np.log(np.where(vals > 0, vals, 1.0)), 0.0)
    value = float(expectation(measure, glogg)) - mean * np.log(mean)
    return EntropyReport(value=value, mean=mean, observable=label)


def q_energy(measure: RadialMeasure, f: GridFunction, q, group):
    """int |grad_H f|^q dmu."""
    gn = horizontal_gradient_norm(f, group)
    return float(expectation(measure, gn.values ** q))


# -- Poincare ------------------------------------------------------------


def poincare_check(measure, members, q, group):
    """Empirical q-Poincare constant: max of mu|f - mu f|^q / mu|grad f|^q."""
    per = []
    for label, f in members:
        en = q_energy(measure, f, q, group)
        scale = float(np.max(np.abs(f.values))) ** q + _ENERGY_FLOOR
        if en <= _ENERGY_FLOOR * scale:
            continue
        mean = expectation(measure, f.values)
        var_q = float(expectation(measure, np.abs(f.values - mean) ** q))
        per.append({"member": label, "variance_q": var_q, "energy": en,
                    "ratio": var_q / en})
    if not per:
        raise InputError("Poincare check needs non-constant family members")
    const = max(r["ratio"] for r in per)
    return InequalityReport(
        inequality="q-poincare",
        mode="grid",
        parameters={"q": float(q), "n_members": len(per)},
        per_member=per,
        summary={"constant": const, "pass": bool(np.isfinite(const))},
    )


# -- U-bounds ------------------------------------------------------------


@dataclass
class UBoundFit:
    """Smallest-sum (C, D) with int |f|^q eta dmu <= C energy + D mass."""

    mode: str
    q: float
    C: float
    D: float
    max_residual: float   # max over members of lhs - (C e + D m); <= 0 at fit
    per_member: list

    def to_dict(self):
        return {
            "mode": self.mode,
            "q": self.q,
            "C": self.C,
            "D": self.D,
            "max_residual": self.max_residual,
            "per_member": self.per_member,
        }


def _fit_two_nonneg(lhs, e, m):
    """Minimize C + D over C, D >= 0 with C e_i + D m_i >= lhs_i for all i.

    The feasible region is an intersection of half-planes with non-negative
    coefficients, so the optimum sits at a vertex: an axis intercept or the
    intersection of two constraint lines.  All vertices are enumerated.
    """
    lhs = np.maximum(np.asarray(lhs, float), 0.0)
    e = np.asarray(e, float)
    m = np.asarray(m, float)
    k = lhs.size

    def feasible(C, D):
        return C >= -1e-15 and D >= -1e-15 and np.all(
            C * e + D * m >= lhs - 1e-12 * (1.0 + lhs)
        )

    cands = [(0.0, 0.0)]
    with np.errstate(divide="ignore", invalid="ignore"):
        ce = np.where(e > 0, lhs / e, np.inf)
        dm = np.where(m > 0, lhs / m, np.inf)
    if np.all(np.isfinite(ce)):
        cands.append((float(np.max(ce)), 0.0))
    if np.all(np.isfinite(dm)):
        cands.append((0.0, float(np.max(dm))))
    for i in range(k):
        for j in range(i + 1, k):
            det = e[i] * m[j] - e[j] * m[i]
            if abs(det) < 1e-14:
                continue
            C = (lhs[i] * m[j] - lhs[j] * m[i]) / det
            D = (e[i] * lhs[j] - e[j] * lhs[i]) / det
            cands.append((float(C), float(D)))
    best = None
    for C, D in cands:
        if feasible(C, D) and (best is None or C + D < best[0] + best[1]):
            best = (max(C, 0.0), max(D, 0.0))
    if best is None:
        worst = int(np.argmax(lhs - np.maximum(e, m)))
        raise NumericError(
            f"U-bound fit infeasible (member {worst})", residual=float(lhs[worst])
        )
    return best


def ubound_weight(measure, mode, group):
    """The weight eta(d) on the grid for the chosen U-bound mode."""
    pot = measure.potential
    d = measure.distance
    if mode == "uprime_q":
        return lambda q: pot.du(d.values) ** q
    if mode == "u":
        return lambda q: pot.u(d.values)
    if mode == "grad_u_plus_u":
        gn = horizontal_gradient_norm(d.with_values(pot.u(d.values)), group)
        return lambda q: gn.values ** q + pot.u(d.values)
    raise InputError(f"unknown U-bound mode {mode!r}")


def ubound_check(measure, members, q, mode, group):
    eta = ubound_weight(measure, mode, group)(q)
    per = []
    lhs, en, mass = [], [], []
    for label, f in members:
        fq = np.abs(f.values) ** q
        li = float(expectation(measure, fq * eta))
        ei = q_energy(measure, f, q, group)
        mi = float(expectation(measure, fq))
        lhs.append(li)
        en.append(ei)
        mass.append(mi)
        per.append({"member": label, "lhs": li, "energy": ei, "mass": mi})
    C, D = _fit_two_nonneg(lhs, en, mass)
    resid = float(np.max(np.asarray(lhs) - C * np.asarray(en) - D * np.asarray(mass)))
    return UBoundFit(mode=mode, q=float(q), C=C, D=D, max_residual=resid,
                     per_member=per)


# -- log-Sobolev ---------------------------------------------------------


def lsi_c_from_K(K, q):
    return (q - 1.0) * (q / K) ** (q - 1.0)


def lsi_K_from_c(c, q):
    return q * ((q - 1.0) / c) ** (1.0 / (q - 1.0))


@dataclass
class LsiEstimate:
    q: float
    ratios: list          # {member, entropy, energy, ratio}
    c_hat: float
    K: float
    skipped: list

    def to_dict(self):
        return {"q": self.q, "ratios": self.ratios, "c_hat": self.c_hat,
                "K": self.K, "skipped": self.skipped}


def estimate_lsi_constant(measure, members, q, group):
    """c_hat = max over the family of Ent(|f|^q) / int |grad f|^q dmu."""
    if not (1.0 < q <= 2.0):
        raise InputError("log-Sobolev estimation needs 1 < q <= 2")
    ratios, skipped = [], []
    for label, f in members:
        en = q_energy(measure, f, q, group)
        scale = float(np.max(np.abs(f.values))) ** q + _ENERGY_FLOOR
        if en <= _ENERGY_FLOOR * scale:
            skipped.append({"member": label, "reason": "zero energy"})
            continue
        ent = entropy(measure, np.abs(f.values) ** q, label=label).value
        ratios.append({"member": label, "entropy": ent, "energy": en,
                       "ratio": ent / en})
    if not ratios:
        raise InputError("no family member with positive energy")
    c_hat = max(r["ratio"] for r in ratios)
    return LsiEstimate(q=float(q), ratios=ratios, c_hat=c_hat,
                       K=float(lsi_K_from_c(c_hat, q)), skipped=skipped)


# -- dual Talagrand ------------------------------------------------------


def _log_moment(measure, vals):
    """log int e^{vals} dmu, overflow-safe."""
    w = measure.weights.values.ravel()
    return float(logsumexp(np.asarray(vals).ravel(), b=w))


def dual_talagrand_check(measure, members, K, op: HopfLaxOperator):
    """Slack log int e^{K Q_1 f} dmu - K int f dmu per member (<= 0 expected)."""
    if K <= 0:
        raise InputError("dual Talagrand needs K > 0")
    per = []
    for label, f in members:
        q1 = hopf_lax_apply(f, op.at_time(1.0)).field
        slack = _log_moment(measure, K * q1.values) - K * expectation(measure, f.values)
        per.append({"member": label, "slack": float(slack)})
    worst = max(r["slack"] for r in per)
    return InequalityReport(
        inequality="dual-talagrand",
        mode=op.normalization,
        parameters={"K": float(K), "p": op.p, "q": op.q, "n_members": len(per)},
        per_member=per,
        summary={"max_slack": worst, "pass": bool(np.isfinite(worst))},
    )


# -- monotone traces -----------------------------------------------------


@dataclass
class MonotonicityTrace:
    kind: str             # "phi" | "hyper"
    times: np.ndarray
    values: np.ndarray
    parameters: dict

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise InputError("trace times must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise NumericError("trace has non-finite values", residual=np.nan)

    @property
    def max_upward_jump(self):
        return float(max(np.max(np.diff(self.values)), 0.0))

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("t,value\n")
            for t, v in zip(self.times, self.values):
                fh.write(f"{float(t)!r},{float(v)!r}\n")

    def to_dict(self):
        return {
            "kind": self.kind,
            "times": self.times.tolist(),
            "values": self.values.tolist(),
            "parameters": self.parameters,
            "max_upward_jump": self.max_upward_jump,
        }


def phi_trace(measure, f: GridFunction, K, q, op: HopfLaxOperator, times):
    """phi(t) = (1 / K t^n) log int e^{K t^n Q_t f} dmu, n = 1/(q-1).

    Non-increasing in t; phi(t) -> int f dmu as t -> 0+, and the gap at the
    first time is recorded in the parameters as ``limit_gap``.
    """
    if K <= 0:
        raise InputError("phi trace needs K > 0")
    n = 1.0 / (q - 1.0)
    vals = []
    for t in times:
        qt = hopf_lax_apply(f, op.at_time(t)).field
        lam = K * t ** n
        vals.append(_log_moment(measure, lam * qt.values) / lam)
    mean_f = expectation(measure, f.values)
    return MonotonicityTrace(
        kind="phi",
        times=times,
        values=vals,
        parameters={"K": float(K), "q": float(q), "n": n,
                    "mean_f": float(mean_f),
                    "limit_gap": float(vals[0] - mean_f)},
    )


def hypercontractivity_trace(measure, f: GridFunction, rho, a, op: HopfLaxOperator,
                             times, allow_zero_norm=True):
    """F(t) = || e^{Q_t f} ||_{a + rho t}, non-increasing under a 2-LSI.

    At lambda(t) = 0 the norm is the limit e^{int Q_t f dmu} (the usual
    zero-norm convention); set allow_zero_norm=False to make a crossing an
    error instead.
    """
    vals = []
    for t in times:
        lam = a + rho * t
        qt = hopf_lax_apply(f, op.at_time(t)).field
        if abs(lam) < 1e-12:
            if not allow_zero_norm:
                raise InputError("lambda(t) crosses 0 on the trace grid")
            vals.append(float(np.exp(expectation(measure, qt.values))))
        else:
            vals.append(float(np.exp(_log_moment(measure, lam * qt.values) / lam)))
    return MonotonicityTrace(
        kind="hyper",
        times=times,
        values=vals,
        parameters={"rho": float(rho), "a": float(a), "q": op.q},
    )
