"""Radial potentials U(d) and their growth-condition checks.

Built-ins:
    power           U(s) = s^p
    powerlog        U(s) = (s+1)^p log(s+1)
    sinh            U(s) = sinh(s)
    gaussian-euclid U(s) = s^2 / 2
    table           piecewise-linear interpolation of sampled values

The growth-condition report measures, on a logarithmic grid over (1, d_max],

    beta_hat  = sup U''(s) / U'(s)
    gamma_hat = sup U(s) / U'(s)^q

which are the two hypotheses under which the measure e^{-U(d)}/Z dlambda
satisfies the q-Poincare and q-log-Sobolev inequalities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError


@dataclass
class PotentialSpec:
    """U with first and second derivatives on s >= 0."""

    name: str
    params: dict
    _u: callable = field(repr=False)
    _du: callable = field(repr=False)
    _d2u: callable = field(repr=False)

    def u(self, s):
        return self._u(np.asarray(s, dtype=float))

    def du(self, s):
        return self._du(np.asarray(s, dtype=float))

    def d2u(self, s):
        return self._d2u(np.asarray(s, dtype=float))

    def validate(self, s_max=20.0, n=512):
        """Sample-check: U >= 0, U non-decreasing, U'' finite."""
        s = np.linspace(0.0, s_max, n)
        u, du, d2u = self.u(s), self.du(s), self.d2u(s)
        if not np.all(np.isfinite(u)) or np.any(u < -1e-12):
            raise InputError(f"potential {self.name!r} is not finite non-negative")
        if np.any(du < -1e-9):
            raise InputError(f"potential {self.name!r} is not non-decreasing")
        if not np.all(np.isfinite(d2u)):
            raise InputError(f"potential {self.name!r} has non-finite U''")
        return self


def make_potential(name, **params):
    name = name.strip().lower().replace("_", "-")
    if name == "power":
        p = float(params.get("p", 2.0))
        if p <= 1.0:
            raise InputError("power potential needs p > 1")
        return PotentialSpec(
            "power",
            {"p": p},
            lambda s: s ** p,
            lambda s: p * s ** (p - 1.0),
            lambda s: p * (p - 1.0) * np.where(s > 0, s, 1e-300) ** (p - 2.0),
        )
    if name == "powerlog":
        p = float(params.get("p", 2.0))
        return PotentialSpec(
            "powerlog",
            {"p": p},
            lambda s: (s + 1.0) ** p * np.log(s + 1.0),
            lambda s: (s + 1.0) ** (p - 1.0) * (p * np.log(s + 1.0) + 1.0),
            lambda s: (s + 1.0) ** (p - 2.0)
            * (p * (p - 1.0) * np.log(s + 1.0) + 2.0 * p - 1.0),
        )
    if name == "sinh":
        return PotentialSpec("sinh", {}, np.sinh, np.cosh, np.sinh)
    if name == "gaussian-euclid":
        return PotentialSpec(
            "gaussian-euclid",
            {},
            lambda s: 0.5 * s ** 2,
            lambda s: np.asarray(s, dtype=float),
            lambda s: np.ones_like(np.asarray(s, dtype=float)),
        )
    if name == "table":
        s_tab = np.asarray(params["s"], dtype=float)
        u_tab = np.asarray(params["u"], dtype=float)
        if s_tab.ndim != 1 or s_tab.shape != u_tab.shape or s_tab.size < 4:
            raise InputError("table potential needs matching 1D s/u with >= 4 samples")
        du_tab = np.gradient(u_tab, s_tab)
        d2u_tab = np.gradient(du_tab, s_tab)
        return PotentialSpec(
            "table",
            {"n": int(s_tab.size)},
            lambda s: np.interp(s, s_tab, u_tab),
            lambda s: np.interp(s, s_tab, du_tab),
            lambda s: np.interp(s, s_tab, d2u_tab),
        )
    if name == "constant":
        # uniform measure on the box; handy for trivial-case tests
        return PotentialSpec(
            "constant",
            {},
            lambda s: np.zeros_like(np.asarray(s, dtype=float)),
            lambda s: np.zeros_like(np.asarray(s, dtype=float)),
            lambda s: np.zeros_like(np.asarray(s, dtype=float)),
        )
    raise InputError(f"unknown potential {name!r}")


@dataclass
class ConditionReport:
    """Measured growth-condition suprema on d in (1, d_max]."""

    potential: str
    q: float
    d_max: float
    beta_hat: float
    gamma_hat: float
    ok: bool

    def to_dict(self):
        return {
            "potential": self.potential,
            "q": self.q,
            "d_max": self.d_max,
            "beta_hat": self.beta_hat,
            "gamma_hat": self.gamma_hat,
            "ok": self.ok,
        }


def check_growth_conditions(potential: PotentialSpec, q, d_max, n=4096):
    """Suprema of U''/U' and U/U'^q over a log grid on (1, d_max]."""
    if q <= 1.0:
        raise InputError("growth conditions need q > 1")
    if d_max <= 1.0:
        raise InputError("growth conditions are tested outside the unit ball")
    s = np.geomspace(1.0 + 1e-9, d_max, n)
    u, du, d2u = potential.u(s), potential.du(s), potential.d2u(s)
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(du))):
        raise InputError("potential undefined on the tested range")
    with np.errstate(divide="ignore", invalid="ignore"):
        beta = np.where(du > 0, d2u / du, np.inf)
        gamma = np.where(du > 0, u / du ** q, np.inf)
    beta_hat = float(np.max(beta))
    gamma_hat = float(np.max(gamma))
    return ConditionReport(
        potential=potential.name,
        q=float(q),
        d_max=float(d_max),
        beta_hat=beta_hat,
        gamma_hat=gamma_hat,
        ok=bool(np.isfinite(beta_hat) and np.isfinite(gamma_hat)),
    )
