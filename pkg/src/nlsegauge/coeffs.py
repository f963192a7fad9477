"""Coefficient algebra of the weakly local nonlinear gauge group.

An equation of the sixth-order family is fixed by fifteen real coefficients

    i dpsi/dt = { i (nu1 R1 + nu2 R2 + nu6 R6) + sum_j mu_j R_j } psi,

and a gauge element by the triple (gamma, Lambda, eta) acting through the
phase  phi = gamma/2 ln(rho) + (Lambda - 1) S + eta Lap(ln rho).

Everything here is pure arithmetic on small frozen dataclasses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .errors import InvalidGaugeError, NotLinearizable, PreconditionError

COEFFICIENT_NAMES = (
    "nu1", "nu2", "nu6",
    "mu1", "mu2", "mu3", "mu4", "mu5", "mu6",
    "mu7", "mu8", "mu9", "mu10", "mu11", "mu12",
)

INVARIANT_NAMES = (
    "tau1", "tau2", "tau3", "tau4", "tau5", "tau6", "tau7", "tau8",
    "tau9", "tau10", "tau11", "tau12", "tau5hat",
)

# Homogeneity degree of each invariant in the coefficients; used to scale
# classification tolerances.
INVARIANT_DEGREE = {
    "tau1": 1, "tau2": 2, "tau3": 0, "tau4": 1, "tau5": 2, "tau6": 2,
    "tau7": 1, "tau8": 2, "tau9": 2, "tau10": 1, "tau11": 2, "tau12": 2,
    "tau5hat": 2,
}

NU6_LAWS = ("corrected", "printed")


@dataclass(frozen=True)
class CoefficientVector:
    """The fifteen coefficients of one equation in the family."""

    nu1: float = 0.0
    nu2: float = 0.0
    nu6: float = 0.0
    mu1: float = 0.0
    mu2: float = 0.0
    mu3: float = 0.0
    mu4: float = 0.0
    mu5: float = 0.0
    mu6: float = 0.0
    mu7: float = 0.0
    mu8: float = 0.0
    mu9: float = 0.0
    mu10: float = 0.0
    mu11: float = 0.0
    mu12: float = 0.0

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - set(COEFFICIENT_NAMES)
        if unknown:
            raise PreconditionError(f"unknown coefficient keys: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})

    @classmethod
    def from_array(cls, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (15,):
            raise PreconditionError(f"expected 15 coefficients, got shape {values.shape}")
        return cls(*map(float, values))

    def as_dict(self):
        return {name: getattr(self, name) for name in COEFFICIENT_NAMES}

    def as_array(self):
        return np.array([getattr(self, name) for name in COEFFICIENT_NAMES])

    def scale(self):
        """Largest coefficient magnitude."""
        return float(np.max(np.abs(self.as_array())))

    def nu(self, j):
        return getattr(self, f"nu{j}")

    def mu(self, j):
        return getattr(self, f"mu{j}")

    def replace(self, **changes):
        return replace(self, **changes)


def schrodinger(hbar=1.0, m=1.0):
    """Coefficients of the free linear Schroedinger equation."""
    if hbar <= 0 or m <= 0:
        raise PreconditionError("hbar and m must be positive")
    r = hbar / (2.0 * m)
    return CoefficientVector(nu1=-r, mu2=-r / 2.0, mu3=r, mu5=r / 4.0)


@dataclass(frozen=True)
class GaugeParams:
    """Group element (gamma, Lambda, eta); Lambda must be nonzero."""

    gamma: float = 0.0
    lambda_cap: float = 1.0
    eta: float = 0.0

    def __post_init__(self):
        if self.lambda_cap == 0:
            raise InvalidGaugeError("gauge parameter Lambda must be nonzero")

    def as_dict(self):
        return {"gamma": self.gamma, "lambda": self.lambda_cap, "eta": self.eta}

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - {"gamma", "lambda", "eta"}
        if unknown:
            raise PreconditionError(f"unknown gauge keys: {sorted(unknown)}")
        return cls(
            gamma=float(data.get("gamma", 0.0)),
            lambda_cap=float(data.get("lambda", 1.0)),
            eta=float(data.get("eta", 0.0)),
        )

    def as_tuple(self):
        return (self.gamma, self.lambda_cap, self.eta)


def identity_gauge():
    return GaugeParams(0.0, 1.0, 0.0)


def compose(g2, g1):
    """Return g2 o g1, i.e. apply g1 first."""
    return GaugeParams(
        gamma=g2.gamma + g2.lambda_cap * g1.gamma,
        lambda_cap=g2.lambda_cap * g1.lambda_cap,
        eta=g2.eta + g2.lambda_cap * g1.eta,
    )


def inverse(g):
    lam = g.lambda_cap
    if lam == 0:
        raise InvalidGaugeError("gauge parameter Lambda must be nonzero")
    return GaugeParams(-g.gamma / lam, 1.0 / lam, -g.eta / lam)


def _require_nu1(c):
    if c.nu1 == 0:
        raise PreconditionError("nu1 must be nonzero")


def transform(c, g, nu6_law="corrected"):
    """Coefficients of the equation satisfied by the gauge-transformed field.

    ``nu6_law="printed"`` reproduces the historical form
    nu6' = nu6 - eta/(nu1 Lambda), which is kept only so that its failure can
    be demonstrated; it does not preserve the invariants unless nu1**2 == 1.
    """
    _require_nu1(c)
    if nu6_law not in NU6_LAWS:
        raise PreconditionError(f"nu6_law must be one of {NU6_LAWS}")
    gam, lam, eta = g.gamma, g.lambda_cap, g.eta
    if lam == 0:
        raise InvalidGaugeError("gauge parameter Lambda must be nonzero")

    nu1, nu2, nu6 = c.nu1, c.nu2, c.nu6
    mu1, mu2, mu3, mu4, mu5, mu6 = c.mu1, c.mu2, c.mu3, c.mu4, c.mu5, c.mu6
    mu7, mu8, mu9, mu10, mu11, mu12 = c.mu7, c.mu8, c.mu9, c.mu10, c.mu11, c.mu12

    if nu6_law == "corrected":
        nu6p = nu6 - eta * nu1 / lam
    else:
        nu6p = nu6 - eta / (nu1 * lam)

    return CoefficientVector(
        nu1=nu1 / lam,
        nu2=nu2 - 0.5 * gam * nu1 / lam,
        nu6=nu6p,
        mu1=mu1 - gam * nu1 / lam,
        mu2=lam * mu2 - 0.5 * gam * mu1 + gam**2 / (2 * lam) * nu1 - gam * nu2,
        mu3=mu3 / lam,
        mu4=mu4 - gam * mu3 / lam,
        mu5=lam * mu5 - 0.5 * gam * mu4 + gam**2 / (4 * lam) * mu3,
        mu6=lam * mu6 - gam * nu6 - eta * mu1 + eta * gam / lam * nu1,
        mu7=mu7 - 2 * eta * mu3 / lam,
        mu8=lam * mu8 - eta * mu4 - 0.5 * gam * mu7 + gam * eta * mu3 / lam,
        mu9=lam * mu9 - eta * mu7 + eta**2 * mu3 / lam,
        mu10=mu10 - 2 * eta * nu1 / lam,
        mu11=lam * mu11 - 2 * eta * nu2 - 0.5 * gam * mu10 + gam * eta * nu1 / lam,
        mu12=lam * mu12 - 2 * eta * nu6 - eta * mu10 + 2 * eta**2 * nu1 / lam,
    )


def time_reverse(c):
    """Flip the sign of every coefficient."""
    return CoefficientVector.from_array(-c.as_array())


@dataclass(frozen=True)
class InvariantVector:
    """Gauge invariants tau1..tau12 plus tau5hat.

    ``tau5`` is the older invariant nu1 mu5 - nu2 mu4 + nu2**2 mu3/nu1; the
    list of twelve functionally independent invariants uses ``tau5hat``
    in its place.
    """

    tau1: float
    tau2: float
    tau3: float
    tau4: float
    tau5: float
    tau6: float
    tau7: float
    tau8: float
    tau9: float
    tau10: float
    tau11: float
    tau12: float
    tau5hat: float

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def as_array(self):
        return np.array([getattr(self, name) for name in INVARIANT_NAMES])

    def relation_residual(self):
        """tau5hat - [tau3 tau5 - (tau1 tau3 - tau4/2)**2]; zero up to rounding."""
        rhs = self.tau3 * self.tau5 - (self.tau1 * self.tau3 - 0.5 * self.tau4) ** 2
        return self.tau5hat - rhs


def invariants(c):
    _require_nu1(c)
    nu1, nu2, nu6 = c.nu1, c.nu2, c.nu6
    mu1, mu2, mu3, mu4, mu5, mu6 = c.mu1, c.mu2, c.mu3, c.mu4, c.mu5, c.mu6
    mu7, mu8, mu9, mu10, mu11, mu12 = c.mu7, c.mu8, c.mu9, c.mu10, c.mu11, c.mu12
    return InvariantVector(
        tau1=nu2 - 0.5 * mu1,
        tau2=nu1 * mu2 - mu1 * nu2,
        tau3=mu3 / nu1,
        tau4=mu4 - mu1 * mu3 / nu1,
        tau5=nu1 * mu5 - nu2 * mu4 + nu2**2 * mu3 / nu1,
        tau6=mu6 * nu1 - mu1 * nu6,
        tau7=mu7 - 2 * nu6 * mu3 / nu1,
        tau8=mu8 * nu1 - mu4 * nu6 + mu6 * mu3 - 0.5 * mu7 * mu1,
        tau9=mu9 * mu3 - 0.25 * mu7**2,
        tau10=mu10 - 2 * nu6,
        tau11=mu11 * nu1 - mu10 * nu2,
        tau12=mu12 * nu1 - nu6**2 - 0.25 * mu10**2,
        tau5hat=mu5 * mu3 - 0.25 * mu4**2,
    )


@dataclass(frozen=True)
class ClassificationReport:
    linear_equivalent: bool
    dg_equivalent: bool
    galilean: bool
    time_reversal: bool
    tolerance_used: float
    residuals: dict
    invariants: InvariantVector

    def as_dict(self):
        return {
            "linear_equivalent": self.linear_equivalent,
            "dg_equivalent": self.dg_equivalent,
            "galilean": self.galilean,
            "time_reversal": self.time_reversal,
            "tolerance_used": self.tolerance_used,
            "residuals": dict(self.residuals),
            "invariants": self.invariants.as_dict(),
        }


def classify(c, tol=1e-9):
    """Decide the four equivalence/symmetry classes from the invariants.

    A condition ``value == target`` of homogeneity degree d passes when
    ``|value - target| <= tol * s**d`` with s the largest |coefficient|.
    The linear-equivalence test infers hbar/m from tau2, which must be
    positive.
    """
    _require_nu1(c)
    if not tol > 0:
        raise PreconditionError("tol must be positive")
    t = invariants(c)
    s = c.scale()

    def thr(degree):
        return tol * s**degree

    res = {}

    def check(label, value, degree):
        res[label] = float(abs(value))
        return abs(value) <= thr(degree)

    zero_rest = all([
        check(f"{name}=0", getattr(t, name), INVARIANT_DEGREE[name])
        for name in ("tau1", "tau4", "tau6", "tau7", "tau8", "tau9", "tau10", "tau11", "tau12")
    ])
    dg = all(abs(getattr(t, f"tau{j}")) <= thr(INVARIANT_DEGREE[f"tau{j}"]) for j in range(6, 13))

    tau3_ok = check("tau3+1", t.tau3 + 1.0, 0)
    tau2_pos = t.tau2 > thr(2)
    res["tau2"] = float(t.tau2)
    tau5_ok = check("tau5hat-tau2/2", t.tau5hat - 0.5 * t.tau2, 2)
    linear = zero_rest and tau3_ok and tau2_pos and tau5_ok

    galilean = (
        abs(t.tau3 + 1.0) <= thr(0)
        and abs(t.tau4) <= thr(1)
        and check("tau7+tau10", t.tau7 + t.tau10, 1)
    )
    time_rev = all(
        abs(getattr(t, name)) <= thr(1) for name in ("tau1", "tau4", "tau7", "tau10")
    )
    return ClassificationReport(
        linear_equivalent=bool(linear),
        dg_equivalent=bool(dg),
        galilean=bool(galilean),
        time_reversal=bool(time_rev),
        tolerance_used=float(tol),
        residuals=res,
        invariants=t,
    )


def linearizing_gauge(c, hbar=1.0, m=1.0, tol=1e-9):
    """Gauge taking ``c`` to the free Schroedinger equation with the given hbar, m.

    Raises NotLinearizable if the candidate gauge does not reproduce the
    Schroedinger coefficients to ``tol`` (relative to the coefficient scale).
    """
    _require_nu1(c)
    target = schrodinger(hbar, m)
    lam = c.nu1 / target.nu1
    g = GaugeParams(gamma=2 * c.nu2 * lam / c.nu1, lambda_cap=lam, eta=c.nu6 * lam / c.nu1)
    out = transform(c, g)
    diff = np.max(np.abs(out.as_array() - target.as_array()))
    scale = max(1.0, target.scale(), out.scale())
    if not diff <= tol * scale or not math.isfinite(diff):
        raise NotLinearizable(
            f"transformed coefficients miss the Schroedinger point by {diff:.3e}", residual=float(diff)
        )
    return g
