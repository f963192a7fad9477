"""Independent numerical checks of the coefficient transformation laws.

The chain-rule residual builds d psi'/dt from field operations alone (the
Madelung split of the equation plus the time derivative of the gauge
phase) and asks whether psi' obeys the equation with the transformed
coefficients.  Only the law under test comes from :mod:`coeffs`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coeffs import (
    COEFFICIENT_NAMES,
    INVARIANT_NAMES,
    CoefficientVector,
    GaugeParams,
    compose,
    identity_gauge,
    inverse,
    invariants,
    transform,
)
from .evolution import rhs
from .fields import (
    Derived,
    Grid,
    WaveField,
    imaginary_part_functional,
    laplacian,
    random_smooth_field,
    real_part_functional,
)
from .gauge import phase_functional


def transformation_law_residual(psi, c, g, floor=None, nu6_law="corrected"):
    """max |i psi'_t - (i I' + R') psi'| for psi' = exp(i phi) psi.

    ``psi'_t`` comes from the chain rule; ``I'`` and ``R'`` use the
    coefficients produced by ``transform(c, g, nu6_law)``.  The residual is
    discretization-small exactly when the law is right.
    """
    return law_residual_and_scale(psi, c, g, floor, nu6_law)[0]


def law_residual_and_scale(psi, c, g, floor=None, nu6_law="corrected"):
    """The chain-rule residual together with max |psi'_t|, the size of the terms it compares."""
    d = Derived(psi, floor)
    psi_t = rhs(psi, c, d.floor)
    imag_part = imaginary_part_functional(d, c)
    real_part = real_part_functional(d, c)
    log_rho_t = 2.0 * imag_part  # rho_t / rho
    S_t = -real_part
    phi_t = 0.5 * g.gamma * log_rho_t + (g.lambda_cap - 1.0) * S_t
    if g.eta:
        phi_t = phi_t + g.eta * laplacian(log_rho_t, psi.grid)

    phase = np.exp(1j * phase_functional(psi, g, d.floor))
    psi_p = psi.with_samples(phase * psi.samples)
    psi_p_t = phase * (psi_t + 1j * phi_t * psi.samples)

    c_p = transform(c, g, nu6_law)
    dp = Derived(psi_p, d.floor)
    target = (1j * imaginary_part_functional(dp, c_p) + real_part_functional(dp, c_p)) * psi_p.samples
    return float(np.max(np.abs(1j * psi_p_t - target))), float(np.max(np.abs(psi_p_t)))


def random_coefficients(rng, low=-2.0, high=2.0, min_nu1=0.1):
    values = rng.uniform(low, high, 15)
    while abs(values[0]) < min_nu1:
        values[0] = rng.uniform(low, high)
    return CoefficientVector.from_array(values)


def random_gauge(rng):
    lam = rng.choice([-1.0, 1.0]) * rng.uniform(0.25, 4.0)
    return GaugeParams(rng.uniform(-2.0, 2.0), float(lam), rng.uniform(-2.0, 2.0))


def _componentwise(a, b, rtol):
    """Boolean violations and relative errors |a-b| / max(|a|, |b|, 1)."""
    err = np.abs(a - b) / np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return err > rtol, err


@dataclass
class SamplingReport:
    n: int
    seed: int
    rtol: float
    worst: float
    violations: int
    components: list = field(default_factory=list)
    worst_case: dict | None = None

    @property
    def passed(self):
        return self.violations == 0

    def as_dict(self):
        return {
            "n": self.n,
            "seed": self.seed,
            "rtol": self.rtol,
            "passed": self.passed,
            "worst": self.worst,
            "violations": self.violations,
            "components": list(self.components),
            "worst_case": self.worst_case,
        }


def invariant_sampling(n, seed, rtol=1e-9, nu6_law="corrected"):
    """Check tau(transform(c, g)) == tau(c) on ``n`` random (c, g) pairs."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    worst, worst_case, count = 0.0, None, 0
    broken = set()
    for _ in range(n):
        c, g = random_coefficients(rng), random_gauge(rng)
        before = invariants(c).as_array()
        after = invariants(transform(c, g, nu6_law)).as_array()
        bad, err = _componentwise(before, after, rtol)
        if bad.any():
            count += 1
            broken.update(INVARIANT_NAMES[k] for k in np.flatnonzero(bad))
        if err.max() > worst:
            worst = float(err.max())
            worst_case = {
                "coefficients": c.as_dict(),
                "gauge": g.as_dict(),
                "component": INVARIANT_NAMES[int(err.argmax())],
            }
    components = [name for name in INVARIANT_NAMES if name in broken]
    return SamplingReport(n, seed, rtol, worst, count, components, worst_case)


def functoriality_sampling(n, seed, rtol=1e-9):
    """Check transform(transform(c, g1), g2) == transform(c, compose(g2, g1))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    worst, worst_case, count = 0.0, None, 0
    broken = set()
    for _ in range(n):
        c, g1, g2 = random_coefficients(rng), random_gauge(rng), random_gauge(rng)
        lhs = transform(transform(c, g1), g2).as_array()
        rhs_ = transform(c, compose(g2, g1)).as_array()
        bad, err = _componentwise(lhs, rhs_, rtol)
        if bad.any():
            count += 1
            broken.update(COEFFICIENT_NAMES[k] for k in np.flatnonzero(bad))
        if err.max() > worst:
            worst = float(err.max())
            worst_case = {"coefficients": c.as_dict(), "g1": g1.as_dict(), "g2": g2.as_dict()}
    components = [name for name in COEFFICIENT_NAMES if name in broken]
    return SamplingReport(n, seed, rtol, worst, count, components, worst_case)


def group_axiom_sampling(n, seed, rtol=1e-12):
    """Associativity, identity and inverse laws on ``n`` random triples."""
    rng = np.random.default_rng(seed)
    e = identity_gauge()
    worst = 0.0
    count = 0
    for _ in range(n):
        a, b, c = random_gauge(rng), random_gauge(rng), random_gauge(rng)
        pairs = [
            (compose(compose(a, b), c), compose(a, compose(b, c))),
            (compose(e, a), a),
            (compose(a, e), a),
            (compose(a, inverse(a)), e),
            (compose(inverse(a), a), e),
        ]
        for x, y in pairs:
            bad, err = _componentwise(np.array(x.as_tuple()), np.array(y.as_tuple()), rtol)
            worst = max(worst, float(err.max()))
            count += int(bad.any())
    return SamplingReport(n, seed, rtol, worst, count)


@dataclass
class LawReport:
    points: int
    nu6_law: str
    residuals: list
    worst: float
    tol: float

    @property
    def passed(self):
        return self.worst <= self.tol

    def as_dict(self):
        return {
            "points": self.points,
            "nu6_law": self.nu6_law,
            "tol": self.tol,
            "passed": self.passed,
            "worst": self.worst,
            "residuals": list(self.residuals),
        }


def law_sampling(n, seed, points=256, nu6_law="corrected", tol=1e-5):
    """Chain-rule residual on ``n`` random (c, g, psi) draws."""
    rng = np.random.default_rng(seed)
    grid = Grid.periodic(points)
    residuals = []
    for _ in range(n):
        c, g = random_coefficients(rng), random_gauge(rng)
        psi = random_smooth_field(grid, rng)
        residuals.append(transformation_law_residual(psi, c, g, nu6_law=nu6_law))
    return LawReport(points, nu6_law, residuals, max(residuals), tol)


# Rounding floor of the chain-rule residual relative to max |psi'_t|: sixth
# derivatives in double precision bottom out near 1e-9 to 1e-8.
RELATIVE_NOISE_FLOOR = 1e-7


def sharp_test_field(grid, depth=0.9):
    """sqrt(1 + depth cos x) exp(i sin(x) / 2): smooth but slowly decaying spectrum.

    ln rho has modes falling off like r**n with r = (1 - sqrt(1 - depth**2)) / depth,
    so at depth 0.9 a 128-point grid is visibly under-resolved for sixth
    derivatives while 512 points are not.  Useful for measuring convergence order.
    """
    x = grid.axis * (2 * math.pi / grid.length)
    return WaveField(grid, np.sqrt(1 + depth * np.cos(x)) * np.exp(0.5j * np.sin(x)))


@dataclass
class ConvergenceReport:
    points: list
    residuals: list
    scales: list
    orders: list
    relative_floor: float = RELATIVE_NOISE_FLOOR

    def doubling_ok(self, min_order=4.0):
        """Each doubling shows order >= min_order or lands on the rounding floor."""
        out = []
        for i, p in enumerate(self.orders):
            at_floor = self.residuals[i + 1] <= self.relative_floor * self.scales[i + 1]
            out.append(bool(p >= min_order or at_floor))
        return out

    @property
    def converged(self):
        return all(self.doubling_ok())

    def as_dict(self):
        return {
            "points": list(self.points),
            "residuals": list(self.residuals),
            "scales": list(self.scales),
            "orders": list(self.orders),
            "relative_floor": self.relative_floor,
            "doubling_ok": self.doubling_ok(),
        }


def convergence_study(make_field, c, g, points=(128, 256, 512), nu6_law="corrected", length=2 * math.pi,
                      relative_floor=RELATIVE_NOISE_FLOOR):
    """Residual of the chain-rule check under grid doubling.

    ``make_field(grid)`` must sample the same continuum field on every grid.
    Observed orders are log2(r_N / r_2N).
    """
    residuals, scales = [], []
    for n in points:
        grid = Grid.periodic(n, length)
        r, s = law_residual_and_scale(make_field(grid), c, g, nu6_law=nu6_law)
        residuals.append(r)
        scales.append(s)
    orders = [
        math.log2(r0 / r1) if r1 > 0 else math.inf
        for r0, r1 in zip(residuals, residuals[1:])
    ]
    return ConvergenceReport(list(points), residuals, scales, orders, relative_floor)
