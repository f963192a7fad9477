"""Explicit time integration of the sixth-order family on 1D periodic grids."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coeffs import transform
from .errors import (
    DensityFloorError,
    EvolutionAborted,
    InstabilityError,
    PreconditionError,
    StabilityGuardError,
    TorusIncompatibleVelocity,
)
from .fields import (
    Derived,
    WaveField,
    continuity_residual,
    density,
    laplacian,
    real_part_functional,
    imaginary_part_functional,
    resolve_floor,
    spectral_shift,
)
from .gauge import apply

# Highest spatial derivative of psi each term brings in.  nu6 is counted as
# sixth order because it is always accompanied by mu12 on a gauge orbit.
_MU_ORDER = {1: 2, 2: 2, 3: 2, 4: 2, 5: 2, 6: 4, 7: 3, 8: 3, 9: 3, 10: 4, 11: 4, 12: 6}
_NU_ORDER = {1: 2, 2: 2, 6: 6}

# Weights below this fraction of the largest coefficient are dropped after
# the Laplacian split (they are cancellation residue).
_WEIGHT_EPS = 1e-14


def derivative_order(c):
    """Order p used by the stability guard dt <= c_stab dx**p / max|coeff|."""
    p = 2
    for j, order in _MU_ORDER.items():
        if c.mu(j):
            p = max(p, order)
    for j, order in _NU_ORDER.items():
        if c.nu(j):
            p = max(p, order)
    return p


def stability_limit(c, grid, c_stab=0.5):
    scale = c.scale()
    if scale == 0:
        return math.inf
    return c_stab * grid.spacing ** derivative_order(c) / scale


def _split_weights(c):
    """Laplacian coefficient and complex functional weights for the RHS.

    The bracket B = i(nu1 R1 + nu2 R2 + nu6 R6) + sum mu_j R_j is rewritten
    with R3 = i R1 + R2/2 - R5/4 - Lap(psi)/psi, so the mu3 part becomes a
    linear Laplacian and the free equation needs no division by rho at all.
    """
    w = {j: complex(c.mu(j)) for j in range(1, 13)}
    w[1] += 1j * c.nu1
    w[2] += 1j * c.nu2
    w[6] += 1j * c.nu6
    lap = 0.0
    if c.mu3:
        lap = -c.mu3
        w[1] += 1j * c.mu3
        w[2] += 0.5 * c.mu3
        w[3] = 0.0
        w[5] -= 0.25 * c.mu3
    cut = _WEIGHT_EPS * max(c.scale(), 1e-300)
    return lap, {j: v for j, v in w.items() if abs(v) > cut}


def rhs(psi, c, floor=None):
    """d psi/dt = (I - i R) psi for the equation with coefficients ``c``."""
    lap, weights = _split_weights(c)
    out = np.zeros(psi.grid.shape, dtype=complex)
    if lap:
        out += lap * laplacian(psi.samples, psi.grid)
    if weights:
        d = Derived(psi, floor)
        bracket = sum(v * d.R(j) for j, v in weights.items())
        out += bracket * psi.samples
    return -1j * out


def rhs_direct(psi, c, floor=None):
    """Same as :func:`rhs` but assembled term by term from the functionals."""
    d = Derived(psi, floor)
    return (imaginary_part_functional(d, c) - 1j * real_part_functional(d, c)) * psi.samples


@dataclass
class EvolutionConfig:
    dt: float
    t_max: float
    floor: float | None = None
    record_every: int = 1
    c_stab: float = 0.5
    dealias: bool = True
    blowup_factor: float = 1e6

    def __post_init__(self):
        if not self.dt > 0:
            raise PreconditionError("dt must be positive")
        if not self.t_max >= self.dt:
            raise PreconditionError("t_max must be at least dt")
        if self.record_every < 1:
            raise PreconditionError("record_every must be >= 1")


@dataclass
class Trajectory:
    grid: object
    times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def field(self, i):
        return WaveField(self.grid, self.snapshots[i])

    def densities(self):
        return [np.abs(s) ** 2 for s in self.snapshots]


def _dealias_mask(grid):
    k = np.abs(grid.wavenumbers)
    return k <= (2.0 / 3.0) * k.max()


def check_guard(c, grid, cfg):
    limit = stability_limit(c, grid, cfg.c_stab)
    if cfg.dt > limit:
        raise StabilityGuardError(
            f"dt = {cfg.dt:.3e} exceeds the stability guard {limit:.3e} "
            f"(c_stab * dx**{derivative_order(c)} / max|coeff|)"
        )


def _diagnostics(t, psi, c, floor):
    rho = density(psi)
    try:
        cont = continuity_residual(psi, c, floor)
    except DensityFloorError:
        cont = math.nan
    return {
        "time": float(t),
        "norm": float(np.sum(rho) * psi.grid.spacing ** psi.grid.dim),
        "continuity_residual": float(cont),
        "max_amp": float(np.max(np.abs(psi.samples))),
    }


def evolve(psi0, c, cfg):
    """Classical RK4 with a 2/3-rule projection after every step.

    Raises EvolutionAborted (density under the floor) or InstabilityError
    (blow-up); both carry the partial trajectory.
    """
    grid = psi0.grid
    if grid.dim != 1:
        raise PreconditionError("evolution is 1D only")
    check_guard(c, grid, cfg)
    rho0 = density(psi0)
    floor = resolve_floor(rho0, cfg.floor)
    if not rho0.min() > floor:
        raise DensityFloorError(float(rho0.min()), floor)
    amp0 = float(np.max(np.abs(psi0.samples)))
    mask = _dealias_mask(grid) if cfg.dealias else None

    n_steps = max(1, int(math.ceil(cfg.t_max / cfg.dt - 1e-9)))
    traj = Trajectory(grid)

    def record(t, z):
        psi = WaveField(grid, z)
        traj.times.append(float(t))
        traj.snapshots.append(z.copy())
        traj.diagnostics.append(_diagnostics(t, psi, c, floor))

    def f(z):
        return rhs(WaveField(grid, z), c, floor)

    z = psi0.samples.copy()
    t = 0.0
    record(t, z)
    for step in range(1, n_steps + 1):
        h = cfg.dt if step < n_steps else cfg.t_max - (n_steps - 1) * cfg.dt
        try:
            k1 = f(z)
            k2 = f(z + 0.5 * h * k1)
            k3 = f(z + 0.5 * h * k2)
            k4 = f(z + h * k3)
        except DensityFloorError as exc:
            raise EvolutionAborted(f"t = {t:.6g}: {exc}", traj) from exc
        except PreconditionError as exc:
            # WaveField rejects non-finite intermediate stages
            raise InstabilityError(f"t = {t:.6g}: {exc}", traj) from exc
        z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if mask is not None:
            z = np.fft.ifft(np.fft.fft(z) * mask)
        t = (step - 1) * cfg.dt + h
        amp = np.max(np.abs(z))
        if not np.isfinite(amp) or amp > cfg.blowup_factor * amp0:
            raise InstabilityError(f"t = {t:.6g}: max|psi| = {amp:.3e} blew up", traj)
        if not np.min(np.abs(z) ** 2) > floor:
            record(t, z)
            raise EvolutionAborted(f"t = {t:.6g}: density fell below the floor {floor:.3e}", traj)
        if step % cfg.record_every == 0 or step == n_steps:
            record(t, z)
    return traj


@dataclass
class CovarianceReport:
    max_density_discrepancy: float
    times: list
    discrepancies: list
    transformed_coefficients: object

    def as_dict(self):
        return {
            "max_density_discrepancy": self.max_density_discrepancy,
            "times": list(self.times),
            "discrepancies": list(self.discrepancies),
            "transformed_coefficients": self.transformed_coefficients.as_dict(),
        }


def gauge_covariance_experiment(psi0, c, g, cfg):
    """Evolve-then-transform against transform-then-evolve, compared on densities."""
    c_prime = transform(c, g)
    check_guard(c, psi0.grid, cfg)
    check_guard(c_prime, psi0.grid, cfg)
    path_a = evolve(psi0, c, cfg)
    path_b = evolve(apply(psi0, g, cfg.floor), c_prime, cfg)
    diffs = []
    for i in range(len(path_a.times)):
        rho_a = density(apply(path_a.field(i), g, cfg.floor))
        rho_b = np.abs(path_b.snapshots[i]) ** 2
        diffs.append(float(np.max(np.abs(rho_a - rho_b))))
    return CovarianceReport(max(diffs), list(path_a.times), diffs, c_prime)


def admissible_velocities(grid, nu1, count=3):
    step = 4 * math.pi * abs(nu1) / grid.length
    return [n * step for n in range(-count, count + 1)]


def galilean_boost(psi, v, nu1):
    """psi(x) exp(i x v / (2 nu1)), the boosted field at t = 0."""
    if nu1 == 0:
        raise PreconditionError("nu1 must be nonzero")
    grid = psi.grid
    turns = v * grid.length / (4 * math.pi * abs(nu1))
    if abs(turns - round(turns)) > 1e-9:
        allowed = ", ".join(f"{u:.6g}" for u in admissible_velocities(grid, nu1))
        raise TorusIncompatibleVelocity(
            f"v = {v} does not give a periodic boost phase; admissible velocities are "
            f"integer multiples of {4 * math.pi * abs(nu1) / grid.length:.6g} (e.g. {allowed})"
        )
    x = grid.coords()
    phase = sum(xa for xa in x) * v / (2 * nu1)
    return psi.with_samples(psi.samples * np.exp(1j * phase))


@dataclass
class GalileanReport:
    max_density_discrepancy: float
    times: list
    discrepancies: list

    def as_dict(self):
        return dict(self.__dict__)


def galilean_experiment(psi0, c, v, cfg):
    """Boosted trajectory density against the unboosted one shifted by v t."""
    boosted = evolve(galilean_boost(psi0, v, c.nu1), c, cfg)
    plain = evolve(psi0, c, cfg)
    diffs = []
    for t, rb, rp in zip(boosted.times, boosted.densities(), plain.densities()):
        diffs.append(float(np.max(np.abs(rb - spectral_shift(rp, psi0.grid, v * t)))))
    return GalileanReport(max(diffs), list(boosted.times), diffs)


def gaussian_packet(grid, width, center=None, k=0.0):
    """psi with density exp(-(x - x0)**2 / (2 width**2)) (unnormalized), plane-wave factor e^{ikx}."""
    x = grid.axis
    x0 = grid.length / 2 if center is None else center
    return WaveField(grid, np.exp(-((x - x0) ** 2) / (4 * width**2) + 1j * k * x))


def packet_width(rho, grid, mask_fraction=1e-6):
    """Standard deviation of x under rho, restricted to rho > mask_fraction * max rho."""
    x = grid.axis
    keep = rho > mask_fraction * rho.max()
    w = rho[keep]
    xm = np.sum(w * x[keep]) / np.sum(w)
    return float(np.sqrt(np.sum(w * (x[keep] - xm) ** 2) / np.sum(w)))
