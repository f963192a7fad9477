"""Periodic-grid wave fields and the derived quantities of the family.

Fields are plain numpy arrays living on a :class:`Grid`; vector fields carry
a leading axis of length ``grid.dim``.  All derivatives are spectral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DensityFloorError, PreconditionError

# Fourier modes below this fraction of the largest mode are roundoff, not
# signal.  Without the cut, sixth derivatives on N=512 grids amplify FFT
# noise by (N/2)**6 ~ 1e14.
# Spectral noise truncation.  For a resolved field the top third of the
# spectrum (the band the 2/3 rule removes) holds only rounding noise; modes
# below NOISE_FACTOR times its largest magnitude are zeroed before
# differentiating.  The threshold never exceeds SPECTRAL_CUTOFF times the
# largest mode, so an under-resolved field keeps its tail.
NOISE_FACTOR = 2.0
SPECTRAL_CUTOFF = 1e-12

DEFAULT_RELATIVE_FLOOR = 1e-10

# Absolute rounding level of ln rho: relative rounding in rho becomes
# absolute rounding in its logarithm.
LOG_NOISE = float(np.finfo(float).eps)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with the same point count and spacing on every axis."""

    n: int
    spacing: float
    dim: int = 1

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise PreconditionError("only 1D and 2D grids are supported")
        if self.n < 16:
            raise PreconditionError("need at least 16 points per axis")
        if not self.spacing > 0:
            raise PreconditionError("spacing must be positive")

    @classmethod
    def periodic(cls, n, length=2 * math.pi, dim=1):
        return cls(n=n, spacing=length / n, dim=dim)

    @property
    def length(self):
        return self.n * self.spacing

    @property
    def shape(self):
        return (self.n,) * self.dim

    @property
    def axis(self):
        """1D node coordinates, starting at 0."""
        return np.arange(self.n) * self.spacing

    def coords(self):
        """Coordinate arrays, one per axis, broadcast to the full grid."""
        if self.dim == 1:
            return (self.axis,)
        return tuple(np.meshgrid(self.axis, self.axis, indexing="ij"))

    @property
    def wavenumbers(self):
        return 2 * math.pi * np.fft.fftfreq(self.n, d=self.spacing)

    def lift(self):
        """The 2D tensor-product grid built from this 1D grid."""
        return Grid(self.n, self.spacing, 2)


@dataclass(frozen=True, eq=False)
class WaveField:
    grid: Grid
    samples: np.ndarray

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex)
        if samples.shape != self.grid.shape:
            raise PreconditionError(
                f"sample shape {samples.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(samples)):
            raise PreconditionError("wave field contains non-finite values")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    def with_samples(self, samples):
        return WaveField(self.grid, samples)

    def __len__(self):
        return self.samples.size


def _noise_threshold(mag, grid, axis, noise):
    k = np.abs(grid.wavenumbers)
    index = [slice(None)] * mag.ndim
    index[axis] = k >= (2.0 / 3.0) * k.max()
    plateau = float(mag[tuple(index)].max())
    thr = min(NOISE_FACTOR * plateau, SPECTRAL_CUTOFF * float(mag.max()))
    # white noise of per-sample size s has mode magnitudes ~ s sqrt(n)
    return max(thr, NOISE_FACTOR * noise * math.sqrt(grid.n))


def differentiate(f, grid, order=1, axis=0, noise=0.0):
    """Spectral derivative of ``f`` of the given order along ``axis``.

    Exact (to rounding) for band-limited periodic fields.  Modes at the
    rounding plateau are dropped first so high orders do not amplify noise.
    ``noise`` is a known absolute rounding level of the samples (for example
    machine epsilon for ln rho, whatever its size).
    """
    if order < 0 or order > 6:
        raise PreconditionError("derivative order must be in 0..6")
    f = np.asarray(f)
    if order == 0:
        return f.copy()
    F = np.fft.fft(f, axis=axis)
    mag = np.abs(F)
    F[mag < _noise_threshold(mag, grid, axis, noise)] = 0
    k = grid.wavenumbers
    mult = (1j * k) ** order
    if order % 2 == 1 and grid.n % 2 == 0:
        mult[grid.n // 2] = 0
    shape = [1] * f.ndim
    shape[axis] = grid.n
    out = np.fft.ifft(F * mult.reshape(shape), axis=axis)
    return out.real if np.isrealobj(f) else out


def gradient(f, grid, noise=0.0):
    return np.stack([differentiate(f, grid, 1, axis=a, noise=noise) for a in range(grid.dim)])


def divergence(v, grid):
    return sum(differentiate(v[a], grid, 1, axis=a) for a in range(grid.dim))


def laplacian(f, grid, noise=0.0):
    return sum(differentiate(f, grid, 2, axis=a, noise=noise) for a in range(grid.dim))


def spectral_shift(f, grid, shift):
    """Return g(x) = f(x + shift) for a 1D periodic field (band-limited interpolation)."""
    F = np.fft.fft(f)
    out = np.fft.ifft(F * np.exp(1j * grid.wavenumbers * shift))
    return out.real if np.isrealobj(f) else out


def density(psi):
    return np.abs(psi.samples) ** 2


def jhat(psi):
    """Rescaled current Im(conj(psi) grad psi) = rho grad S."""
    grad = np.stack([differentiate(psi.samples, psi.grid, 1, axis=a) for a in range(psi.grid.dim)])
    return np.imag(np.conj(psi.samples) * grad)


def resolve_floor(rho, floor=None):
    """Absolute density floor; ``None`` means 1e-10 times max rho."""
    if floor is None:
        return DEFAULT_RELATIVE_FLOOR * float(np.max(rho))
    return float(floor)


def check_floor(rho, floor=None):
    floor = resolve_floor(rho, floor)
    lo = float(np.min(rho))
    if not lo > floor:
        raise DensityFloorError(lo, floor)
    return floor


@dataclass(frozen=True, eq=False)
class Phase:
    """Unwrapped phase S with per-axis winding numbers."""

    values: np.ndarray
    winding: tuple

    @property
    def warning(self):
        if any(self.winding):
            return f"nonzero phase winding {self.winding}: S is not periodic"
        return None


def _closing_winding(S_line, psi_line):
    closing = np.angle(psi_line[0] * np.conj(psi_line[-1]))
    return int(round((S_line[-1] - S_line[0] + closing) / (2 * math.pi)))


def unwrap_phase(psi, floor=None):
    """Continuous phase S with psi = sqrt(rho) exp(iS).

    Unwrapping starts at node 0 (and runs down column 0 first in 2D); the
    value there is the principal angle.
    """
    rho = density(psi)
    check_floor(rho, floor)
    z = psi.samples
    ang = np.angle(z)
    if psi.grid.dim == 1:
        S = np.unwrap(ang)
        return Phase(S, (_closing_winding(S, z),))
    col = np.unwrap(ang[:, 0])
    S = np.unwrap(ang, axis=1)
    S += (col - S[:, 0])[:, None]
    winding = (_closing_winding(S[:, 0], z[:, 0]), _closing_winding(S[0, :], z[0, :]))
    return Phase(S, winding)


@dataclass(frozen=True, eq=False)
class FunctionalSet:
    R1: np.ndarray
    R2: np.ndarray
    R3: np.ndarray
    R4: np.ndarray
    R5: np.ndarray
    R6: np.ndarray
    R7: np.ndarray
    R8: np.ndarray
    R9: np.ndarray
    R10: np.ndarray
    R11: np.ndarray
    R12: np.ndarray

    def __getitem__(self, j):
        if not 1 <= j <= 12:
            raise KeyError(j)
        return getattr(self, f"R{j}")

    def as_dict(self):
        return {f"R{j}": self[j] for j in range(1, 13)}


class Derived:
    """Lazily evaluated density, currents and functionals of one wave field.

    Only what is asked for gets computed, which keeps the time stepper cheap
    for equations with few active terms.
    """

    def __init__(self, psi, floor=None):
        self.psi = psi
        self.grid = psi.grid
        self.floor = check_floor(self.rho, floor)

    @cached_property
    def rho(self):
        return density(self.psi)

    @cached_property
    def grad_rho(self):
        return gradient(self.rho, self.grid)

    @cached_property
    def jhat(self):
        return jhat(self.psi)

    @cached_property
    def log_rho(self):
        return np.log(self.rho)

    @cached_property
    def sigma(self):
        """rho grad Lap ln rho."""
        return self.rho * gradient(laplacian(self.log_rho, self.grid, LOG_NOISE), self.grid)

    @cached_property
    def sigma_functional_form(self):
        """rho grad (R2 - R5); the same field as ``sigma`` in the continuum."""
        return self.rho * gradient(self.R(2) - self.R(5), self.grid)

    def R(self, j):
        key = f"_R{j}"
        if key not in self.__dict__:
            self.__dict__[key] = self._compute(j)
        return self.__dict__[key]

    def _compute(self, j):
        g, rho = self.grid, self.rho
        if j == 1:
            return divergence(self.jhat, g) / rho
        if j == 2:
            return laplacian(rho, g) / rho
        if j == 3:
            return np.sum(self.jhat**2, axis=0) / rho**2
        if j == 4:
            return np.sum(self.jhat * self.grad_rho, axis=0) / rho**2
        if j == 5:
            return np.sum(self.grad_rho**2, axis=0) / rho**2
        if j == 6:
            return divergence(self.sigma, g) / rho
        if j == 7:
            return np.sum(self.jhat * self.sigma, axis=0) / rho**2
        if j == 8:
            return np.sum(self.sigma * self.grad_rho, axis=0) / rho**2
        if j == 9:
            return np.sum(self.sigma**2, axis=0) / rho**2
        if j == 10:
            return laplacian(self.R(1), g)
        if j == 11:
            return laplacian(self.R(2), g)
        if j == 12:
            return laplacian(self.R(6), g)
        raise KeyError(j)

    def functional_set(self):
        return FunctionalSet(*(self.R(j) for j in range(1, 13)))


def functionals(psi, floor=None):
    """All twelve nonlinear functionals R1..R12 of ``psi``."""
    return Derived(psi, floor).functional_set()


def sigma(psi, floor=None):
    return Derived(psi, floor).sigma


def sigma_forms(psi, floor=None):
    """Both closed forms of sigma: (rho grad Lap ln rho, rho grad (R2 - R5))."""
    d = Derived(psi, floor)
    return d.sigma, d.sigma_functional_form


def laplacian_identity_residual(psi, floor=None):
    """max |Lap psi / psi - (i R1 + R2/2 - R3 - R5/4)| over the grid."""
    d = Derived(psi, floor)
    lhs = laplacian(psi.samples, psi.grid) / psi.samples
    rhs = 1j * d.R(1) + 0.5 * d.R(2) - d.R(3) - 0.25 * d.R(5)
    return float(np.max(np.abs(lhs - rhs)))


def gi_current(psi, c, floor=None):
    """Gauge-invariant current -2 (nu1 jhat + nu2 grad rho + nu6 sigma)."""
    d = Derived(psi, floor)
    J = c.nu1 * d.jhat
    if c.nu2:
        J = J + c.nu2 * d.grad_rho
    if c.nu6:
        J = J + c.nu6 * d.sigma
    return -2.0 * J


def imaginary_part_functional(d, c):
    """I = nu1 R1 + nu2 R2 + nu6 R6 evaluated on a :class:`Derived`."""
    out = np.zeros(d.grid.shape)
    for j, nu in ((1, c.nu1), (2, c.nu2), (6, c.nu6)):
        if nu:
            out = out + nu * d.R(j)
    return out


def real_part_functional(d, c):
    """R = sum_j mu_j R_j evaluated on a :class:`Derived`."""
    out = np.zeros(d.grid.shape)
    for j in range(1, 13):
        mu = c.mu(j)
        if mu:
            out = out + mu * d.R(j)
    return out


def continuity_residual(psi, c, floor=None):
    """max |2 I rho + div J_gi|, a kinematic identity for any psi."""
    d = Derived(psi, floor)
    J = gi_current(psi, c, d.floor)
    return float(np.max(np.abs(2 * imaginary_part_functional(d, c) * d.rho + divergence(J, d.grid))))


def smooth_field(grid, rho_amps=(), rho_phases=None, phase_amps=(), phase_shifts=None, k0=1, global_phase=0.0):
    """psi = sqrt(rho) exp(iS) with rho = 1 + sum a_n cos(n k0 k x + p_n),
    S = global_phase + sum b_n cos(n k0 k x + q_n), k the fundamental mode.

    In 2D the same profile is used along both axes (as a sum).
    """
    k = 2 * math.pi / grid.length
    coords = grid.coords()
    if rho_phases is None:
        rho_phases = np.zeros(len(rho_amps))
    if phase_shifts is None:
        phase_shifts = np.zeros(len(phase_amps))
    rho = np.ones(grid.shape)
    S = np.full(grid.shape, float(global_phase))
    for x in coords:
        for n, (a, p) in enumerate(zip(rho_amps, rho_phases), start=1):
            rho = rho + a * np.cos(n * k0 * k * x + p)
        for n, (b, q) in enumerate(zip(phase_amps, phase_shifts), start=1):
            S = S + b * np.cos(n * k0 * k * x + q)
    if np.min(rho) <= 0:
        raise PreconditionError("density amplitudes must keep rho positive")
    return WaveField(grid, np.sqrt(rho) * np.exp(1j * S))


def random_smooth_field(grid, rng, n_modes=3, max_rho_amp=0.1, max_phase_amp=0.5, k0=1):
    """Band-limited, strictly positive, zero-winding test field."""
    a = rng.uniform(-max_rho_amp, max_rho_amp, n_modes)
    p = rng.uniform(0, 2 * math.pi, n_modes)
    b = rng.uniform(-max_phase_amp, max_phase_amp, n_modes)
    q = rng.uniform(0, 2 * math.pi, n_modes)
    return smooth_field(grid, a, p, b, q, k0=k0)
