import math

import numpy as np
import pytest

from nlsegauge.coeffs import CoefficientVector, GaugeParams, identity_gauge, schrodinger, transform
from nlsegauge.errors import (
    DensityFloorError,
    EvolutionAborted,
    InstabilityError,
    PreconditionError,
    StabilityGuardError,
    TorusIncompatibleVelocity,
)
from nlsegauge.evolution import (
    EvolutionConfig,
    admissible_velocities,
    derivative_order,
    evolve,
    galilean_boost,
    galilean_experiment,
    gauge_covariance_experiment,
    gaussian_packet,
    packet_width,
    rhs,
    rhs_direct,
    stability_limit,
)
from nlsegauge.fields import Grid, WaveField, random_smooth_field, smooth_field

GRID = Grid.periodic(64)
X = GRID.axis
GALILEAN = CoefficientVector(nu1=-0.5, nu2=0.05, mu1=-0.2, mu2=-0.1, mu3=0.5, mu4=0.2, mu5=0.3)


def bumpy(grid):
    return smooth_field(grid, [0.3, 0.1], [0.0, 1.0], [0.5, 0.2], [0.3, 2.0])


# -- right-hand side ----------------------------------------------------------

def test_rhs_plane_wave_dispersion():
    k = 3
    psi = WaveField(GRID, np.exp(1j * k * X))
    assert np.allclose(rhs(psi, schrodinger()), -0.5j * k**2 * psi.samples, atol=1e-11)


def test_rhs_zero_coefficients():
    psi = random_smooth_field(GRID, np.random.default_rng(0))
    assert np.all(rhs(psi, CoefficientVector()) == 0)


def test_rhs_constant_field():
    rng = np.random.default_rng(1)
    c = CoefficientVector.from_array(rng.uniform(-1, 1, 15))
    assert np.max(np.abs(rhs(WaveField(GRID, np.full(64, 0.7 + 0.2j)), c))) <= 1e-12


def test_rhs_split_matches_direct_assembly():
    rng = np.random.default_rng(2)
    for _ in range(5):
        c = CoefficientVector.from_array(rng.uniform(-1, 1, 15))
        psi = random_smooth_field(Grid.periodic(128), rng)
        a, b = rhs(psi, c), rhs_direct(psi, c)
        assert np.max(np.abs(a - b)) <= 1e-9 * max(1.0, np.max(np.abs(b)))


# -- stability guard ------------------------------------------------------------

def test_derivative_order_cases():
    assert derivative_order(schrodinger()) == 2
    assert derivative_order(CoefficientVector(nu1=1, mu7=1)) == 3
    assert derivative_order(CoefficientVector(nu1=1, mu10=1)) == 4
    assert derivative_order(transform(schrodinger(), GaugeParams(0, 1, 0.1))) == 6


def test_guard_rejects_large_dt():
    with pytest.raises(StabilityGuardError, match="stability guard"):
        evolve(WaveField(GRID, np.exp(1j * X)), schrodinger(), EvolutionConfig(dt=0.1, t_max=1.0))


def test_guard_sixth_order_is_stricter():
    c6 = transform(schrodinger(), GaugeParams(0, 1, 0.05))
    assert stability_limit(c6, GRID) < 1e-3 * stability_limit(schrodinger(), GRID)


def test_config_validation():
    with pytest.raises(PreconditionError):
        EvolutionConfig(dt=0, t_max=1)
    with pytest.raises(PreconditionError):
        EvolutionConfig(dt=1, t_max=0.5)


# -- integration --------------------------------------------------------------

def test_plane_wave_exact_phase():
    k = 3
    traj = evolve(WaveField(GRID, np.exp(1j * k * X)), schrodinger(), EvolutionConfig(dt=1e-3, t_max=1.0, record_every=250))
    exact = np.exp(1j * k * X - 0.5j * k**2 * 1.0)
    assert traj.times[-1] == pytest.approx(1.0)
    assert np.max(np.abs(traj.snapshots[-1] - exact)) <= 1e-8
    assert np.allclose(np.abs(traj.snapshots[-1]), 1.0, atol=1e-12)


def test_rk4_order():
    k = 8
    errs = []
    for dt in (4e-3, 2e-3):
        traj = evolve(WaveField(GRID, np.exp(1j * k * X)), schrodinger(), EvolutionConfig(dt=dt, t_max=1.0, c_stab=10))
        errs.append(np.max(np.abs(traj.snapshots[-1] - np.exp(1j * k * X - 0.5j * k**2))))
    assert errs[0] / errs[1] == pytest.approx(16, rel=0.1)


def test_partial_last_step():
    traj = evolve(bumpy(GRID), schrodinger(), EvolutionConfig(dt=1e-3, t_max=2.5e-3))
    assert traj.times == pytest.approx([0, 1e-3, 2e-3, 2.5e-3])


@pytest.mark.parametrize("c", [schrodinger(), GALILEAN, transform(schrodinger(), GaugeParams(0.5, 2, 0))])
def test_norm_conservation(c):
    dt = 0.5 * stability_limit(c, GRID)
    traj = evolve(bumpy(GRID), c, EvolutionConfig(dt=dt, t_max=0.05, record_every=20))
    norms = [d["norm"] for d in traj.diagnostics]
    assert max(abs(n - norms[0]) for n in norms) <= 1e-6 * norms[0]
    assert max(d["continuity_residual"] for d in traj.diagnostics) <= 1e-7


def test_gaussian_spreading_short():
    grid = Grid.periodic(256)
    s0 = grid.length / 16
    t = 0.75 * s0**2
    traj = evolve(gaussian_packet(grid, s0), schrodinger(), EvolutionConfig(dt=2e-4, t_max=t, floor=0.0, record_every=10**6))
    w = packet_width(np.abs(traj.snapshots[-1]) ** 2, grid)
    assert w / (s0 * math.sqrt(1 + (t / (2 * s0**2)) ** 2)) == pytest.approx(1, abs=1e-3)


def test_packet_width_of_gaussian():
    grid = Grid.periodic(512)
    psi = gaussian_packet(grid, 0.3)
    # the 1e-6 mask trims a little variance from the tails
    assert packet_width(np.abs(psi.samples) ** 2, grid) == pytest.approx(0.3, rel=1e-5)


def test_floor_abort_carries_trajectory():
    # the phase focuses the density minimum, which drops below 0.24
    psi = WaveField(GRID, (1 + 0.5 * np.cos(X)) * np.exp(1.5j * np.cos(X)))
    with pytest.raises(EvolutionAborted) as exc:
        evolve(psi, schrodinger(), EvolutionConfig(dt=1e-3, t_max=1.0, floor=0.24))
    traj = exc.value.trajectory
    assert len(traj.times) >= 2 and 0 < traj.times[-1] < 0.1


def test_initial_floor_violation():
    with pytest.raises(DensityFloorError):
        evolve(WaveField(GRID, np.cos(X)), schrodinger(), EvolutionConfig(dt=1e-3, t_max=1e-2))


def test_blowup_is_reported():
    unstable = GALILEAN.replace(mu1=0.2, mu4=-0.2)
    with pytest.raises(InstabilityError) as exc:
        evolve(bumpy(GRID), unstable, EvolutionConfig(dt=0.5 * stability_limit(unstable, GRID), t_max=2.0))
    assert exc.value.trajectory.times


def test_evolution_is_deterministic():
    cfg = EvolutionConfig(dt=1e-3, t_max=0.02)
    a = evolve(bumpy(GRID), GALILEAN, cfg)
    b = evolve(bumpy(GRID), GALILEAN, cfg)
    assert all(np.array_equal(x, y) for x, y in zip(a.snapshots, b.snapshots))


def test_evolution_is_1d_only():
    g2 = Grid.periodic(16, dim=2)
    with pytest.raises(PreconditionError):
        evolve(WaveField(g2, np.ones((16, 16))), schrodinger(), EvolutionConfig(dt=1e-4, t_max=1e-3))


# -- covariance experiments ----------------------------------------------------------

def test_covariance_identity_gauge():
    cfg = EvolutionConfig(dt=1e-3, t_max=0.01)
    rep = gauge_covariance_experiment(bumpy(GRID), schrodinger(), identity_gauge(), cfg)
    assert rep.max_density_discrepancy == 0


def test_covariance_strictly_local_small():
    cfg = EvolutionConfig(dt=1e-4, t_max=0.02, record_every=50)
    rep = gauge_covariance_experiment(bumpy(GRID), schrodinger(), GaugeParams(0.5, 2, 0), cfg)
    assert rep.max_density_discrepancy <= 1e-4


def test_covariance_guard_applies_to_both_paths():
    with pytest.raises(StabilityGuardError):
        gauge_covariance_experiment(bumpy(GRID), schrodinger(), GaugeParams(0, 1, 0.05), EvolutionConfig(dt=1e-4, t_max=1e-3))


# -- Galilean boosts ------------------------------------------------------------------

def test_boost_zero_velocity():
    psi = bumpy(GRID)
    assert np.array_equal(galilean_boost(psi, 0.0, -0.5).samples, psi.samples)


def test_boost_plane_wave_shifts_mode():
    v = admissible_velocities(GRID, -0.5)[4]
    out = galilean_boost(WaveField(GRID, np.exp(2j * X)), v, -0.5)
    assert np.allclose(out.samples, np.exp(1j * (2 - v) * X))


def test_boost_rejects_non_periodic_velocity():
    with pytest.raises(TorusIncompatibleVelocity, match="admissible"):
        galilean_boost(bumpy(GRID), 0.3, -0.5)


def test_galilean_covariance_short():
    cfg = EvolutionConfig(dt=0.5 * stability_limit(GALILEAN, GRID), t_max=0.1, record_every=50)
    rep = galilean_experiment(bumpy(GRID), GALILEAN, 1.0, cfg)
    assert rep.max_density_discrepancy <= 1e-3


def test_galilean_violation_detected():
    bad = GALILEAN.replace(mu3=0.3)
    cfg = EvolutionConfig(dt=0.5 * stability_limit(bad, GRID), t_max=0.1, record_every=50)
    assert galilean_experiment(bumpy(GRID), bad, 2.0, cfg).max_density_discrepancy > 1e-3
