"""Ensemble builders and state validation."""

import numpy as np
import pytest

from gapburst import (
    DegenerateInitialState,
    InvalidParameter,
    MinimumSeparationViolated,
    chain,
    cubic,
    explicit,
    random_sphere,
)


def test_chain_positions_spacing():
    ens = chain(3, np.pi / 2)
    assert np.allclose(ens.positions[:, 2], [0.0, np.pi / 2, np.pi])
    assert np.all(ens.positions[:, :2] == 0.0)


def test_chain_single_atom():
    ens = chain(1, 1.0)
    assert ens.n_atoms == 1
    assert ens.distances().shape == (1, 1)
    assert ens.distances()[0, 0] == 0.0


def test_cubic_counts_and_spacing():
    ens = cubic(2, 0.5)
    assert ens.n_atoms == 8
    d = ens.distances()
    off = d[~np.eye(8, dtype=bool)]
    assert np.isclose(off.min(), 0.5)
    assert np.isclose(off.max(), 0.5 * np.sqrt(3.0))


def test_distance_matrix_symmetric_zero_diagonal():
    ens = random_sphere(6, 2.0, seed=3)
    d = ens.distances()
    assert np.array_equal(d, d.T)
    assert np.all(np.diag(d) == 0.0)


def test_random_sphere_deterministic():
    a = random_sphere(8, 0.05, seed=42)
    b = random_sphere(8, 0.05, seed=42)
    assert a.positions.tobytes() == b.positions.tobytes()


def test_random_sphere_seed_changes_layout():
    a = random_sphere(8, 0.05, seed=42)
    b = random_sphere(8, 0.05, seed=43)
    assert not np.array_equal(a.positions, b.positions)


def test_random_sphere_inside_radius_and_separated():
    ens = random_sphere(8, 0.05, seed=42, r_min=1e-3)
    assert np.all(np.linalg.norm(ens.positions, axis=1) <= 0.05 + 1e-12)
    off = ens.distances()[~np.eye(8, dtype=bool)]
    assert off.min() >= 1e-3


def test_random_sphere_impossible_packing():
    with pytest.raises(MinimumSeparationViolated):
        random_sphere(200, 2e-3, seed=0, r_min=1e-3, max_tries=50)


def test_rigid_motion_preserves_distances():
    base = random_sphere(6, 2.0, seed=7)
    c, s = np.cos(0.3), np.sin(0.3)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    moved = explicit(base.positions @ rot.T + np.array([1.0, -2.0, 0.5]))
    assert np.allclose(base.distances(), moved.distances(), atol=1e-12)


def test_duplicate_positions_rejected():
    with pytest.raises(MinimumSeparationViolated):
        explicit([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])


def test_close_pair_rejected_by_r_min():
    with pytest.raises(MinimumSeparationViolated):
        explicit([[0.0, 0.0, 0.0], [0.0, 0.0, 1e-4]], r_min=1e-3)


def test_initial_state_outside_bloch_ball_rejected():
    with pytest.raises(DegenerateInitialState):
        explicit([[0.0, 0.0, 0.0]], u0=0.5 + 0.0j, s0=1.0)


def test_initial_state_on_sphere_accepted():
    u0 = 1e-3
    s0 = np.sqrt(1.0 - 4.0 * u0 * u0)
    ens = explicit([[0.0, 0.0, 0.0]], u0=u0, s0=s0)
    assert ens.s0 == s0


def test_zeta_out_of_range_rejected():
    with pytest.raises(InvalidParameter):
        explicit([[0.0, 0.0, 0.0]], zeta=1.5)


def test_positions_shape_checked():
    with pytest.raises(InvalidParameter):
        explicit([[0.0, 0.0], [1.0, 0.0]])


def test_nonfinite_positions_rejected():
    with pytest.raises(InvalidParameter):
        explicit([[0.0, 0.0, np.nan]])


def test_nonpositive_omega0_rejected():
    with pytest.raises(InvalidParameter):
        chain(2, 1.0, omega0=0.0)


def test_bad_builder_arguments():
    with pytest.raises(InvalidParameter):
        chain(0, 1.0)
    with pytest.raises(InvalidParameter):
        chain(2, -1.0)
    with pytest.raises(InvalidParameter):
        cubic(0, 1.0)
    with pytest.raises(InvalidParameter):
        random_sphere(2, -1.0, seed=0)
