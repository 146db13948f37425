"""Drive field models and the effective drive strength."""

import numpy as np
import pytest

from gapburst import (
    FieldModel,
    GapburstError,
    InvalidParameter,
    NonpositiveGamma,
    alpha_effective,
    make_bath,
    sample_field,
)
from gapburst.field import BATH, CONSTANT, ZERO, bath_phases


def test_zero_mode_samples_zero():
    model = FieldModel(mode=ZERO)
    t = np.linspace(0.0, 5.0, 64)
    assert np.all(sample_field(model, t) == 0.0)


def test_constant_mode_is_rotating_amplitude():
    model = FieldModel(mode=CONSTANT, f0=0.3 + 0.4j, drive_omega=7.0)
    t = np.linspace(0.0, 2.0, 41)
    vals = sample_field(model, t)
    assert np.allclose(vals, (0.3 + 0.4j) * np.exp(-1j * 7.0 * t), rtol=1e-15)


def test_bath_sampling_deterministic():
    model = make_bath(16, center=100.0, width=10.0, amplitude=0.5)
    t = np.linspace(0.0, 3.0, 50)
    a = sample_field(model, t, seed=9)
    b = sample_field(model, t, seed=9)
    c = sample_field(model, t, seed=10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_bath_realizations_independent():
    model = make_bath(16, center=100.0, width=10.0, amplitude=0.5)
    p0 = bath_phases(model, seed=3, index=0)
    p1 = bath_phases(model, seed=3, index=1)
    assert p0.shape == (16,)
    assert not np.array_equal(p0, p1)


def test_bath_power_independent_of_mode_count():
    for n in (1, 4, 64):
        model = make_bath(n, center=100.0, width=8.0, amplitude=0.5)
        assert np.sum(model.bath_amps**2) == pytest.approx(0.25, rel=1e-12)


def test_alpha_zero_mode():
    est = alpha_effective(FieldModel(mode=ZERO), omega=100.0, gamma_coll=1.0)
    assert est.value == 0.0


def test_alpha_resonant_closed_form():
    # resonant drive through a width-gamma filter charges to |f0|/gamma,
    # so the tail-averaged squared response is |f0|^2/gamma^2
    f0 = 0.05 + 0.02j
    gamma = 0.8
    model = FieldModel(mode=CONSTANT, f0=f0, drive_omega=40.0)
    est = alpha_effective(
        model, omega=40.0, gamma_coll=gamma, t_max=60.0, n_samples=4000,
        rel_tol=1e-8, max_doublings=10,
    )
    assert est.value == pytest.approx(abs(f0) ** 2 / gamma**2, rel=1e-6)


def test_alpha_quadratic_scaling():
    base = make_bath(12, center=100.0, width=6.0, amplitude=0.2)
    scaled = FieldModel(
        mode=BATH, bath_freqs=base.bath_freqs, bath_amps=3.0 * base.bath_amps
    )
    a1 = alpha_effective(base, omega=100.0, gamma_coll=1.0, seed=5).value
    a9 = alpha_effective(scaled, omega=100.0, gamma_coll=1.0, seed=5).value
    assert a9 == pytest.approx(9.0 * a1, rel=1e-10)


def test_alpha_nonnegative_and_deterministic():
    model = make_bath(8, center=100.0, width=4.0, amplitude=0.3)
    a = alpha_effective(model, omega=99.0, gamma_coll=0.7, seed=21)
    b = alpha_effective(model, omega=99.0, gamma_coll=0.7, seed=21)
    assert a.value >= 0.0
    assert a.value == b.value


def test_alpha_single_mode_bath_matches_constant():
    # one bath mode at the filter frequency is a resonant drive with a
    # phase offset, which the squared modulus ignores
    model = make_bath(1, center=50.0, width=0.0, amplitude=0.12)
    est = alpha_effective(
        model, omega=50.0, gamma_coll=1.0, seed=2, t_max=50.0,
        rel_tol=1e-8, max_doublings=10,
    )
    assert est.value == pytest.approx(0.12**2, rel=1e-6)


def closed_form_bath_response(model, phases, omega, gamma, t):
    """Exact filtered response for a finite oscillator sum."""
    m = np.zeros(t.size, dtype=complex)
    for w, a, p in zip(model.bath_freqs, model.bath_amps, phases):
        pole = gamma + 1j * (omega - w)
        m += (
            a
            * np.exp(-1j * p)
            * (np.exp(1j * (omega - w) * t) - np.exp(-gamma * t))
            / pole
        )
    return m


def test_alpha_bath_against_closed_form_ensemble():
    # 100-realization Monte-Carlo oracle built from the exact per-mode
    # response; the quadrature estimate over the same realizations must sit
    # within 3 standard errors of the oracle mean
    model = make_bath(64, center=100.0, width=10.0, amplitude=0.4)
    omega, gamma, t_max = 100.5, 0.9, 60.0
    n_real = 100
    t = np.linspace(0.0, t_max, 6001)
    tail = t >= 0.5 * t_max
    vals = np.empty(n_real)
    for j in range(n_real):
        phases = bath_phases(model, seed=77, index=j)
        m = closed_form_bath_response(model, phases, omega, gamma, t)
        vals[j] = np.mean(np.abs(m[tail]) ** 2)
    oracle = vals.mean()
    se = vals.std(ddof=1) / np.sqrt(n_real)
    est = alpha_effective(
        model,
        omega=omega,
        gamma_coll=gamma,
        seed=77,
        t_max=t_max,
        n_samples=2000,
        n_seeds=n_real,
    )
    assert abs(est.value - oracle) < 3.0 * se
    # the two evaluations of the same realizations should in fact be close
    assert est.value == pytest.approx(oracle, rel=2e-3)


def test_alpha_rejects_nonpositive_width():
    model = FieldModel(mode=CONSTANT, f0=0.1, drive_omega=10.0)
    with pytest.raises(NonpositiveGamma):
        alpha_effective(model, omega=10.0, gamma_coll=0.0)
    with pytest.raises(NonpositiveGamma):
        alpha_effective(model, omega=10.0, gamma_coll=-0.5)


def test_alpha_warns_on_short_window():
    model = FieldModel(mode=CONSTANT, f0=0.1, drive_omega=10.0)
    with pytest.warns(UserWarning):
        alpha_effective(model, omega=10.0, gamma_coll=1.0, t_max=5.0)


def test_alpha_nonconvergence_raises():
    model = make_bath(8, center=100.0, width=4.0, amplitude=0.3)
    with pytest.raises(GapburstError):
        alpha_effective(
            model, omega=100.0, gamma_coll=1.0, rel_tol=0.0, max_doublings=2
        )


def test_model_validation():
    with pytest.raises(InvalidParameter):
        FieldModel(mode="chirp")
    with pytest.raises(InvalidParameter):
        FieldModel(mode=BATH)
    with pytest.raises(InvalidParameter):
        FieldModel(mode=BATH, bath_freqs=[1.0, 2.0], bath_amps=[1.0])
    with pytest.raises(InvalidParameter):
        make_bath(0, 100.0, 1.0, 0.1)
    with pytest.raises(InvalidParameter):
        alpha_effective(
            FieldModel(mode=ZERO), omega=1.0, gamma_coll=1.0, n_samples=4
        )
