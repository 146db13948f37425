"""Parity tests between the compiled and pure-Python stepping kernels."""

import os
import subprocess
import sys

import numpy as np
import pytest

from gapburst import BACKEND_NAME
from gapburst._kernels import get_backend
from gapburst.averaged import integrate_averaged
from gapburst.dynamics import integrate_direct
from gapburst.field import CONSTANT, FieldModel
from gapburst.geometry import chain


def has_cython():
    try:
        get_backend("cython")
    except ImportError:
        return False
    return True


needs_cython = pytest.mark.skipif(
    not has_cython(), reason="compiled extension not built"
)


def test_backend_names():
    assert get_backend("python").BACKEND_NAME == "python"
    assert get_backend().BACKEND_NAME == BACKEND_NAME
    assert BACKEND_NAME in ("python", "cython")
    with pytest.raises(ValueError):
        get_backend("fortran")


@needs_cython
def test_cython_backend_reports_name():
    assert get_backend("cython").BACKEND_NAME == "cython"


@needs_cython
def test_averaged_parity_through_burst():
    kwargs = dict(
        g=10.0,
        alpha=1e-3,
        gamma1=1e-3,
        zeta=1.0,
        w0=1e-6,
        s0=1.0,
        t_end=5.0,
        dt=0.01,
    )
    a = integrate_averaged(backend="python", **kwargs)
    b = integrate_averaged(backend="cython", **kwargs)
    assert a.meta["backend"] == "python"
    assert b.meta["backend"] == "cython"
    assert a.t.size == b.t.size
    assert np.allclose(a.t, b.t, rtol=0, atol=1e-9)
    # The burst amplifies rounding noise; agreement is tight but not bitwise.
    assert np.allclose(a.s_mean, b.s_mean, rtol=0, atol=1e-8)
    assert np.allclose(a.w_mean, b.w_mean, rtol=1e-6, atol=1e-12)


@needs_cython
def test_direct_parity_phase_mode():
    ens = chain(3, 0.7, u0=0.1 + 0.05j, s0=0.9, gamma_s=1.2)
    kwargs = dict(t_end=2.0, dt=0.005, detuning=0.5, record_every=4)
    a = integrate_direct(ens, backend="python", **kwargs)
    b = integrate_direct(ens, backend="cython", **kwargs)
    assert np.array_equal(a.t, b.t)
    assert np.allclose(a.s_mean, b.s_mean, rtol=0, atol=1e-10)
    assert np.allclose(a.w_mean, b.w_mean, rtol=1e-8, atol=1e-14)
    assert np.allclose(a.w_coherent, b.w_coherent, rtol=1e-8, atol=1e-14)
    ua = np.array(a.meta["final_u_real"]) + 1j * np.array(a.meta["final_u_imag"])
    ub = np.array(b.meta["final_u_real"]) + 1j * np.array(b.meta["final_u_imag"])
    assert np.allclose(ua, ub, rtol=0, atol=1e-10)


@needs_cython
def test_direct_parity_with_drive():
    ens = chain(2, 0.9, u0=0.05, s0=0.8, gamma1=0.1)
    field = FieldModel(mode=CONSTANT, f0=0.3 + 0.1j, drive_omega=99.0)
    kwargs = dict(t_end=3.0, dt=0.01, field_model=field)
    a = integrate_direct(ens, backend="python", **kwargs)
    b = integrate_direct(ens, backend="cython", **kwargs)
    assert np.allclose(a.s_mean, b.s_mean, rtol=0, atol=1e-10)
    assert np.allclose(a.w_mean, b.w_mean, rtol=1e-8, atol=1e-14)


@needs_cython
def test_dde_parity_with_counter_rotating():
    ens = chain(2, 0.5, omega0=40.0, u0=0.1, s0=0.9)
    kwargs = dict(
        t_end=1.0,
        dt=2e-3,
        retardation="full_dde",
        counter_rotating=True,
        record_every=10,
    )
    a = integrate_direct(ens, backend="python", **kwargs)
    b = integrate_direct(ens, backend="cython", **kwargs)
    assert np.array_equal(a.t, b.t)
    assert np.allclose(a.s_mean, b.s_mean, rtol=0, atol=1e-10)
    assert np.allclose(a.w_mean, b.w_mean, rtol=1e-8, atol=1e-14)


def run_with_env(value):
    env = dict(os.environ)
    if value is None:
        env.pop("GAPBURST_BACKEND", None)
    else:
        env["GAPBURST_BACKEND"] = value
    return subprocess.run(
        [sys.executable, "-c", "import gapburst; print(gapburst.BACKEND_NAME)"],
        capture_output=True,
        text=True,
        env=env,
    )


def test_env_forces_python_backend():
    proc = run_with_env("python")
    assert proc.returncode == 0
    assert proc.stdout.strip() == "python"


def test_env_rejects_unknown_backend():
    proc = run_with_env("fortran")
    assert proc.returncode != 0
    assert "GAPBURST_BACKEND" in proc.stderr


@needs_cython
def test_env_requires_compiled_backend():
    proc = run_with_env("cython")
    assert proc.returncode == 0
    assert proc.stdout.strip() == "cython"
