"""Kernel selection and agreement between the compiled and numpy kernels."""

import os
import subprocess
import sys

import numpy as np
import pytest

from matprof._backend import BACKEND, get_kernels
from matprof.multi import mstamp
from matprof.profile import stomp

from conftest import naive_multi_profile


def _backend_in_subprocess(env_value):
    env = dict(os.environ)
    env.pop("MATPROF_PURE_PYTHON", None)
    if env_value is not None:
        env["MATPROF_PURE_PYTHON"] = env_value
    out = subprocess.run([sys.executable, "-c", "import matprof; print(matprof.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_environment_variable_forces_python_fallback():
    assert _backend_in_subprocess("1") == "python"


def test_default_backend_matches_in_process_selection():
    if os.environ.get("MATPROF_PURE_PYTHON"):
        pytest.skip("fallback forced for this session")
    assert _backend_in_subprocess(None) == BACKEND


def test_unknown_backend_name_rejected():
    with pytest.raises(ValueError):
        get_kernels("fortran")


@pytest.mark.skipif(BACKEND != "cython", reason="compiled kernels not built")
def test_multi_kernels_agree(walk):
    T = walk(160, seed=8, d=3)
    a, b = mstamp(T, 12, backend="cython"), mstamp(T, 12, backend="python")
    np.testing.assert_allclose(a.P, b.P, atol=1e-12)
    np.testing.assert_array_equal(a.I, b.I)
    np.testing.assert_allclose(a.P, naive_multi_profile(T, 12, []), atol=1e-8)


@pytest.mark.skipif(BACKEND != "cython", reason="compiled kernels not built")
def test_single_kernels_agree_with_flat_windows():
    T = np.concatenate([np.zeros(40), np.sin(np.arange(200) / 3.0), np.ones(30)])
    a, b = stomp(T, 16, backend="cython"), stomp(T, 16, backend="python")
    np.testing.assert_allclose(a.P, b.P, atol=1e-12)
    np.testing.assert_array_equal(a.I, b.I)
