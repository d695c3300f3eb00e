import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sliceball import kernels
from sliceball._accel import thread_cap

quats = st.integers(1, 30).flatmap(
    lambda n: arrays(np.float64, (n, 4), elements=st.floats(-2, 2, allow_nan=False)))


@given(quats)
def test_qmul_twins_agree(a):
    b = a[::-1].copy()
    assert np.allclose(kernels.qmul_np(a, b), kernels.qmul_nb(a, b), atol=1e-14)


@given(quats, quats)
def test_horner_twins_agree(c, p):
    p = p * 0.2
    assert np.allclose(kernels.horner_np(c, p), kernels.horner_nb(c, p), atol=1e-12)


@given(quats, quats, st.integers(0, 70))
def test_star_twins_agree(a, b, order):
    assert np.allclose(kernels.star_np(a, b, order), kernels.star_nb(a, b, order), atol=1e-12)


@given(arrays(np.float64, st.integers(1, 20), elements=st.floats(-0.5, 0.5)), st.integers(0, 40))
def test_invert_real_twins_agree(c, order):
    c = c.copy()
    c[0] = 1.0
    x = kernels.invert_real_np(c, order)
    assert np.allclose(x, kernels.invert_real_nb(c, order), rtol=1e-12, atol=1e-12)
    conv = np.convolve(c, x)[: order + 1]
    target = np.zeros(order + 1)
    target[0] = 1
    assert np.allclose(conv, target, atol=1e-10 * max(1.0, np.max(np.abs(x))))


def test_dispatch_handles_broadcasting():
    a = np.array([0.0, 1, 0, 0])
    b = np.array([[0.0, 0, 1, 0], [1, 0, 0, 0]])
    assert np.allclose(kernels.qmul(a, b), [[0, 0, 0, 1], [0, 1, 0, 0]])


def test_pure_numpy_mode_matches():
    code = (
        "import numpy as np; from sliceball import kernels, _accel; "
        "from sliceball.verify import landau_sharpness; from sliceball.sampling import SampleConfig; "
        "assert not _accel.USE_NUMBA and kernels.horner is kernels.horner_np; "
        "r = landau_sharpness(0.6, SampleConfig(count=5000)); print(r.passed, repr(r.margin))"
    )
    env = dict(os.environ, SLICEBALL_PURE_NUMPY="1")
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    from sliceball.sampling import SampleConfig
    from sliceball.verify import landau_sharpness
    ref = landau_sharpness(0.6, SampleConfig(count=5000))
    passed, margin = res.stdout.split()
    assert passed == "True" and float(margin) == pytest.approx(ref.margin, abs=1e-12)


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("SLICEBALL_THREADS", "3")
    assert thread_cap() == 3
    monkeypatch.setenv("SLICEBALL_THREADS", "zero")
    assert thread_cap() is None
    monkeypatch.delenv("SLICEBALL_THREADS")
    assert thread_cap() is None
