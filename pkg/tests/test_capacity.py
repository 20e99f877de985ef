import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kppmap.capacity import (PhysicalParams, SigmoidSchedule, SmoothingFilter, capacity_at,
                             scale_to_dimensionless, sigmoid_weight, smooth_frame)
from kppmap.domain import CapacityFrame, GridSpec, MapMask


def brute_smooth(K, hab, L):
    ny, nx = K.shape
    out = np.zeros_like(K)
    for j in range(ny):
        for i in range(nx):
            if not hab[j, i]:
                continue
            acc = wsum = 0.0
            for dj in range(-L + 1, L):
                for di in range(-L + 1, L):
                    jj, ii = j + dj, (i + di) % nx
                    if not 0 <= jj < ny or not hab[jj, ii]:
                        continue
                    w = (1 - (di / L) ** 2) * (1 - (dj / L) ** 2)
                    acc += w * K[jj, ii]
                    wsum += w
            out[j, i] = acc / wsum
    return out


def oracle_sigmoid(t, tl, th, nu):
    dT, s = th - tl, t - tl
    z = (2 * dT * s - dT * dT) / (s * (dT - s)) ** nu
    if z < -700.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(-z))


# --- scaling -------------------------------------------------------------------


def test_unit_normalizing_choice():
    c, px = 3.0, 5.0
    lam = 2 * c / px**2
    q = scale_to_dimensionless(PhysicalParams(lam, c, px), 1.0 / lam)
    assert q.dx == pytest.approx(1.0, rel=1e-15)
    assert q.h == pytest.approx(1.0, rel=1e-15)


def test_map_pixel_scaling_value():
    # sqrt(1.67e-3 / (2 * 208)) * 408, evaluated at 30 digits
    q = scale_to_dimensionless(PhysicalParams(1.67e-3, 208.0, 408.0), 1.0, 1000.0)
    assert q.dx == pytest.approx(0.817469830071375219387596543553, rel=1e-14)
    assert q.extent == pytest.approx(q.dx * 1000.0 / 408.0, rel=1e-14)


def test_time_scaling_identity():
    a = scale_to_dimensionless(PhysicalParams(0.3, 1.0, 1.0), 2.0)
    b = scale_to_dimensionless(PhysicalParams(0.6, 1.0, 1.0), 1.0)
    assert a.h == b.h


def test_physical_params_positive():
    with pytest.raises(ValueError):
        PhysicalParams(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        scale_to_dimensionless(PhysicalParams(1.0, 1.0, 1.0), 0.0)


# --- smoothing -----------------------------------------------------------------


def test_uniform_capacity_unchanged():
    g = GridSpec(9, 6, 1.0)
    f = CapacityFrame.uniform(g, 0.4)
    out = smooth_frame(f, MapMask.full(g), SmoothingFilter(3))
    np.testing.assert_allclose(out.values, 0.4, rtol=1e-15)


def test_unit_window_is_identity():
    rng = np.random.default_rng(1)
    g = GridSpec(7, 5, 1.0)
    hab = rng.random(g.shape) < 0.7
    f = CapacityFrame(g, 0.0, np.where(hab, rng.uniform(0.1, 1, g.shape), 0.0))
    np.testing.assert_array_equal(smooth_frame(f, MapMask(g, hab), SmoothingFilter(1)).values,
                                  f.values)


def test_one_water_pixel_against_brute_force():
    rng = np.random.default_rng(5)
    g = GridSpec(5, 5, 1.0)
    hab = np.ones((5, 5), bool)
    hab[2, 3] = False
    K = np.where(hab, rng.uniform(0.1, 1.0, (5, 5)), 0.0)
    out = smooth_frame(CapacityFrame(g, 0.0, K), MapMask(g, hab), SmoothingFilter(2))
    np.testing.assert_allclose(out.values, brute_smooth(K, hab, 2), rtol=0, atol=1e-14)
    assert out.values[2, 3] == 0.0


def test_columns_wrap():
    g = GridSpec(6, 1, 1.0)
    K = np.array([[1.0, 0.5, 0.5, 0.5, 0.5, 0.5]])
    out = smooth_frame(CapacityFrame(g, 0.0, K), MapMask.full(g), SmoothingFilter(2))
    # weight 3/4 on each side: the last column sees the first through the wrap
    assert out.values[0, 5] == pytest.approx((0.5 + 0.75 * 1.0 + 0.75 * 0.5) / 2.5)
    assert out.values[0, 5] == pytest.approx(out.values[0, 1])


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), L=st.integers(1, 4))
def test_smoothing_properties(seed, L):
    rng = np.random.default_rng(seed)
    ny, nx = rng.integers(1, 9, size=2)
    g = GridSpec(int(nx), int(ny), 1.0)
    hab = rng.random(g.shape) < 0.7
    K = np.where(hab, rng.uniform(0.05, 1.0, g.shape), 0.0)
    out = smooth_frame(CapacityFrame(g, 0.0, K), MapMask(g, hab), SmoothingFilter(L)).values
    np.testing.assert_allclose(out, brute_smooth(K, hab, L), rtol=0, atol=1e-13)
    assert np.all(out[~hab] == 0.0)
    for j, i in np.argwhere(hab):
        rows = slice(max(0, j - L + 1), j + L)
        cols = [(i + d) % nx for d in range(-L + 1, L)]
        nb = K[rows][:, cols][hab[rows][:, cols]]
        assert nb.min() - 1e-15 <= out[j, i] <= nb.max() + 1e-15


def test_filter_validation():
    with pytest.raises(ValueError):
        SmoothingFilter(0)
    w = SmoothingFilter(2).weights()
    np.testing.assert_allclose(w, np.outer([0.75, 1, 0.75], [0.75, 1, 0.75]))


# --- sigmoid -------------------------------------------------------------------


def test_sigmoid_endpoints_and_midpoint():
    for nu in (0.5, 1.0):
        assert sigmoid_weight(2.0, 2.0, 5.0, nu) == 0.0
        assert sigmoid_weight(5.0, 2.0, 5.0, nu) == 1.0
        assert abs(sigmoid_weight(3.5, 2.0, 5.0, nu) - 0.5) <= 1e-15


def test_sigmoid_quarter_value():
    # z = -8/3, S = 1 / (1 + e^(8/3)), evaluated at 30 digits
    assert sigmoid_weight(0.25, 0.0, 1.0, 1.0) == pytest.approx(
        0.0649691691286640621275428099673, rel=1e-14)


@given(st.floats(0.001, 0.999), st.sampled_from([0.5, 1.0]), st.floats(-50, 50), st.floats(0.1, 100))
def test_sigmoid_oracle_and_symmetry(frac, nu, tl, dT):
    th = tl + dT
    t = tl + frac * dT
    s = sigmoid_weight(t, tl, th, nu)
    assert s == pytest.approx(oracle_sigmoid(t, tl, th, nu), abs=1e-12)
    mirror = sigmoid_weight(th - (t - tl), tl, th, nu)
    assert abs(mirror - (1.0 - s)) <= 1e-12


@pytest.mark.parametrize("nu", [0.5, 1.0])
def test_sigmoid_monotone(nu):
    ts = np.linspace(0.0, 1.0, 2001)
    s = np.array([sigmoid_weight(t, 0.0, 1.0, nu) for t in ts])
    assert np.all(np.diff(s) >= 0.0)


def test_sigmoid_errors():
    with pytest.raises(ValueError):
        sigmoid_weight(1.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        sigmoid_weight(0.5, 1.0, 1.0)


# --- schedules -----------------------------------------------------------------


def two_frames(seed=0, shape=(4, 6)):
    rng = np.random.default_rng(seed)
    g = GridSpec(shape[1], shape[0], 1.0)
    a = CapacityFrame(g, 1.0, rng.uniform(0.1, 1.0, shape))
    b = CapacityFrame(g, 3.0, rng.uniform(0.1, 1.0, shape))
    return a, b


def test_frame_times_exact():
    a, b = two_frames()
    sch = SigmoidSchedule([a, b])
    assert capacity_at(sch, 1.0) is a
    assert capacity_at(sch, 3.0) is b


def test_midpoint_is_average():
    a, b = two_frames()
    mid = capacity_at(SigmoidSchedule([a, b]), 2.0)
    np.testing.assert_allclose(mid.values, 0.5 * (a.values + b.values), rtol=0, atol=1e-15)


@given(st.floats(1.0, 3.0), st.sampled_from([0.5, 1.0]))
def test_capacity_at_pixel_oracle_and_bounds(t, nu):
    a, b = two_frames(7)
    got = capacity_at(SigmoidSchedule([a, b], nu), t).values
    if t in (1.0, 3.0):
        return
    S = oracle_sigmoid(t, 1.0, 3.0, nu)
    want = a.values * (1 - S) + b.values * S
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-14)
    assert np.all(got >= np.minimum(a.values, b.values))
    assert np.all(got <= np.maximum(a.values, b.values))


def test_three_frame_bracketing():
    a, b = two_frames(1)
    c = CapacityFrame(a.grid, 6.0, np.full(a.grid.shape, 0.5))
    sch = SigmoidSchedule([a, b, c])
    np.testing.assert_allclose(capacity_at(sch, 4.5).values, 0.5 * (b.values + 0.5), atol=1e-15)


def test_single_frame_schedule():
    a, _ = two_frames()
    sch = SigmoidSchedule([a])
    assert capacity_at(sch, -100.0) is a


def test_schedule_validation():
    a, b = two_frames()
    with pytest.raises(ValueError):
        SigmoidSchedule([b, a])
    with pytest.raises(ValueError):
        SigmoidSchedule([])
    with pytest.raises(ValueError):
        capacity_at(SigmoidSchedule([a, b]), 3.5)
    other = CapacityFrame(GridSpec(2, 2, 1.0), 5.0, np.ones((2, 2)))
    with pytest.raises(ValueError):
        SigmoidSchedule([a, other])
