import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from vortexsheets.fourier import (
    EvenSeries,
    GridTooSmallError,
    OddSeries,
    ParityError,
    analyze,
    differentiate,
    grid,
    half_laplacian,
    hilbert,
    strip_norm,
    synth,
)

coeff_arrays = arrays(np.float64, st.integers(1, 16), elements=st.floats(-1, 1))


def direct_sum(coeffs, x, fn):
    return sum(c * fn((j + 1) * x) for j, c in enumerate(coeffs))


def test_synth_single_mode():
    v = synth(EvenSeries([1.0]), 8).values
    assert v[0] == 1.0
    assert np.allclose(v, np.cos(grid(8)), atol=1e-15)


def test_synth_zero_series():
    assert np.all(synth(EvenSeries.zeros(5), 16).values == 0)


def test_synth_matches_direct_sum_and_roundtrips():
    rng = np.random.default_rng(0)
    u = EvenSeries(rng.standard_normal(16))
    s = synth(u, 64)
    assert np.allclose(s.values, direct_sum(u.coeffs, grid(64), np.cos), atol=1e-13)
    assert np.max(np.abs(analyze(s, 16).coeffs - u.coeffs)) <= 1e-13


def test_synth_rejects_small_grid():
    with pytest.raises(GridTooSmallError):
        synth(EvenSeries.zeros(8), 16)
    with pytest.raises(GridTooSmallError):
        synth(EvenSeries.zeros(2), 7)


def test_analyze_pure_modes():
    x = grid(32)
    a = analyze(np.cos(3 * x), 6).coeffs
    assert np.allclose(a, [0, 0, 1, 0, 0, 0], atol=1e-13)
    p = analyze(np.sin(2 * x), 6, "odd")
    assert isinstance(p, OddSeries)
    assert abs(p.coeffs[1] - 1) < 1e-13


def test_analyze_projection_integral():
    x = grid(64)
    vals = np.cos(x) + 0.25 * np.cos(4 * x)
    # oracle: (1/pi) * integral of u(x) cos(jx), done by a fine midpoint rule
    xf = (np.arange(20000) + 0.5) * 2 * np.pi / 20000
    uf = np.cos(xf) + 0.25 * np.cos(4 * xf)
    oracle = [np.mean(uf * np.cos(j * xf)) * 2 for j in range(1, 5)]
    assert np.allclose(analyze(vals, 4).coeffs, oracle, atol=1e-12)
    assert np.allclose(analyze(vals, 4).coeffs, [1, 0, 0, 0.25], atol=1e-13)


def test_analyze_discards_mean():
    x = grid(16)
    assert np.allclose(analyze(3 + np.cos(x), 3).coeffs, [1, 0, 0], atol=1e-14)


def test_parity_tripwire():
    x = grid(32)
    with pytest.raises(ParityError):
        analyze(np.cos(x) + 1e-3 * np.sin(x), 4, "even")
    with pytest.raises(ParityError):
        analyze(np.sin(x) + 1e-3 * np.cos(2 * x), 4, "odd")
    # rounding-level asymmetry is tolerated once an absolute scale is given
    analyze(1e-14 * np.sin(x), 4, "even", scale=1.0)


def test_differentiate():
    assert np.allclose(differentiate(EvenSeries([1.0])).coeffs, [-1])
    assert np.allclose(differentiate(EvenSeries([0, 0.5])).coeffs, [0, -1])


def test_second_derivative_against_finite_differences():
    rng = np.random.default_rng(1)
    u = EvenSeries(rng.standard_normal(6) / np.arange(1, 7) ** 2)
    d2 = differentiate(differentiate(u))
    assert isinstance(d2, EvenSeries) and not isinstance(d2, OddSeries)
    x = np.linspace(0, 2 * np.pi, 13)
    h = 1e-5
    fd = (u(x + h) - 2 * u(x) + u(x - h)) / h**2
    assert np.max(np.abs(fd - d2(x))) < 1e-4
    # first derivative against a central difference
    fd1 = (u(x + h) - u(x - h)) / (2 * h)
    assert np.max(np.abs(fd1 - differentiate(u)(x))) < 1e-8


def test_hilbert_modes():
    assert np.allclose(hilbert(EvenSeries([1.0])).coeffs, [1])
    h = hilbert(EvenSeries.mode(5, 5))
    assert isinstance(h, OddSeries) and np.allclose(h(0.3), np.sin(1.5))
    assert np.all(hilbert(EvenSeries.zeros(3)).coeffs == 0)


def test_half_laplacian_modes():
    assert np.allclose(half_laplacian(EvenSeries.mode(2, 2)).coeffs, [0, 2])
    assert np.allclose(half_laplacian(EvenSeries([1.0])).coeffs, [1])
    assert np.all(half_laplacian(EvenSeries.zeros(4)).coeffs == 0)


def test_strip_norm_examples():
    assert strip_norm(EvenSeries([1.0])) == 1.0
    assert np.isclose(strip_norm(EvenSeries([0, 1.0]), k=1), np.sqrt(5))
    with pytest.raises(ValueError):
        strip_norm(EvenSeries([1.0]), a=-1)


@given(coeff_arrays)
def test_parseval(c):
    assert np.isclose(strip_norm(EvenSeries(c)), np.linalg.norm(c), rtol=1e-14, atol=0)


@given(coeff_arrays, st.floats(0, 1), st.floats(0.01, 1))
def test_strip_norm_increases_with_width(c, a, da):
    u = EvenSeries(c)
    if np.any(np.abs(c) > 1e-100):  # squares of tinier values underflow
        assert strip_norm(u, 2, a + da) > strip_norm(u, 2, a)


@given(coeff_arrays)
def test_hilbert_squared_is_minus_identity(c):
    u = EvenSeries(c)
    assert np.array_equal(hilbert(hilbert(u)).coeffs, -c)


@given(coeff_arrays)
def test_derivative_commutes_with_hilbert(c):
    u = EvenSeries(c)
    assert np.allclose(differentiate(hilbert(u)).coeffs, hilbert(differentiate(u)).coeffs, rtol=0, atol=0)


@settings(max_examples=30)
@given(coeff_arrays, st.integers(0, 3))
def test_roundtrip_any_grid(c, extra):
    N = c.size
    Q = 2 * N + 2 + 2 * extra
    for cls, parity in ((EvenSeries, "even"), (OddSeries, "odd")):
        u = cls(c)
        back = analyze(synth(u, Q), N, parity, scale=1.0)
        assert np.max(np.abs(back.coeffs - c)) <= 1e-12


def test_series_are_immutable():
    u = EvenSeries([1.0, 2.0])
    with pytest.raises(ValueError):
        u.coeffs[0] = 3.0
