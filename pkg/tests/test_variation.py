import io
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chordcrit import (
    TWO_PI,
    B_poly,
    ChordSpec,
    Circle,
    FourierPerturbation,
    Q_poly,
    T2_closed,
    coefficient,
    first_variation_analytic,
    first_variation_fd,
    first_variation_kernel,
    fs1,
    fs2,
    mode_term_T,
    mode_term_exact,
    mode_threshold,
    second_variation_fd,
    second_variation_series,
    spectrum,
)

GL_X, GL_W = np.polynomial.legendre.leggauss(40)


def square_rule(lo, hi):
    x = 0.5 * (hi - lo) * (GL_X + 1) + lo
    w = 0.5 * (hi - lo) * GL_W
    return x, w


def fs_quadrature(n, u, which, M=96):
    """Direct quadrature of the two iterated mode integrals for g = sin(n s)."""
    G = lambda x: (1 - np.cos(n * x)) / n  # noqa: E731  antiderivative of sin(n s)
    total = 0.0
    for s in np.arange(M) * (TWO_PI / M):
        x, w = square_rule(s, s + u)
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        W = np.outer(w, w)
        inner = G(X2) - G(X1)
        if which == 1:
            total += np.sum(W * np.sin(X2 - X1) * inner) ** 2
        else:
            total += np.sum(W * np.cos(X2 - X1) * inner ** 2)
    return total * TWO_PI / M


@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("u", [0.7, math.pi / 2, math.pi])
def test_fs_closed_forms_match_quadrature(n, u):
    assert fs1(n, u) == pytest.approx(fs_quadrature(n, u, 1), rel=1e-9, abs=1e-12)
    assert fs2(n, u) == pytest.approx(fs_quadrature(n, u, 2), rel=1e-9, abs=1e-12)


def test_B_two_forms_agree():
    u = np.linspace(0.01, math.pi, 50)
    for n in range(2, 9):
        alt = -2 * n * np.cos(n * u / 2) * np.sin(u / 2) + 2 * np.cos(u / 2) * np.sin(n * u / 2)
        assert np.allclose(B_poly(n)(u), alt, atol=1e-12)


def test_small_u_stability_against_mpmath():
    mpmath.mp.dps = 60
    for n in (2, 7, 30):
        for u in (1e-4, 1e-2, 0.9 / n):
            U = mpmath.mpf(u)
            q = (2 * n**4 - 6 * n**2 - 2 * (n * n - 1) ** 2 * mpmath.cos(U)
                 + (n + 1) ** 2 * mpmath.cos((n - 1) * U) + (n - 1) ** 2 * mpmath.cos((n + 1) * U))
            assert Q_poly(n)(u) == pytest.approx(float(q), rel=1e-12)


def test_T2_closed_is_mode_two():
    u = np.linspace(0.05, math.pi, 40)
    for p in (2.0, 2.5, 3.3):
        assert np.allclose(mode_term_T(2, u, p), T2_closed(u, p), rtol=1e-10, atol=1e-12)


def test_T2_at_half_length():
    # T(2, pi, p) = -16 (5 - 2p): zero at p = 5/2
    assert mode_term_T(2, math.pi, 2.5) == pytest.approx(0.0, abs=1e-12)
    assert mode_term_T(2, math.pi, 3.0) == pytest.approx(16.0, rel=1e-12)
    # the second-derivative-consistent factor vanishes at p = 3 instead
    assert mode_term_exact(2, math.pi, 3.0) == pytest.approx(0.0, abs=1e-12)


def test_mode_two_threshold_is_smallest():
    u = np.linspace(0.05, math.pi, 60)
    t2 = mode_threshold(2, u)
    assert np.allclose(t2, 6 / (1 - np.cos(u)), rtol=1e-9)
    for n in range(3, 40):
        assert np.all(mode_threshold(n, u) > t2)


def test_coefficient_positive():
    for n in range(2, 10):
        assert coefficient(n, 1.0, 2.7) > 0


def test_first_variation_kernel_quadrature():
    for u in (0.3, 1.5, math.pi):
        x, w = square_rule(0.0, u)
        X, Y = np.meshgrid(x, x, indexing="ij")
        ref = np.sum(np.outer(w, w) * np.sin(Y - X) * (Y - X))
        assert first_variation_kernel(u) == pytest.approx(ref, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
@pytest.mark.parametrize("u", [0.5, math.pi / 2, math.pi])
def test_first_variation_constant_direction(p, u):
    """A constant curvature change keeps every chord an arc chord of radius 1/kappa,
    so c(eps) = 2 pi (2 sin(kappa u / 2) / kappa)^p with kappa = 1 + eps."""
    mpmath.mp.dps = 30
    f = lambda e: 2 * mpmath.pi * (2 * mpmath.sin((1 + e) * u / 2) / (1 + e)) ** p  # noqa: E731
    ref = float(mpmath.diff(f, 0))
    g = FourierPerturbation(a0=1.0)
    assert first_variation_analytic(g, ChordSpec(p, u)) == pytest.approx(ref, rel=1e-12)


def test_first_variation_example_value():
    g = FourierPerturbation(a0=1.0)
    got = first_variation_analytic(g, ChordSpec(2.0, math.pi / 2))
    assert got == pytest.approx(-(4 - math.pi) * TWO_PI, rel=1e-12)
    assert first_variation_analytic(FourierPerturbation.single(3, 1.0), ChordSpec(2.0, 1.0)) == 0.0


@pytest.mark.parametrize("n", [2, 4])
def test_first_variation_fd_single_mode(n):
    g = FourierPerturbation.single(n, 1.0)
    assert abs(first_variation_fd(Circle(), g, ChordSpec(2.5, math.pi))) < 1e-8


def test_first_variation_fd_step_range():
    with pytest.raises(ValueError):
        first_variation_fd(Circle(), FourierPerturbation.single(2), ChordSpec(2, 1), eps=0.1)


@pytest.mark.parametrize("n,kind", [(2, "a"), (3, "b"), (5, "a")])
@pytest.mark.parametrize("p,u", [(2.0, math.pi / 2), (3.5, 2.0), (1.5, math.pi)])
def test_second_variation_series_matches_fd(n, kind, p, u):
    g = FourierPerturbation.single(n, 1.0, kind)
    spec = ChordSpec(p, u)
    series = second_variation_series(g, spec)
    # Richardson extrapolation removes the O(eps^2) term of the second difference
    d1 = second_variation_fd(Circle(), g, spec, eps=1e-2)
    d2 = second_variation_fd(Circle(), g, spec, eps=5e-3)
    assert (4 * d2 - d1) / 3 == pytest.approx(series, rel=1e-5, abs=1e-7)


def test_classical_factor_disagrees_with_fd():
    g = FourierPerturbation.single(3, 1.0)
    spec = ChordSpec(2.5, math.pi / 2)
    fd = second_variation_fd(Circle(), g, spec)
    assert second_variation_series(g, spec, exact=True) == pytest.approx(fd, rel=1e-3)
    assert second_variation_series(g, spec, exact=False) != pytest.approx(fd, rel=0.1)


def test_series_scales_with_length():
    lam = 1.7
    g1 = FourierPerturbation.single(3, 0.4)
    gl = FourierPerturbation.single(3, 0.4 / lam, L=lam * TWO_PI)
    s1 = second_variation_series(g1, ChordSpec(2.5, 1.0))
    sl = second_variation_series(gl, ChordSpec(2.5, lam * 1.0))
    # Gamma_lam(s) = lam Gamma(s / lam) has curvature g(s / lam) / lam and c scales by lam^(1+p)
    assert sl == pytest.approx(lam ** 3.5 * s1, rel=1e-12)


def test_series_rejects_low_modes():
    with pytest.raises(ValueError):
        second_variation_series(FourierPerturbation.single(1), ChordSpec(2, 1))
    with pytest.raises(ValueError):
        second_variation_fd(Circle(), FourierPerturbation(a=[0, 1, 1]), ChordSpec(2, 1))


def test_spectrum_csv():
    sp = spectrum(math.pi, 3.0, 5)
    buf = io.StringIO()
    sp.to_csv(buf)
    lines = buf.getvalue().split("\n")
    assert lines[0] == "n,T,coefficient,sign"
    assert lines[1].startswith("2,") and lines[1].endswith(",1")
    assert "\r" not in buf.getvalue()
    assert list(sp.sign) == [1, -1, -1, -1]
    with pytest.raises(ValueError):
        spectrum(4.0, 3.0)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3), st.floats(1.0, 4.0),
       st.floats(0.2, math.pi))
def test_series_is_diagonal(coeffs, p, u):
    """Modes 2, 4, 6 contribute independently (no cross terms)."""
    a = [0, coeffs[0], 0, coeffs[1], 0, coeffs[2]]
    spec = ChordSpec(p, u)
    total = second_variation_series(FourierPerturbation(a=a), spec)
    parts = sum(second_variation_series(FourierPerturbation.single(n, c), spec)
                for n, c in zip((2, 4, 6), coeffs))
    assert total == pytest.approx(parts, rel=1e-12, abs=1e-14)
    ms = spectrum(u, p, 6, exact=True)
    assert ms.series_value(FourierPerturbation(a=a)) == pytest.approx(total, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("p,u", [(2.5, math.pi / 2), (3.0, 2.5)])
def test_fd_has_no_cross_terms(p, u):
    """Second difference along a_2 + b_4 equals the sum of the single-mode ones."""
    spec = ChordSpec(p, u)
    both = FourierPerturbation(a=[0, 0.6], b=[0, 0, 0, 0.8])
    d_both = second_variation_fd(Circle(), both, spec)
    d_sep = (second_variation_fd(Circle(), FourierPerturbation.single(2, 0.6), spec)
             + second_variation_fd(Circle(), FourierPerturbation.single(4, 0.8, "b"), spec))
    assert d_both == pytest.approx(d_sep, rel=1e-3)
    assert second_variation_series(both, spec) == pytest.approx(d_both, rel=1e-3)
