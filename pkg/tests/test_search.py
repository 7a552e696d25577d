import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chordcrit import (
    TWO_PI,
    ChordSpec,
    SearchAborted,
    SearchConfig,
    StadiumParam,
    circle_chord_norm,
    perturbation_ascent,
    reconstruct,
    stadium_a_grid,
    stadium_chords,
    stadium_critical_p,
    stadium_excess,
    stadium_model,
)


def test_stadium_param_validation():
    assert StadiumParam(0.0).r == pytest.approx(1.0)
    assert StadiumParam(1.0, 4.0).r == pytest.approx(2.0 / TWO_PI)
    for a in (-0.1, math.pi, 4.0):
        with pytest.raises(ValueError):
            StadiumParam(a)


def test_stadium_model_closes():
    for a in (0.0, 0.3, 2.5, math.pi - 1e-4):
        m = stadium_model(StadiumParam(a))
        assert m.L == pytest.approx(TWO_PI)
        assert np.linalg.norm(reconstruct(m, 256).closure_defect) < 1e-12


def test_zero_straight_is_circle():
    for p in (2.0, 3.0):
        assert abs(stadium_excess(StadiumParam(0.0), ChordSpec(p, math.pi), 1024)) < 1e-10


def test_needle_limit_chords():
    """Collapsed to a doubled segment, Gamma(s) = s and Gamma(s + pi) = pi - s."""
    d = stadium_chords(StadiumParam(math.pi - 1e-9), math.pi, 1024)
    s = np.arange(1024) * (TWO_PI / 1024)
    expected = np.abs(np.where(s <= math.pi, math.pi - 2 * s, 3 * math.pi - 2 * s))
    assert np.allclose(d, expected, atol=1e-7)


def needle_crossover():
    """Root of (pi/2)^p = p + 1, where 2 pi^(p+1)/(p+1) meets the circle value."""
    f = lambda p: p * math.log(math.pi / 2) - math.log(p + 1)  # noqa: E731
    lo, hi = 2.0, 5.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if f(mid) < 0 else (lo, mid)
    return 0.5 * (lo + hi)


def test_needle_limit_value():
    for p in (2.0, 3.0, 3.5):
        spec = ChordSpec(p, math.pi)
        c = stadium_excess(StadiumParam(math.pi - 1e-9), spec, 2048) + circle_chord_norm(TWO_PI, spec)
        # the needle's corners make the trapezoid rule only O(h^2) here
        assert c == pytest.approx(2 * math.pi ** (p + 1) / (p + 1), rel=1e-4)
    assert needle_crossover() == pytest.approx(3.1530, abs=1e-3)


@settings(max_examples=20, deadline=None)
@given(st.floats(1e-3, math.pi - 1e-3), st.floats(0.3, math.pi))
def test_stadium_loses_at_p2(a, u):
    assert stadium_excess(StadiumParam(a), ChordSpec(2.0, u), 1024) < 0


def test_a_grid_shape():
    g = stadium_a_grid(TWO_PI, 20)
    assert np.all(np.diff(g) > 0)
    assert g[0] == pytest.approx(1e-3) and math.pi - g[-1] == pytest.approx(1e-6)


def test_critical_p_band_coarse():
    pc = stadium_critical_p(math.pi, stadium_a_grid(TWO_PI, 12), 2.5, 4.0, tol=0.05, N=1024)
    assert abs(pc - needle_crossover()) <= 0.05


def test_critical_p_without_crossover():
    with pytest.raises(ValueError, match="no crossover"):
        stadium_critical_p(math.pi, [0.1, 0.5], 1.5, 2.0, N=512)
    with pytest.raises(ValueError):
        stadium_critical_p(math.pi, [0.1], 3.0, 3.0)


def quick(**kw):
    base = dict(p=2.0, u=math.pi, n_modes=4, N=512, max_iter=15)
    base.update(kw)
    return SearchConfig(**base)


def test_ascent_p2_stays_at_circle():
    res = perturbation_ascent(quick(max_iter=40))
    assert res.excess <= 1e-9
    assert res.circle_value == pytest.approx(circle_chord_norm(TWO_PI, ChordSpec(2, math.pi)))


def test_ascent_beats_circle_above_critical():
    res = perturbation_ascent(quick(p=4.0))
    assert res.excess > 0
    assert np.linalg.norm(reconstruct(res.model, 512).closure_defect) <= 1e-12


def test_ascent_trace_and_determinism():
    r1 = perturbation_ascent(quick(p=3.5, seed=7))
    r2 = perturbation_ascent(quick(p=3.5, seed=7))
    assert r1.trace == r2.trace
    assert np.all(np.diff(r1.trace) >= 0)
    assert len(r1.trace) == r1.iterations + 1
    json.dumps(r1.to_dict())


def test_ascent_respects_free_set():
    res = perturbation_ascent(quick(p=3.5, free=(("a", 2),), init_a=(0, 0.05)))
    assert np.all(res.model.fp.a[2:] == 0) and np.all(res.model.fp.b[1:] == 0)


def test_inadmissible_start_aborts():
    with pytest.raises(SearchAborted) as info:
        perturbation_ascent(quick(init_a=(0, 5.0)))
    assert info.value.trace == []


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(p=2, u=1, n_modes=1)
    with pytest.raises(ValueError):
        SearchConfig(p=2, u=1, step=0)
    with pytest.raises(ValueError):
        perturbation_ascent(quick(free=(("a", 9),)))


def test_capped_grid_crossover_is_higher():
    """Straight sides up to 0.5 only: the first winning stadium needs p near 3.77."""
    pc = stadium_critical_p(math.pi, np.geomspace(1e-3, 0.5, 30), 2.5, 4.0, 0.02, N=1024)
    assert 3.7 < pc < 3.85


def test_critical_p_tolerance_contract():
    grid = stadium_a_grid(TWO_PI, 10)
    coarse = stadium_critical_p(math.pi, grid, 2.5, 4.0, 0.04, N=512)
    fine = stadium_critical_p(math.pi, grid, 2.5, 4.0, 0.02, N=512)
    assert abs(fine - coarse) <= 0.04


def test_stable_mode_ascent_returns_to_circle():
    """At p = 3 mode 5 is stable, so climbing along it only shrinks the deficit."""
    cfg = quick(p=3.0, n_modes=5, free=(("a", 5),), init_a=(0, 0, 0, 0, 0.05))
    res = perturbation_ascent(cfg)
    start = res.trace[0] - res.circle_value
    assert start < 0 and start <= res.excess <= 1e-12


def test_ascent_survives_curvature_bound():
    """Runs that reach the positive-curvature boundary keep going with one-sided probes."""
    cfg = quick(p=4.0, n_modes=5, max_iter=40, seed=1, init_scale=0.1)
    res = perturbation_ascent(cfg)
    assert res.excess > 1.0
    assert res.model.fp.sup_norm() < 1.0
