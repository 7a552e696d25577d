"""Curves that beat the circle: stadia and curvature-coefficient ascent."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .chordfun import ChordSpec, chord_norm, circle_chord_norm
from .curvegeom import (
    TWO_PI,
    ClosureError,
    CurvatureModel,
    FourierPerturbation,
    PiecewiseConstant,
    Perturbed,
    model_to_dict,
    project_closed,
    reconstruct,
)

log = logging.getLogger(__name__)

__all__ = [
    "StadiumParam",
    "SearchConfig",
    "SearchResult",
    "SearchAborted",
    "stadium_model",
    "stadium_chords",
    "stadium_excess",
    "stadium_a_grid",
    "stadium_critical_p",
    "perturbation_ascent",
]


@dataclass(frozen=True)
class StadiumParam:
    """Stadium of length ``L`` whose two straight sides each have length ``a``.

    The caps are semicircles of radius ``r = (L - 2a) / (2 pi)``.
    """

    a: float
    L: float = TWO_PI

    def __post_init__(self):
        if not 0 <= self.a < self.L / 2:
            raise ValueError(f"a must lie in [0, L/2) = [0, {self.L / 2}), got {self.a}")

    @property
    def r(self) -> float:
        return (self.L - 2 * self.a) / TWO_PI


def stadium_model(sp: StadiumParam) -> CurvatureModel:
    """Piecewise-constant curvature ``(a, 0), (pi r, 1/r), (a, 0), (pi r, 1/r)``."""
    r = sp.r
    cap = (math.pi * r, 1.0 / r)
    if sp.a == 0:
        return PiecewiseConstant((cap, cap))
    return PiecewiseConstant(((sp.a, 0.0), cap, (sp.a, 0.0), cap))


def stadium_chords(sp: StadiumParam, u: float, N: int = 4096) -> np.ndarray:
    """Chord lengths ``|Gamma(s_i + u) - Gamma(s_i)|`` on the ``N``-point grid."""
    curve = reconstruct(stadium_model(sp), N, u_max=u)
    d = curve.shifted(u) - curve.pts[:N]
    return np.hypot(d[:, 0], d[:, 1])


def stadium_excess(sp: StadiumParam, spec: ChordSpec, N: int = 4096) -> float:
    """``chord_norm(stadium) - circle_chord_norm``."""
    curve = reconstruct(stadium_model(sp), N, u_max=spec.u)
    return chord_norm(curve, spec) - circle_chord_norm(sp.L, spec)


def stadium_a_grid(L: float = TWO_PI, n: int = 40, a_min: float = 1e-3, gap_min: float = 1e-6) -> np.ndarray:
    """Straight lengths geometric near ``0`` and geometric in ``L/2 - a`` near the needle limit."""
    half = L / 2
    lo = np.geomspace(a_min, 0.5 * half, n)
    hi = half - np.geomspace(0.5 * half, gap_min, n)
    return np.unique(np.concatenate([lo, hi]))


def _refine(a_grid: np.ndarray, i: int, L: float, k: int = 9) -> np.ndarray:
    lo = a_grid[i - 1] if i > 0 else 0.5 * a_grid[0]
    hi = a_grid[i + 1] if i + 1 < a_grid.size else 0.5 * (a_grid[-1] + L / 2)
    return np.linspace(lo, hi, k)


def stadium_critical_p(u: float, a_grid, p_lo: float, p_hi: float, tol: float = 0.02,
                       N: int = 4096, L: float = TWO_PI) -> float:
    """Smallest ``p`` at which some stadium on ``a_grid`` beats the circle.

    Bisection on the predicate ``max_a excess(a, p) > 0``.  Chord lengths are
    computed once per ``a``; the grid is refined once around the best ``a``
    at each predicate evaluation.
    """
    if not p_lo < p_hi:
        raise ValueError("need p_lo < p_hi")
    a_grid = np.sort(np.asarray(a_grid, dtype=float))
    cache: dict = {}

    def chords(a):
        if a not in cache:
            cache[a] = stadium_chords(StadiumParam(a, L), u, N)
        return cache[a]

    def best(p, grid):
        circ = circle_chord_norm(L, ChordSpec(p, u))
        ex = np.array([(L / N) * np.sum(chords(float(a)) ** p) - circ for a in grid])
        i = int(np.argmax(ex))
        return ex[i], i

    def beats(p):
        ex, i = best(p, a_grid)
        if ex > 0:
            return True, ex
        fine = _refine(a_grid, i, L)
        fine = fine[(fine >= 0) & (fine < L / 2)]
        ex2, _ = best(p, fine)
        return ex2 > 0, max(ex, ex2)

    ok_lo, ex_lo = beats(p_lo)
    ok_hi, ex_hi = beats(p_hi)
    if ok_lo or not ok_hi:
        raise ValueError(
            f"no crossover in [{p_lo}, {p_hi}]: max excess {ex_lo:.3e} at p_lo, {ex_hi:.3e} at p_hi"
        )
    lo, hi = p_lo, p_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if beats(mid)[0]:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SearchConfig:
    """Settings for :func:`perturbation_ascent`.

    ``free`` restricts the ascent to the listed ``(kind, n)`` coefficients,
    e.g. ``(("a", 5),)``; by default every ``a_n, b_n`` with
    ``2 <= n <= n_modes`` moves.  ``init_a``/``init_b`` (indexed from mode 1)
    replace the random start.
    """

    p: float
    u: float
    n_modes: int = 6
    step: float = 0.05
    max_iter: int = 200
    seed: int = 0
    closure_tol: float = 1e-12
    N: int = 2048
    L: float = TWO_PI
    init_scale: float = 0.05
    init_a: tuple | None = None
    init_b: tuple | None = None
    free: tuple | None = None
    fd_step: float = 1e-4
    min_step: float = 1e-8

    def __post_init__(self):
        if self.n_modes < 4:
            raise ValueError("n_modes must be >= 4")
        for name in ("step", "max_iter", "N", "L", "closure_tol", "fd_step", "min_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class SearchResult:
    model: CurvatureModel
    value: float
    circle_value: float
    excess: float
    trace: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "model": model_to_dict(self.model),
            "value": self.value,
            "circle_value": self.circle_value,
            "excess": self.excess,
            "trace": list(self.trace),
            "converged": self.converged,
            "iterations": self.iterations,
        }


class SearchAborted(ClosureError):
    """Closure projection failed mid-search; ``trace`` holds the values so far."""

    def __init__(self, message, trace, defect=None):
        super().__init__(message, defect)
        self.trace = trace


def _index(cfg: SearchConfig):
    if cfg.free is not None:
        idx = [(k, int(n)) for k, n in cfg.free]
    else:
        idx = [(k, n) for k in ("a", "b") for n in range(2, cfg.n_modes + 1)]
    for k, n in idx:
        if k not in ("a", "b") or not 2 <= n <= cfg.n_modes:
            raise ValueError(f"free coefficient {(k, n)} must be a_n or b_n with 2 <= n <= n_modes")
    return idx


def perturbation_ascent(cfg: SearchConfig) -> SearchResult:
    """Projected gradient ascent of the chord functional over curvature coefficients.

    The model is ``2 pi / L + g`` with ``g`` built from the coefficients;
    after every update the first-mode coefficients are re-solved so that the
    curve closes exactly.  Steps follow the normalized central-difference
    gradient; a step that does not improve the value (or leaves the
    admissible set) is halved.
    """
    spec = ChordSpec(cfg.p, cfg.u)
    spec.check(cfg.L)
    idx = _index(cfg)
    M = cfg.n_modes
    a = np.zeros(M)
    b = np.zeros(M)
    if cfg.init_a is not None or cfg.init_b is not None:
        for src, dst in ((cfg.init_a, a), (cfg.init_b, b)):
            if src is not None:
                src = np.asarray(src, dtype=float)[:M]
                dst[: src.size] = src
    else:
        rng = np.random.default_rng(cfg.seed)
        z = rng.standard_normal(len(idx))
        z *= cfg.init_scale / np.linalg.norm(z)
        for (k, n), v in zip(idx, z):
            (a if k == "a" else b)[n - 1] = v

    def build(x, a1b1):
        aa, bb = a.copy(), b.copy()
        for (k, n), v in zip(idx, x):
            (aa if k == "a" else bb)[n - 1] = v
        aa[0], bb[0] = a1b1
        fp = FourierPerturbation(L=cfg.L, eps=1.0, a=aa, b=bb)
        return project_closed(Perturbed(fp), cfg.closure_tol)

    def evaluate(x, a1b1):
        model = build(x, a1b1)
        val = chord_norm(reconstruct(model, cfg.N, u_max=cfg.u), spec)
        return val, model

    x = np.array([(a if k == "a" else b)[n - 1] for k, n in idx])
    trace: list = []
    try:
        value, model = evaluate(x, (a[0], b[0]))
    except (ClosureError, ValueError) as exc:
        raise SearchAborted(f"initial point is not admissible: {exc}", trace) from exc
    anchor = (model.fp.a[0], model.fp.b[0])
    trace.append(value)
    step = cfg.step
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        grad = np.empty_like(x)
        for j in range(x.size):
            e = np.zeros_like(x)
            e[j] = cfg.fd_step
            side = []
            for sgn in (1.0, -1.0):
                try:
                    side.append(evaluate(x + sgn * e, anchor)[0])
                except ClosureError as exc:
                    raise SearchAborted(f"projection failed in gradient at iteration {it}: {exc}",
                                        trace, exc.defect) from exc
                except ValueError:
                    # probe left the curvature bound; fall back to a one-sided difference
                    side.append(None)
            fp_, fm_ = side
            if fp_ is not None and fm_ is not None:
                grad[j] = (fp_ - fm_) / (2 * cfg.fd_step)
            elif fp_ is not None:
                grad[j] = (fp_ - value) / cfg.fd_step
            elif fm_ is not None:
                grad[j] = (value - fm_) / cfg.fd_step
            else:
                grad[j] = 0.0
        gnorm = float(np.linalg.norm(grad))
        if gnorm == 0.0:
            converged = True
            break
        while step >= cfg.min_step:
            trial = x + step * grad / gnorm
            try:
                tv, tm = evaluate(trial, anchor)
            except (ClosureError, ValueError):
                tv = -math.inf
            if tv > value:
                x, value, model = trial, tv, tm
                anchor = (model.fp.a[0], model.fp.b[0])
                break
            step *= 0.5
        trace.append(value)
        if step < cfg.min_step:
            converged = True
            break
        log.debug("iter %d value %.15g step %.3g", it, value, step)
    circ = circle_chord_norm(cfg.L, spec)
    return SearchResult(model, value, circ, value - circ, trace, converged, it)
