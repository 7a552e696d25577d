"""The chord functional ``c^p(u) = int_0^L |Gamma(s + u) - Gamma(s)|^p ds``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .curvegeom import CurvatureModel, PiecewiseConstant, SampledCurve

__all__ = ["ChordSpec", "chord_norm", "circle_chord_norm", "chord_norm_curvature"]

# bracket values in [-CLAMP, 0) are squared chord lengths lost to rounding
CLAMP = 1e-12


@dataclass(frozen=True)
class ChordSpec:
    """Exponent ``p > 0`` and arclength separation ``u > 0`` of the chords."""

    p: float
    u: float

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "u", float(self.u))
        if not (self.p > 0 and math.isfinite(self.p)):
            raise ValueError(f"p must be positive and finite, got {self.p}")
        if not (self.u > 0 and math.isfinite(self.u)):
            raise ValueError(f"u must be positive and finite, got {self.u}")

    def check(self, L: float) -> None:
        if self.u > 0.5 * L * (1 + 1e-12):
            raise ValueError(f"u must lie in (0, L/2] = (0, {0.5 * L}], got {self.u}")


def chord_norm(curve: SampledCurve, spec: ChordSpec) -> float:
    """Periodic trapezoid value of ``int_0^L |Gamma(s+u) - Gamma(s)|^p ds``.

    When ``u`` is a multiple of the grid step the shifted points are read
    off the sampled curve; otherwise they come from the curve's own
    interpolant (spectral for smooth models, exact for piecewise ones).
    """
    spec.check(curve.L)
    base = curve.pts[: curve.N]
    moved = curve.shifted(spec.u)
    d = np.hypot(moved[:, 0] - base[:, 0], moved[:, 1] - base[:, 1])
    return float(curve.h * np.sum(d ** spec.p))


def circle_chord_norm(L: float, spec: ChordSpec) -> float:
    """Closed form ``L^(1+p) / pi^p * sin^p(pi u / L)`` for the circle."""
    spec.check(L)
    p = spec.p
    return L ** (1 + p) / math.pi ** p * math.sin(math.pi * spec.u / L) ** p


def chord_norm_curvature(model: CurvatureModel, spec: ChordSpec, N: int = 256,
                         M: int = 48) -> float:
    """Chord functional from the bending alone.

    Evaluates ``int_0^L ds [int int_{[s, s+u]^2} cos(beta(s'') - beta(s')) ds' ds'']^(p/2)``
    with an ``N``-point periodic trapezoid rule in ``s`` and ``M``-point
    Gauss-Legendre rules on the inner square.  It never builds the curve,
    which makes it an independent check on :func:`chord_norm`.
    """
    if isinstance(model, PiecewiseConstant):
        raise ValueError("chord_norm_curvature needs a smooth model (Circle or Perturbed)")
    L = model.L
    spec.check(L)
    u = spec.u
    x, w = leggauss(M)
    nodes = 0.5 * u * (x + 1.0)
    wts = 0.5 * u * w
    ww = np.outer(wts, wts)
    s = np.arange(N) * (L / N)
    total = 0.0
    for chunk in np.array_split(s, max(1, N // 64)):
        beta = model.bending(chunk[:, None] + nodes[None, :])
        diff = beta[:, None, :] - beta[:, :, None]
        bracket = np.einsum("jk,ijk->i", ww, np.cos(diff))
        if np.any(bracket < -CLAMP):
            raise FloatingPointError(
                f"negative squared chord {bracket.min():.3e}: inner quadrature failed"
            )
        total += np.sum(np.maximum(bracket, 0.0) ** (0.5 * spec.p))
    return float(total * L / N)
