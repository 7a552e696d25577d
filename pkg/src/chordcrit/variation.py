"""First and second variations of the chord functional at the circle.

The circle of length ``2 pi`` is perturbed through its curvature,
``gamma = 1 + eps g``.  For each Fourier mode ``n >= 2`` of ``g`` the second
derivative in ``eps`` is ``(a_n^2 + b_n^2) * coefficient(n, u, p) * T``, with
a positive prefactor, so the sign of the mode factor ``T`` decides whether
the mode raises or lowers the functional.

Two mode factors are provided.  :func:`mode_term_T` is the classical
expression used to derive the critical exponent
``(4 - cos u) / (1 - cos u)``.  :func:`mode_term_exact` is the factor that
the iterated integrals :func:`fs1` and :func:`fs2` actually recombine to; it
agrees with second differences of the functional, and it gives the
mode-2 threshold ``6 / (1 - cos u)``.  They differ by a factor of two on
the curvature-only part ``Q``.

Formulas work at ``L = 2 pi``; functions taking a :class:`ChordSpec` rescale
other lengths with the ``lambda^(1+p)`` law.
"""

from __future__ import annotations

import csv
import math
from fractions import Fraction
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._trigpoly import TrigPoly
from .chordfun import ChordSpec, chord_norm
from .curvegeom import (
    TWO_PI,
    Circle,
    CurvatureModel,
    FourierPerturbation,
    Perturbed,
    closure_report,
    reconstruct,
)

__all__ = [
    "ModeSpectrum",
    "Q_poly",
    "B_poly",
    "mode_term_T",
    "mode_term_exact",
    "mode_threshold",
    "T2_closed",
    "coefficient",
    "fs1",
    "fs2",
    "first_variation_kernel",
    "first_variation_analytic",
    "first_variation_fd",
    "second_variation_series",
    "second_variation_fd",
    "spectrum",
]


def _check_mode(n: int) -> int:
    if int(n) != n or n < 2:
        raise ValueError(f"mode index must be an integer >= 2, got {n}")
    return int(n)


@lru_cache(maxsize=None)
def Q_poly(n: int) -> TrigPoly:
    """``2n^4 - 6n^2 - 2(n^2-1)^2 cos u + (n+1)^2 cos((n-1)u) + (n-1)^2 cos((n+1)u)``."""
    return TrigPoly(
        cos_terms=[
            (0, 2 * n**4 - 6 * n**2),
            (1, -2 * (n * n - 1) ** 2),
            (n - 1, (n + 1) ** 2),
            (n + 1, (n - 1) ** 2),
        ]
    )


@lru_cache(maxsize=None)
def B_poly(n: int) -> TrigPoly:
    """``-2n cos(nu/2) sin(u/2) + 2 cos(u/2) sin(nu/2)`` as a sine sum."""
    return TrigPoly(sin_terms=[(Fraction(n + 1, 2), 1 - n), (Fraction(n - 1, 2), 1 + n)])


def mode_term_T(n: int, u, p):
    """Classical mode factor ``T(n, u, p) = -Q + 2 (p - 2) B^2``."""
    n = _check_mode(n)
    return -Q_poly(n)(u) + 2.0 * (np.asarray(p, dtype=float) - 2.0) * B_poly(n)(u) ** 2


def mode_term_exact(n: int, u, p):
    """Mode factor matching the second derivative: ``-2Q + 2 (p - 2) B^2``.

    Pairs with the same :func:`coefficient` as :func:`mode_term_T`.
    """
    n = _check_mode(n)
    return -2.0 * Q_poly(n)(u) + 2.0 * (np.asarray(p, dtype=float) - 2.0) * B_poly(n)(u) ** 2


def mode_threshold(n: int, u):
    """Exponent at which :func:`mode_term_exact` changes sign, ``2 + Q / B^2``."""
    n = _check_mode(n)
    b2 = B_poly(n)(u) ** 2
    with np.errstate(divide="ignore"):
        return 2.0 + Q_poly(n)(u) / b2


def T2_closed(u, p):
    """``-16 (4 - p + (p - 1) cos u) sin^4(u/2)``."""
    u = np.asarray(u, dtype=float)
    return -16.0 * (4.0 - p + (p - 1.0) * np.cos(u)) * np.sin(u / 2) ** 4


def coefficient(n: int, u, p):
    """Positive prefactor ``2^p pi sin^(p-2)(u/2) p / (8 (n - n^3)^2)``."""
    n = _check_mode(n)
    u = np.asarray(u, dtype=float)
    return 2.0**p * math.pi * np.sin(u / 2) ** (p - 2) * p / (8.0 * (n - n**3) ** 2)


def fs1(n: int, u):
    """Mode-``n`` value of ``int_0^{2pi} ds (int int sin(s''-s') int_{s'}^{s''} g)^2``.

    For ``g = sin(n s)`` (or ``cos``) this is
    ``16 pi sin^2(u/2) B^2 / (n - n^3)^2``.
    """
    n = _check_mode(n)
    u = np.asarray(u, dtype=float)
    return 16.0 * math.pi * np.sin(u / 2) ** 2 * B_poly(n)(u) ** 2 / (n - n**3) ** 2


def fs2(n: int, u):
    """Mode-``n`` value of ``int_0^{2pi} ds int int cos(s''-s') (int_{s'}^{s''} g)^2``,
    which is ``2 pi Q / (n - n^3)^2``."""
    n = _check_mode(n)
    return 2.0 * math.pi * Q_poly(n)(u) / (n - n**3) ** 2


def first_variation_kernel(u):
    """``int int_{[0,u]^2} sin(y - x) (y - x) dx dy = 8 sin^2(u/2) - 2 u sin u``."""
    u = np.asarray(u, dtype=float)
    return 8.0 * np.sin(u / 2) ** 2 - 2.0 * u * np.sin(u)


def _scale(L: float, spec: ChordSpec):
    lam = L / TWO_PI
    return lam, spec.u / lam


def first_variation_analytic(g: FourierPerturbation, spec: ChordSpec) -> float:
    """Directional derivative at the circle along ``g``.

    Only the mean of ``g`` contributes:
    ``-(p/2) (4 sin^2(u/2))^(p/2-1) K(u) int_0^L g`` with ``K`` from
    :func:`first_variation_kernel`.  The direction is given by the
    coefficients; ``g.eps`` is ignored.
    """
    spec.check(g.L)
    lam, u = _scale(g.L, spec)
    p = spec.p
    mean_term = TWO_PI * lam * g.a0  # int_0^{2pi} of the rescaled g
    val = -(p / 2) * (4 * math.sin(u / 2) ** 2) ** (p / 2 - 1) * float(first_variation_kernel(u)) * mean_term
    return lam ** (1 + p) * val


def _along(model0: CurvatureModel, g: FourierPerturbation, t: float) -> CurvatureModel:
    if abs(model0.L - g.L) > 1e-12 * g.L:
        raise ValueError("base curve and perturbation have different lengths")
    if isinstance(model0, Circle):
        return Perturbed(g.with_eps(t))
    if isinstance(model0, Perturbed):
        f0 = model0.fp
        n = max(f0.n_modes, g.n_modes)
        pad = lambda x: np.concatenate([x, np.zeros(n - x.size)])  # noqa: E731
        return Perturbed(
            FourierPerturbation(
                L=g.L,
                eps=1.0,
                a=f0.eps * pad(f0.a) + t * pad(g.a),
                b=f0.eps * pad(f0.b) + t * pad(g.b),
                a0=f0.eps * f0.a0 + t * g.a0,
            )
        )
    raise TypeError("variations are taken from Circle or Perturbed base curves")


def _value(model: CurvatureModel, spec: ChordSpec, N: int) -> float:
    return chord_norm(reconstruct(model, N, u_max=spec.u), spec)


def first_variation_fd(model0: CurvatureModel, g: FourierPerturbation, spec: ChordSpec,
                       eps: float = 1e-3, N: int = 2048) -> float:
    """Central difference ``[c(+eps) - c(-eps)] / (2 eps)``."""
    if not 1e-5 <= eps <= 1e-2:
        raise ValueError("eps must lie in [1e-5, 1e-2]")
    plus = _value(_along(model0, g, eps), spec, N)
    minus = _value(_along(model0, g, -eps), spec, N)
    return (plus - minus) / (2 * eps)


def second_variation_series(g: FourierPerturbation, spec: ChordSpec, exact: bool = True) -> float:
    """Second derivative at the circle along ``g`` from the diagonal mode series.

    ``exact=False`` swaps in :func:`mode_term_T`, for comparison only.
    """
    if g.a0 != 0.0 or (g.n_modes and (g.a[0] != 0.0 or g.b[0] != 0.0)):
        raise ValueError("a0, a1 and b1 must vanish for the circle-variation series")
    spec.check(g.L)
    lam, u = _scale(g.L, spec)
    term = mode_term_exact if exact else mode_term_T
    total = []
    for n in range(2, g.n_modes + 1):
        w = (lam * g.a[n - 1]) ** 2 + (lam * g.b[n - 1]) ** 2
        if w:
            total.append(w * float(coefficient(n, u, spec.p)) * float(term(n, u, spec.p)))
    return lam ** (1 + spec.p) * math.fsum(total)


def second_variation_fd(model0: CurvatureModel, g: FourierPerturbation, spec: ChordSpec,
                        eps: float = 1e-2, N: int = 2048) -> float:
    """Second difference ``[c(+eps) - 2 c(0) + c(-eps)] / eps^2``.

    ``g`` must close to third order in ``eps`` (see :func:`closure_report`).
    """
    rep = closure_report(g)
    if rep.order != 3:
        raise ValueError(f"perturbation closes only to order {rep.order}; order 3 is required")
    plus = _value(_along(model0, g, eps), spec, N)
    zero = _value(_along(model0, g, 0.0), spec, N)
    minus = _value(_along(model0, g, -eps), spec, N)
    return (plus - 2 * zero + minus) / eps**2


@dataclass(frozen=True)
class ModeSpectrum:
    u: float
    p: float
    n: np.ndarray
    T: np.ndarray
    coefficient: np.ndarray
    exact: bool = False

    @property
    def sign(self) -> np.ndarray:
        return np.sign(self.T).astype(int)

    @property
    def terms(self) -> list:
        return [(int(n), float(t), float(c), int(s)) for n, t, c, s in
                zip(self.n, self.T, self.coefficient, self.sign)]

    def series_value(self, g: FourierPerturbation) -> float:
        """``sum (a_n^2 + b_n^2) coefficient_n T_n`` over the tabulated modes."""
        out = []
        for n, t, c in zip(self.n, self.T, self.coefficient):
            if n <= g.n_modes:
                out.append((g.a[n - 1] ** 2 + g.b[n - 1] ** 2) * c * t)
        return math.fsum(out)

    def to_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "T", "coefficient", "sign"])
        for n, t, c, s in self.terms:
            w.writerow([n, f"{t:.17g}", f"{c:.17g}", s])


def spectrum(u: float, p: float, n_max: int = 64, exact: bool = False) -> ModeSpectrum:
    """Mode factors and prefactors for ``n = 2 .. n_max`` at ``L = 2 pi``."""
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    if not 0 < u <= math.pi * (1 + 1e-15):
        raise ValueError(f"u must lie in (0, pi], got {u}")
    term = mode_term_exact if exact else mode_term_T
    ns = np.arange(2, n_max + 1)
    T = np.array([term(int(n), u, p) for n in ns], dtype=float)
    C = np.array([coefficient(int(n), u, p) for n in ns], dtype=float)
    return ModeSpectrum(float(u), float(p), ns, T, C, exact)
