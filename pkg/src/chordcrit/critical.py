"""Critical exponent of the circle and the positivity checks behind it.

``p_critical(u) = (4 - cos t) / (1 - cos t)`` with ``t = 2 pi u / L`` is the
exponent at which :func:`~chordcrit.variation.mode_term_T` changes sign for
mode 2.  Its proof reduces to positivity of

    S(n, u) = -(1 - cos u) T(n, u, p_critical(u)),   n >= 3,

which is checked here on grids together with the two-region argument
(a square-root lower bound away from ``u = 0``, a Taylor bound near it).

``p_critical_exact`` is the mode-2 threshold of
:func:`~chordcrit.variation.mode_term_exact`, ``6 / (1 - cos t)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from ._trigpoly import TrigPoly
from .curvegeom import TWO_PI
from .variation import mode_term_T, spectrum

__all__ = [
    "R10_FLOOR",
    "CriticalProfile",
    "PositivityReport",
    "CondRegion",
    "p_critical",
    "p_critical_exact",
    "critical_profile",
    "S",
    "S_poly",
    "S3_closed",
    "S_polynomial_part",
    "S_sqrt_lower_bound",
    "cond_region",
    "taylor_leading",
    "taylor_radius",
    "cosine_bound_holds",
    "region_cover_gaps",
    "verify_positivity",
    "dichotomy_failures",
    "consistency_residual",
]

# lower bound on the u^10 Taylor remainder of S(n, u), times n^-10
R10_FLOOR = -136


def _angle(u, L):
    u = np.asarray(u, dtype=float)
    if np.any(u < 0) or np.any(u > 0.5 * L * (1 + 1e-12)):
        raise ValueError(f"u must lie in (0, L/2] = (0, {0.5 * L}]")
    return TWO_PI * u / L


def p_critical(u, L: float = TWO_PI):
    """``(4 - cos(2 pi u / L)) / (1 - cos(2 pi u / L))``; ``inf`` at ``u = 0``.

    The denominator is formed as ``2 sin^2(pi u / L)`` to keep small ``u`` accurate.
    """
    t = _angle(u, L)
    c = np.cos(t)
    with np.errstate(divide="ignore"):
        out = np.where(t == 0, np.inf, (4.0 - c) / (2.0 * np.sin(t / 2) ** 2))
    return float(out) if out.ndim == 0 else out


def p_critical_exact(u, L: float = TWO_PI):
    """``6 / (1 - cos(2 pi u / L))``: where the mode-2 second variation vanishes."""
    t = _angle(u, L)
    with np.errstate(divide="ignore"):
        out = np.where(t == 0, np.inf, 3.0 / np.sin(t / 2) ** 2)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CriticalProfile:
    u_grid: np.ndarray
    p_c: np.ndarray
    L: float

    def to_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u", "p_c"])
        for u, p in zip(self.u_grid, self.p_c):
            w.writerow([f"{u:.17g}", f"{p:.17g}"])


def critical_profile(u_points: int, L: float = TWO_PI, exact: bool = False) -> CriticalProfile:
    """``p_c`` on ``u_k = k L / (2 u_points)``, ``k = 1 .. u_points``."""
    if u_points < 2:
        raise ValueError("u_points must be >= 2")
    u = 0.5 * L * np.arange(1, u_points + 1) / u_points
    u[-1] = 0.5 * L
    pc = (p_critical_exact if exact else p_critical)(u, L)
    return CriticalProfile(u, np.asarray(pc), float(L))


@lru_cache(maxsize=None)
def S_poly(n: int) -> TrigPoly:
    """``S(n, u)`` rewritten as a cosine sum with frequencies 0, 1, 2, n-1, n, n+1."""
    n2 = n * n
    return TrigPoly(
        cos_terms=[
            (0, -4 - 10 * n2 + 2 * n2 * n2 + n2 * (n2 - 1)),
            (1, -4 * (n2 - 1) * (n2 - 2)),
            (2, n2 * (n2 - 1)),
            (n, 4 * (1 - n2)),
            (n + 1, 2 * (2 + n2) - 6 * n),
            (n - 1, 2 * (2 + n2) + 6 * n),
        ]
    )


def S(n: int, u):
    """``-4 - 10n^2 + 2n^4 + 2(n^2-1)(-2(n^2-2) cos u + n^2 cos^2 u)
    + 4 cos(nu)(1 - n^2 + (2+n^2) cos u) + 12 n sin u sin(nu)``.

    Evaluated through :func:`S_poly`, which stays accurate where the terms
    cancel to ``O(u^8)``.
    """
    if int(n) != n or n < 2:
        raise ValueError("n must be an integer >= 2")
    return S_poly(int(n))(u)


def S3_closed(u):
    return 2.0 * (2.0 * np.sin(np.asarray(u, dtype=float) / 2)) ** 8


def S_polynomial_part(n: int, u):
    x = np.cos(np.asarray(u, dtype=float))
    n2 = n * n
    return -4 - 10 * n2 + 2 * n2 * n2 + 2 * (n2 - 1) * (-2 * (n2 - 2) * x + n2 * x * x)


def S_sqrt_lower_bound(n: int, u):
    """``S`` with ``a sin x + b cos x`` replaced by ``-sqrt(a^2 + b^2)``."""
    u = np.asarray(u, dtype=float)
    x = np.cos(u)
    n2 = n * n
    rad = (1 - n2 + (2 + n2) * x) ** 2 + 9 * n2 * np.sin(u) ** 2
    return S_polynomial_part(n, u) - 4.0 * np.sqrt(rad)


class CondRegion(NamedTuple):
    cond1: bool
    cond2: bool
    conplus: bool


def cond_region(n: int, u):
    """Sufficient conditions for ``S_sqrt_lower_bound(n, u) > 0``.

    ``cond2`` is the factored form ``4 n^2 (n^2-1)^2 (8 + n^2 (x-1)) (x-1)^3 > 0``
    of ``poly^2 > 16 (...)``; ``conplus`` is ``cos u < 1 - 8/n^2``.
    """
    x = np.cos(np.asarray(u, dtype=float))
    n2 = n * n
    c1 = S_polynomial_part(n, u) > 0
    c2 = 4 * n2 * (n2 - 1) ** 2 * (8 + n2 * (x - 1)) * (x - 1) ** 3 > 0
    cp = x < 1 - 8 / n2
    if np.ndim(x) == 0:
        return CondRegion(bool(c1), bool(c2), bool(cp))
    return CondRegion(c1, c2, cp)


def _taylor_poly(n: int) -> Fraction:
    n = Fraction(n)
    return -Fraction(1, 9) + n**2 / 4 - n**4 / 6 + n**6 / 36


def taylor_leading(n: int) -> float:
    """Coefficient of ``u^8`` in ``S(n, u)``: ``(n^2/40)(-1/9 + n^2/4 - n^4/6 + n^6/36)``."""
    return float(Fraction(n * n, 40) * _taylor_poly(n))


def taylor_radius(n: int) -> float:
    """``u`` below which the ``u^8`` term beats the ``-136 n^10 u^10 / 10!`` remainder."""
    r2 = _taylor_poly(n) / 40 * math.factorial(10) / (-R10_FLOOR * Fraction(n) ** 8)
    return math.sqrt(float(r2))


def cosine_bound_holds(u) -> np.ndarray:
    """``cos u <= 1 - 7 u^2 / 16``."""
    u = np.asarray(u, dtype=float)
    return np.cos(u) <= 1 - 7.0 / 16.0 * u * u


def region_cover_gaps(n_values, u_grid) -> list:
    """``(n, u)`` pairs covered neither by ``conplus`` nor by ``u < taylor_radius(n)``."""
    u_grid = np.asarray(u_grid, dtype=float)
    gaps = []
    for n in n_values:
        cover = cond_region(n, u_grid).conplus | (u_grid < taylor_radius(n))
        gaps.extend((int(n), float(u)) for u in u_grid[~cover])
    return gaps


@dataclass
class PositivityReport:
    n_range: tuple
    u_grid: np.ndarray
    min_S: float
    argmin: tuple
    failures: list
    region_checks: dict = field(repr=False)
    cover_gaps: list = field(default_factory=list)
    bound_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        rc = self.region_checks
        return {
            "n_range": list(self.n_range),
            "u_points": int(self.u_grid.size),
            "min_S": self.min_S,
            "argmin": list(self.argmin),
            "failures": [list(f) for f in self.failures],
            "region_counts": {k: int(np.count_nonzero(v)) for k, v in rc.items()},
            "cover_gaps": len(self.cover_gaps),
            "cover_gap_modes": sorted({n for n, _ in self.cover_gaps}),
            "bound_violations": [list(b) for b in self.bound_violations],
        }


def verify_positivity(n_max: int = 64, u_points: int = 1000) -> PositivityReport:
    """Evaluate ``S(n, u)`` for ``n = 3 .. n_max`` on ``u_k = k pi / u_points``.

    Besides the minimum and any non-positive values, the report records the
    region conditions per grid point, the points the two-region cover misses
    (``n >= 4``), and any grid point where the square-root bound exceeds ``S``
    or fails to be positive inside the ``conplus`` region.
    """
    if n_max < 3:
        raise ValueError("n_max must be >= 3")
    if u_points < 100:
        raise ValueError("u_points must be >= 100")
    u = math.pi * np.arange(1, u_points + 1) / u_points
    ns = np.arange(3, n_max + 1)
    vals = np.empty((ns.size, u.size))
    checks = {k: np.zeros((ns.size, u.size), dtype=bool) for k in ("cond1", "cond2", "conplus", "taylor")}
    violations = []
    for i, n in enumerate(ns):
        n = int(n)
        vals[i] = S(n, u)
        reg = cond_region(n, u)
        checks["cond1"][i] = reg.cond1
        checks["cond2"][i] = reg.cond2
        checks["conplus"][i] = reg.conplus
        checks["taylor"][i] = u < taylor_radius(n)
        lb = S_sqrt_lower_bound(n, u)
        scale = np.maximum(1.0, np.abs(vals[i]))
        bad = (lb > vals[i] + 1e-9 * scale) | (reg.conplus & (lb <= 0))
        violations.extend((n, float(x)) for x in u[bad])
    k = np.unravel_index(np.argmin(vals), vals.shape)
    failures = [(int(ns[i]), float(u[j])) for i, j in zip(*np.nonzero(vals <= 0))]
    gaps = region_cover_gaps(ns[ns >= 4], u)
    return PositivityReport(
        n_range=(3, int(n_max)),
        u_grid=u,
        min_S=float(vals[k]),
        argmin=(int(ns[k[0]]), float(u[k[1]])),
        failures=failures,
        region_checks=checks,
        cover_gaps=gaps,
        bound_violations=violations,
    )


def dichotomy_failures(u_values, delta: float = 0.05, n_max: int = 64, exact: bool = False) -> list:
    """Check the sign pattern of the mode factors around the critical exponent.

    Below ``p_c(u)`` every mode factor must be negative; above it mode 2 must
    be positive while modes ``n >= 3`` stay negative.  Returns
    ``(n, u, p)`` triples that break the pattern.
    """
    pc_fn = p_critical_exact if exact else p_critical
    out = []
    for u in np.atleast_1d(u_values):
        u = float(u)
        pc = float(pc_fn(u))
        below = spectrum(u, pc - delta, n_max, exact=exact)
        for n, t in zip(below.n, below.T):
            if not t < 0:
                out.append((int(n), u, pc - delta))
        above = spectrum(u, pc + delta, n_max, exact=exact)
        for n, t in zip(above.n, above.T):
            if (n == 2 and not t > 0) or (n >= 3 and not t < 0):
                out.append((int(n), u, pc + delta))
    return out


def consistency_residual(n: int, u) -> np.ndarray:
    """``S(n, u) + (1 - cos u) T(n, u, p_c(u))``; zero up to rounding."""
    u = np.asarray(u, dtype=float)
    one_minus_cos = 2 * np.sin(u / 2) ** 2
    return S(n, u) + one_minus_cos * mode_term_T(n, u, p_critical(u))

