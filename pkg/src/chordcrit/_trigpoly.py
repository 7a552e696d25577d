"""Trigonometric polynomials with exact coefficients, stable near ``u = 0``.

The mode factors built from ``cos(m u)`` terms cancel to high order at small
``u`` (``O(u^8)`` against terms of size ``n^4``).  Direct evaluation then
loses every significant digit, so below ``max(m) * |u| <= 1`` the
polynomial is evaluated from its Taylor series, whose coefficients are
formed exactly in rational arithmetic before rounding.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

import numpy as np

TAYLOR_DEGREE = 48


class TrigPoly:
    """``sum_j c_j cos(m_j u) + sum_j d_j sin(m_j u)``.

    ``cos_terms`` and ``sin_terms`` map frequency ``m`` to amplitude; both
    may be ints or Fractions.  Repeated frequencies are merged.
    """

    def __init__(self, cos_terms=(), sin_terms=()):
        self.cos_terms = _merge(cos_terms)
        self.sin_terms = _merge(sin_terms)
        freqs = [abs(m) for m in self.cos_terms] + [abs(m) for m in self.sin_terms]
        self.max_freq = float(max(freqs, default=0))
        self._taylor = None

    @property
    def taylor(self) -> list:
        """Exact Taylor coefficients of ``u^0 .. u^TAYLOR_DEGREE``."""
        if self._taylor is None:
            coeffs = [Fraction(0)] * (TAYLOR_DEGREE + 1)
            for k in range(TAYLOR_DEGREE + 1):
                if k % 2 == 0:
                    sign = -1 if (k // 2) % 2 else 1
                    acc = sum((c * Fraction(m) ** k for m, c in self.cos_terms.items()), Fraction(0))
                else:
                    sign = -1 if ((k - 1) // 2) % 2 else 1
                    acc = sum((c * Fraction(m) ** k for m, c in self.sin_terms.items()), Fraction(0))
                coeffs[k] = sign * acc / factorial(k)
            self._taylor = coeffs
        return self._taylor

    def leading_order(self) -> int:
        for k, c in enumerate(self.taylor):
            if c != 0:
                return k
        return TAYLOR_DEGREE + 1

    def direct(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        for m, c in self.cos_terms.items():
            out = out + float(c) * np.cos(float(m) * u)
        for m, c in self.sin_terms.items():
            out = out + float(c) * np.sin(float(m) * u)
        return out

    def series(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        for c in reversed(self.taylor):
            out = out * u + float(c)
        return out

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        small = self.max_freq * np.abs(u) <= 1.0
        if np.all(small):
            out = self.series(u)
        elif not np.any(small):
            out = self.direct(u)
        else:
            out = np.where(small, self.series(u), self.direct(u))
        return float(out) if out.ndim == 0 else out


def _merge(terms) -> dict:
    items = terms.items() if isinstance(terms, dict) else terms
    out: dict = {}
    for m, c in items:
        m = Fraction(m)
        if m < 0:
            raise ValueError("use non-negative frequencies")
        out[m] = out.get(m, Fraction(0)) + Fraction(c)
    return {m: c for m, c in out.items() if c != 0}
