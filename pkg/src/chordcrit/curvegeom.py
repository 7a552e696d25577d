"""Closed planar curves described by their signed curvature.

A curve of length ``L`` is parametrized by arclength ``s``.  Its tangent
angle (the *bending*) is ``beta(s) = int_0^s gamma``, and the curve itself is
recovered as ``Gamma(s) = int_0^s exp(i beta)``.  Three curvature models are
supported:

* :class:`Circle` -- constant curvature ``2 pi / L``;
* :class:`Perturbed` -- ``2 pi / L + eps * g(s)`` with ``g`` a finite Fourier
  series (:class:`FourierPerturbation`);
* :class:`PiecewiseConstant` -- straight pieces and circular arcs, e.g. a
  stadium.

Points are complex numbers internally (``x + iy``) and 2-vectors at the
public boundary.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

TWO_PI = 2.0 * math.pi

__all__ = [
    "TWO_PI",
    "ClosureError",
    "ModelFormatError",
    "FourierPerturbation",
    "CurvatureModel",
    "Circle",
    "Perturbed",
    "PiecewiseConstant",
    "SampledCurve",
    "ClosureReport",
    "bending",
    "reconstruct",
    "closure_report",
    "project_closed",
    "model_to_dict",
    "model_from_dict",
    "load_model",
    "save_model",
]


class ClosureError(RuntimeError):
    """Raised when a curve cannot be (or was not) closed.

    ``defect`` holds the last closure defect norm seen, if any.
    """

    def __init__(self, message, defect=None):
        super().__init__(message)
        self.defect = defect


class ModelFormatError(ValueError):
    """A curve document does not follow the JSON schema."""


def _as_coeffs(values) -> np.ndarray:
    arr = np.array(values if values is not None else [], dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        raise ValueError("Fourier coefficients must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FourierPerturbation:
    """Curvature perturbation ``eps * g(s)`` of a circle of length ``L``.

    ``g(s) = a0 + sum_n a_n sin(2 pi n s / L) + b_n cos(2 pi n s / L)``
    where ``a[0]`` is ``a_1`` (arrays are indexed from mode 1).  The two
    arrays are zero-padded to a common length.

    The perturbation must stay small: ``eps * max|g| < 2 pi / L``, which keeps
    the curvature positive.
    """

    L: float = TWO_PI
    eps: float = 0.0
    a: np.ndarray = field(default_factory=lambda: _as_coeffs([]))
    b: np.ndarray = field(default_factory=lambda: _as_coeffs([]))
    a0: float = 0.0

    def __post_init__(self):
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ValueError(f"L must be positive, got {self.L}")
        a, b = _as_coeffs(self.a), _as_coeffs(self.b)
        n = max(a.size, b.size)
        if a.size < n:
            a = _as_coeffs(np.concatenate([a, np.zeros(n - a.size)]))
        if b.size < n:
            b = _as_coeffs(np.concatenate([b, np.zeros(n - b.size)]))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "eps", float(self.eps))
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "L", float(self.L))
        if not (math.isfinite(self.eps) and math.isfinite(self.a0)):
            raise ValueError("eps and a0 must be finite")
        bound = abs(self.eps) * self.sup_norm()
        if bound >= TWO_PI / self.L:
            raise ValueError(
                f"perturbation too large: eps*max|g| = {bound:.6g} "
                f">= base curvature {TWO_PI / self.L:.6g}"
            )

    @classmethod
    def single(cls, n: int, amplitude: float = 1.0, kind: str = "a", eps: float = 0.0,
               L: float = TWO_PI) -> "FourierPerturbation":
        """Perturbation with one nonzero coefficient ``a_n`` or ``b_n``."""
        if n < 1:
            raise ValueError("mode index must be >= 1")
        coeffs = np.zeros(n)
        coeffs[n - 1] = amplitude
        if kind == "a":
            return cls(L=L, eps=eps, a=coeffs)
        if kind == "b":
            return cls(L=L, eps=eps, b=coeffs)
        raise ValueError("kind must be 'a' or 'b'")

    @property
    def n_modes(self) -> int:
        return int(self.a.size)

    @property
    def modes(self) -> np.ndarray:
        return np.arange(1, self.n_modes + 1)

    def with_eps(self, eps: float) -> "FourierPerturbation":
        return FourierPerturbation(L=self.L, eps=eps, a=self.a, b=self.b, a0=self.a0)

    def with_coeffs(self, a=None, b=None, a0=None) -> "FourierPerturbation":
        return FourierPerturbation(
            L=self.L,
            eps=self.eps,
            a=self.a if a is None else a,
            b=self.b if b is None else b,
            a0=self.a0 if a0 is None else a0,
        )

    def g(self, s):
        s = np.asarray(s, dtype=float)
        w = TWO_PI / self.L
        arg = np.multiply.outer(s, self.modes * w)
        return self.a0 + np.sin(arg) @ self.a + np.cos(arg) @ self.b

    def antiderivative(self, s):
        """``int_0^s g`` in closed form."""
        s = np.asarray(s, dtype=float)
        w = TWO_PI / self.L
        k = self.modes * w
        arg = np.multiply.outer(s, k)
        if k.size == 0:
            return self.a0 * s
        return self.a0 * s + (1.0 - np.cos(arg)) @ (self.a / k) + np.sin(arg) @ (self.b / k)

    def sup_norm(self) -> float:
        if self.n_modes == 0:
            return abs(self.a0)
        s = np.linspace(0.0, self.L, 16 * self.n_modes + 65, endpoint=False)
        return float(np.max(np.abs(self.g(s))))


class CurvatureModel:
    """Base class for curvature descriptions of a closed curve."""

    L: float

    def curvature(self, s):
        raise NotImplementedError

    def bending(self, s):
        raise NotImplementedError

    @property
    def total_turning(self) -> float:
        return float(self.bending(self.L))

    @property
    def closed_tangent(self) -> bool:
        return abs(self.total_turning - TWO_PI) <= 1e-9 * TWO_PI


@dataclass(frozen=True)
class Circle(CurvatureModel):
    L: float = TWO_PI

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be positive")

    def curvature(self, s):
        return np.full_like(np.asarray(s, dtype=float), TWO_PI / self.L)

    def bending(self, s):
        return TWO_PI / self.L * np.asarray(s, dtype=float)


@dataclass(frozen=True)
class Perturbed(CurvatureModel):
    fp: FourierPerturbation

    @property
    def L(self) -> float:
        return self.fp.L

    def curvature(self, s):
        return TWO_PI / self.L + self.fp.eps * self.fp.g(s)

    def bending(self, s):
        s = np.asarray(s, dtype=float)
        return TWO_PI / self.L * s + self.fp.eps * self.fp.antiderivative(s)


@dataclass(frozen=True)
class PiecewiseConstant(CurvatureModel):
    """Curvature constant on consecutive pieces ``(length, kappa)``.

    The curve length is the sum of the piece lengths.
    """

    segments: tuple

    def __post_init__(self):
        segs = tuple((float(ln), float(k)) for ln, k in self.segments)
        if not segs:
            raise ValueError("at least one segment is required")
        if any(ln <= 0 or not math.isfinite(ln) or not math.isfinite(k) for ln, k in segs):
            raise ValueError("segment lengths must be positive and finite")
        object.__setattr__(self, "segments", segs)

    @property
    def L(self) -> float:
        return float(sum(ln for ln, _ in self.segments))

    @property
    def _knots(self):
        lengths = np.array([ln for ln, _ in self.segments])
        kappas = np.array([k for _, k in self.segments])
        starts = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
        angles = np.concatenate([[0.0], np.cumsum(lengths * kappas)[:-1]])
        return starts, lengths, kappas, angles

    def _locate(self, s):
        s = np.asarray(s, dtype=float)
        L = self.L
        wraps = np.floor(s / L)
        r = s - wraps * L
        starts, _, _, _ = self._knots
        idx = np.clip(np.searchsorted(starts, r, side="right") - 1, 0, len(starts) - 1)
        return wraps, r, idx

    def curvature(self, s):
        _, _, idx = self._locate(s)
        return self._knots[2][idx]

    def bending(self, s):
        wraps, r, idx = self._locate(s)
        starts, _, kappas, angles = self._knots
        turn = float(np.sum([ln * k for ln, k in self.segments]))
        return wraps * turn + angles[idx] + kappas[idx] * (r - starts[idx])

    def position(self, s, rotation: float = 0.0) -> np.ndarray:
        """Exact ``Gamma(s)`` as complex numbers, continued past ``L``."""
        starts, lengths, kappas, angles = self._knots
        # segment start points
        p0 = np.zeros(len(starts), dtype=complex)
        pos = 0.0 + 0.0j
        for j, (ln, k, th) in enumerate(zip(lengths, kappas, angles)):
            p0[j] = pos
            pos = pos + _arc_increment(th, k, ln)
        defect = pos
        wraps, r, idx = self._locate(s)
        d = r - starts[idx]
        z = p0[idx] + _arc_increment(angles[idx], kappas[idx], d)
        return np.exp(1j * rotation) * (z + wraps * defect)


def _arc_increment(theta0, kappa, d):
    theta0 = np.asarray(theta0, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    d = np.asarray(d, dtype=float)
    straight = np.abs(kappa) * np.abs(d) < 1e-300
    safe_k = np.where(straight, 1.0, kappa)
    # (e^{i(theta0 + k d)} - e^{i theta0}) / (i k), written to avoid cancellation
    half = 0.5 * safe_k * d
    arc = np.exp(1j * (theta0 + half)) * (2.0 * np.sin(half) / safe_k)
    line = np.exp(1j * theta0) * d
    return np.where(straight, line, arc)


@dataclass(frozen=True)
class SampledCurve:
    """Curve points on the uniform grid ``s_i = i L / N``.

    ``pts`` covers ``i = 0 .. ceil(N (1 + u_max / L))``; points past ``L``
    continue the curvature periodically.  ``closure_defect`` is
    ``Gamma(L) - Gamma(0)``.
    """

    L: float
    N: int
    pts: np.ndarray
    closure_defect: np.ndarray
    _shift: Callable[[float], np.ndarray] | None = field(default=None, repr=False, compare=False)

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def s(self) -> np.ndarray:
        return np.arange(self.pts.shape[0]) * self.h

    def shifted(self, u: float) -> np.ndarray:
        """Points ``Gamma(s_i + u)`` for ``i = 0 .. N-1`` as an ``(N, 2)`` array."""
        k = u / self.h
        kr = int(round(k))
        if abs(k - kr) <= 1e-9 * max(1.0, abs(k)) and 0 <= kr and kr + self.N <= self.pts.shape[0]:
            return self.pts[kr:kr + self.N]
        if self._shift is None:
            raise ValueError(
                f"u = {u!r} is not a grid multiple of L/N = {self.h!r} within the sampled range"
            )
        return self._shift(u)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["s", "x", "y"])
            for si, (x, y) in zip(self.s, self.pts):
                w.writerow([repr(float(si)), repr(float(x)), repr(float(y))])


def _cplx_to_xy(z) -> np.ndarray:
    z = np.asarray(z)
    out = np.stack([z.real, z.imag], axis=-1)
    out.setflags(write=False)
    return out


def bending(model: CurvatureModel, s: float) -> float:
    """Tangent angle ``beta(s) = int_0^s gamma``, for ``0 <= s <= 2L``."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0) or np.any(s_arr > 2 * model.L * (1 + 1e-15)):
        raise ValueError(f"s must lie in [0, 2L] = [0, {2 * model.L}], got {s}")
    out = model.bending(s_arr)
    return float(out) if np.ndim(out) == 0 else out


def reconstruct(model: CurvatureModel, N: int = 2048, u_max: float | None = None,
                rotation: float = 0.0) -> SampledCurve:
    """Sample ``Gamma`` on a uniform arclength grid.

    Smooth models are integrated spectrally: ``exp(i beta)`` is periodic, so
    its antiderivative is computed mode by mode from the FFT of the grid
    values.  On full periods this coincides with the trapezoid rule, and it
    stays spectrally accurate at every intermediate point as well.
    Piecewise-constant models are integrated exactly, segment by segment.

    ``rotation`` is added to the bending, i.e. rotates the curve rigidly.
    """
    L = model.L
    if u_max is None:
        u_max = L / 2
    if N < 64 or N % 2:
        raise ValueError(f"N must be even and >= 64, got {N}")
    if not 0 <= u_max <= L:
        raise ValueError(f"u_max must lie in [0, L], got {u_max}")
    if not model.closed_tangent:
        raise ClosureError(
            f"total turning {model.total_turning!r} != 2 pi; tangent is not periodic"
        )
    h = L / N
    M = int(math.ceil(N * (1 + u_max / L) - 1e-9))
    idx = np.arange(M + 1)

    if isinstance(model, PiecewiseConstant):
        z = model.position(idx * h, rotation)
        defect = model.position(L, rotation) - model.position(0.0, rotation)
        base = np.arange(N) * h

        def shift(u):
            return _cplx_to_xy(model.position(base + u, rotation))

        return SampledCurve(L, N, _cplx_to_xy(z), _cplx_to_xy(defect), shift)

    s = np.arange(N) * h
    f = np.exp(1j * (model.bending(s) + rotation))
    F = np.fft.fft(f) / N
    k = np.fft.fftfreq(N, 1.0 / N)
    omega = TWO_PI * k / L
    nyq = N // 2
    drift = F[0]
    C = np.zeros(N, dtype=complex)
    reg = (k != 0) & (np.abs(k) != nyq)
    C[reg] = F[reg] / (1j * omega[reg])
    f_nyq = F[nyq]

    def periodic(tau):
        # P(s_i + tau); the Nyquist mode is integrated as a cosine so that it
        # interpolates symmetrically between grid points
        Ct = C * np.exp(1j * omega * tau)
        Ct[nyq] = f_nyq * L / (math.pi * N) * math.sin(math.pi * N * tau / L)
        return np.fft.ifft(Ct) * N

    p0 = np.sum(C)
    P = periodic(0.0)
    one_period = drift * s + P - p0
    step = drift * L
    wraps, rem = np.divmod(idx, N)
    z = one_period[rem] + wraps * step

    def shift(u):
        return _cplx_to_xy(drift * (s + u) + periodic(u) - p0)

    return SampledCurve(L, N, _cplx_to_xy(z), _cplx_to_xy(step), shift)


@dataclass(frozen=True)
class ClosureReport:
    tangent_periodic: bool
    linear_ok: bool
    quad_sum_1: float
    quad_sum_2: float
    order: int


def closure_report(fp: FourierPerturbation, tol: float = 1e-12) -> ClosureReport:
    """Closure order in ``eps`` read off the Fourier coefficients.

    ``order`` is 3 when the defect ``Gamma(L) - Gamma(0)`` is ``O(eps^3)``,
    2 when only the quadratic sums fail, and 1 otherwise.
    """
    a, b = fp.a, fp.b
    tangent = fp.a0 == 0.0
    linear = fp.n_modes == 0 or (a[0] == 0.0 and b[0] == 0.0)
    q1 = q2 = 0.0
    if fp.n_modes >= 3:
        n = np.arange(2, fp.n_modes)
        an, an1 = a[n - 1], a[n]
        bn, bn1 = b[n - 1], b[n]
        w = 1.0 / (n * (n + 1.0))
        q1 = math.fsum((bn * bn1 + an * an1) * w)
        q2 = math.fsum((an1 * bn - bn1 * an) * w)
    if tangent and linear and abs(q1) <= tol and abs(q2) <= tol:
        order = 3
    elif tangent and linear:
        order = 2
    else:
        order = 1
    return ClosureReport(tangent, linear, q1, q2, order)


def _closure_integral(fp: FourierPerturbation, n_quad: int):
    s = np.arange(n_quad) * (fp.L / n_quad)
    w = TWO_PI / fp.L
    beta = w * s + fp.eps * fp.antiderivative(s)
    e = np.exp(1j * beta)
    phi_a = (1.0 - np.cos(w * s)) / w
    phi_b = np.sin(w * s) / w
    h = fp.L / n_quad
    F = h * e.sum()
    dFa = h * np.sum(1j * fp.eps * phi_a * e)
    dFb = h * np.sum(1j * fp.eps * phi_b * e)
    return F, dFa, dFb


def project_closed(model: CurvatureModel, tol: float = 1e-12, max_iter: int = 50) -> CurvatureModel:
    """Close a curve exactly by Newton iteration on ``(a_1, b_1)``.

    Only the first-mode coefficients change; they control the ``O(eps)``
    part of the closure defect.  Raises :class:`ClosureError` if the
    iteration does not reach ``|Gamma(L) - Gamma(0)| <= tol``.
    """
    if not model.closed_tangent:
        raise ClosureError("total turning must be 2 pi before projecting")
    if isinstance(model, Circle):
        return model
    if isinstance(model, PiecewiseConstant):
        defect = abs(model.position(model.L) - model.position(0.0))
        if defect > tol:
            raise ClosureError("piecewise-constant models carry no closure coefficients", defect)
        return model
    fp = model.fp
    if fp.n_modes == 0:
        return model
    n_quad = max(1024, 32 * fp.n_modes)
    a = np.array(fp.a, dtype=float)
    b = np.array(fp.b, dtype=float)
    defect = math.inf
    for _ in range(max_iter + 1):
        cur = fp.with_coeffs(a=a, b=b)
        F, dFa, dFb = _closure_integral(cur, n_quad)
        defect = abs(F)
        if defect <= tol:
            return Perturbed(cur)
        if fp.eps == 0.0:
            break
        J = np.array([[dFa.real, dFb.real], [dFa.imag, dFb.imag]])
        try:
            da, db = np.linalg.solve(J, [-F.real, -F.imag])
        except np.linalg.LinAlgError:
            break
        a[0] += da
        b[0] += db
    raise ClosureError(f"closure projection did not converge (defect {defect:.3e})", defect)


# -- serialization ----------------------------------------------------------

def model_to_dict(model: CurvatureModel) -> dict:
    if isinstance(model, Circle):
        return {"variant": "circle", "L": model.L}
    if isinstance(model, Perturbed):
        fp = model.fp
        return {
            "variant": "fourier",
            "L": fp.L,
            "eps": fp.eps,
            "a": [float(x) for x in fp.a],
            "b": [float(x) for x in fp.b],
            "a0": fp.a0,
        }
    if isinstance(model, PiecewiseConstant):
        return {
            "variant": "piecewise",
            "L": model.L,
            "segments": [[ln, k] for ln, k in model.segments],
        }
    raise TypeError(f"unknown model type {type(model).__name__}")


def _number(doc: dict, key: str, default=None) -> float:
    if key not in doc:
        if default is None:
            raise ModelFormatError(f"missing field {key!r}")
        return default
    val = doc[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ModelFormatError(f"field {key!r} must be a number, got {val!r}")
    return float(val)


def _number_list(doc: dict, key: str) -> list:
    val = doc.get(key, [])
    if not isinstance(val, list):
        raise ModelFormatError(f"field {key!r} must be a list of numbers")
    for i, x in enumerate(val):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ModelFormatError(f"field {key!r}[{i}] must be a number, got {x!r}")
    return [float(x) for x in val]


def model_from_dict(doc: dict) -> CurvatureModel:
    if not isinstance(doc, dict):
        raise ModelFormatError("curve document must be a JSON object")
    variant = doc.get("variant")
    try:
        if variant == "circle":
            return Circle(_number(doc, "L", TWO_PI))
        if variant == "fourier":
            fp = FourierPerturbation(
                L=_number(doc, "L", TWO_PI),
                eps=_number(doc, "eps", 0.0),
                a=_number_list(doc, "a"),
                b=_number_list(doc, "b"),
                a0=_number(doc, "a0", 0.0),
            )
            return Perturbed(fp)
        if variant == "piecewise":
            segs = doc.get("segments")
            if not isinstance(segs, list) or not segs:
                raise ModelFormatError("field 'segments' must be a non-empty list of [length, kappa]")
            for i, seg in enumerate(segs):
                if not (isinstance(seg, list) and len(seg) == 2):
                    raise ModelFormatError(f"field 'segments'[{i}] must be [length, kappa]")
            model = PiecewiseConstant(tuple((float(x), float(y)) for x, y in segs))
            if "L" in doc and abs(_number(doc, "L") - model.L) > 1e-9 * model.L:
                raise ModelFormatError(f"field 'L' = {doc['L']} does not match segment total {model.L}")
            return model
    except ModelFormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(str(exc)) from exc
    raise ModelFormatError(f"field 'variant' must be circle, fourier or piecewise, got {variant!r}")


def save_model(model: CurvatureModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")


def load_model(path) -> CurvatureModel:
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return model_from_dict(doc)
