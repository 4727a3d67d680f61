"""Degree-n trigonometric polynomials and their exact recovery from samples.

A degree-n trig polynomial is

    p(phi) = A_0 + sum_{k=1..n} A_{2k-1} cos(k*phi) + A_{2k} sin(k*phi),

a 2n+1 dimensional space.  Sampling p at the 2n+1 equidistant probe
phases 0, +2pi/K, -2pi/K, +4pi/K, -4pi/K, ... with K = 2n+1 determines
the coefficients exactly; the inverse map is a discrete Fourier sum and
is precomputed per degree as an explicit real matrix.

Also provides exact algebra on such polynomials (pointwise product,
argument shift) via their complex harmonic representation, and a robust
grid + golden-section minimizer for 1-D restrictions.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class TrigPoly:
    """Real trig polynomial stored as coefficients [A0, A1, ..., A_{2n}]."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim != 1 or coeffs.size % 2 == 0:
            raise ValueError("coefficient vector must be 1-D with odd length 2n+1")
        self.coeffs = coeffs

    @property
    def degree(self) -> int:
        return (self.coeffs.size - 1) // 2

    def __call__(self, phase):
        phi = np.asarray(phase, dtype=float)
        out = np.full(phi.shape, self.coeffs[0])
        for k in range(1, self.degree + 1):
            out = out + self.coeffs[2 * k - 1] * np.cos(k * phi)
            out = out + self.coeffs[2 * k] * np.sin(k * phi)
        if phi.ndim == 0:
            return float(out)
        return out

    def __repr__(self):
        return f"TrigPoly(degree={self.degree}, coeffs={self.coeffs!r})"


def probe_phases(degree: int) -> np.ndarray:
    """Probe schedule [0, +2pi/K, -2pi/K, ..., +2pi*n/K, -2pi*n/K], K = 2n+1."""
    if degree < 1:
        raise ValueError("degree must be at least 1")
    k = 2 * degree + 1
    out = [0.0]
    for j in range(1, degree + 1):
        out.append(2.0 * math.pi * j / k)
        out.append(-2.0 * math.pi * j / k)
    return np.array(out)


def _harmonic_indices(degree: int) -> np.ndarray:
    # probe m sits at angle 2*pi*t_m/K with t = [0, +1, -1, +2, -2, ...]
    t = [0]
    for j in range(1, degree + 1):
        t.extend((j, -j))
    return np.array(t)


@lru_cache(maxsize=None)
def forward_matrix(degree: int) -> np.ndarray:
    """V with V[m] = [1, cos(phi_m), sin(phi_m), ..., cos(n phi_m), sin(n phi_m)].

    Maps coefficients to samples at the probe schedule: r = V @ A.
    """
    phases = probe_phases(degree)
    k = 2 * degree + 1
    v = np.empty((k, k))
    v[:, 0] = 1.0
    for j in range(1, degree + 1):
        v[:, 2 * j - 1] = np.cos(j * phases)
        v[:, 2 * j] = np.sin(j * phases)
    v.flags.writeable = False
    return v


@lru_cache(maxsize=None)
def inverse_matrix(degree: int) -> np.ndarray:
    """Explicit inverse of :func:`forward_matrix`, from the Fourier sum.

    With t_m the signed harmonic index of probe m (0, +1, -1, ...):

        A_0      = (1/K) sum_m r_m
        A_{2k-1} = (2/K) sum_m cos(2 pi k t_m / K) r_m
        A_{2k}   = (2/K) sum_m sin(2 pi k t_m / K) r_m
    """
    k = 2 * degree + 1
    t = _harmonic_indices(degree)
    w = np.empty((k, k))
    w[0, :] = 1.0 / k
    for j in range(1, degree + 1):
        w[2 * j - 1, :] = 2.0 / k * np.cos(2.0 * math.pi * j * t / k)
        w[2 * j, :] = 2.0 / k * np.sin(2.0 * math.pi * j * t / k)
    w.flags.writeable = False
    return w


def _check_samples(samples, degree: int) -> np.ndarray:
    r = np.asarray(samples, dtype=float)
    if r.shape != (2 * degree + 1,):
        raise ValueError(
            f"need {2 * degree + 1} samples for degree {degree}, got shape {r.shape}"
        )
    return r


def reconstruct(samples, degree: int) -> TrigPoly:
    """Coefficients from samples taken at probe_phases(degree), in order."""
    r = _check_samples(samples, degree)
    return TrigPoly(inverse_matrix(degree) @ r)


def reconstruct_solve(samples, degree: int) -> TrigPoly:
    """Same recovery through a dense linear solve; cross-check route."""
    r = _check_samples(samples, degree)
    return TrigPoly(np.linalg.solve(forward_matrix(degree), r))


# -- complex harmonic representation -----------------------------------------
#
# p(phi) = sum_{k=-n..n} c_k e^{i k phi} with c_0 = A_0,
# c_k = (A_{2k-1} - i A_{2k})/2 and c_{-k} = conj(c_k) for k >= 1.


def to_complex(poly: TrigPoly) -> np.ndarray:
    """Harmonic coefficients c_{-n}..c_{n} as a (2n+1,) complex vector."""
    n = poly.degree
    a = poly.coeffs
    c = np.zeros(2 * n + 1, dtype=complex)
    c[n] = a[0]
    for k in range(1, n + 1):
        ck = 0.5 * (a[2 * k - 1] - 1j * a[2 * k])
        c[n + k] = ck
        c[n - k] = np.conj(ck)
    return c


def from_complex(c) -> TrigPoly:
    c = np.asarray(c, dtype=complex)
    n = (c.size - 1) // 2
    a = np.zeros(2 * n + 1)
    a[0] = c[n].real
    for k in range(1, n + 1):
        a[2 * k - 1] = 2.0 * c[n + k].real
        a[2 * k] = -2.0 * c[n + k].imag
    return TrigPoly(a)


def poly_product(p: TrigPoly, q: TrigPoly) -> TrigPoly:
    """Pointwise product; degree adds, computed by coefficient convolution."""
    return from_complex(np.convolve(to_complex(p), to_complex(q)))


def poly_shift(p: TrigPoly, delta: float) -> TrigPoly:
    """The polynomial phi -> p(phi + delta)."""
    n = p.degree
    ks = np.arange(-n, n + 1)
    return from_complex(to_complex(p) * np.exp(1j * ks * delta))


# -- 1-D minimization ---------------------------------------------------------


def _golden(f: Callable[[float], float], a: float, b: float, tol: float):
    """Golden-section descent on [a, b]; returns best evaluated (x, f(x))."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = float(f(c)), float(f(d))
    best_x, best_v = (c, fc) if (fc < fd or (fc == fd and c <= d)) else (d, fd)
    while (b - a) > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = float(f(c))
            x, v = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = float(f(d))
            x, v = d, fd
        if not math.isfinite(v):
            raise ValueError(f"objective returned a non-finite value at phi={x!r}")
        if v < best_v or (v == best_v and x < best_x):
            best_x, best_v = x, v
    return best_x, best_v


def minimize_1d(
    f: Callable,
    interval: Sequence[float],
    grid_points: int = 2048,
    tol: float = 1e-10,
    vectorized: bool = False,
) -> tuple[float, float]:
    """Global grid scan plus golden-section refinement.

    Parameters
    ----------
    f : callable
        Objective; must accept a scalar, and a 1-D array when
        ``vectorized`` is true.
    interval : (lo, hi)
        Closed search interval, lo < hi.
    grid_points : int
        Size of the initial uniform scan (>= 3).
    tol : float
        Refinement stops once the bracket is narrower than this.
    vectorized : bool
        Evaluate the whole grid in one call.

    Returns
    -------
    (argmin, value)
        ``value`` is f evaluated at the returned abscissa and never
        exceeds any grid value; ties resolve toward the smaller abscissa.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError(f"invalid interval {interval!r}")
    if grid_points < 3:
        raise ValueError("grid_points must be at least 3")
    if tol <= 0:
        raise ValueError("tol must be positive")

    grid = np.linspace(lo, hi, grid_points)
    if vectorized:
        vals = np.asarray(f(grid), dtype=float)
    else:
        vals = np.array([float(f(x)) for x in grid])
    if vals.shape != grid.shape:
        raise ValueError("vectorized objective returned a wrong-shaped value")
    bad = ~np.isfinite(vals)
    if bad.any():
        where = grid[int(np.argmax(bad))]
        raise ValueError(f"objective returned a non-finite value at phi={where!r}")

    i = int(np.argmin(vals))  # first minimum: ties toward smaller abscissa
    best_x, best_v = float(grid[i]), float(vals[i])
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid_points - 1)]
    if b - a > tol:
        gx, gv = _golden(f, float(a), float(b), tol)
        if gv < best_v or (gv == best_v and gx < best_x):
            best_x, best_v = gx, gv
    return best_x, best_v
