"""Fourier representation of real functions on the unit circle.

A :class:`CircleFunction` stores samples on the uniform grid
``theta_j = 2*pi*j/N``; its Fourier coefficients are ``c_n = fft(values)/N`` so
that ``f(theta) = sum_n c_n exp(i*n*theta)``. All non-local operators used in
the package are Fourier multipliers on this representation:

====================  ==========================
operator              multiplier on mode ``n``
====================  ==========================
half_laplacian        ``|n|``
green_log             ``pi/|n|`` (``0`` at n=0)
derivative            ``i*n`` (Nyquist dropped)
====================  ==========================

Integrals are with respect to arclength ``d theta`` and use the periodic
trapezoid rule, which is spectrally accurate for resolved functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import factorial

import numpy as np

TWO_PI = 2.0 * np.pi
MIN_GRID = 64

__all__ = [
    "CircleFunction",
    "LpNorm",
    "half_laplacian",
    "half_laplacian_pv",
    "green_log",
    "harmonic_extension",
    "derivative",
    "multiplier",
    "lp_norm",
    "dirichlet_norm",
    "grid",
    "required_grid",
    "wrap_angle",
]


def grid(n_grid):
    return TWO_PI * np.arange(n_grid) / n_grid


def wrap_angle(theta):
    """Reduce angles to (-pi, pi]."""
    theta = np.asarray(theta, dtype=float)
    out = np.mod(theta + np.pi, TWO_PI) - np.pi
    out = np.where(out <= -np.pi, out + TWO_PI, out)
    return out if out.ndim else float(out)


def required_grid(delta, floor=1024):
    """Smallest power of two ``>= max(floor, 64/delta)``."""
    need = max(floor, 64.0 / delta)
    return int(2 ** int(np.ceil(np.log2(need) - 1e-12)))


def _is_pow2(n):
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class CircleFunction:
    """Real 2*pi-periodic function sampled on a uniform power-of-two grid."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1:
            raise ValueError("values must be one-dimensional")
        n = vals.size
        if not _is_pow2(n) or n < MIN_GRID:
            raise ValueError(f"n_grid must be a power of two >= {MIN_GRID}, got {n}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_function(cls, fn, n_grid):
        return cls(fn(grid(n_grid)))

    @classmethod
    def constant(cls, c, n_grid):
        return cls(np.full(n_grid, float(c)))

    @classmethod
    def from_coeffs(cls, coeffs):
        """Build from full FFT-ordered coefficients ``c_n`` (conjugate symmetric)."""
        coeffs = np.asarray(coeffs, dtype=complex)
        n = coeffs.size
        vals = np.fft.ifft(coeffs * n)
        scale = max(1.0, float(np.max(np.abs(vals))))
        if np.max(np.abs(vals.imag)) > 1e-10 * scale:
            raise ValueError("coefficients are not conjugate symmetric")
        return cls(vals.real)

    @classmethod
    def from_trig(cls, cos=(), sin=(), n_grid=1024):
        """``a0 + sum_n a_n cos(n t) + sum_n b_n sin(n t)``.

        ``cos`` is ``[a0, a1, a2, ...]`` and ``sin`` is ``[b1, b2, ...]``.
        """
        t = grid(n_grid)
        vals = np.zeros(n_grid)
        for n, a in enumerate(cos):
            vals += a * np.cos(n * t)
        for n, b in enumerate(sin, start=1):
            vals += b * np.sin(n * t)
        return cls(vals)

    # -- spectral data ------------------------------------------------------

    @property
    def n_grid(self):
        return self.values.size

    @cached_property
    def theta(self):
        return grid(self.n_grid)

    @cached_property
    def coeffs(self):
        """FFT-ordered coefficients; mode numbers are given by :attr:`modes`."""
        return np.fft.fft(self.values) / self.n_grid

    @cached_property
    def modes(self):
        return np.fft.fftfreq(self.n_grid, 1.0 / self.n_grid).astype(int)

    @cached_property
    def rcoeffs(self):
        return np.fft.rfft(self.values) / self.n_grid

    def coeff(self, n):
        """Coefficient of ``exp(i*n*theta)`` for |n| <= N/2."""
        n = int(n)
        half = self.n_grid // 2
        if abs(n) > half:
            return 0.0 + 0.0j
        if n == -half:
            n = half
        c = self.rcoeffs[abs(n)]
        return c if n >= 0 else np.conj(c)

    def bandwidth(self, rtol=1e-16):
        """Highest mode whose coefficient exceeds ``rtol`` times the largest."""
        mag = np.abs(self.rcoeffs)
        keep = np.nonzero(mag > rtol * max(mag.max(), 1e-300))[0]
        return int(keep[-1]) if keep.size else 0

    def evaluate(self, theta):
        """Trigonometric interpolant at arbitrary angles."""
        theta = np.asarray(theta, dtype=float)
        flat = theta.ravel()
        half = self.n_grid // 2
        kmax = self.bandwidth()
        c = self.rcoeffs[: kmax + 1].copy()
        weights = np.full(kmax + 1, 2.0)
        weights[0] = 1.0
        if kmax == half:
            weights[half] = 1.0
            c[half] = c[half].real
        cw = c * weights
        n = np.arange(kmax + 1)
        out = np.empty(flat.size)
        chunk = max(1, int(4_000_000 // (kmax + 1)))
        for start in range(0, flat.size, chunk):
            t = flat[start : start + chunk]
            out[start : start + chunk] = (np.exp(1j * np.outer(t, n)) @ cw).real
        return out.reshape(theta.shape) if theta.ndim else float(out[0])

    def resample(self, n_grid):
        """Zero-pad or truncate the spectrum onto another grid."""
        if n_grid == self.n_grid:
            return self
        rc = self.rcoeffs
        new = np.zeros(n_grid // 2 + 1, dtype=complex)
        m = min(rc.size, new.size)
        new[:m] = rc[:m]
        if n_grid < self.n_grid:
            new[-1] = new[-1].real
        elif self.n_grid // 2 < new.size - 1:
            # split the old Nyquist mode evenly between +N/2 and -N/2
            new[self.n_grid // 2] *= 0.5
        return CircleFunction(np.fft.irfft(new * n_grid, n=n_grid))

    # -- scalar functionals -------------------------------------------------

    def integral(self):
        return TWO_PI * float(np.mean(self.values))

    def mean(self):
        return float(np.mean(self.values))

    def max(self):
        return float(np.max(self.values))

    def min(self):
        return float(np.min(self.values))

    def at_zero(self):
        return float(self.values[0])

    def map(self, fn):
        return CircleFunction(fn(self.values))

    # -- arithmetic ---------------------------------------------------------

    def _other(self, other):
        if isinstance(other, CircleFunction):
            if other.n_grid != self.n_grid:
                raise ValueError("grid sizes differ")
            return other.values
        return other

    def __add__(self, other):
        return CircleFunction(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return CircleFunction(self.values - self._other(other))

    def __rsub__(self, other):
        return CircleFunction(self._other(other) - self.values)

    def __mul__(self, other):
        return CircleFunction(self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return CircleFunction(self.values / self._other(other))

    def __neg__(self):
        return CircleFunction(-self.values)

    def __repr__(self):
        return f"CircleFunction(n_grid={self.n_grid}, mean={self.mean():.6g})"


@dataclass(frozen=True)
class LpNorm:
    p: float
    value: float

    def __float__(self):
        return self.value


def multiplier(f: CircleFunction, symbol) -> CircleFunction:
    """Apply the Fourier multiplier ``symbol(n)`` (n >= 0, even symbol) to ``f``."""
    n = np.arange(f.n_grid // 2 + 1)
    m = np.asarray(symbol(n), dtype=complex)
    return CircleFunction(np.fft.irfft(np.fft.rfft(f.values) * m, n=f.n_grid))


def half_laplacian(f: CircleFunction) -> CircleFunction:
    return multiplier(f, lambda n: n.astype(float))


def green_log(g: CircleFunction) -> CircleFunction:
    """Convolution with ``log(1/|z - w|)`` over the circle."""

    def symbol(n):
        out = np.zeros(n.size)
        out[1:] = np.pi / n[1:]
        return out

    return multiplier(g, symbol)


def derivative(f: CircleFunction, order=1) -> CircleFunction:
    half = f.n_grid // 2

    def symbol(n):
        m = (1j * n) ** order
        if order % 2:
            m[half] = 0.0
        return m

    return multiplier(f, symbol)


def harmonic_extension(f: CircleFunction, r, theta):
    """Poisson integral of ``f`` at the polar point ``(r, theta)``, ``0 <= r < 1``."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(r < 0) or np.any(r >= 1):
        raise ValueError("r must lie in [0, 1)")
    r, theta = np.broadcast_arrays(r, theta)
    rc = f.rcoeffs
    kmax = f.bandwidth()
    n = np.arange(kmax + 1)
    weights = np.full(kmax + 1, 2.0)
    weights[0] = 1.0
    if kmax == f.n_grid // 2:
        weights[-1] = 1.0
    cw = rc[: kmax + 1] * weights
    rr = r.ravel()[:, None] ** n[None, :]
    phase = np.exp(1j * np.outer(theta.ravel(), n))
    out = ((rr * phase) @ cw).real
    return out.reshape(r.shape) if r.ndim else float(out[0])


def _second_difference_weights(m):
    """Central weights of order 2m for the second derivative on a unit grid."""
    w = np.zeros(2 * m + 1)
    for k in range(1, m + 1):
        c = 2.0 * (-1) ** (k + 1) * factorial(m) ** 2 / (k * k * factorial(m - k) * factorial(m + k))
        w[m + k] = w[m - k] = c
    w[m] = -2.0 * w[m + 1 :].sum()
    return w


_FD_ORDER = 8  # half-width of the stencil used for the singular-node correction


def half_laplacian_pv(f: CircleFunction, theta):
    """Principal-value quadrature of ``(1/pi) p.v. int (f(z)-f(w))/|z-w|^2 dw``.

    Works directly on grid samples: the periodic trapezoid rule over the
    nodes ``w != z`` (symmetric pairs about the singular node) plus the
    singular-node value of the paired integrand, ``-f''(z)/2``, taken from a
    wide central finite difference. It never touches Fourier coefficients,
    so it is an independent check on :func:`half_laplacian`.
    """
    n = f.n_grid
    h = TWO_PI / n
    theta_arr = np.atleast_1d(np.asarray(theta, dtype=float))
    idx = np.rint(np.mod(theta_arr, TWO_PI) / h).astype(int) % n
    if np.max(np.abs(wrap_angle(theta_arr - idx * h))) > 1e-9:
        raise ValueError("half_laplacian_pv evaluates at grid nodes only")
    u = f.values
    k = np.arange(1, n)
    kernel = 1.0 / (4.0 * np.sin(np.pi * k / n) ** 2)
    m = min(_FD_ORDER, n // 4)
    fd = _second_difference_weights(m) / h**2
    offsets = np.arange(-m, m + 1)
    out = np.empty(idx.size)
    for i, j in enumerate(idx):
        diffs = u[j] - u[(j + k) % n]
        upp = fd @ u[(j + offsets) % n]
        out[i] = (h * (kernel @ diffs) - 0.5 * h * upp) / np.pi
    return out if np.ndim(theta) else float(out[0])


def lp_norm(f: CircleFunction, p) -> LpNorm:
    p = float(p)
    if p < 1:
        raise ValueError("p must be >= 1")
    a = np.abs(f.values)
    if np.isinf(p):
        return LpNorm(p, float(a.max()))
    return LpNorm(p, float((TWO_PI * np.mean(a**p)) ** (1.0 / p)))


def dirichlet_norm(f: CircleFunction) -> float:
    """``||grad H||_{L^2(disk)}`` for the harmonic extension ``H`` of ``f``.

    ``int_disk |grad H|^2 = 2*pi * sum_n |n| |c_n|^2``; for ``cos(theta)`` this
    is ``pi`` (the gradient of ``x`` over the unit disk).
    """
    c = f.coeffs
    n = np.abs(f.modes)
    return float(np.sqrt(TWO_PI * np.sum(n * np.abs(c) ** 2)))
