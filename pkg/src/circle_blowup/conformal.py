"""Möbius maps of the disk that generate the bubbles.

``f(z) = (z + (1-delta) xi) / (1 + (1-delta) conj(xi) z)`` with ``xi = exp(i eta)``.
On the circle, ``f`` fixes ``xi`` and ``-xi``; it compresses everything
except a window of width ~delta around ``-xi`` into a neighbourhood of
``xi``. Functions pulled back by ``f`` therefore develop a layer at
``-xi``, whereas the bubble profile in the original variable spikes at ``xi``.

Inner products with ``xi`` are ``<z, xi> = cos(theta - eta)`` and
``<z, xi_perp> = sin(theta - eta)`` (``xi_perp = i xi``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResolutionTooCoarse
from .spectral import CircleFunction, grid, wrap_angle


@dataclass(frozen=True)
class MobiusParam:
    delta: float
    eta: float = 0.0

    def __post_init__(self):
        d = float(self.delta)
        if not (0.0 < d <= 1.0) or not np.isfinite(d):
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "eta", float(wrap_angle(float(self.eta))))

    @property
    def xi(self) -> complex:
        return complex(np.exp(1j * self.eta))

    @property
    def a(self) -> float:
        return 1.0 - self.delta

    @property
    def center(self) -> complex:
        """Interior point ``(1 - delta) xi`` mapped to by the disk centre."""
        return self.a * self.xi


def _z(theta):
    return np.exp(1j * np.asarray(theta, dtype=float))


def _out(x, theta):
    return x if np.ndim(theta) else float(x)


def mobius_map(p: MobiusParam, theta):
    """Angle of ``f(exp(i theta))``, in (-pi, pi]."""
    z = _z(theta)
    w = (z + p.center) / (1.0 + np.conj(p.center) * z)
    return _out(wrap_angle(np.angle(w)), theta)


def mobius_inverse(p: MobiusParam, theta):
    w = _z(theta)
    z = (w - p.center) / (1.0 - np.conj(p.center) * w)
    return _out(wrap_angle(np.angle(z)), theta)


def mobius_deriv_abs(p: MobiusParam, theta):
    """``|f'(exp(i theta))| = delta (2 - delta) / |1 + (1-delta) conj(xi) z|^2``."""
    z = _z(theta)
    d = p.delta
    return _out(d * (2.0 - d) / np.abs(1.0 + np.conj(p.center) * z) ** 2, theta)


def inverse_deriv_abs(p: MobiusParam, theta):
    """``|(f^{-1})'(exp(i theta))| = 1 / |f'(f^{-1}(.))|``."""
    w = _z(theta)
    d = p.delta
    return _out(d * (2.0 - d) / np.abs(1.0 - np.conj(p.center) * w) ** 2, theta)


def log_deriv_abs(p: MobiusParam, n_grid) -> CircleFunction:
    """``log|f'|`` sampled on the grid."""
    z = _z(grid(n_grid))
    d = p.delta
    return CircleFunction(np.log(d * (2.0 - d)) - 2.0 * np.log(np.abs(1.0 + np.conj(p.center) * z)))


def theta_fn(p: MobiusParam, theta):
    """First-order shape of ``h(f(z)) - h(xi)`` in units of ``delta h'(xi)``."""
    phi = np.asarray(theta, dtype=float) - p.eta
    a = p.a
    return _out(2.0 * np.sin(phi) / (1.0 + a * a + 2.0 * a * np.cos(phi)), theta)


def check_resolution(n_grid, delta):
    if n_grid < 64.0 / delta:
        raise ResolutionTooCoarse(
            "grid cannot resolve the layer of the pulled-back function",
            n_grid=n_grid,
            delta=delta,
        )


def pullback(f: CircleFunction, p: MobiusParam, n_grid=None) -> CircleFunction:
    """Sample ``f(f_{delta,xi}(exp(i theta)))`` on a grid of ``n_grid`` nodes."""
    n_grid = f.n_grid if n_grid is None else int(n_grid)
    check_resolution(n_grid, p.delta)
    return CircleFunction(f.evaluate(mobius_map(p, grid(n_grid))))


def pushforward(g: CircleFunction, p: MobiusParam, n_grid=None) -> CircleFunction:
    """Sample ``g(f^{-1}(exp(i theta)))``: undo :func:`pullback`."""
    n_grid = g.n_grid if n_grid is None else int(n_grid)
    return CircleFunction(g.evaluate(mobius_inverse(p, grid(n_grid))))


def bubble_values(theta, delta, eta, tau, h1):
    """``-log h1 - log|f'(f^{-1}(exp(i theta)))| + tau`` in closed form."""
    a = 1.0 - delta
    phi = np.asarray(theta, dtype=float) - eta
    mod2 = 1.0 - 2.0 * a * np.cos(phi) + a * a
    return -np.log(h1) + np.log(delta * (2.0 - delta)) - np.log(mod2) + tau


def bubble_jacobian(theta, delta, eta):
    """Partial derivatives of :func:`bubble_values` in (delta, eta, tau)."""
    a = 1.0 - delta
    phi = np.asarray(theta, dtype=float) - eta
    mod2 = 1.0 - 2.0 * a * np.cos(phi) + a * a
    # d(mod2)/da = -2 cos(phi) + 2a, and da/ddelta = -1
    d_delta = (2.0 - 2.0 * delta) / (delta * (2.0 - delta)) + (2.0 * a - 2.0 * np.cos(phi)) / mod2
    d_eta = 2.0 * a * np.sin(phi) / mod2
    return np.stack([d_delta, d_eta, np.ones_like(phi)], axis=-1)


def bubble(p: MobiusParam, h1, tau=0.0, n_grid=1024) -> CircleFunction:
    """Leading blow-up profile in the original variable; peaks at ``xi``."""
    if h1 <= 0:
        raise ValueError("h1 must be positive")
    return CircleFunction(bubble_values(grid(n_grid), p.delta, p.eta, tau, h1))
