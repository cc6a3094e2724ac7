"""Approximate solution ``V + W + tau`` in bubble coordinates and its error.

In the pulled-back variable ``v = u o f + log|f'|`` the equation reads
``(-Delta)^{1/2} v = h_eps(f) e^v - 1``. The ansatz is

* ``V = -log h(xi)``, a constant, so that ``h(xi) e^V = 1``;
* ``W = green_log(h o f - h(xi)) e^V / pi``, solving
  ``(-Delta)^{1/2} W = (h o f - h(xi)) e^V - mean``;
* ``tau``, a small constant.

Writing ``v = V + W + tau + phi`` leaves ``L0 phi = E + L phi + N(phi)`` where
``L0 = (-Delta)^{1/2} - 1`` has kernel spanned by ``cos(theta - eta)`` and
``sin(theta - eta)``; the projections of the right-hand side onto that kernel
and onto constants give the reduced unknowns ``c1, c2, c0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .conformal import MobiusParam, pullback
from .errors import NonpositiveCurvature
from .spectral import TWO_PI, CircleFunction, green_log, grid, half_laplacian, lp_norm, required_grid

DEFAULT_NORMS = (1.5, 2.0, np.inf)


@dataclass(frozen=True, eq=False)
class AnsatzBundle:
    params: MobiusParam
    tau: float
    V: float
    W: CircleFunction
    h: CircleFunction
    k: CircleFunction
    epsilon: float
    h_xi: float
    hf: CircleFunction = field(repr=False)
    kf: CircleFunction = field(repr=False)

    @property
    def n_grid(self):
        return self.W.n_grid

    @property
    def g(self) -> CircleFunction:
        """``h o f - h(xi)``."""
        return self.hf - self.h_xi

    @property
    def heps_f(self) -> CircleFunction:
        return self.hf + self.epsilon * self.kf

    @property
    def W_mean(self):
        return self.W.mean()


@dataclass(frozen=True, eq=False)
class ResidualReport:
    E: CircleFunction
    norms: list
    split: tuple
    split_norms: list

    def norm(self, p):
        for q, v in self.norms:
            if q == p:
                return v
        return lp_norm(self.E, p).value


def build_ansatz(h: CircleFunction, k: CircleFunction, p: MobiusParam, tau=0.0, epsilon=0.0, n_grid=None) -> AnsatzBundle:
    """Assemble ``V``, ``W`` and the pulled-back curvatures on a resolving grid."""
    n_grid = required_grid(p.delta) if n_grid is None else int(n_grid)
    h_xi = float(h.evaluate(p.eta))
    if h_xi <= 0:
        raise NonpositiveCurvature("h(xi) must be positive", h_xi=h_xi, eta=p.eta)
    V = -np.log(h_xi)
    hf = pullback(h, p, n_grid)
    kf = pullback(k, p, n_grid)
    W = green_log(hf - h_xi) * (np.exp(V) / np.pi)
    return AnsatzBundle(params=p, tau=float(tau), V=V, W=W, h=h, k=k, epsilon=float(epsilon), h_xi=h_xi, hf=hf, kf=kf)


def w_equation_residual(b: AnsatzBundle) -> float:
    """Sup-norm defect of the equation defining ``W``."""
    rhs = b.g * np.exp(b.V)
    rhs = rhs - rhs.mean()
    return float(np.max(np.abs(half_laplacian(b.W).values - rhs.values)))


def error_parts(b: AnsatzBundle):
    """The three pieces of the error: curvature mismatch, perturbation, mean defect."""
    ewt = np.exp(b.W.values + b.tau)
    e1 = CircleFunction(b.hf.values * (ewt - 1.0) / b.h_xi)
    e2 = CircleFunction(b.epsilon * b.kf.values * ewt / b.h_xi)
    e3 = CircleFunction.constant(b.g.integral() / (TWO_PI * b.h_xi), b.n_grid)
    return e1, e2, e3


def error_term(b: AnsatzBundle) -> CircleFunction:
    """``(h_eps(f) e^{W+tau} - h(f)) e^V + (1/2pi) int (h(f) - h(xi)) e^V``."""
    ewt = np.exp(b.W.values + b.tau)
    vals = (b.heps_f.values * ewt - b.hf.values) * np.exp(b.V) + b.g.integral() * np.exp(b.V) / TWO_PI
    return CircleFunction(vals)


def residual_E(b: AnsatzBundle, ps=DEFAULT_NORMS) -> ResidualReport:
    E = error_term(b)
    parts = error_parts(b)
    norms = [(p, lp_norm(E, p).value) for p in ps]
    split_norms = [[(p, lp_norm(part, p).value) for p in ps] for part in parts]
    return ResidualReport(E=E, norms=norms, split=parts, split_norms=split_norms)


def linear_coefficient(b: AnsatzBundle) -> CircleFunction:
    """Multiplier of the small linear term: ``(h_eps(f) e^{W+tau} - h(xi)) e^V``."""
    return CircleFunction((b.heps_f.values * np.exp(b.W.values + b.tau) - b.h_xi) * np.exp(b.V))


def linear_L(b: AnsatzBundle, phi: CircleFunction) -> CircleFunction:
    return linear_coefficient(b) * phi


def nonlinear_N(b: AnsatzBundle, phi: CircleFunction) -> CircleFunction:
    x = phi.values
    # expm1(x) - x loses nothing to cancellation for small x
    return CircleFunction(b.heps_f.values * np.exp(b.V + b.W.values + b.tau) * (np.expm1(x) - x))


def L0(phi: CircleFunction) -> CircleFunction:
    """``(-Delta)^{1/2} phi - h(xi) e^V phi`` with ``h(xi) e^V = 1``."""
    return half_laplacian(phi) - phi


def kernel_Z(i, p: MobiusParam, h_xi, n_grid) -> CircleFunction:
    """Kernel functions ``<z, xi>/(4 h(xi)^2)`` (i=1) and ``<z, xi_perp>/(4 h(xi)^2)`` (i=2).

    ``h_xi`` may be given as the curvature function itself, in which case
    it is evaluated at ``xi``.
    """
    if isinstance(h_xi, CircleFunction):
        h_xi = float(h_xi.evaluate(p.eta))
    if h_xi <= 0:
        raise NonpositiveCurvature("h(xi) must be positive", h_xi=h_xi)
    phase = grid(n_grid) - p.eta
    if i == 1:
        vals = np.cos(phase)
    elif i == 2:
        vals = np.sin(phase)
    else:
        raise ValueError("kernel index must be 1 or 2")
    return CircleFunction(vals / (4.0 * h_xi**2))


def kernel_weight(b: AnsatzBundle) -> float:
    """``h(xi) e^{V/2}``, the weight multiplying ``c1 Z1 + c2 Z2`` in the projected problem."""
    return b.h_xi * np.exp(0.5 * b.V)


@dataclass(frozen=True)
class Projections:
    c0: float
    c1: float
    c2: float
    int_rhs: float
    int_rhs_z1: float
    int_rhs_z2: float
    norm_z1: float
    norm_z2: float


def projections(b: AnsatzBundle, phi: CircleFunction | None = None) -> Projections:
    """Multipliers ``c0, c1, c2`` implied by the projection identities.

    ``c_i int h(xi) e^{V/2} Z_i^2 = -int (E + L phi + N(phi)) Z_i`` and
    ``2 pi c0 = -int (E + L phi + N(phi))``. With ``phi`` omitted only the
    error term contributes.
    """
    rhs = error_term(b)
    if phi is not None:
        rhs = rhs + linear_L(b, phi) + nonlinear_N(b, phi)
    z1 = kernel_Z(1, b.params, b.h_xi, b.n_grid)
    z2 = kernel_Z(2, b.params, b.h_xi, b.n_grid)
    w = kernel_weight(b)
    n1 = (z1 * z1).integral() * w
    n2 = (z2 * z2).integral() * w
    i0 = rhs.integral()
    i1 = (rhs * z1).integral()
    i2 = (rhs * z2).integral()
    return Projections(
        c0=-i0 / TWO_PI,
        c1=-i1 / n1,
        c2=-i2 / n2,
        int_rhs=i0,
        int_rhs_z1=i1,
        int_rhs_z2=i2,
        norm_z1=n1,
        norm_z2=n2,
    )
