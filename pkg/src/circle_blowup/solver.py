"""Solving ``(-Delta)^{1/2} u = h_eps e^u - 1`` and following the blow-up family.

Collocation is on the uniform grid: the half-Laplacian becomes a dense
symmetric circulant matrix and the Jacobian is that matrix minus the
diagonal of ``h_eps e^u``. Close to blow-up the Jacobian has two small
eigenvalues (the Möbius directions), so linear solves are direct.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from . import ansatz
from .conformal import (
    MobiusParam,
    bubble,
    bubble_jacobian,
    bubble_values,
    inverse_deriv_abs,
    log_deriv_abs,
    mobius_deriv_abs,
    mobius_inverse,
    mobius_map,
    pushforward,
)
from .errors import BlowupError, FitDiverged, FixedPointDiverged, NoConvergence, SingularJacobian, WrongBranch
from .hypothesis import HypothesisReport
from .rates import slope_through_origin
from .reduction import ReducedSystem, predict_params
from .spectral import TWO_PI, CircleFunction, dirichlet_norm, grid, half_laplacian, lp_norm, required_grid, wrap_angle

log = logging.getLogger(__name__)

MAX_HALVINGS = 30
STEP_NEWTON_LIMIT = 12
MAX_BISECTIONS = 6


@dataclass(frozen=True, eq=False)
class SolveRecord:
    epsilon: float
    u: CircleFunction
    fitted: MobiusParam | None
    tau_fit: float
    fit_residual: float
    newton_iters: int
    final_residual_inf: float
    mass: float
    jacobian_condition: float

    @property
    def max_u(self):
        return self.u.max()

    def row(self):
        f = self.fitted
        return {
            "epsilon": self.epsilon,
            "delta_fit": f.delta if f else float("nan"),
            "eta_fit": f.eta if f else float("nan"),
            "tau_fit": self.tau_fit,
            "max_u": self.max_u,
            "mass": self.mass,
            "iters": self.newton_iters,
            "cond": self.jacobian_condition,
        }


@dataclass(frozen=True, eq=False)
class ContinuationTrace:
    records: list
    rate_d: float
    rate_s: float
    d0: float = float("nan")
    s0: float = float("nan")
    warm_starts: list = field(default_factory=list)


@lru_cache(maxsize=4)
def _half_laplacian_matrix(n_grid):
    n = np.abs(np.fft.fftfreq(n_grid, 1.0 / n_grid))
    col = np.real(np.fft.ifft(n))
    mat = sla.circulant(col)
    mat.setflags(write=False)
    return mat


def pde_residual(h_eps: CircleFunction, u: CircleFunction) -> np.ndarray:
    return half_laplacian(u).values - h_eps.values * np.exp(u.values) + 1.0


def _factor(jac):
    anorm = np.linalg.norm(jac, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        try:
            lu, piv = sla.lu_factor(jac, check_finite=False)
        except (sla.LinAlgWarning, ValueError, np.linalg.LinAlgError) as exc:
            raise SingularJacobian(str(exc)) from exc
    rcond, info = lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or not rcond > 1e-15:
        raise SingularJacobian("Jacobian is numerically singular", rcond=rcond)
    return (lu, piv), 1.0 / rcond


def newton_solve(h_eps: CircleFunction, u0: CircleFunction, tol=1e-10, max_iters=30, epsilon=0.0, h1=None, fit=True) -> SolveRecord:
    """Damped Newton on ``R(u) = (-Delta)^{1/2} u - h_eps e^u + 1``.

    Steps are halved (at most 30 times) until the sup norm of the residual
    decreases. The returned record carries a bubble fit of the solution;
    ``h1`` is the curvature used by the fit (default: ``h_eps`` at the
    maximum of ``u``).
    """
    if h_eps.n_grid != u0.n_grid:
        h_eps = h_eps.resample(u0.n_grid)
    D = _half_laplacian_matrix(u0.n_grid)
    u = u0.values.copy()
    hv = h_eps.values
    res = pde_residual(h_eps, u0)
    rnorm = float(np.max(np.abs(res)))
    cond = float("nan")
    iters = 0
    while rnorm > tol:
        if iters >= max_iters:
            raise NoConvergence("Newton iteration limit reached", iters=iters, residual=rnorm, epsilon=epsilon)
        jac = D - np.diag(hv * np.exp(u))
        factors, cond = _factor(jac)
        du = sla.lu_solve(factors, -res, check_finite=False)
        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = u + lam * du
            with np.errstate(over="ignore"):
                trial_res = pde_residual(h_eps, CircleFunction(trial)) if np.all(np.isfinite(np.exp(trial))) else None
            if trial_res is not None and np.max(np.abs(trial_res)) < rnorm:
                break
            lam *= 0.5
        else:
            raise NoConvergence("line search failed to decrease the residual", iters=iters, residual=rnorm, epsilon=epsilon)
        u, res = trial, trial_res
        rnorm = float(np.max(np.abs(res)))
        iters += 1
        log.debug("newton eps=%g it=%d |R|=%.3e lambda=%g", epsilon, iters, rnorm, lam)
    if iters == 0:
        # the start already solves the equation; its Jacobian may be exactly
        # singular (Möbius family at h = const), so only report the estimate
        try:
            _, cond = _factor(D - np.diag(hv * np.exp(u)))
        except SingularJacobian:
            cond = float("inf")
    sol = CircleFunction(u)
    mass = TWO_PI * float(np.mean(hv * np.exp(u)))
    fitted, tau_fit, fit_res = None, float("nan"), float("nan")
    if fit:
        if h1 is None:
            h1 = float(hv[int(np.argmax(u))])
        try:
            fitted, tau_fit, fit_res = fit_bubble(sol, h1)
        except FitDiverged as exc:
            log.warning("bubble fit failed at eps=%g: %s", epsilon, exc)
    return SolveRecord(
        epsilon=float(epsilon),
        u=sol,
        fitted=fitted,
        tau_fit=tau_fit,
        fit_residual=fit_res,
        newton_iters=iters,
        final_residual_inf=rnorm,
        mass=mass,
        jacobian_condition=float(cond),
    )


def fit_bubble(u: CircleFunction, h1, max_iters=50):
    """Gauss-Newton fit of ``bubble(delta, eta, tau; h1)`` to ``u``.

    Starts from ``eta = argmax u`` and the height relation
    ``delta = 2 exp(-max u) / h1``. ``delta`` is kept in ``(0, 1]``.
    Returns ``(MobiusParam, tau, L2 misfit)``.
    """
    if h1 <= 0:
        raise ValueError("h1 must be positive")
    t = u.theta
    j = int(np.argmax(u.values))
    x = np.array([min(1.0, 2.0 * np.exp(-u.values[j]) / h1), float(wrap_angle(t[j])), 0.0])

    def resid(x):
        return bubble_values(t, x[0], x[1], x[2], h1) - u.values

    r = resid(x)
    cost = float(r @ r)
    accepted = 0
    for _ in range(max_iters):
        J = bubble_jacobian(t, x[0], x[1])
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        lam = 1.0
        improved = False
        while lam > 1e-12:
            trial = x + lam * step
            trial[0] = min(trial[0], 1.0)
            if trial[0] > 0:
                rt = resid(trial)
                ct = float(rt @ rt)
                if ct < cost:
                    improved = True
                    break
            lam *= 0.5
        if not improved:
            break
        moved = np.max(np.abs(trial - x))
        x, r, cost = trial, rt, ct
        accepted += 1
        if moved < 1e-15 * max(1.0, np.max(np.abs(x))):
            break
    misfit = float(np.sqrt(TWO_PI * cost / u.n_grid))
    scale = float(np.sqrt(TWO_PI * np.mean(u.values**2))) + 1.0
    if accepted == 0 and misfit > 1e-10 * scale and x[0] < 1.0:
        raise FitDiverged("Gauss-Newton could not reduce the misfit", misfit=misfit)
    if not np.all(np.isfinite(x)):
        raise FitDiverged("non-finite bubble parameters")
    return MobiusParam(x[0], x[1]), float(x[2]), misfit


def profile_misfit(record: SolveRecord, h1, n_grid=None) -> float:
    """``|| u(f(z)) + log|f'(z)| + log h1 - tau ||_{L^2}`` in the fitted bubble frame."""
    p = record.fitted
    if p is None:
        raise ValueError("record has no fitted bubble")
    n_grid = required_grid(p.delta, floor=record.u.n_grid) if n_grid is None else n_grid
    t = grid(n_grid)
    vals = record.u.evaluate(mobius_map(p, t)) + log_deriv_abs(p, n_grid).values + np.log(h1) - record.tau_fit
    return lp_norm(CircleFunction(vals), 2).value


def initial_guess(h: CircleFunction, k: CircleFunction, p: MobiusParam, tau, epsilon, n_grid) -> CircleFunction:
    """Ansatz pushed back to the original variable: bubble plus ``W o f^{-1}``."""
    b = ansatz.build_ansatz(h, k, p, tau, epsilon)
    h1 = float(h.evaluate(p.eta))
    return bubble(p, h1, tau, n_grid) + pushforward(b.W, p, n_grid)


def rescale(u: CircleFunction, old: MobiusParam, new: MobiusParam) -> CircleFunction:
    """Move a bubble-shaped solution from scale ``old`` to scale ``new``.

    Uses ``u o T + log|T'|`` with ``T = f_old o f_new^{-1}``, which maps the
    exact bubble of ``old`` onto the exact bubble of ``new``.
    """
    t = grid(u.n_grid)
    pre = mobius_inverse(new, t)
    T = mobius_map(old, pre)
    logdT = np.log(mobius_deriv_abs(old, pre)) + np.log(inverse_deriv_abs(new, t))
    return CircleFunction(u.evaluate(T) + logdT)


def continuation(h, k, rs: ReducedSystem, r: HypothesisReport | None, eps_list, n_grid=2048, tol=1e-10, max_iters=STEP_NEWTON_LIMIT):
    """Follow the blow-up family through ``eps_list`` (decreasing ``|eps|``).

    The first solve starts from the ansatz at the predicted parameters; each
    later one from the previous solution moved to the predicted scale. A
    step whose Newton solve needs more than ``max_iters`` iterations is
    bisected.
    """
    eps_list = [float(e) for e in eps_list]
    if not eps_list:
        raise ValueError("eps_list is empty")
    for e in eps_list:
        if not rs.d0 * e > 0:
            raise WrongBranch("epsilon lies on the wrong side for this branch", epsilon=e, d0=rs.d0)
    mags = np.abs(eps_list)
    if np.any(np.diff(mags) >= 0):
        raise ValueError("|eps| must be strictly decreasing")
    h = h.resample(n_grid) if h.n_grid != n_grid else h
    k = k.resample(n_grid) if k.n_grid != n_grid else k
    h1 = h.at_zero() if r is None else r.h_at_1

    def solve(eps, u0):
        return newton_solve(h + eps * k, u0, tol=tol, max_iters=max_iters, epsilon=eps, h1=h1)

    def annotate(exc, eps):
        exc.context.setdefault("epsilon", eps)
        return exc

    records = []
    warm = []
    eps0 = eps_list[0]
    p, tau = predict_params(rs, eps0, r)
    try:
        rec = solve(eps0, initial_guess(h, k, p, tau, eps0, n_grid))
    except BlowupError as exc:
        raise annotate(exc, eps0)
    records.append(rec)

    prev = rec
    for eps in eps_list[1:]:
        rec = _advance(prev, eps, rs, solve, warm, depth=0)
        records.append(rec)
        prev = rec

    eps_arr = np.array([rec.epsilon for rec in records])
    deltas = np.array([rec.fitted.delta for rec in records])
    etas = np.array([rec.fitted.eta for rec in records])
    return ContinuationTrace(
        records=records,
        rate_d=slope_through_origin(eps_arr, deltas),
        rate_s=slope_through_origin(eps_arr, etas),
        d0=rs.d0,
        s0=rs.s0,
        warm_starts=warm,
    )


def _advance(prev: SolveRecord, eps, rs, solve, warm, depth):
    if prev.fitted is None:
        raise FitDiverged("cannot continue from a record without a bubble fit", epsilon=prev.epsilon)
    ratio = eps / prev.epsilon
    old = prev.fitted
    new = MobiusParam(min(1.0, old.delta * ratio), old.eta + rs.s0 * (eps - prev.epsilon))
    u0 = rescale(prev.u, old, new)
    try:
        return solve(eps, u0)
    except (NoConvergence, SingularJacobian) as exc:
        if depth >= MAX_BISECTIONS:
            exc.context.setdefault("epsilon", eps)
            raise
        mid = 0.5 * (prev.epsilon + eps)
        log.info("bisecting continuation step %g -> %g at %g", prev.epsilon, eps, mid)
        mid_rec = _advance(prev, mid, rs, solve, warm, depth + 1)
        warm.append(mid_rec)
        return _advance(mid_rec, eps, rs, solve, warm, depth + 1)


# -- projected problem ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProjectedSolution:
    phi: CircleFunction
    c0: float
    c1: float
    c2: float
    iterations: int
    increments: list


def _kernel_solve(rhs: CircleFunction, p: MobiusParam, h_xi, weight):
    """Solve ``L0 phi = rhs + c0 + weight (c1 Z1 + c2 Z2)`` with ``phi`` orthogonal to 1, Z1, Z2.

    ``L0`` acts as ``|n| - 1`` on mode ``n``; modes 0 and 1 of ``phi`` are
    pinned to zero by the constraints, so the multipliers must cancel those
    modes of ``rhs``.
    """
    n_grid = rhs.n_grid
    rc = np.fft.rfft(rhs.values) / n_grid
    n = np.arange(rc.size)
    inv = np.zeros(rc.size)
    inv[2:] = 1.0 / (n[2:] - 1.0)
    phi = CircleFunction(np.fft.irfft(rc * inv * n_grid, n=n_grid))
    c0 = -rc[0].real
    # mode-1 part of rhs is 2 Re(r1 e^{i theta}) = A cos(theta - eta) + B sin(theta - eta)
    rot = rc[1] * np.exp(1j * p.eta)
    A, B = 2.0 * rot.real, -2.0 * rot.imag
    scale = weight / (4.0 * h_xi**2)
    return phi, float(c0), float(-A / scale), float(-B / scale)


def solve_projected(b: ansatz.AnsatzBundle, tol=1e-12, max_iters=20, nonlinear=True) -> ProjectedSolution:
    """Fixed point for ``L0 phi = E + L phi + N(phi) + c0 + h(xi) e^{V/2}(c1 Z1 + c2 Z2)``.

    Plain Picard iteration; each sweep inverts ``L0`` on the complement of
    the kernel exactly. Raises :class:`FixedPointDiverged` when the
    increments stop shrinking or ``max_iters`` sweeps do not reach ``tol``
    (relative, Dirichlet norm).
    """
    E = ansatz.error_term(b)
    coef = ansatz.linear_coefficient(b)
    weight = ansatz.kernel_weight(b)
    phi = CircleFunction.constant(0.0, b.n_grid)
    incs = []
    for it in range(1, max_iters + 1):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                rhs = E + coef * phi
                if nonlinear:
                    rhs = rhs + ansatz.nonlinear_N(b, phi)
        except ValueError as exc:
            # CircleFunction rejects the non-finite values of an overflowing iterate
            raise FixedPointDiverged("projected iteration overflowed", iterations=it) from exc
        new, *c = _kernel_solve(rhs, b.params, b.h_xi, weight)
        inc = dirichlet_norm(new - phi)
        incs.append(inc)
        phi = new
        size = dirichlet_norm(phi)
        if inc <= tol * max(size, 1e-300) or size == 0.0:
            return ProjectedSolution(phi, *c, iterations=it, increments=incs)
        if len(incs) >= 3 and incs[-1] > incs[-2] > incs[-3]:
            break
    raise FixedPointDiverged("projected problem did not contract", iterations=len(incs), increment=incs[-1])


def bordered_system(b: ansatz.AnsatzBundle):
    """Dense form of the linear projected problem (no ``N(phi)``).

    Unknowns ``(phi_0..phi_{N-1}, c0, c1, c2)``; the last three rows impose
    ``int phi = int phi Z1 = int phi Z2 = 0``. Returns ``(matrix, rhs)``.
    """
    n = b.n_grid
    D = _half_laplacian_matrix(n)
    coef = ansatz.linear_coefficient(b).values
    z1 = ansatz.kernel_Z(1, b.params, b.h_xi, n).values
    z2 = ansatz.kernel_Z(2, b.params, b.h_xi, n).values
    w = ansatz.kernel_weight(b)
    M = np.zeros((n + 3, n + 3))
    M[:n, :n] = D - np.eye(n) - np.diag(coef)
    M[:n, n] = -1.0
    M[:n, n + 1] = -w * z1
    M[:n, n + 2] = -w * z2
    M[n, :n] = 1.0
    M[n + 1, :n] = z1
    M[n + 2, :n] = z2
    rhs = np.zeros(n + 3)
    rhs[:n] = ansatz.error_term(b).values
    return M, rhs
