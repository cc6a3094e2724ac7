"""Standing assumptions on the curvature data at the blow-up point ``theta = 0``.

The checks are:

* stationarity: ``h(1) > 0`` and ``h'(1) = (-Delta)^{1/2} h(1) = 0``;
* non-degeneracy: ``(h'' - 2 Q(h) / (pi^2 h(1))) h'' + ((-Delta)^{1/2} h')^2 != 0``;
* transversality: ``h'' (-Delta)^{1/2} k - k' (-Delta)^{1/2} h' != 0``;

all evaluated at ``theta = 0``. ``Q(h)`` is the log-kernel energy of
``hhat = (h - h(1)) / |z - 1|^2`` and is computed two independent ways.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .errors import HypothesisH1Violated, NotStationary
from .spectral import CircleFunction, derivative, green_log

log = logging.getLogger(__name__)

TOL = 1e-8


@dataclass(frozen=True)
class HypothesisReport:
    h_at_1: float
    hp_at_1: float
    hpp_at_1: float
    flap_h_at_1: float
    flap_hp_at_1: float
    k_at_1: float
    kp_at_1: float
    flap_k_at_1: float
    q_of_h: float
    nondeg_value: float
    cond_value: float
    h1_satisfied: bool
    nondeg_satisfied: bool
    cond_satisfied: bool

    def to_dict(self):
        return {k: (bool(v) if isinstance(v, (bool, np.bool_)) else float(v)) for k, v in asdict(self).items()}

    @property
    def all_satisfied(self):
        return self.h1_satisfied and self.nondeg_satisfied and self.cond_satisfied

    def failed(self):
        names = [("h1", self.h1_satisfied), ("nondeg", self.nondeg_satisfied), ("cond", self.cond_satisfied)]
        return [name for name, ok in names if not ok]


def nondeg_expression(hpp, q, h1, flap_hp):
    return (hpp - (2.0 / np.pi**2) * q / h1) * hpp + flap_hp**2


def cond_expression(hpp, flap_k, kp, flap_hp):
    return hpp * flap_k - kp * flap_hp


def _at_zero(f: CircleFunction) -> float:
    # the grid contains theta = 0 exactly
    return f.at_zero()


def _symbol_at_zero(f: CircleFunction, symbol) -> float:
    """``sum_n symbol(n) c_n``: an operator applied to ``f`` and read at ``theta = 0``.

    Coefficients at roundoff level are dropped first; otherwise symbols that
    grow like ``n^2`` amplify FFT noise from the high modes.
    """
    c = f.coeffs.copy()
    c[np.abs(c) < 1e-14 * np.abs(c).max()] = 0.0
    return float(np.real(np.sum(symbol(f.modes.astype(float)) * c)))


def point_derivatives(h: CircleFunction, k: CircleFunction, tol=TOL, strict=True) -> dict:
    """Pointwise data of ``h`` and ``k`` at ``theta = 0``.

    Raises :class:`NotStationary` when ``strict`` and the stationarity part
    of the hypothesis fails; otherwise the failure is only recorded in
    ``h1_satisfied``.
    """
    half = h.n_grid // 2

    def d1(n):
        return np.where(np.abs(n) == half, 0.0, 1j * n)

    data = {
        "h_at_1": _at_zero(h),
        "hp_at_1": _symbol_at_zero(h, d1),
        "hpp_at_1": _symbol_at_zero(h, lambda n: -n * n),
        "flap_h_at_1": _symbol_at_zero(h, np.abs),
        "flap_hp_at_1": _symbol_at_zero(h, lambda n: np.abs(n) * d1(n)),
        "k_at_1": _at_zero(k),
        "kp_at_1": _symbol_at_zero(k, d1),
        "flap_k_at_1": _symbol_at_zero(k, np.abs),
    }
    ok = data["h_at_1"] > 0 and abs(data["hp_at_1"]) < tol and abs(data["flap_h_at_1"]) < tol
    data["h1_satisfied"] = bool(ok)
    if abs(data["k_at_1"]) > tol:
        log.warning("k(1) = %.3g is not zero; the reduction assumes k(1) = 0", data["k_at_1"])
    if strict and not ok:
        raise NotStationary(
            "h is not admissible at theta = 0",
            h=data["h_at_1"],
            hp=data["hp_at_1"],
            flap_h=data["flap_h_at_1"],
        )
    return data


def hhat(h: CircleFunction, hpp=None) -> CircleFunction:
    """``(h(z) - h(1)) / |z - 1|^2`` with the removable value ``h''(1)/2`` at ``z = 1``."""
    if hpp is None:
        hpp = _symbol_at_zero(h, lambda n: -n * n)
    t = h.theta
    vals = np.empty(h.n_grid)
    dist2 = 2.0 - 2.0 * np.cos(t[1:])
    vals[1:] = (h.values[1:] - h.values[0]) / dist2
    vals[0] = 0.5 * hpp
    return CircleFunction(vals)


def _check_bounded(h: CircleFunction, tol=TOL):
    # An unbounded hhat blows up like 1/theta near 0; doubling the grid then
    # doubles the value at the first off-zero node.
    fine = h.resample(2 * h.n_grid)
    hp = abs(_at_zero(derivative(h)))
    near = abs(hhat(h).values[1])
    near_fine = abs(hhat(fine).values[1])
    if hp > tol and near_fine > 1.5 * near:
        raise HypothesisH1Violated("hhat is unbounded near theta = 0", hp=hp, growth=near_fine / max(near, 1e-300))


def q_form_spectral(h: CircleFunction, check=True) -> float:
    """``Q(h) = int hhat * green_log(hhat) = 2 pi^2 sum_{n != 0} |hhat_n|^2 / |n|``."""
    if check:
        _check_bounded(h)
    hh = hhat(h)
    return float(np.sum(hh.values * green_log(hh).values) * (2.0 * np.pi / h.n_grid))


def q_form_quadrature(h: CircleFunction, n_quad=1024, check=True) -> float:
    """Direct tensor-product quadrature of the double log-kernel integral.

    The kernel singularity is handled by subtracting ``hhat(z)`` inside the
    inner integral (legitimate because ``int log(1/|z-w|) dw = 0``); the
    remaining integrand vanishes on the diagonal, which is then skipped.
    """
    if check:
        _check_bounded(h)
    if h.n_grid != n_quad:
        h = h.resample(n_quad)
    hh = hhat(h).values
    n = hh.size
    dt = 2.0 * np.pi / n
    k = np.arange(1, n)
    kern = -np.log(2.0 * np.abs(np.sin(np.pi * k / n)))
    total = 0.0
    for j in range(n):
        inner = kern @ (hh[(j + k) % n] - hh[j])
        total += hh[j] * inner
    return float(total * dt * dt)


def check_nondeg(report: HypothesisReport | dict, tol=TOL):
    r = report if isinstance(report, dict) else report.to_dict()
    value = nondeg_expression(r["hpp_at_1"], r["q_of_h"], r["h_at_1"], r["flap_hp_at_1"])
    return float(value), bool(abs(value) > tol)


def check_transversality(report: HypothesisReport | dict, tol=TOL):
    r = report if isinstance(report, dict) else report.to_dict()
    value = cond_expression(r["hpp_at_1"], r["flap_k_at_1"], r["kp_at_1"], r["flap_hp_at_1"])
    return float(value), bool(abs(value) > tol)


def evaluate(h: CircleFunction, k: CircleFunction, tol=TOL, strict=False) -> HypothesisReport:
    """Fill a complete :class:`HypothesisReport`."""
    data = point_derivatives(h, k, tol=tol, strict=strict)
    if data["h1_satisfied"]:
        data["q_of_h"] = q_form_spectral(h, check=False)
    else:
        data["q_of_h"] = float("nan")
    if data["h_at_1"] > 0 and np.isfinite(data["q_of_h"]):
        nondeg, nondeg_ok = check_nondeg(data, tol)
    else:
        nondeg, nondeg_ok = float("nan"), False
    cond, cond_ok = check_transversality(data, tol)
    return HypothesisReport(
        nondeg_value=nondeg,
        cond_value=cond,
        nondeg_satisfied=nondeg_ok,
        cond_satisfied=cond_ok,
        **data,
    )


def nondeg_shift(report: HypothesisReport, margin=1e-2):
    """Constant ``c`` such that ``h + c`` meets the non-degeneracy test by ``margin``.

    Returns ``0.0`` when the report already passes. Adding a constant leaves
    ``h''``, ``Q(h)`` and the half-Laplacian data untouched and only moves
    ``h(1)``, so the shifted value is available in closed form. Raises
    ``ValueError`` when no constant can help (``h''(1) = 0`` and
    ``(-Delta)^{1/2} h'(1) = 0``).
    """
    if report.nondeg_satisfied:
        return 0.0
    hpp, q, h1, fhp = report.hpp_at_1, report.q_of_h, report.h_at_1, report.flap_hp_at_1
    if abs(hpp) < TOL or q <= 0:
        raise ValueError("non-degeneracy cannot be restored by a constant shift")
    # solve nondeg(h1 + c) = target with target of the sign of hpp^2 + fhp^2
    target = hpp * hpp + fhp * fhp
    target = margin if target > margin else -margin
    new_h1 = 2.0 * q * hpp / (np.pi**2 * (hpp * hpp + fhp * fhp - target))
    if new_h1 <= 0:
        raise ValueError("the required shift makes h(1) non-positive")
    return float(new_h1 - h1)
