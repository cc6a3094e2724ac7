"""The 2x2 reduced system for the blow-up rates.

With ``delta = d * eps`` and ``eta = s * eps`` the leading parts of ``c1`` and
``c2`` vanish exactly when ``A (d, s)^T + B = 0``, where

    A = [[h'' - 2 Q / (pi^2 h),  (-Delta)^{1/2} h'],
         [-(-Delta)^{1/2} h',    h''             ]],
    B = ((-Delta)^{1/2} k, k')

all evaluated at ``theta = 0``. ``det A`` is the non-degeneracy quantity and
``a22 b1 - a12 b2`` the transversality quantity of the hypothesis module.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .conformal import MobiusParam
from .errors import Degenerate, Tangential, WrongBranch
from .hypothesis import HypothesisReport

POSITIVE = "positive-eps"
NEGATIVE = "negative-eps"

DEGENERATE_RTOL = 1e-10
TANGENTIAL_TOL = 1e-12


@dataclass(frozen=True)
class ReducedSystem:
    a11: float
    a12: float
    a21: float
    a22: float
    b1: float
    b2: float
    det_A: float
    cond_value: float
    d0: float
    s0: float
    branch: str | None

    @property
    def A(self):
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    @property
    def B(self):
        return np.array([self.b1, self.b2])

    def residual(self, d, s):
        return self.A @ np.array([d, s]) + self.B

    def to_dict(self):
        out = asdict(self)
        out["A"] = self.A.tolist()
        out["B"] = self.B.tolist()
        return out


def solve_reduced(s: ReducedSystem, cond_satisfied=None):
    """Cramer's rule for ``A (d, s)^T = -B``; returns ``(d0, s0, branch)``.

    ``branch`` is ``None`` when ``d0 = 0``, which is only consistent when the
    transversality condition fails. ``cond_satisfied`` defaults to the
    system's own transversality value.
    """
    det = s.a11 * s.a22 - s.a21 * s.a12
    if det == 0.0:
        raise Degenerate("det A vanishes")
    d0 = (s.a12 * s.b2 - s.a22 * s.b1) / det
    s0 = (s.a21 * s.b1 - s.a11 * s.b2) / det
    if cond_satisfied is None:
        cond_satisfied = abs(s.cond_value) > TANGENTIAL_TOL
    if abs(d0) <= TANGENTIAL_TOL:
        if cond_satisfied:
            raise Tangential("d0 vanishes although transversality holds", d0=d0, cond=s.cond_value)
        return 0.0, float(s0), None
    return float(d0), float(s0), POSITIVE if d0 > 0 else NEGATIVE


def assemble_reduced(r: HypothesisReport | dict) -> ReducedSystem:
    r = r if isinstance(r, dict) else r.to_dict()
    hpp, q, h1, fhp = r["hpp_at_1"], r["q_of_h"], r["h_at_1"], r["flap_hp_at_1"]
    a11 = hpp - (2.0 / np.pi**2) * q / h1
    a12 = fhp
    a21 = -fhp
    a22 = hpp
    b1 = r["flap_k_at_1"]
    b2 = r["kp_at_1"]
    det = a11 * a22 - a21 * a12
    scale = max(abs(a11), abs(a12), abs(a21), abs(a22))
    if not np.isfinite(det) or abs(det) <= DEGENERATE_RTOL * max(scale * scale, 1e-300) or scale == 0.0:
        raise Degenerate("det A vanishes: non-degeneracy fails", det=det)
    cond = a22 * b1 - a12 * b2
    partial = ReducedSystem(a11, a12, a21, a22, b1, b2, det, cond, float("nan"), float("nan"), None)
    d0, s0, branch = solve_reduced(partial)
    return ReducedSystem(a11, a12, a21, a22, b1, b2, det, cond, d0, s0, branch)


def predict_params(s: ReducedSystem, epsilon, r: HypothesisReport | None = None):
    """Leading-order bubble parameters ``delta = d0 eps``, ``eta = s0 eps``, ``tau = 0``.

    ``r`` is accepted for symmetry with the other entry points; the
    prediction does not depend on it beyond what ``s`` already holds.
    """
    delta = s.d0 * epsilon
    if not delta > 0:
        raise WrongBranch("epsilon lies on the wrong side for this branch", epsilon=epsilon, d0=s.d0)
    if delta > 1:
        raise ValueError(f"predicted delta {delta:.3g} exceeds 1; epsilon is too large")
    return MobiusParam(delta, s.s0 * epsilon), 0.0
