"""Least-squares rates used by scans, traces and the acceptance checks."""

import numpy as np


def loglog_slope(x, y):
    """Slope of ``log|y|`` against ``log x`` by least squares.

    Returns ``nan`` when fewer than two points have ``y != 0``.
    """
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    keep = (x > 0) & (y > 0) & np.isfinite(y)
    if keep.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)[0])


def slope_through_origin(x, y):
    """Least-squares ``s`` in ``y = s x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xx = float(x @ x)
    if xx == 0.0:
        raise ValueError("all abscissae are zero")
    return float(x @ y / xx)


def poly_coeffs(x, y, degree):
    """Coefficients of the least-squares polynomial, lowest order first."""
    return np.polynomial.polynomial.polyfit(np.asarray(x, float), np.asarray(y, float), degree)
