"""Rational replacements for transcendental calls: a Pade logarithm, the
one-log second acceleration built on it, and two sine approximants.

All kernels are polymorphic over floats and numpy arrays. The sine
approximants carry an accuracy contract only on the window
(-0.08821, 1.18456); outside it they still return a value, and callers
get the window flag to decide on fallback.
"""

import math

import numpy as np

from .core import DomainError, FlowPoint, FrictionIterate

# full machine precision, not a truncated print
LN10 = 2.302585092994046

SIN_WINDOW = (-0.08821, 1.18456)


def pade_ln(z):
    """Rational [3/3] approximation of ln(z), accurate for z near 1.

    pade_ln(1) = 0 exactly. Callers outside roughly [0.5, 2] must treat
    the result as untrusted. Horner nesting is fixed for bit
    reproducibility.

    Raises:
        DomainError: z <= 0 anywhere in the input.
    """
    if isinstance(z, (int, float)):
        z = float(z)
        if z <= 0.0:
            raise DomainError(f"pade_ln requires z > 0, got {z}")
    else:
        z = np.asarray(z, dtype=float)
        if np.any(z <= 0.0):
            raise DomainError("pade_ln requires z > 0")
    num = z * (z * (11.0 * z + 27.0) - 27.0) - 11.0
    den = z * (z * (3.0 * z + 27.0) + 27.0) + 3.0
    return num / den


def pade_sin(x):
    """Rational approximation sin(x) ~= x*(60 - 7*x^2)/(60 + 3*x^2).

    Odd by construction: pade_sin(-x) = -pade_sin(x) exactly.
    """
    x2 = x * x
    return x * (60.0 - 7.0 * x2) / (60.0 + 3.0 * x2)


def quintic_sin(x):
    """Quintic polynomial sine approximant.

    sin(x) ~= x - x^2/5350.6747 - x^3/6.0171 + x^5/127.4678, evaluated
    exactly as published. The x^2 term makes it slightly non-odd; that is
    preserved, not repaired.
    """
    return x - x * x / 5350.6747 - x ** 3 / 6.0171 + x ** 5 / 127.4678


def in_sin_window(x):
    """True where x lies strictly inside the sine accuracy window."""
    lo, hi = SIN_WINDOW
    return (lo < x) & (x < hi)


def sin_kernel(x, strategy):
    """Evaluate a sine replacement plus its in-window flag.

    Args:
        x: argument, scalar or array.
        strategy: "pade" or "quintic".

    Returns:
        (value, ok) where ok marks arguments inside the accuracy window.
    """
    if strategy == "pade":
        return pade_sin(x), in_sin_window(x)
    if strategy == "quintic":
        return quintic_sin(x), in_sin_window(x)
    raise DomainError(f"unknown sine kernel strategy {strategy!r}")


def one_log_second_iteration_raw(re, rel_rough, x0):
    """Two acceleration steps with a single real logarithm; vectorized.

    First step: y1 = 2.51*x0/Re + (eps/D)/3.71, x1 = -2*log10(y1), the one
    real logarithm. Second step: y2 from x1, z = y1/y2 (very close to 1),
    and log10(y2) = log10(y1) - pade_ln(z)/ln(10).

    Returns:
        (x2, z) arrays.
    """
    y1 = 2.51 * x0 / re + rel_rough / 3.71
    log10_y1 = np.log10(y1)
    x1 = -2.0 * log10_y1
    y2 = 2.51 * x1 / re + rel_rough / 3.71
    z = y1 / y2
    log10_y2 = log10_y1 - pade_ln(z) / LN10
    return -2.0 * log10_y2, z


def one_log_second_iteration(point: FlowPoint, x0: float) -> FrictionIterate:
    """Scalar one-log double acceleration; returns the step-2 iterate.

    Raises:
        DomainError: x0 not positive, or a logarithm argument <= 0.
    """
    if not (math.isfinite(x0) and x0 > 0.0):
        raise DomainError(f"x0 must be positive and finite, got {x0}")
    y1 = 2.51 * x0 / point.re + point.rel_rough / 3.71
    if not (y1 > 0.0):
        raise DomainError(f"first logarithm argument {y1} is not positive")
    log10_y1 = math.log10(y1)
    x1 = -2.0 * log10_y1
    y2 = 2.51 * x1 / point.re + point.rel_rough / 3.71
    if not (y2 > 0.0):
        raise DomainError(f"second logarithm argument {y2} is not positive")
    z = y1 / y2
    log10_y2 = log10_y1 - pade_ln(z) / LN10
    return FrictionIterate(-2.0 * log10_y2, step=2)
