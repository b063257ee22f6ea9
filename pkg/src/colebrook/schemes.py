"""Explicit starters for the friction equation, the fixed-point
acceleration operator, its transformed variant, and a registry that
composes them into named schemes.

Scheme naming: ``eqN`` is a bare starter, ``eqNa``/``eqNa1`` one
acceleration step, ``eqNa2`` two steps, suffix ``-pade`` the one-log
second iteration, suffix ``-t`` the transformed accelerator. All
coefficients are kept exactly as published.
"""

import math
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from . import kernels
from .core import (
    MIN_NORMALIZED_ROUGH,
    DomainError,
    FlowPoint,
    FrictionIterate,
    NormalizedPoint,
    colebrook_rhs,
    colebrook_rhs_raw,
    normalize,
    starter_eq2_raw,
)


class SchemeError(ValueError):
    """Invalid scheme composition or unknown scheme id."""


class RegistryError(SchemeError):
    """Scheme id not present in the registry."""


@dataclass(frozen=True, slots=True)
class Theta:
    """The theta of the transformed acceleration; negative for all
    in-domain points with positive roughness."""

    theta: float


# published truncated constants of the transformed step; full-precision
# variants are behind the constants flag
TRANSFORMED_PUBLISHED = (1.1387478, 0.8686)


def transformed_constants(mode: str) -> tuple:
    """(2*log10(3.71), 2/ln 10) as published truncations or full precision."""
    if mode == "published":
        return TRANSFORMED_PUBLISHED
    if mode == "exact":
        return (2.0 * math.log10(3.71), 2.0 / math.log(10.0))
    raise SchemeError(f"constants mode must be 'published' or 'exact', got {mode!r}")


# sine argument is coef*a - b; coefficient differs per starter
SIN_ARG_COEF = {"eq4": 0.937, "eq5": 0.935, "eq6": 0.939}


def _make_sine(strategy):
    """Build a sine callable for a strategy plus a fallback counter.

    Kernel strategies evaluate the rational/polynomial approximant inside
    the accuracy window and fall back to the exact sine outside it; the
    counter reports how many arguments fell back.
    """
    if strategy == "exact":
        return np.sin, lambda: 0
    fallbacks = []

    def sine(arg):
        value, ok = kernels.sin_kernel(arg, strategy)
        n_out = int(np.size(arg) - np.count_nonzero(ok))
        fallbacks.append(n_out)
        if n_out:
            return np.where(ok, value, np.sin(arg))
        return value

    return sine, lambda: sum(fallbacks)


# ---------------------------------------------------------------------------
# raw starters, polymorphic over floats and arrays
# ---------------------------------------------------------------------------

def starter_eq3_raw(a, b):
    # x0 = 3.13*b - 1.56*b^2/a
    return 3.13 * b - 1.56 * b * b / a


def starter_eq4_raw(a, b, sin=np.sin):
    # x0 = b + 0.904*a + 1.08*sin(0.937*a - b) - 1.85
    return b + 0.904 * a + 1.08 * sin(0.937 * a - b) - 1.85


def starter_eq5_raw(a, b, sin=np.sin):
    return (
        a + 0.61 * b + 0.28 * a * b + 0.51 * sin(0.935 * a - b)
        - 0.894 - 0.103 * a * a - 0.158 * b * b
    )


def starter_eq6_raw(a, b, sin=np.sin):
    s = sin(0.939 * a - b)  # one sine evaluation; the square reuses it
    return (
        1.15 * a + 0.569 * b + 0.292 * a * b + 0.478 * s + 0.122 * s * s
        - 1.284 - 0.12 * a * a - 0.162 * b * b
    )


# ---------------------------------------------------------------------------
# typed starters
# ---------------------------------------------------------------------------

def starter_eq2(point: FlowPoint) -> FrictionIterate:
    """Raw-input rational-polynomial starter; no logarithms at all.

    Legal on the smooth limit rel_rough = 0.
    """
    return FrictionIterate(float(starter_eq2_raw(point.re, point.rel_rough)), step=0)


def starter_eq3(norm: NormalizedPoint) -> FrictionIterate:
    """Two-term normalized starter x0 = 3.13*b - 1.56*b^2/a."""
    if not (norm.a > 0.0):
        raise DomainError(f"starter requires a > 0, got a={norm.a}")
    return FrictionIterate(float(starter_eq3_raw(norm.a, norm.b)), step=0)


def starter_eq4(norm: NormalizedPoint, sin_strategy: str = "exact") -> FrictionIterate:
    """Normalized starter with one sine term."""
    sine, _ = _make_sine(sin_strategy)
    return FrictionIterate(float(starter_eq4_raw(norm.a, norm.b, sin=sine)), step=0)


def starter_eq5(norm: NormalizedPoint, sin_strategy: str = "exact") -> FrictionIterate:
    """Normalized quadratic starter with one sine term."""
    sine, _ = _make_sine(sin_strategy)
    return FrictionIterate(float(starter_eq5_raw(norm.a, norm.b, sin=sine)), step=0)


def starter_eq6(norm: NormalizedPoint, sin_strategy: str = "exact") -> FrictionIterate:
    """Normalized quadratic starter with sine and sine-squared terms,
    still only one sine evaluation."""
    sine, _ = _make_sine(sin_strategy)
    return FrictionIterate(float(starter_eq6_raw(norm.a, norm.b, sin=sine)), step=0)


def sine_argument(starter: str, norm: NormalizedPoint) -> float:
    """The sine argument coef*a - b of a sine-bearing starter, for
    kernel-window audits."""
    try:
        coef = SIN_ARG_COEF[starter]
    except KeyError:
        raise SchemeError(f"starter {starter!r} has no sine term") from None
    return coef * norm.a - norm.b


# ---------------------------------------------------------------------------
# acceleration operators
# ---------------------------------------------------------------------------

def accelerate(point: FlowPoint, it: FrictionIterate) -> FrictionIterate:
    """One fixed-point application of the implicit-equation map.

    This is the same map as core.colebrook_rhs (single shared
    implementation); each application adds one logarithm and roughly an
    order of magnitude of accuracy.
    """
    return FrictionIterate(colebrook_rhs(point, it.x), step=it.step + 1)


def theta(point: FlowPoint, x: float) -> Theta:
    """theta = -2.51*3.71*x / ((eps/D)*Re); strictly negative.

    Raises:
        DomainError: rel_rough = 0 (the transformed form does not exist
            on the smooth limit) or x <= 0.
    """
    if point.rel_rough <= 0.0:
        raise DomainError("theta undefined for rel_rough = 0")
    if not (math.isfinite(x) and x > 0.0):
        raise DomainError(f"x must be positive and finite, got {x}")
    return Theta(-2.51 * 3.71 * x / (point.rel_rough * point.re))


def theta_raw(re, rel_rough, x):
    """Vectorized theta; no validation."""
    return -2.51 * 3.71 * x / (rel_rough * re)


def accelerate_transformed(
    point: FlowPoint, it: FrictionIterate, constants: str = "published"
) -> FrictionIterate:
    """One acceleration step in the transformed form
    x = 2*log10(3.71) + 2*b - (2/ln 10)*ln(1 - theta).

    Algebraically identical to the direct map for rel_rough > 0; with the
    published truncated constants (the default) it differs from the
    direct step by up to about 2e-5 relative, dominated by the 4-digit
    constant 0.8686.

    Raises:
        DomainError: rel_rough = 0.
    """
    if point.rel_rough <= 0.0:
        raise DomainError("transformed acceleration undefined for rel_rough = 0")
    c1, c2 = transformed_constants(constants)
    b = -math.log10(point.rel_rough)
    th = theta(point, it.x).theta
    return FrictionIterate(c1 + 2.0 * b - c2 * math.log(1.0 - th), step=it.step + 1)


# ---------------------------------------------------------------------------
# scheme registry
# ---------------------------------------------------------------------------

_STARTERS = ("eq2", "eq3", "eq4", "eq5", "eq6")
_ACCEL_FORMS = ("direct", "transformed")
_LOG_STRATEGIES = ("exact", "pade-one-log")
_SIN_STRATEGIES = ("exact", "pade", "quintic")


@dataclass(frozen=True, slots=True)
class SchemeSpec:
    """A named, composable recipe: starter, acceleration steps and form,
    log strategy, sine strategy. The id uniquely determines the rest via
    the registry."""

    id: str
    starter: str
    accel_steps: int = 0
    accel_form: str = "direct"
    log_strategy: str = "exact"
    sin_strategy: str = "exact"

    def __post_init__(self):
        if self.starter not in _STARTERS:
            raise SchemeError(f"unknown starter {self.starter!r}")
        if self.accel_steps < 0:
            raise SchemeError(f"accel_steps must be >= 0, got {self.accel_steps}")
        if self.accel_form not in _ACCEL_FORMS:
            raise SchemeError(f"unknown accel_form {self.accel_form!r}")
        if self.log_strategy not in _LOG_STRATEGIES:
            raise SchemeError(f"unknown log_strategy {self.log_strategy!r}")
        if self.sin_strategy not in _SIN_STRATEGIES:
            raise SchemeError(f"unknown sin_strategy {self.sin_strategy!r}")
        if self.log_strategy == "pade-one-log" and (
            self.accel_steps != 2 or self.accel_form != "direct"
        ):
            # the trick replaces the second of exactly two direct logs
            raise SchemeError(
                "pade-one-log requires accel_steps = 2 and the direct form"
            )
        if self.starter in ("eq2", "eq3") and self.sin_strategy != "exact":
            raise SchemeError(
                f"starter {self.starter} contains no sine; sin_strategy must be exact"
            )


def _build_registry():
    specs = [
        SchemeSpec("eq2", "eq2", 0),
        SchemeSpec("eq2a1", "eq2", 1),
        SchemeSpec("eq2a2", "eq2", 2),
        SchemeSpec("eq2a2-pade", "eq2", 2, log_strategy="pade-one-log"),
        SchemeSpec("eq3", "eq3", 0),
        SchemeSpec("eq3a", "eq3", 1),
        SchemeSpec("eq4", "eq4", 0),
        SchemeSpec("eq4a", "eq4", 1),
        SchemeSpec("eq5", "eq5", 0),
        SchemeSpec("eq5a", "eq5", 1),
        SchemeSpec("eq6", "eq6", 0),
        SchemeSpec("eq6a", "eq6", 1),
        SchemeSpec("eq2a1-t", "eq2", 1, accel_form="transformed"),
        SchemeSpec("eq2a2-t", "eq2", 2, accel_form="transformed"),
        SchemeSpec("eq3a-t", "eq3", 1, accel_form="transformed"),
        SchemeSpec("eq4a-t", "eq4", 1, accel_form="transformed"),
        SchemeSpec("eq5a-t", "eq5", 1, accel_form="transformed"),
        SchemeSpec("eq6a-t", "eq6", 1, accel_form="transformed"),
    ]
    return MappingProxyType({s.id: s for s in specs})


REGISTRY = _build_registry()

# the accuracy-vs-complexity table enumerates exactly these rows
TABLE1_ROW_IDS = ("eq2a2", "eq6a", "eq5a", "eq2a1", "eq6", "eq5", "eq4a", "eq3a")


def scheme_ids() -> tuple:
    """All registered scheme ids, a stable public contract."""
    return tuple(REGISTRY)


def get_scheme(scheme_id: str) -> SchemeSpec:
    """Resolve a scheme id.

    Raises:
        RegistryError: id not registered.
    """
    try:
        return REGISTRY[scheme_id]
    except KeyError:
        raise RegistryError(
            f"unknown scheme id {scheme_id!r}; registered: {', '.join(REGISTRY)}"
        ) from None


_TYPED_STARTERS = {
    "eq3": starter_eq3,
    "eq4": starter_eq4,
    "eq5": starter_eq5,
    "eq6": starter_eq6,
}


def evaluate_scheme(spec, point: FlowPoint, constants: str = "published") -> FrictionIterate:
    """Run a scheme at one point: starter, then acceleration steps.

    Args:
        spec: a SchemeSpec or a registered scheme id.
        point: flow conditions satisfying the starter's preconditions.
        constants: constants mode for transformed steps.

    Returns:
        The final iterate; its step equals the scheme's accel_steps.
    """
    if isinstance(spec, str):
        spec = get_scheme(spec)
    if spec.starter == "eq2":
        it = starter_eq2(point)
    else:
        norm = normalize(point)
        fn = _TYPED_STARTERS[spec.starter]
        if spec.starter == "eq3":
            it = fn(norm)
        else:
            it = fn(norm, sin_strategy=spec.sin_strategy)
    if spec.log_strategy == "pade-one-log":
        return kernels.one_log_second_iteration(point, it.x)
    for _ in range(spec.accel_steps):
        if spec.accel_form == "direct":
            it = accelerate(point, it)
        else:
            it = accelerate_transformed(point, it, constants=constants)
    return it


def evaluate_scheme_raw(spec, re, rel_rough, constants: str = "published"):
    """Vectorized scheme evaluation over arrays of (Re, eps/D).

    Returns:
        (x, sine_fallbacks): final x array and the count of sine-kernel
        arguments that fell outside the accuracy window and used the
        exact sine instead.
    """
    if isinstance(spec, str):
        spec = get_scheme(spec)
    re = np.asarray(re, dtype=float)
    rel_rough = np.asarray(rel_rough, dtype=float)
    count = lambda: 0
    if spec.starter == "eq2":
        x = starter_eq2_raw(re, rel_rough)
    else:
        if np.any(rel_rough < MIN_NORMALIZED_ROUGH):
            raise DomainError(
                "normalized starters require rel_rough >= "
                f"{MIN_NORMALIZED_ROUGH} everywhere"
            )
        a = np.log10(re)
        b = -np.log10(rel_rough)
        if spec.starter == "eq3":
            x = starter_eq3_raw(a, b)
        else:
            sine, count = _make_sine(spec.sin_strategy)
            raw = {"eq4": starter_eq4_raw, "eq5": starter_eq5_raw, "eq6": starter_eq6_raw}
            x = raw[spec.starter](a, b, sin=sine)
    if spec.log_strategy == "pade-one-log":
        x, _ = kernels.one_log_second_iteration_raw(re, rel_rough, x)
        return x, count()
    if spec.accel_steps and spec.accel_form == "transformed":
        if np.any(rel_rough <= 0.0):
            raise DomainError("transformed acceleration undefined for rel_rough = 0")
        c1, c2 = transformed_constants(constants)
        b = -np.log10(rel_rough)
        for _ in range(spec.accel_steps):
            x = c1 + 2.0 * b - c2 * np.log(1.0 - theta_raw(re, rel_rough, x))
    else:
        for _ in range(spec.accel_steps):
            x = colebrook_rhs_raw(re, rel_rough, x)
    return x, count()
