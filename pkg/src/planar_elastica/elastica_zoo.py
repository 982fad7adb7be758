"""Closed-form planar elasticae: the five prototype families and the figure eight.

Every prototype solves ``k'' + k**3 / 2 - lam * k = 0`` in arc length.  The
family members are parametrized by the elliptic modulus ``m`` and a frequency
``alpha``: the curve is ``gamma(s) = base(alpha * s) / alpha`` followed by an
optional reflection and rigid motion.  For the circular family ``alpha`` is
the radius.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .curves import DiscreteCurve
from .elliptic import (
    EllipticConstants,
    check_modulus,
    complete_K,
    constants,
    incomplete_E,
    incomplete_F,
    jacobi_am,
    jacobi_sn_cn_dn,
)

RESIDUAL_STEP = 1e-4
DERIVATIVE_STEP = 1e-6


class Kind(str, enum.Enum):
    LINEAR = "linear"
    WAVELIKE = "wavelike"
    BORDERLINE = "borderline"
    ORBITLIKE = "orbitlike"
    CIRCULAR = "circular"


class Parametrization(str, enum.Enum):
    ARC_LENGTH = "arclength"
    ANGLE = "angle"


@dataclass(frozen=True)
class ElasticaPrototype:
    kind: Kind
    m: float = 0.5
    alpha: float = 1.0
    rotation: float = 0.0
    translation: tuple = (0.0, 0.0)
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind in (Kind.WAVELIKE, Kind.ORBITLIKE):
            m = check_modulus(self.m)
            if m == 0.0:
                raise ValueError(f"{self.kind.value} elastica needs m in (0, 1)")
        if self.kind is not Kind.LINEAR and not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def lam(self) -> float:
        """Length multiplier of the elastica equation for this prototype."""
        a2 = self.alpha**2
        if self.kind is Kind.WAVELIKE:
            return a2 * (2 * self.m - 1)
        if self.kind is Kind.ORBITLIKE:
            return a2 * (2 - self.m)
        if self.kind is Kind.BORDERLINE:
            return a2
        if self.kind is Kind.CIRCULAR:
            return 1.0 / (2 * a2)
        return 0.0

    def _place(self, xy: np.ndarray) -> np.ndarray:
        if self.sign < 0:
            xy = xy * np.array([1.0, -1.0])
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return xy @ np.array([[c, -s], [s, c]]).T + np.asarray(self.translation, dtype=float)


def _base_point(kind: Kind, m: float, t):
    t = np.asarray(t, dtype=float)
    if kind is Kind.WAVELIKE:
        _, cn, _ = jacobi_sn_cn_dn(t, m)
        x = 2 * np.asarray(incomplete_E(jacobi_am(t, m), m)) - t
        y = -2 * math.sqrt(m) * np.asarray(cn)
    elif kind is Kind.ORBITLIKE:
        _, _, dn = jacobi_sn_cn_dn(t, m)
        x = (2 * np.asarray(incomplete_E(jacobi_am(t, m), m)) + (m - 2) * t) / m
        y = -2 * np.asarray(dn) / m
    elif kind is Kind.BORDERLINE:
        x = 2 * np.tanh(t) - t
        y = -2 / np.cosh(t)
    else:
        raise AssertionError(kind)
    return np.stack([x, y], axis=-1)


def _base_tangent(kind: Kind, m: float, t):
    t = np.asarray(t, dtype=float)
    if kind is Kind.WAVELIKE:
        sn, _, dn = (np.asarray(v) for v in jacobi_sn_cn_dn(t, m))
        return np.stack([2 * dn**2 - 1, 2 * math.sqrt(m) * sn * dn], axis=-1)
    if kind is Kind.ORBITLIKE:
        sn, cn, _ = (np.asarray(v) for v in jacobi_sn_cn_dn(t, m))
        return np.stack([1 - 2 * sn**2, 2 * sn * cn], axis=-1)
    if kind is Kind.BORDERLINE:
        sech = 1 / np.cosh(t)
        return np.stack([2 * sech**2 - 1, 2 * sech * np.tanh(t)], axis=-1)
    raise AssertionError(kind)


def eval_point(p: ElasticaPrototype, s):
    """Position of the prototype at arc length ``s`` (scalar or array)."""
    s_arr = np.asarray(s, dtype=float)
    if p.kind is Kind.LINEAR:
        xy = np.stack([s_arr, np.zeros_like(s_arr)], axis=-1)
    elif p.kind is Kind.CIRCULAR:
        r = p.alpha
        xy = r * np.stack([np.cos(s_arr / r), np.sin(s_arr / r)], axis=-1)
    else:
        xy = _base_point(p.kind, p.m, p.alpha * s_arr) / p.alpha
    return p._place(xy)


def eval_tangent(p: ElasticaPrototype, s):
    """Unit tangent at arc length ``s``."""
    s_arr = np.asarray(s, dtype=float)
    if p.kind is Kind.LINEAR:
        t = np.stack([np.ones_like(s_arr), np.zeros_like(s_arr)], axis=-1)
    elif p.kind is Kind.CIRCULAR:
        r = p.alpha
        t = np.stack([-np.sin(s_arr / r), np.cos(s_arr / r)], axis=-1)
    else:
        t = _base_tangent(p.kind, p.m, p.alpha * s_arr)
    if p.sign < 0:
        t = t * np.array([1.0, -1.0])
    c, sn = math.cos(p.rotation), math.sin(p.rotation)
    return t @ np.array([[c, -sn], [sn, c]]).T


def eval_curvature(p: ElasticaPrototype, s):
    """Signed curvature at arc length ``s``."""
    s_arr = np.asarray(s, dtype=float)
    a = p.alpha
    if p.kind is Kind.LINEAR:
        k = np.zeros_like(s_arr)
    elif p.kind is Kind.CIRCULAR:
        k = np.full_like(s_arr, 1.0 / a)
    elif p.kind is Kind.WAVELIKE:
        k = 2 * a * math.sqrt(p.m) * np.asarray(jacobi_sn_cn_dn(a * s_arr, p.m)[1])
    elif p.kind is Kind.ORBITLIKE:
        k = 2 * a * np.asarray(jacobi_sn_cn_dn(a * s_arr, p.m)[2])
    else:
        k = 2 * a / np.cosh(a * s_arr)
    k = p.sign * k
    return float(k) if np.ndim(s) == 0 else k


def elastica_residual(p: ElasticaPrototype, s, h: float = RESIDUAL_STEP):
    """``k'' + k**3 / 2 - lam * k`` with a central second difference of step h."""
    if not h > 0:
        raise ValueError("h must be positive")
    s_arr = np.asarray(s, dtype=float)
    k0 = np.asarray(eval_curvature(p, s_arr))
    kpp = (np.asarray(eval_curvature(p, s_arr + h)) - 2 * k0 + np.asarray(eval_curvature(p, s_arr - h))) / h**2
    # the sign flip k -> -k leaves the equation invariant
    r = kpp + 0.5 * k0**3 - p.lam * k0
    return float(r) if np.ndim(s) == 0 else r


# --------------------------------------------------------------------------
# Figure eight


@dataclass(frozen=True)
class FigureEight:
    """The closed wavelike elastica at m = m*."""

    constants: EllipticConstants
    parametrization: Parametrization = Parametrization.ARC_LENGTH

    @property
    def period(self) -> float:
        if Parametrization(self.parametrization) is Parametrization.ANGLE:
            return 2 * math.pi
        return self.constants.L_star

    def point(self, t):
        m = self.constants.m_star
        if Parametrization(self.parametrization) is Parametrization.ANGLE:
            t = np.asarray(t, dtype=float)
            x = 2 * np.asarray(incomplete_E(t, m)) - np.asarray(incomplete_F(t, m))
            y = -2 * math.sqrt(m) * np.cos(t)
            return np.stack([x, y], axis=-1)
        return _base_point(Kind.WAVELIKE, m, t)

    def derivative(self, t):
        """Parameter derivative of :meth:`point`."""
        m = self.constants.m_star
        if Parametrization(self.parametrization) is Parametrization.ANGLE:
            t = np.asarray(t, dtype=float)
            s2 = np.sin(t) ** 2
            return np.stack([(1 - 2 * m * s2) / np.sqrt(1 - m * s2), 2 * math.sqrt(m) * np.sin(t)], axis=-1)
        return _base_tangent(Kind.WAVELIKE, m, t)


def figure_eight(parametrization="arclength") -> FigureEight:
    return FigureEight(constants(), Parametrization(parametrization))


def crossing_determinant(m: float | None = None) -> float:
    """det of the angle-form tangents at x = pi/2 and x = 3 pi/2."""
    if m is None:
        m = constants().m_star
    return -4 * (1 - 2 * m) * math.sqrt(m) / math.sqrt(1 - m)


def figure_eight_curve(n: int, which="arclength", covers: int = 1) -> DiscreteCurve:
    """Sample the figure eight uniformly in its parameter.

    ``covers`` traverses the closed curve that many times.
    """
    n, covers = int(n), int(covers)
    if n < 8:
        raise ValueError("n must be at least 8")
    if covers < 1:
        raise ValueError("covers must be a positive integer")
    fe = figure_eight(which)
    t = np.arange(n) * (covers * fe.period / n)
    return DiscreteCurve(fe.point(t))


def prototype_curve(p: ElasticaPrototype, n: int, s_max: float | None = None, covers: int = 1) -> DiscreteCurve:
    """Polyline through ``n`` samples of a prototype on ``[0, s_max)``.

    Circles default to one full turn; open families need an explicit s_max
    (the polyline is then closed by a straight edge).
    """
    if s_max is None:
        if p.kind is not Kind.CIRCULAR:
            raise ValueError(f"s_max is required for the {p.kind.value} family")
        s_max = 2 * math.pi * p.alpha
    s = np.arange(int(n)) * (covers * s_max / int(n))
    return DiscreteCurve(eval_point(p, s))


def circle_curve(n: int, radius: float = 1.0, covers: int = 1, center=(0.0, 0.0)) -> DiscreteCurve:
    p = ElasticaPrototype(Kind.CIRCULAR, alpha=radius, translation=tuple(center))
    return prototype_curve(p, n, covers=covers)


def wavelike_period(m: float) -> float:
    """Period 4K(m) of the wavelike curvature at alpha = 1."""
    return 4 * complete_K(m)
