"""Test-curve generators: ellipses, limacons, polygons and perturbed figure eights."""

from __future__ import annotations

import math

import numpy as np

from .curves import DiscreteCurve, reparametrize_constant_speed, self_intersections, length
from .elastica_zoo import figure_eight_curve


def regular_polygon(n: int, radius: float = 1.0, phase: float = 0.0) -> DiscreteCurve:
    t = phase + 2 * math.pi * np.arange(n) / n
    return DiscreteCurve(radius * np.column_stack([np.cos(t), np.sin(t)]))


def ellipse_curve(a: float, b: float, n: int, constant_speed: bool = True, center=(0.0, 0.0)) -> DiscreteCurve:
    """Ellipse with semi-axes ``a, b``.

    With ``constant_speed`` the vertices are equally spaced in arc length
    (computed on a dense angle sampling), otherwise uniformly in angle.
    """
    if not constant_speed:
        t = 2 * math.pi * np.arange(n) / n
        return DiscreteCurve(np.column_stack([a * np.cos(t), b * np.sin(t)]) + np.asarray(center))
    dense = max(64 * n, 20_000)
    t = 2 * math.pi * np.arange(dense + 1) / dense
    pts = np.column_stack([a * np.cos(t), b * np.sin(t)])
    cum = np.r_[0.0, np.cumsum(np.hypot(*np.diff(pts, axis=0).T))]
    # exact ellipse arc length is not needed: the target points lie on the ellipse
    s = np.arange(n) * cum[-1] / n
    tt = np.interp(s, cum, t)
    return DiscreteCurve(np.column_stack([a * np.cos(tt), b * np.sin(tt)]) + np.asarray(center))


def limacon_curve(n: int, a: float = 1.0, b: float = 2.0) -> DiscreteCurve:
    """Limacon ``r = a + b cos(phi)``; for ``b > a`` it has an inner loop."""
    phi = 2 * math.pi * np.arange(n) / n
    r = a + b * np.cos(phi)
    return DiscreteCurve(np.column_stack([r * np.cos(phi), r * np.sin(phi)]))


def fourier_perturbation(c: DiscreteCurve, rng: np.random.Generator, amplitude: float, modes: int = 4) -> DiscreteCurve:
    """Displace vertices along their normals by a random low-order Fourier series.

    ``amplitude`` bounds the sup-norm of the displacement.
    """
    x = c.vertices
    n = c.n
    t = 2 * math.pi * np.arange(n) / n
    k = np.arange(1, modes + 1)
    coef = rng.normal(size=(2, modes)) / k
    f = coef[0] @ np.cos(np.outer(k, t)) + coef[1] @ np.sin(np.outer(k, t))
    f *= amplitude / max(np.abs(f).max(), 1e-300)
    tangent = np.roll(x, -1, axis=0) - np.roll(x, 1, axis=0)
    tangent /= np.hypot(*tangent.T)[:, None]
    normal = np.column_stack([-tangent[:, 1], tangent[:, 0]])
    return DiscreteCurve(x + f[:, None] * normal)


def perturbed_figure_eights(samples: int, seed: int, n: int = 400, max_fraction: float = 0.05, modes: int = 4):
    """Random normal perturbations of the figure eight that keep a crossing.

    Amplitudes are drawn uniformly up to ``max_fraction * length``; draws whose
    crossing disappears are rejected.  Yields ``(index, amplitude, curve)`` in
    order.
    """
    rng = np.random.default_rng(seed)
    base = figure_eight_curve(n)
    cap = max_fraction * length(base)
    produced = 0
    attempts = 0
    while produced < samples:
        attempts += 1
        if attempts > 50 * samples + 100:
            raise RuntimeError("too many rejected perturbations")
        amp = rng.uniform(0.0, cap)
        cand = fourier_perturbation(base, rng, amp, modes)
        cand = reparametrize_constant_speed(cand, n)
        if not self_intersections(cand).has_transversal:
            continue
        yield produced, amp, cand
        produced += 1


def lens_curve(n: int, b: float) -> DiscreteCurve:
    """Limacon ``r = 1 + b cos(phi)`` with ``b > 1``: a smooth curve whose inner
    lens-shaped loop crosses the outer loop at the origin."""
    if not b > 1:
        raise ValueError("b must exceed 1 for the inner loop to exist")
    return reparametrize_constant_speed(limacon_curve(n, 1.0, b), n)
