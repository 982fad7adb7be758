"""Elliptic integrals and Jacobi elliptic functions for real modulus ``m`` in [0, 1).

Complete integrals use the arithmetic-geometric mean; incomplete integrals
and the amplitude use the AGM phase recursion (descending Landen
transformation).  Every routine accepts scalars or numpy arrays in the
angle/argument and returns the same shape.

The modulus convention is the *parameter* ``m`` (``m = k**2``), i.e.
``K(m) = int_0^{pi/2} (1 - m sin^2 t)^{-1/2} dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Landen/AGM iteration stops once the transformed modulus c_n / a_n drops below this.
LANDEN_TOL = 1e-14
MAX_AGM_ITER = 64
# Root bracket for m*: 2E - K > 0 at m = 1/2 and -> -inf as m -> 1.
M_STAR_BRACKET = (0.5 + 1e-9, 1.0 - 1e-9)
DEFAULT_ROOT_TOL = 1e-13


class DomainError(ValueError):
    """Raised when an elliptic modulus lies outside [0, 1)."""


class RootNotBracketedError(RuntimeError):
    """Raised when 2E(m) - K(m) does not change sign on the search bracket."""


def check_modulus(m) -> float:
    """Validate an elliptic parameter and return it as a float."""
    try:
        m = float(m)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"modulus must be a real number, got {m!r}") from exc
    if not (0.0 <= m < 1.0) or math.isnan(m):
        raise DomainError(f"modulus m must satisfy 0 <= m < 1, got {m}")
    return m


def _agm_sequence(m: float):
    """AGM table (a_n, c_n) starting from a=1, b=sqrt(1-m), c=sqrt(m)."""
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    a_seq, c_seq = [a], [c]
    for _ in range(MAX_AGM_ITER):
        if c <= LANDEN_TOL * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    return a_seq, c_seq


def _wrap(x, like):
    if np.ndim(like) == 0:
        return float(x)
    return x


def complete_K(m) -> float:
    """Complete elliptic integral of the first kind K(m)."""
    m = check_modulus(m)
    if m == 0.0:
        return math.pi / 2
    a_seq, _ = _agm_sequence(m)
    return math.pi / (2.0 * a_seq[-1])


def complete_E(m) -> float:
    """Complete elliptic integral of the second kind E(m)."""
    m = check_modulus(m)
    if m == 0.0:
        return math.pi / 2
    a_seq, c_seq = _agm_sequence(m)
    # E/K = 1 - sum_n 2^(n-1) c_n^2
    s = sum(2.0 ** (n - 1) * c * c for n, c in enumerate(c_seq))
    return (1.0 - s) * math.pi / (2.0 * a_seq[-1])


def _landen_phases(x, m: float):
    """Forward AGM phase recursion on x in [-pi/2, pi/2].

    Returns the AGM table and the list of phases phi_0 = x, phi_1, ..., phi_N
    with tan(phi_{n+1} - phi_n) = (b_n / a_n) tan(phi_n).
    """
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    a_seq, c_seq = [a], [c]
    phis = [x]
    phi = x
    for _ in range(MAX_AGM_ITER):
        if c <= LANDEN_TOL * a:
            break
        psi = np.arctan2(b * np.sin(phi), a * np.cos(phi))
        # continuous branch: psi stays within pi/2 of phi since b/a in (0, 1]
        psi = psi + 2.0 * np.pi * np.round((phi - psi) / (2.0 * np.pi))
        phi = phi + psi
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
        phis.append(phi)
    return a_seq, c_seq, phis


def _reduce_angle(x):
    """Split x = l*pi + r with r in [-pi/2, pi/2]."""
    l = np.round(np.asarray(x, dtype=float) / np.pi)
    return l, np.asarray(x, dtype=float) - l * np.pi


def incomplete_F(x, m):
    """Incomplete elliptic integral of the first kind F(x, m) for real x."""
    m = check_modulus(m)
    if m == 0.0:
        return _wrap(np.asarray(x, dtype=float).copy(), x)
    l, r = _reduce_angle(x)
    a_seq, _, phis = _landen_phases(r, m)
    N = len(a_seq) - 1
    f = phis[-1] / (2.0 ** N * a_seq[-1])
    return _wrap(f + 2.0 * l * complete_K(m), x)


def incomplete_E(x, m):
    """Incomplete elliptic integral of the second kind E(x, m) for real x."""
    m = check_modulus(m)
    if m == 0.0:
        return _wrap(np.asarray(x, dtype=float).copy(), x)
    l, r = _reduce_angle(x)
    a_seq, c_seq, phis = _landen_phases(r, m)
    N = len(a_seq) - 1
    K = complete_K(m)
    Ec = complete_E(m)
    f = phis[-1] / (2.0 ** N * a_seq[-1])
    e = (Ec / K) * f
    for n in range(1, N + 1):
        e = e + c_seq[n] * np.sin(phis[n])
    return _wrap(e + 2.0 * l * Ec, x)


def jacobi_am(u, m):
    """Jacobi amplitude, the inverse of x -> F(x, m)."""
    m = check_modulus(m)
    u_arr = np.asarray(u, dtype=float)
    if m == 0.0:
        return _wrap(u_arr.copy(), u)
    K = complete_K(m)
    # am(u + 2lK) = l*pi + am(u)
    l = np.round(u_arr / (2.0 * K))
    r = u_arr - 2.0 * l * K
    a_seq, c_seq = _agm_sequence(m)
    N = len(a_seq) - 1
    phi = (2.0 ** N) * a_seq[-1] * r
    for n in range(N, 0, -1):
        phi = 0.5 * (phi + np.arcsin(np.clip(c_seq[n] / a_seq[n] * np.sin(phi), -1.0, 1.0)))
    return _wrap(phi + l * np.pi, u)


def jacobi_sn_cn_dn(u, m):
    """Return (sn, cn, dn) at (u, m)."""
    phi = np.asarray(jacobi_am(u, m))
    s, c = np.sin(phi), np.cos(phi)
    d = np.sqrt(1.0 - float(m) * s * s)
    if np.ndim(u) == 0:
        return float(s), float(c), float(d)
    return s, c, d


def _two_e_minus_k(m: float) -> float:
    return 2.0 * complete_E(m) - complete_K(m)


def find_m_star(tol: float = DEFAULT_ROOT_TOL) -> float:
    """Unique root m* in (1/2, 1) of m -> 2E(m) - K(m).

    Bisection narrows the bracket, then safeguarded secant steps finish the
    job.  The returned value satisfies ``|2E(m*) - K(m*)| <= tol``.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    lo, hi = M_STAR_BRACKET
    f_lo, f_hi = _two_e_minus_k(lo), _two_e_minus_k(hi)
    if not (f_lo > 0.0 > f_hi):
        raise RootNotBracketedError(
            f"2E-K has no sign change on [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}"
        )
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        f_mid = _two_e_minus_k(mid)
        if f_mid == 0.0:
            return mid
        if f_mid > 0.0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    x0, f0, x1, f1 = lo, f_lo, hi, f_hi
    for _ in range(200):
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not (lo < x2 < hi):
            x2 = 0.5 * (lo + hi)
        f2 = _two_e_minus_k(x2)
        if abs(f2) <= tol:
            return x2
        if f2 > 0.0:
            lo = x2
        else:
            hi = x2
        x0, f0, x1, f1 = x1, f1, x2, f2
        if hi - lo < 4e-16:
            break
    m = 0.5 * (lo + hi)
    if abs(_two_e_minus_k(m)) > tol:
        raise RootNotBracketedError(f"m* residual did not reach tol={tol}")
    return m


@dataclass(frozen=True)
class EllipticConstants:
    """m*, the figure-eight energy and length, and c* = energy * length."""

    m_star: float
    c_star: float
    E_star: float
    L_star: float

    @property
    def c_star_closed_form(self) -> float:
        """c* as 64 (4m* - 2) E(m*)^2, valid because 2E(m*) = K(m*)."""
        return 64.0 * (4.0 * self.m_star - 2.0) * complete_E(self.m_star) ** 2

    def as_dict(self) -> dict:
        return {
            "m_star": self.m_star,
            "e_star": self.E_star,
            "l_star": self.L_star,
            "c_star": self.c_star,
        }


def compute_constants(tol: float = DEFAULT_ROOT_TOL) -> EllipticConstants:
    m = find_m_star(tol)
    K, E = complete_K(m), complete_E(m)
    energy = 16.0 * ((m - 1.0) * K + E)
    length = 4.0 * K
    return EllipticConstants(m_star=m, c_star=energy * length, E_star=energy, L_star=length)


_CONSTANTS: EllipticConstants | None = None


def constants() -> EllipticConstants:
    """Cached constants at the default root tolerance."""
    global _CONSTANTS
    if _CONSTANTS is None:
        _CONSTANTS = compute_constants()
    return _CONSTANTS
