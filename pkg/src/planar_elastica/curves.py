"""Closed polylines and the geometric functionals defined on them.

A :class:`DiscreteCurve` is a closed polygon ``x_0, ..., x_{n-1}`` whose
parameter circle ``[0, 1)`` is split uniformly among the vertices, so vertex
``i`` sits at parameter ``i / n`` and edge ``i`` joins ``x_i`` to ``x_{i+1}``
(indices mod n).

Curvature is measured through the signed turning angle ``theta_i`` at each
vertex together with the dual edge length ``ell_i = (|e_{i-1}| + |e_i|) / 2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .elliptic import constants

MIN_SEGMENT_LENGTH = 1e-12
WINDING_RESIDUAL_MAX = 0.1
DEFAULT_TANGENTIAL_THRESHOLD = 1e-3
DEFAULT_MERGE_RTOL = 1e-6
LIYAU_MARGIN = 0.5


class DegenerateCurveError(ValueError):
    """Raised for polylines that are not discrete immersions."""


class WindingAmbiguityError(ArithmeticError):
    """Raised when the total turning is too far from a multiple of 2*pi."""


class DiscreteCurve:
    """Immutable closed polyline in the plane.

    Parameters
    ----------
    vertices : array_like, shape (n, 2)
        Vertex positions; the closing edge from the last vertex back to the
        first is implied, so the first vertex must not be repeated.
    """

    __slots__ = ("_x",)

    def __init__(self, vertices):
        x = np.array(vertices, dtype=float, copy=True)
        if x.ndim != 2 or x.shape[1] != 2:
            raise DegenerateCurveError(f"vertices must have shape (n, 2), got {x.shape}")
        if x.shape[0] < 3:
            raise DegenerateCurveError(f"a closed curve needs at least 3 vertices, got {x.shape[0]}")
        if not np.all(np.isfinite(x)):
            raise DegenerateCurveError("vertices contain non-finite values")
        d = np.hypot(*(np.roll(x, -1, axis=0) - x).T)
        if d.min() <= MIN_SEGMENT_LENGTH:
            i = int(d.argmin())
            raise DegenerateCurveError(
                f"edge {i} has length {d[i]:.3e} <= {MIN_SEGMENT_LENGTH}; not an immersion"
            )
        x.setflags(write=False)
        self._x = x

    @property
    def vertices(self) -> np.ndarray:
        return self._x

    @property
    def n(self) -> int:
        return self._x.shape[0]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"DiscreteCurve(n={self.n}, length={length(self):.6g})"

    def __eq__(self, other) -> bool:
        return isinstance(other, DiscreteCurve) and np.array_equal(self._x, other._x)

    __hash__ = None

    @property
    def edges(self) -> np.ndarray:
        return np.roll(self._x, -1, axis=0) - self._x

    @property
    def edge_lengths(self) -> np.ndarray:
        return np.hypot(*self.edges.T)

    def transformed(self, angle: float = 0.0, translation=(0.0, 0.0), scale: float = 1.0):
        """Return ``scale * R(angle) x + translation``."""
        c, s = math.cos(angle), math.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        return DiscreteCurve(scale * self._x @ rot.T + np.asarray(translation, dtype=float))

    def reversed(self) -> "DiscreteCurve":
        """Same trace with opposite orientation, still starting at vertex 0."""
        return DiscreteCurve(np.roll(self._x[::-1], 1, axis=0))


def as_curve(c) -> DiscreteCurve:
    """Accept a DiscreteCurve or an (n, 2) array."""
    if isinstance(c, DiscreteCurve):
        return c
    return DiscreteCurve(c)


# --------------------------------------------------------------------------
# Functionals


def length(c) -> float:
    """Polygon length, the sum of edge lengths."""
    return float(as_curve(c).edge_lengths.sum())


def dual_lengths(c) -> np.ndarray:
    d = as_curve(c).edge_lengths
    return 0.5 * (np.roll(d, 1) + d)


def turning_angles(c) -> np.ndarray:
    """Signed exterior angle at every vertex, in (-pi, pi]."""
    e = as_curve(c).edges
    prev = np.roll(e, 1, axis=0)
    cross = prev[:, 0] * e[:, 1] - prev[:, 1] * e[:, 0]
    dot = (prev * e).sum(axis=1)
    return np.arctan2(cross, dot)


def elastic_energy(c) -> float:
    """Discrete bending energy ``sum theta_i**2 / ell_i``."""
    c = as_curve(c)
    return float((turning_angles(c) ** 2 / dual_lengths(c)).sum())


def energy_length_product(c) -> float:
    c = as_curve(c)
    return elastic_energy(c) * length(c)


def total_curvature(c) -> float:
    """Discrete total absolute curvature ``sum |theta_i|``."""
    return float(np.abs(turning_angles(c)).sum())


def turning_number(c) -> float:
    """Unrounded total turning divided by 2*pi."""
    return float(turning_angles(c).sum() / (2 * math.pi))


def winding_number(c, return_residual: bool = False):
    """Rotation index of the tangent, rounded to an integer.

    Raises
    ------
    WindingAmbiguityError
        If the total turning lies at least 0.1 turns away from an integer.
    """
    t = turning_number(c)
    w = int(round(t))
    residual = abs(t - w)
    if residual >= WINDING_RESIDUAL_MAX:
        raise WindingAmbiguityError(f"total turning {t:.4f} is not close to an integer")
    return (w, residual) if return_residual else w


# --------------------------------------------------------------------------
# Self-intersections


@dataclass(frozen=True)
class IntersectionEvent:
    """One crossing between two non-adjacent edges.

    ``t1 < t2`` are curve parameters in [0, 1); ``det`` is the determinant of
    the two unit edge directions, so ``|det|`` is the sine of the crossing
    angle.
    """

    t1: float
    t2: float
    point: tuple
    det: float
    tangential: bool
    segments: tuple

    def as_dict(self) -> dict:
        return {
            "t1": self.t1,
            "t2": self.t2,
            "point": list(self.point),
            "det": self.det,
            "tangential": self.tangential,
        }


@dataclass(frozen=True)
class IntersectionReport:
    """Self-intersections of a polyline.

    ``events`` holds one entry per distinct crossing; several raw edge pairs
    that meet at a shared vertex collapse into one event.  ``segment_pairs``
    keeps every raw edge pair ``(i, j)``, ``i < j``, that met.
    ``multiplicity`` maps each clustered point to its number of preimages.
    """

    events: tuple = ()
    segment_pairs: tuple = ()
    multiplicity: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return bool(self.events)

    def __len__(self) -> int:
        return len(self.events)

    @property
    def points(self) -> list:
        return list(self.multiplicity)

    @property
    def has_transversal(self) -> bool:
        return any(not e.tangential for e in self.events)


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _candidate_pairs(x: np.ndarray):
    """Edge pairs with overlapping bounding boxes, found by a sweep over x-min."""
    n = x.shape[0]
    p, q = x, np.roll(x, -1, axis=0)
    lo, hi = np.minimum(p, q), np.maximum(p, q)
    order = np.argsort(lo[:, 0], kind="stable")
    xmin_sorted = lo[order, 0]
    # edge order[k] can only meet edges order[k+1 : stop[k]]
    stop = np.searchsorted(xmin_sorted, hi[order, 0], side="right")
    counts = np.maximum(stop - np.arange(n) - 1, 0)
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.intp), np.empty(0, dtype=np.intp)
    first = np.repeat(np.arange(n), counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    second = first + 1 + offsets
    a, b = order[first], order[second]
    keep = (lo[a, 1] <= hi[b, 1]) & (lo[b, 1] <= hi[a, 1])
    a, b = a[keep], b[keep]
    i, j = np.minimum(a, b), np.maximum(a, b)
    nonadjacent = (j - i != 1) & ~((i == 0) & (j == n - 1))
    return i[nonadjacent], j[nonadjacent]


def segment_pair_hits(x: np.ndarray, i: np.ndarray, j: np.ndarray):
    """Exact intersection test for edge pairs ``(i, j)``.

    Returns a boolean hit mask together with the local parameters ``s, u`` of
    the meeting point on each edge.  Collinear overlapping edges count as a
    hit at the start of their overlap.
    """
    n = x.shape[0]
    p0, p1 = x[i], x[(i + 1) % n]
    q0, q1 = x[j], x[(j + 1) % n]
    r = p1 - p0
    s = q1 - q0
    w = q0 - p0
    denom = _cross(r[:, 0], r[:, 1], s[:, 0], s[:, 1])
    num_s = _cross(w[:, 0], w[:, 1], s[:, 0], s[:, 1])
    num_u = _cross(w[:, 0], w[:, 1], r[:, 0], r[:, 1])
    scale = np.hypot(*r.T) * np.hypot(*s.T)
    parallel = np.abs(denom) <= 1e-14 * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        ts = np.where(parallel, 0.0, num_s / np.where(parallel, 1.0, denom))
        tu = np.where(parallel, 0.0, num_u / np.where(parallel, 1.0, denom))
    hit = ~parallel & (ts >= 0.0) & (ts <= 1.0) & (tu >= 0.0) & (tu <= 1.0)

    if np.any(parallel):
        k = np.flatnonzero(parallel)
        rr = (r[k] * r[k]).sum(axis=1)
        collinear = np.abs(num_u[k]) <= 1e-14 * scale[k]
        # project q0, q1 onto edge i
        a0 = (w[k] * r[k]).sum(axis=1) / rr
        a1 = ((q1[k] - p0[k]) * r[k]).sum(axis=1) / rr
        lo_, hi_ = np.minimum(a0, a1), np.maximum(a0, a1)
        start, end = np.maximum(lo_, 0.0), np.minimum(hi_, 1.0)
        overlap = collinear & (start <= end)
        kk = k[overlap]
        hit[kk] = True
        ts[kk] = start[overlap]
        pt = p0[kk] + ts[kk, None] * r[kk]
        ss = (s[kk] * s[kk]).sum(axis=1)
        tu[kk] = ((pt - q0[kk]) * s[kk]).sum(axis=1) / ss
    return hit, ts, tu


def _cluster(points: np.ndarray, radius: float) -> np.ndarray:
    """Single-linkage labels for points closer than ``radius``.

    Labels are numbered in order of first appearance.
    """
    pairs = cKDTree(points).query_pairs(radius, output_type="ndarray")
    k = len(points)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(k, k))
    _, raw = connected_components(graph, directed=False)
    _, first = np.unique(raw, return_index=True)
    rank = np.empty(len(first), dtype=int)
    rank[np.argsort(first)] = np.arange(len(first))
    return rank[raw]


def _merge_params(params, n: int) -> list:
    """Collapse preimage parameters that lie on neighbouring edges."""
    out: list = []
    tol = 1.0 / n + 1e-12
    for t in sorted(params):
        if any(min(abs(t - u), 1.0 - abs(t - u)) <= tol for u in out):
            continue
        out.append(t)
    return out


def self_intersections(
    c,
    tangential_threshold: float = DEFAULT_TANGENTIAL_THRESHOLD,
    merge_tol: float | None = None,
    pairs=None,
) -> IntersectionReport:
    """Find all crossings between non-adjacent edges of a closed polyline.

    Parameters
    ----------
    c : DiscreteCurve or array_like
    tangential_threshold : float in (0, 1)
        An event is tangential when ``|det|`` of the unit edge directions is
        below this value.
    merge_tol : float, optional
        Cluster radius for multiplicities; defaults to ``1e-6 * length``.
    pairs : tuple of arrays, optional
        Candidate edge pairs to test instead of the sweep (used to check the
        sweep against exhaustive enumeration).
    """
    if not 0.0 < tangential_threshold < 1.0:
        raise ValueError("tangential_threshold must lie in (0, 1)")
    c = as_curve(c)
    x = c.vertices
    n = c.n
    if merge_tol is None:
        merge_tol = DEFAULT_MERGE_RTOL * length(c)
    i, j = _candidate_pairs(x) if pairs is None else (np.asarray(pairs[0]), np.asarray(pairs[1]))
    if len(i) == 0:
        return IntersectionReport()
    hit, ts, tu = segment_pair_hits(x, i, j)
    i, j, ts, tu = i[hit], j[hit], ts[hit], tu[hit]
    if len(i) == 0:
        return IntersectionReport()
    order = np.lexsort((j, i))
    i, j, ts, tu = i[order], j[order], ts[order], tu[order]
    e = c.edges
    d = c.edge_lengths
    ri, rj = e[i] / d[i, None], e[j] / d[j, None]
    dets = _cross(ri[:, 0], ri[:, 1], rj[:, 0], rj[:, 1])
    pts = x[i] + ts[:, None] * e[i]
    t1 = (i + ts) / n
    t2 = (j + tu) / n
    pairs_out = tuple(zip(i.tolist(), j.tolist()))

    labels = _cluster(pts, merge_tol)
    events = []
    multiplicity = {}
    for lab in np.unique(labels):
        idx = np.flatnonzero(labels == lab)
        centre = tuple(pts[idx].mean(axis=0).tolist())
        preimages = _merge_params(np.r_[t1[idx], t2[idx]].tolist(), n)
        multiplicity[centre] = len(preimages)
        seen = []
        for k in idx:
            key = (
                min(preimages, key=lambda u: _circ(u, t1[k])),
                min(preimages, key=lambda u: _circ(u, t2[k])),
            )
            key = tuple(sorted(key))
            if key[0] == key[1] or key in seen:
                continue
            seen.append(key)
            events.append(
                IntersectionEvent(
                    t1=float(t1[k]),
                    t2=float(t2[k]),
                    point=tuple(pts[k].tolist()),
                    det=float(dets[k]),
                    tangential=bool(abs(dets[k]) < tangential_threshold),
                    segments=(int(i[k]), int(j[k])),
                )
            )
    events.sort(key=lambda ev: (ev.t1, ev.t2))
    return IntersectionReport(events=tuple(events), segment_pairs=pairs_out, multiplicity=multiplicity)


def _circ(a: float, b: float) -> float:
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


def all_pairs(n: int):
    """Every non-adjacent edge pair ``(i, j)`` with ``i < j``."""
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    return i[keep], j[keep]


def is_embedded(c) -> bool:
    return not self_intersections(c)


def embeddedness_ratio(c, chunk: int = 512) -> float:
    """Discrete ``inf |x(a) - x(b)| / |a - b|`` over vertex pairs.

    Parameter distance is measured on the circle ``[0, 1)``; pairs closer
    than ``2 / n`` are skipped.
    """
    c = as_curve(c)
    x = c.vertices
    n = c.n
    idx = np.arange(n)
    best = math.inf
    for start in range(0, n, chunk):
        a = idx[start : start + chunk, None]
        k = np.abs(a - idx[None, :])
        k = np.minimum(k, n - k)
        dist = np.hypot(
            x[start : start + chunk, None, 0] - x[None, :, 0],
            x[start : start + chunk, None, 1] - x[None, :, 1],
        )
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(k >= 2, dist / (k / n), np.inf)
        best = min(best, float(ratio.min()))
    return best


# --------------------------------------------------------------------------
# Reparametrization and constructions


def _arc_positions(x: np.ndarray):
    d = np.hypot(*(np.roll(x, -1, axis=0) - x).T)
    return np.r_[0.0, np.cumsum(d)]


class _ClosedSpline:
    """Periodic cubic spline through the vertices, evaluated by arc length.

    The spline is parametrized by cumulative chord length; a dense table maps
    its arc length back to that parameter.
    """

    def __init__(self, x: np.ndarray, density: int):
        u = _arc_positions(x)
        self._spline = CubicSpline(u, np.vstack([x, x[:1]]), bc_type="periodic")
        self._u = np.linspace(0.0, u[-1], density + 1)
        pts = self._spline(self._u)
        self._s = np.r_[0.0, np.cumsum(np.hypot(*np.diff(pts, axis=0).T))]

    @property
    def length(self) -> float:
        return float(self._s[-1])

    def __call__(self, s: np.ndarray) -> np.ndarray:
        return self._spline(np.interp(np.mod(s, self.length), self._s, self._u))


def reparametrize_constant_speed(c, n_out: int, rtol: float = 1e-12, max_iter: int = 500) -> DiscreteCurve:
    """Resample a closed curve with ``n_out`` equally long edges.

    The new vertices lie on the periodic cubic spline through the input
    vertices, the first one on input vertex 0.  Resampling on the polyline
    itself would scatter the vertices off the smooth curve by O(h**2) and
    spoil the discrete curvature at first order, so the spline is used.
    Arc-length gaps are rescaled by chord/mean-chord ratios until all output
    edges agree to ``rtol`` relative spread.
    """
    c = as_curve(c)
    n_out = int(n_out)
    if n_out < 3:
        raise ValueError("n_out must be at least 3")
    curve = _ClosedSpline(c.vertices, 32 * max(c.n, n_out))
    total = curve.length
    gaps = np.full(n_out, total / n_out)
    for _ in range(max_iter):
        y = curve(np.r_[0.0, np.cumsum(gaps[:-1])])
        chords = np.hypot(*(np.roll(y, -1, axis=0) - y).T)
        spread = (chords.max() - chords.min()) / chords.mean()
        if spread <= rtol:
            break
        gaps = gaps * (chords.mean() / chords)
        gaps *= total / gaps.sum()
    y[0] = c.vertices[0]
    return DiscreteCurve(y)


def fenchel_example(beta: float, n: int = 2000) -> DiscreteCurve:
    """Non-embedded closed C^1 curve with total curvature ``4 pi - 4 beta``.

    A unit-circle arc of length ``2 pi - 2 beta``, symmetric about the x-axis,
    is extended along its end tangents until they cross on the axis at
    ``P = (1 / cos beta, 0)``; the point reflection through ``P`` closes the
    curve.  Vertices are spread uniformly in arc length.
    """
    beta = float(beta)
    if not 0.0 < beta < math.pi / 2:
        raise ValueError(f"beta must lie in (0, pi/2), got {beta}")
    n = int(n)
    if n < 16:
        raise ValueError("n must be at least 16")
    cb, sb, tb = math.cos(beta), math.sin(beta), math.tan(beta)
    arc = 2 * math.pi - 2 * beta
    line = 2 * tb
    total = 2 * arc + 2 * line
    centre_r = np.array([2.0 / cb, 0.0])
    bottom = np.array([cb, -sb])
    top_r = np.array([2.0 / cb - cb, -sb])
    up_right = np.array([sb, cb])
    up_left = np.array([-sb, cb])

    s = np.arange(n) * (total / n)
    pts = np.empty((n, 2))
    # left arc, counter-clockwise from angle beta to 2 pi - beta
    m = s < arc
    ang = beta + s[m]
    pts[m] = np.column_stack([np.cos(ang), np.sin(ang)])
    # first tangent line through P
    m2 = (s >= arc) & (s < arc + line)
    pts[m2] = bottom + (s[m2] - arc)[:, None] * up_right
    # reflected arc, clockwise from angle pi - beta to -pi + beta
    m3 = (s >= arc + line) & (s < 2 * arc + line)
    ang = (math.pi - beta) - (s[m3] - arc - line)
    pts[m3] = centre_r + np.column_stack([np.cos(ang), np.sin(ang)])
    # second tangent line back to the start
    m4 = s >= 2 * arc + line
    pts[m4] = top_r + (s[m4] - 2 * arc - line)[:, None] * up_left
    return DiscreteCurve(pts)


# --------------------------------------------------------------------------
# Embeddedness threshold check


class Verdict(str, enum.Enum):
    CONSISTENT = "ConsistentWithTheorem"
    VIOLATION = "Violation"


@dataclass(frozen=True)
class LiYauResult:
    product: float
    embedded: bool
    verdict: Verdict
    report: IntersectionReport = field(repr=False, default_factory=IntersectionReport)


def liyau_check(c, margin: float = LIYAU_MARGIN, tangential_threshold: float = DEFAULT_TANGENTIAL_THRESHOLD) -> LiYauResult:
    """Compare energy * length against c* and the curve's self-intersections.

    A transversal crossing on a curve whose product lies below ``c* - margin``
    contradicts the embeddedness threshold and is flagged as a violation.
    """
    c = as_curve(c)
    product = energy_length_product(c)
    report = self_intersections(c, tangential_threshold=tangential_threshold)
    c_star = constants().c_star
    violation = product < c_star - margin and report.has_transversal
    return LiYauResult(
        product=product,
        embedded=not report,
        verdict=Verdict.VIOLATION if violation else Verdict.CONSISTENT,
        report=report,
    )
