"""Convex bodies and their elementary exact computations.

Three representations share one interface: planar polygons (Polygon2),
polytopes in 3-space (Polytope3) and rotationally symmetric bodies in any
dimension given by a radius profile (ProfileBody). Sections along a general
direction u are taken in the orthonormal frame whose first axis is u.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.spatial import ConvexHull, QhullError

from .errors import DegenerateBodyError, InputError
from .quadrature import gauss_legendre
from .symmetrize import Profile
from .utils import get_logger

logger = get_logger(__name__)

Point = NDArray[np.float64]

MERGE_TOL = 1e-12
UNIT_TOL = 1e-9

PLANES: Dict[str, Tuple[int, int]] = {"xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}


def unit_direction(direction, dim: int) -> Point:
    """Validate that `direction` is a unit vector of the given dimension."""
    u = np.asarray(direction, dtype=float).reshape(-1)
    if u.shape != (dim,) or not np.all(np.isfinite(u)):
        raise InputError(f"Direction must be a finite {dim}-vector, got {direction!r}")
    if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
        raise InputError(f"Direction must have unit length, got norm {np.linalg.norm(u):.3g}")
    return u


def orthonormal_frame(u: Point) -> NDArray[np.float64]:
    """Orthonormal basis (as columns) whose first column is u.

    Gram-Schmidt completion of u by the coordinate axes, done with QR.
    """
    n = len(u)
    q, _ = np.linalg.qr(np.column_stack([u, np.eye(n)]))
    q = q[:, :n]
    if np.dot(q[:, 0], u) < 0:
        q[:, 0] = -q[:, 0]
    q[:, 0] = u
    return q


def _cross2(o: Point, a: Point, b: Point) -> float:
    return float((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]))


def convex_hull_2d(points) -> NDArray[np.float64]:
    """Convex hull by monotone chain, counterclockwise, collinear points dropped."""
    pts = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    if len(pts) < 3:
        return pts
    scale = max(1.0, float(np.max(np.abs(pts))))
    eps = MERGE_TOL * scale * scale
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross2(lower[-2], lower[-1], p) <= eps:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in pts[::-1]:
        while len(upper) >= 2 and _cross2(upper[-2], upper[-1], p) <= eps:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def polygon_area(vertices: NDArray[np.float64]) -> float:
    """Signed shoelace area (positive for counterclockwise order)."""
    if len(vertices) < 3:
        return 0.0
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


class ConvexBody(ABC):
    """Common interface of all body representations."""

    dim: int

    @abstractmethod
    def volume(self) -> float:
        ...

    @abstractmethod
    def centroid(self) -> Point:
        ...

    @abstractmethod
    def support_interval(self, direction) -> Tuple[float, float]:
        ...

    @abstractmethod
    def section_measures(self, direction, ts) -> NDArray[np.float64]:
        """(n-1)-volumes of the sections {<x,u> = t} for every t in `ts`."""

    @abstractmethod
    def breakpoints(self, direction) -> NDArray[np.float64]:
        """Abscissae along u where the section function may fail to be smooth."""

    @abstractmethod
    def contains(self, x, tol: float = 1e-12) -> bool:
        ...

    @abstractmethod
    def transformed(self, rotation, translation) -> "ConvexBody":
        """Image of the body under x -> rotation @ x + translation."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        ...

    def section_measure(self, direction, t: float) -> float:
        return float(self.section_measures(direction, np.array([t], dtype=float))[0])

    def summary(self) -> str:
        return f"{self.to_dict()['type']}(dim={self.dim}, volume={self.volume():.6g})"


class Polygon2(ConvexBody):
    """Convex polygon with vertices in strictly counterclockwise order."""

    dim = 2

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or not np.all(np.isfinite(v)):
            raise InputError("Polygon vertices must be a list of finite 2D points")
        v = self._normalize(v)
        v.setflags(write=False)
        self.vertices = v
        self._area = polygon_area(v)
        if self._area <= MERGE_TOL * max(1.0, float(np.max(np.abs(v)))) ** 2:
            raise DegenerateBodyError("Polygon has zero area")

    @staticmethod
    def _normalize(v: NDArray[np.float64]) -> NDArray[np.float64]:
        scale = max(1.0, float(np.max(np.abs(v)))) if len(v) else 1.0
        # merge duplicate consecutive vertices (cyclically)
        keep = [p for i, p in enumerate(v) if np.max(np.abs(p - v[i - 1])) > MERGE_TOL * scale]
        v = np.array(keep if keep else v[:1])
        if len(v) < 3:
            raise DegenerateBodyError("Polygon needs at least three distinct vertices")
        # drop middle points of collinear runs
        eps = MERGE_TOL * scale * scale
        changed = True
        while changed and len(v) >= 3:
            changed = False
            for i in range(len(v)):
                if abs(_cross2(v[i - 1], v[i], v[(i + 1) % len(v)])) <= eps:
                    v = np.delete(v, i, axis=0)
                    changed = True
                    break
        if len(v) < 3:
            raise DegenerateBodyError("Polygon vertices are collinear")
        turns = np.array([_cross2(v[i - 1], v[i], v[(i + 1) % len(v)]) for i in range(len(v))])
        if np.all(turns < 0):
            raise InputError("Polygon vertices must be in counterclockwise order")
        if np.any(turns < 0):
            raise InputError("Polygon is not convex")
        edges = np.roll(v, -1, axis=0) - v
        angles = np.arctan2(
            edges[:, 0] * np.roll(edges[:, 1], -1) - edges[:, 1] * np.roll(edges[:, 0], -1),
            np.sum(edges * np.roll(edges, -1, axis=0), axis=1),
        )
        if abs(np.sum(angles) - 2 * math.pi) > 1e-6:
            raise InputError("Polygon boundary winds more than once")
        return v

    @classmethod
    def from_points(cls, points) -> "Polygon2":
        """Polygon spanned by the convex hull of an arbitrary point set."""
        hull = convex_hull_2d(points)
        if len(hull) < 3:
            raise DegenerateBodyError("Point set is collinear")
        return cls(hull)

    def volume(self) -> float:
        return self._area

    def centroid(self) -> Point:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        return np.sum((v + w) * cross[:, None], axis=0) / (6.0 * self._area)

    def halfspaces(self) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Outward unit normals and offsets: the polygon is {x : A x <= b}."""
        d = np.roll(self.vertices, -1, axis=0) - self.vertices
        normals = np.column_stack([d[:, 1], -d[:, 0]])
        normals /= np.linalg.norm(normals, axis=1)[:, None]
        return normals, np.sum(normals * self.vertices, axis=1)

    def contains(self, x, tol: float = 1e-12) -> bool:
        a, b = self.halfspaces()
        scale = max(1.0, float(np.max(np.abs(self.vertices))))
        return bool(np.all(a @ np.asarray(x, dtype=float) - b <= tol * scale))

    def support_interval(self, direction) -> Tuple[float, float]:
        s = self.vertices @ unit_direction(direction, 2)
        return float(s.min()), float(s.max())

    def breakpoints(self, direction) -> NDArray[np.float64]:
        return np.unique(self.vertices @ unit_direction(direction, 2))

    def chord_ends(self, direction, ts) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Lowest and highest coordinate along the second frame axis on every chord.

        Entries are nan where the line misses the polygon.
        """
        u = unit_direction(direction, 2)
        frame = orthonormal_frame(u)
        ts = np.asarray(ts, dtype=float)
        s = self.vertices @ u
        w = self.vertices @ frame[:, 1]
        s_a, s_b = s, np.roll(s, -1)
        w_a, w_b = w, np.roll(w, -1)
        eps = MERGE_TOL * max(1.0, float(np.max(np.abs(s))))
        ds = s_b - s_a
        flat = np.abs(ds) <= eps
        safe = np.where(flat, 1.0, ds)
        lam = (ts[:, None] - s_a[None, :]) / safe[None, :]
        hit = (~flat)[None, :] & (lam >= -eps) & (lam <= 1.0 + eps)
        lam = np.clip(lam, 0.0, 1.0)
        w_hit = w_a[None, :] + lam * (w_b - w_a)[None, :]
        on_flat = flat[None, :] & (np.abs(ts[:, None] - s_a[None, :]) <= eps)
        lo = np.full(len(ts), np.inf)
        hi = np.full(len(ts), -np.inf)
        lo = np.minimum(lo, np.min(np.where(hit, w_hit, np.inf), axis=1))
        hi = np.maximum(hi, np.max(np.where(hit, w_hit, -np.inf), axis=1))
        flat_lo = np.minimum(w_a, w_b)[None, :]
        flat_hi = np.maximum(w_a, w_b)[None, :]
        lo = np.minimum(lo, np.min(np.where(on_flat, flat_lo, np.inf), axis=1))
        hi = np.maximum(hi, np.max(np.where(on_flat, flat_hi, -np.inf), axis=1))
        missing = ~np.isfinite(lo)
        lo[missing] = np.nan
        hi[missing] = np.nan
        return lo, hi

    def section_measures(self, direction, ts) -> NDArray[np.float64]:
        lo, hi = self.chord_ends(direction, ts)
        return np.where(np.isnan(lo), 0.0, np.maximum(hi - lo, 0.0))

    def clip(self, normal, offset: float) -> Optional["Polygon2"]:
        """Polygon ∩ {x : <normal, x> <= offset} by one Sutherland-Hodgman pass."""
        a = np.asarray(normal, dtype=float)
        v = self.vertices
        d = v @ a - offset
        scale = max(1.0, float(np.max(np.abs(v))))
        eps = MERGE_TOL * scale * max(1.0, float(np.linalg.norm(a)))
        out = []
        for i in range(len(v)):
            p, q = v[i], v[(i + 1) % len(v)]
            dp, dq = d[i], d[(i + 1) % len(v)]
            if dp <= eps:
                out.append(p)
            if (dp < -eps and dq > eps) or (dp > eps and dq < -eps):
                out.append(p + (q - p) * (dp / (dp - dq)))
        if len(out) < 3:
            return None
        try:
            return Polygon2.from_points(out)
        except (DegenerateBodyError, InputError):
            return None

    def triangles(self) -> NDArray[np.float64]:
        """Fan triangulation from the vertex centroid, shape (k, 3, 2)."""
        c = self.vertices.mean(axis=0)
        w = np.roll(self.vertices, -1, axis=0)
        return np.stack([np.broadcast_to(c, self.vertices.shape), self.vertices, w], axis=1)

    def transformed(self, rotation, translation) -> "Polygon2":
        rot = np.asarray(rotation, dtype=float)
        return Polygon2.from_points(self.vertices @ rot.T + np.asarray(translation, dtype=float))

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "polygon2", "vertices": self.vertices.tolist()}


class Polytope3(ConvexBody):
    """Convex polytope in 3-space given by the convex hull of its vertices."""

    dim = 3

    def __init__(self, vertices):
        pts = np.asarray(vertices, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or not np.all(np.isfinite(pts)):
            raise InputError("Polytope vertices must be a list of finite 3D points")
        try:
            hull = ConvexHull(pts)
            pts = pts[hull.vertices]
            hull = ConvexHull(pts)
        except (QhullError, ValueError) as e:
            raise DegenerateBodyError(f"Polytope is not full-dimensional: {e}") from e
        self.vertices = pts
        self.simplices = hull.simplices
        self.normals = hull.equations[:, :3]
        self.offsets = -hull.equations[:, 3]
        edges = np.sort(
            np.concatenate([self.simplices[:, [0, 1]], self.simplices[:, [1, 2]], self.simplices[:, [0, 2]]]),
            axis=1,
        )
        self.edges = np.unique(edges, axis=0)
        for arr in (self.vertices, self.simplices, self.normals, self.offsets, self.edges):
            arr.setflags(write=False)
        self._scale = max(1.0, float(np.max(np.abs(pts))))
        tets = self.tetrahedra()
        e = tets[:, 1:, :] - tets[:, :1, :]
        vols = np.abs(np.linalg.det(e)) / 6.0
        self._volume = float(vols.sum())
        if self._volume <= MERGE_TOL * self._scale**3:
            raise DegenerateBodyError("Polytope has zero volume")
        self._centroid = np.sum(vols[:, None] * tets.mean(axis=1), axis=0) / self._volume

    def tetrahedra(self) -> NDArray[np.float64]:
        """Cone decomposition from the vertex mean over the triangulated facets."""
        c = self.vertices.mean(axis=0)
        tri = self.vertices[self.simplices]
        return np.concatenate([np.broadcast_to(c, (len(tri), 1, 3)), tri], axis=1)

    def volume(self) -> float:
        return self._volume

    def centroid(self) -> Point:
        return self._centroid.copy()

    def contains(self, x, tol: float = 1e-12) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(self.normals @ x - self.offsets <= tol * self._scale))

    def support_interval(self, direction) -> Tuple[float, float]:
        s = self.vertices @ unit_direction(direction, 3)
        return float(s.min()), float(s.max())

    def breakpoints(self, direction) -> NDArray[np.float64]:
        return np.unique(self.vertices @ unit_direction(direction, 3))

    def section_points(self, direction, t: float) -> NDArray[np.float64]:
        """Points spanning body ∩ {<x,u> = t}: vertices on the plane and edge crossings."""
        u = unit_direction(direction, 3)
        s = self.vertices @ u
        eps = MERGE_TOL * self._scale
        on_plane = self.vertices[np.abs(s - t) <= eps]
        a, b = self.edges[:, 0], self.edges[:, 1]
        sa, sb = s[a], s[b]
        crossing = ((sa < t - eps) & (sb > t + eps)) | ((sa > t + eps) & (sb < t - eps))
        lam = (t - sa[crossing]) / (sb[crossing] - sa[crossing])
        pa, pb = self.vertices[a[crossing]], self.vertices[b[crossing]]
        cut = pa + lam[:, None] * (pb - pa)
        return np.concatenate([on_plane, cut])

    def section_polygon(self, direction, t: float) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Cross-section as a CCW polygon in the frame's (2nd, 3rd) coordinates.

        Returns:
            Tuple (2D polygon vertices, frame matrix)
        """
        u = unit_direction(direction, 3)
        frame = orthonormal_frame(u)
        pts = self.section_points(u, t)
        if len(pts) < 3:
            return np.empty((0, 2)), frame
        return convex_hull_2d(pts @ frame[:, 1:]), frame

    def _exact_area(self, u: Point, t: float) -> float:
        poly, _ = self.section_polygon(u, t)
        return max(polygon_area(poly), 0.0)

    def section_measures(self, direction, ts) -> NDArray[np.float64]:
        """Section areas, exact: the area is quadratic between vertex breakpoints."""
        u = unit_direction(direction, 3)
        ts = np.asarray(ts, dtype=float)
        bps = self.breakpoints(u)
        eps = MERGE_TOL * self._scale
        bps = bps[np.concatenate([[True], np.diff(bps) > eps])]
        mids = 0.5 * (bps[:-1] + bps[1:])
        ends = np.array([self._exact_area(u, b) for b in bps])
        centers = np.array([self._exact_area(u, m) for m in mids])
        k = np.clip(np.searchsorted(bps, ts, side="right") - 1, 0, len(bps) - 2)
        a, b = bps[k], bps[k + 1]
        x = (ts - a) / (b - a)
        fa, fm, fb = ends[k], centers[k], ends[k + 1]
        # Lagrange quadratic through x = 0, 1/2, 1
        area = fa * (2 * x - 1) * (x - 1) + fm * 4 * x * (1 - x) + fb * x * (2 * x - 1)
        outside = (ts < bps[0] - eps) | (ts > bps[-1] + eps)
        return np.where(outside, 0.0, np.maximum(area, 0.0))

    def clip(self, normal, offset: float) -> Optional["Polytope3"]:
        """Polytope ∩ {x : <normal, x> <= offset}, or None if it has no volume."""
        a = np.asarray(normal, dtype=float)
        d = self.vertices @ a - offset
        eps = MERGE_TOL * self._scale * max(1.0, float(np.linalg.norm(a)))
        inside = self.vertices[d <= eps]
        i, j = self.edges[:, 0], self.edges[:, 1]
        crossing = ((d[i] < -eps) & (d[j] > eps)) | ((d[i] > eps) & (d[j] < -eps))
        lam = d[i[crossing]] / (d[i[crossing]] - d[j[crossing]])
        pi, pj = self.vertices[i[crossing]], self.vertices[j[crossing]]
        pts = np.concatenate([inside, pi + lam[:, None] * (pj - pi)])
        if len(pts) < 4:
            return None
        try:
            return Polytope3(pts)
        except DegenerateBodyError:
            return None

    def project(self, plane: Sequence[int]) -> Polygon2:
        """Orthogonal projection onto a coordinate 2-plane given by two axes."""
        axes = list(plane)
        try:
            return Polygon2.from_points(self.vertices[:, axes])
        except DegenerateBodyError as e:
            raise DegenerateBodyError(f"Projection onto axes {axes} is degenerate") from e

    def transformed(self, rotation, translation) -> "Polytope3":
        rot = np.asarray(rotation, dtype=float)
        return Polytope3(self.vertices @ rot.T + np.asarray(translation, dtype=float))

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "polytope3", "vertices": self.vertices.tolist()}


class ProfileBody(ConvexBody):
    """Body of revolution about the first axis with radius profile v."""

    def __init__(self, profile: Profile):
        self.profile = profile
        self.dim = profile.dim
        if profile.volume() <= 0.0:
            raise DegenerateBodyError("Profile body has zero volume")

    def volume(self) -> float:
        return self.profile.volume()

    def centroid(self) -> Point:
        c = np.zeros(self.dim)
        c[0] = self.profile.moment() / self.profile.volume()
        return c

    def as_polygon(self) -> Polygon2:
        """The planar profile body as the polygon on (t_k, +-v_k)."""
        if self.dim != 2:
            raise InputError("Only planar profile bodies are polygons")
        t, v = self.profile.t, self.profile.v
        return Polygon2.from_points(np.concatenate([np.column_stack([t, v]), np.column_stack([t, -v])]))

    def on_axis(self, direction) -> bool:
        u = unit_direction(direction, self.dim)
        return abs(abs(u[0]) - 1.0) <= UNIT_TOL

    def slices_along(self, direction) -> bool:
        """Planar profile bodies are polygons and slice in every direction.

        From dimension 3 on only sections orthogonal to the axis are available.
        """
        return self.dim == 2 or self.on_axis(direction)

    def _axis_sign(self, direction) -> float:
        if not self.on_axis(direction):
            raise InputError(f"Profile bodies in dimension {self.dim} are sliced along their axis only")
        return 1.0 if unit_direction(direction, self.dim)[0] > 0 else -1.0

    def support_interval(self, direction) -> Tuple[float, float]:
        u = unit_direction(direction, self.dim)
        radial = float(np.linalg.norm(u[1:]))
        t, v = self.profile.t, self.profile.v
        hi = float(np.max(t * u[0] + v * radial))
        lo = float(np.min(t * u[0] - v * radial))
        return lo, hi

    def breakpoints(self, direction) -> NDArray[np.float64]:
        if self.dim == 2:
            u = unit_direction(direction, 2)
            t, v = self.profile.t, self.profile.v
            return np.unique(np.concatenate([u[0] * t + abs(u[1]) * v, u[0] * t - abs(u[1]) * v]))
        return np.sort(self._axis_sign(direction) * self.profile.t)

    def chord_ends(self, direction, ts) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Chord ends along the second frame axis, as for polygons (dimension 2 only).

        The line <x, u> = t meets the body where
        u0 s - a v(s) <= t <= u0 s + a v(s) with a = |u1|. The left side is
        convex and the right side concave in s, so both solution sets are
        intervals read off the monotone branches by interpolation.
        """
        if self.dim != 2:
            raise InputError("Chords are defined for planar profile bodies only")
        u = unit_direction(direction, 2)
        w = orthonormal_frame(u)[:, 1]
        ts = np.asarray(ts, dtype=float)
        t, v = self.profile.t, self.profile.v
        eps = MERGE_TOL * max(1.0, float(np.max(np.abs(t))), float(np.max(v)))
        a = abs(float(u[1]))
        if self.on_axis(u):
            s = u[0] * ts
            inside = (s >= t[0] - eps) & (s <= t[-1] + eps)
            half = np.where(inside, self.profile(np.clip(s, t[0], t[-1])), np.nan)
            ends = np.stack([-half, half]) / w[1]
            return np.min(ends, axis=0), np.max(ends, axis=0)
        upper = u[0] * t + a * v
        lower = u[0] * t - a * v
        k = int(np.argmax(upper))
        j = int(np.argmin(lower))
        s_lo = np.maximum(
            np.interp(ts, upper[: k + 1], t[: k + 1]),
            np.interp(ts, lower[: j + 1][::-1], t[: j + 1][::-1]),
        )
        s_hi = np.minimum(
            np.interp(ts, upper[k:][::-1], t[k:][::-1]),
            np.interp(ts, lower[j:], t[j:]),
        )
        missing = (ts > upper[k] + eps) | (ts < lower[j] - eps) | (s_hi < s_lo - eps)
        s_hi = np.maximum(s_hi, s_lo)
        # t u + lam w has first coordinate t u0 + lam w0 with |w0| = a
        ends = np.stack([(s_lo - ts * u[0]) / w[0], (s_hi - ts * u[0]) / w[0]])
        lo, hi = np.min(ends, axis=0), np.max(ends, axis=0)
        lo[missing] = np.nan
        hi[missing] = np.nan
        return lo, hi

    def section_measures(self, direction, ts) -> NDArray[np.float64]:
        ts = np.asarray(ts, dtype=float)
        if self.dim == 2 and not self.on_axis(direction):
            lo, hi = self.chord_ends(direction, ts)
            return np.where(np.isnan(lo), 0.0, hi - lo)
        return self.profile.section_measure(self._axis_sign(direction) * ts)

    def contains(self, x, tol: float = 1e-12) -> bool:
        x = np.asarray(x, dtype=float)
        p = self.profile
        scale = max(1.0, abs(p.t0), abs(p.t1), float(np.max(p.v)))
        if x[0] < p.t0 - tol * scale or x[0] > p.t1 + tol * scale:
            return False
        return bool(np.linalg.norm(x[1:]) <= p(np.clip(x[0], p.t0, p.t1)) + tol * scale)

    def transformed(self, rotation, translation) -> "ProfileBody":
        rot = np.asarray(rotation, dtype=float)
        shift = np.asarray(translation, dtype=float)
        if not np.allclose(rot, np.eye(self.dim)) or np.any(np.abs(shift[1:]) > 0):
            raise InputError("Profile bodies only support translations along their axis")
        return ProfileBody(self.profile.shifted(float(shift[0])))

    def to_dict(self) -> Dict[str, Any]:
        return self.profile.to_dict()


def volume(body: ConvexBody) -> float:
    """n-dimensional volume of the body."""
    return body.volume()


def centroid(body: ConvexBody) -> Point:
    """Center of mass (1/|C|) ∫_C x dx."""
    return body.centroid()


def section_measure(body: ConvexBody, direction, t: float) -> float:
    """(n-1)-volume of body ∩ {x : <x,u> = t}; zero outside the support interval."""
    return body.section_measure(direction, t)


def support_interval(body: ConvexBody, direction) -> Tuple[float, float]:
    """(-h(body, -u), h(body, u))."""
    return body.support_interval(direction)


def plane_axes(plane: str | Sequence[int]) -> Tuple[int, int]:
    """Axis pair of a coordinate plane given by name (xy, xz, yz) or by two axes."""
    if isinstance(plane, str):
        if plane not in PLANES:
            raise InputError(f"Unknown coordinate plane {plane!r}")
        return PLANES[plane]
    axes = tuple(int(a) for a in plane)
    if len(axes) != 2 or len(set(axes)) != 2 or not set(axes) <= {0, 1, 2}:
        raise InputError(f"Invalid coordinate plane: {plane!r}")
    return axes


def project_shadow(body: Polytope3, plane: str | Sequence[int]) -> Polygon2:
    """Shadow of a polytope on a coordinate plane."""
    if not isinstance(body, Polytope3):
        raise InputError("Shadows are defined for 3D polytopes only")
    return body.project(plane_axes(plane))


def fiber_axis(plane: str | Sequence[int]) -> int:
    """The coordinate axis orthogonal to a coordinate 2-plane."""
    return ({0, 1, 2} - set(plane_axes(plane))).pop()


def fubini_volume(body: ConvexBody, direction, order: int = 4) -> float:
    """Integral of the section function over the support interval.

    Gauss-Legendre between consecutive breakpoints; exact for polytopes.
    """
    u = unit_direction(direction, body.dim)
    t0, t1 = body.support_interval(u)
    bps = np.unique(np.clip(np.concatenate([[t0, t1], body.breakpoints(u)]), t0, t1))
    total = 0.0
    for a, b in zip(bps[:-1], bps[1:]):
        x, w = gauss_legendre(order, a, b)
        total += float(np.dot(w, body.section_measures(u, x)))
    return total


def ball_profile(dim: int, radius: float = 1.0, knot_count: int = 4097) -> Profile:
    """Profile of a Euclidean ball, knots clustered at the poles."""
    return Profile.from_function(
        lambda t: np.sqrt(np.maximum(radius**2 - t**2, 0.0)),
        -radius,
        radius,
        dim,
        knot_count=knot_count,
        spacing="chebyshev",
    )
