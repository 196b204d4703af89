"""Concave functions on convex bodies and the center point they induce.

The center of a body C for a concave f >= 0 is found in four steps: take an
affine function g supporting f at a start point, symmetrize C along the
gradient of g, build the equal-split cone of the resulting profile, and
maximize f on the slice of C through the cone's volume-halving plane.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from .conesolver import BISECTION_TOL, TruncatedCone, equal_split_cone
from .errors import DegenerateBodyError, InputError, NegativeFunctionError
from .geometry import (
    ConvexBody,
    Polygon2,
    Polytope3,
    ProfileBody,
    convex_hull_2d,
    orthonormal_frame,
    polygon_area,
)
from .symmetrize import DEFAULT_KNOTS, Profile, schwarz_profile
from .utils import get_logger

logger = get_logger(__name__)

ACTIVE_TOL = 1e-12
SLICE_TIE_TOL = 1e-11
NONNEG_TOL = 1e-10


def _vector(values, name: str) -> NDArray[np.float64]:
    arr = np.array(values, dtype=float).reshape(-1)
    if len(arr) == 0 or not np.all(np.isfinite(arr)):
        raise InputError(f"{name} must be a nonempty finite vector")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Affine:
    """f(x) = <gradient, x> + offset."""

    gradient: NDArray[np.float64]
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "gradient", _vector(self.gradient, "Affine gradient"))
        if not np.isfinite(self.offset):
            raise InputError("Affine offset must be finite")
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return len(self.gradient)

    @property
    def gradients(self) -> NDArray[np.float64]:
        return self.gradient[None, :]

    @property
    def offsets(self) -> NDArray[np.float64]:
        return np.array([self.offset])

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.gradient + self.offset

    def composed(self, rotation, translation) -> "Affine":
        """f moved along with a body mapped by x -> rotation @ x + translation."""
        rot = np.asarray(rotation, dtype=float)
        grad = rot @ self.gradient
        return Affine(grad, self.offset - float(grad @ np.asarray(translation, dtype=float)))

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "affine", "gradient": self.gradient.tolist(), "offset": self.offset}

    def summary(self) -> str:
        return f"affine(grad={np.round(self.gradient, 6).tolist()}, off={self.offset:.6g})"


@dataclass(frozen=True, eq=False)
class MinAffine:
    """Pointwise minimum of finitely many affine pieces.

    Exact duplicates are dropped on construction, keeping the first
    occurrence so piece indices stay stable.
    """

    pieces: Tuple[Affine, ...]

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise InputError("MinAffine needs at least one piece")
        dims = {p.dim for p in pieces}
        if len(dims) != 1:
            raise InputError("MinAffine pieces have mismatched dimensions")
        unique = []
        for p in pieces:
            if not any(np.array_equal(p.gradient, q.gradient) and p.offset == q.offset for q in unique):
                unique.append(p)
        object.__setattr__(self, "pieces", tuple(unique))

    @property
    def dim(self) -> int:
        return self.pieces[0].dim

    @property
    def gradients(self) -> NDArray[np.float64]:
        return np.stack([p.gradient for p in self.pieces])

    @property
    def offsets(self) -> NDArray[np.float64]:
        return np.array([p.offset for p in self.pieces])

    def piece_values(self, x) -> NDArray[np.float64]:
        return np.asarray(x, dtype=float) @ self.gradients.T + self.offsets

    def __call__(self, x):
        return np.min(self.piece_values(x), axis=-1)

    def active_pieces(self, x, tol: float = ACTIVE_TOL) -> NDArray[np.int64]:
        """Indices of the pieces within tol (relative) of f(x)."""
        values = self.piece_values(x)
        low = float(values.min())
        return np.nonzero(values <= low + tol * max(1.0, abs(low)))[0]

    def composed(self, rotation, translation) -> "MinAffine":
        return MinAffine(tuple(p.composed(rotation, translation) for p in self.pieces))

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "min-affine", "pieces": [p.to_dict() for p in self.pieces]}

    def summary(self) -> str:
        return f"min-affine({len(self.pieces)} pieces)"


ConcaveFunction = Union[Affine, MinAffine]


def minimum_on_body(body: ConvexBody, f: ConcaveFunction) -> float:
    """Exact minimum of f over the body.

    The minimum over a body of a minimum of affine pieces is the smallest
    of the per-piece minima; each is attained at a vertex of a polytope or,
    for a profile body, at a profile knot.
    """
    if isinstance(body, ProfileBody):
        p = body.profile
        axial = f.gradients[:, 0]
        radial = np.linalg.norm(f.gradients[:, 1:], axis=1)
        values = axial[:, None] * p.t[None, :] - radial[:, None] * p.v[None, :] + f.offsets[:, None]
        return float(values.min())
    return float(np.min(f(body.vertices)))


def function_scale(body: ConvexBody, f: ConcaveFunction) -> float:
    """Bound on |piece(x)| over the body for every affine piece of f, at least 1."""
    if isinstance(body, ProfileBody):
        p = body.profile
        reach = float(np.hypot(np.max(np.abs(p.t)), np.max(p.v)))
    else:
        reach = float(np.max(np.linalg.norm(body.vertices, axis=1)))
    sizes = np.abs(f.offsets) + np.linalg.norm(f.gradients, axis=1) * reach
    return max(1.0, float(np.max(sizes)))


def check_nonnegative(body: ConvexBody, f: ConcaveFunction) -> None:
    """Raise unless f >= 0 on the body, up to rounding relative to f's size there."""
    if f.dim != body.dim:
        raise InputError(f"Function dimension {f.dim} does not match body dimension {body.dim}")
    low = minimum_on_body(body, f)
    if low < -NONNEG_TOL * function_scale(body, f):
        raise NegativeFunctionError(f"Function is negative on the body (minimum {low:.6g})")


@dataclass(frozen=True, eq=False)
class SupportingAffine:
    """Affine g with g >= f on the body and g(basepoint) = f(basepoint)."""

    gradient: NDArray[np.float64]
    offset: float
    basepoint: NDArray[np.float64]
    piece: int = 0

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.gradient + self.offset

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gradient": self.gradient.tolist(),
            "offset": self.offset,
            "basepoint": self.basepoint.tolist(),
            "piece": self.piece,
        }


def supporting_affine(body: ConvexBody, f: ConcaveFunction, x0) -> SupportingAffine:
    """Supporting affine function of f at x0.

    An affine f supports itself; for a min of affines the active piece with
    the smallest index is taken.

    Raises:
        InputError: If x0 lies outside the body
    """
    x0 = _vector(x0, "Start point")
    if len(x0) != body.dim:
        raise InputError(f"Start point must have {body.dim} coordinates")
    if not body.contains(x0, tol=1e-9):
        raise InputError(f"Start point {x0.tolist()} lies outside the body")
    if isinstance(f, Affine):
        return SupportingAffine(f.gradient, f.offset, x0, 0)
    index = int(f.active_pieces(x0)[0])
    piece = f.pieces[index]
    logger.debug(f"Supporting piece {index} at {x0.tolist()}")
    return SupportingAffine(piece.gradient, piece.offset, x0, index)


def _envelope_breaks(slopes: NDArray, intercepts: NDArray, lo: float, hi: float) -> NDArray:
    """Endpoints and kinks of s -> min_i (slopes[i] s + intercepts[i]) on [lo, hi].

    Walks the lower envelope left to right; every step moves to a line of
    strictly smaller slope, so there are at most len(slopes) steps.
    """
    scale = max(1.0, abs(lo), abs(hi))
    eps = 1e-14 * scale
    points = [lo]
    s = lo
    values = slopes * s + intercepts
    low = values.min()
    ties = np.nonzero(values <= low + 1e-12 * max(1.0, abs(low)))[0]
    current = ties[np.argmin(slopes[ties])]
    for _ in range(len(slopes)):
        steeper = np.nonzero(slopes < slopes[current] - 1e-15 * max(1.0, abs(slopes[current])))[0]
        if len(steeper) == 0:
            break
        cross = (intercepts[current] - intercepts[steeper]) / (slopes[steeper] - slopes[current])
        cross = np.maximum(cross, s)
        nxt = float(cross.min())
        if nxt >= hi - eps:
            break
        candidates = steeper[cross <= nxt + eps]
        current = candidates[np.argmin(slopes[candidates])]
        s = nxt
        points.append(s)
    points.append(hi)
    return np.array(points)


def _slice_segment(body: Polygon2 | ProfileBody, f: ConcaveFunction, u, t: float, tol: float):
    frame = orthonormal_frame(u)
    w = frame[:, 1]
    lo, hi = body.chord_ends(u, np.array([t]))
    lo, hi = float(lo[0]), float(hi[0])
    if np.isnan(lo):
        raise DegenerateBodyError(f"Slice at t={t} misses the polygon")
    base = t * np.asarray(u, dtype=float)
    slopes = f.gradients @ w
    intercepts = f.gradients @ base + f.offsets
    s = _envelope_breaks(slopes, intercepts, lo, hi)
    values = np.min(slopes[None, :] * s[:, None] + intercepts[None, :], axis=1)
    top = float(values.max())
    near = s[values >= top - tol * max(1.0, abs(top))]
    tie = bool(near.max() - near.min() > 1e-12 * max(1.0, hi - lo))
    return base + 0.5 * (near.min() + near.max()) * w, tie


def _face_centroid(points: NDArray[np.float64]) -> NDArray[np.float64]:
    hull = convex_hull_2d(points)
    if len(hull) >= 3:
        area = polygon_area(hull)
        if area > 1e-20:
            nxt = np.roll(hull, -1, axis=0)
            cross = hull[:, 0] * nxt[:, 1] - nxt[:, 0] * hull[:, 1]
            return np.sum((hull + nxt) * cross[:, None], axis=0) / (6.0 * area)
    if len(hull) >= 2:
        return 0.5 * (hull[0] + hull[-1])
    return points.mean(axis=0)


def _slice_polygon(body: Polytope3, f: ConcaveFunction, u, t: float, tol: float):
    poly, frame = body.section_polygon(u, t)
    if len(poly) < 3:
        raise DegenerateBodyError(f"Slice at t={t} is not a polygon")
    base = t * np.asarray(u, dtype=float)
    coef = f.gradients @ frame[:, 1:]
    const = f.gradients @ base + f.offsets

    candidates = [poly]
    nxt = np.roll(poly, -1, axis=0)
    pairs = list(combinations(range(len(const)), 2))
    for i, j in pairs:
        d, e = coef[i] - coef[j], const[i] - const[j]
        va, vb = poly @ d + e, nxt @ d + e
        cut = va * vb < 0
        lam = va[cut] / (va[cut] - vb[cut])
        candidates.append(poly[cut] + lam[:, None] * (nxt[cut] - poly[cut]))
    if len(const) >= 3:
        normals = np.column_stack([nxt[:, 1] - poly[:, 1], poly[:, 0] - nxt[:, 0]])
        offsets = np.sum(normals * poly, axis=1)
        scale = max(1.0, float(np.max(np.abs(poly))))
        for i, j, k in combinations(range(len(const)), 3):
            mat = np.array([coef[i] - coef[j], coef[i] - coef[k]])
            if abs(np.linalg.det(mat)) <= 1e-13:
                continue
            y = np.linalg.solve(mat, [const[j] - const[i], const[k] - const[i]])
            if np.all(normals @ y - offsets <= 1e-10 * scale):
                candidates.append(y[None, :])
    pts = np.concatenate(candidates)
    values = np.min(pts @ coef.T + const, axis=1)
    top = float(values.max())
    face = pts[values >= top - tol * max(1.0, abs(top))]
    y = _face_centroid(face)
    tie = bool(np.max(np.ptp(face, axis=0)) > 1e-12 * max(1.0, float(np.max(np.ptp(poly, axis=0)))))
    return base + frame[:, 1:] @ y, tie


def _slice_ball(body: ProfileBody, f: ConcaveFunction, u, t: float):
    if not body.on_axis(u):
        raise InputError(f"Profile bodies in dimension {body.dim} are sliced along their axis only")
    sign = 1.0 if u[0] > 0 else -1.0
    radius = float(body.profile(sign * t))
    center = t * np.asarray(u, dtype=float)
    radial = f.gradients[:, 1:]
    norms = np.linalg.norm(radial, axis=1)
    if isinstance(f, Affine) or len(f.pieces) == 1:
        if norms[0] == 0.0:
            return center, True
        point = center.copy()
        point[1:] += radius * radial[0] / norms[0]
        return point, False
    if np.any(norms > 0):
        raise InputError("Min-affine functions on profile bodies must depend on the axis coordinate only")
    return center, True


def maximize_on_slice(
    body: ConvexBody, f: ConcaveFunction, direction, t: float, tie_tol: float = SLICE_TIE_TOL
) -> Tuple[NDArray[np.float64], bool]:
    """Maximizer of f on body ∩ {<x, direction> = t}.

    Exact for min-affine f: a segment slice is scanned at the kinks of the
    lower envelope, a polygon slice at its vertices, at points where edges
    cross a piece switch and at interior points where three pieces meet.
    When the maximum is attained on a whole face the face centroid is
    returned.

    Returns:
        Tuple (point, tie_broken)
    """
    u = np.asarray(direction, dtype=float)
    if isinstance(body, Polygon2) or (isinstance(body, ProfileBody) and body.dim == 2):
        return _slice_segment(body, f, u, t, tie_tol)
    if isinstance(body, Polytope3):
        return _slice_polygon(body, f, u, t, tie_tol)
    if isinstance(body, ProfileBody):
        return _slice_ball(body, f, u, t)
    raise InputError(f"Unsupported body type {type(body).__name__}")


@dataclass(frozen=True, eq=False)
class CenterResult:
    point: NDArray[np.float64]
    direction: NDArray[np.float64]
    t_value: float
    cone: TruncatedCone
    f_at_center: float
    tie_broken: bool
    start_point: NDArray[np.float64]
    support: SupportingAffine
    profile: Optional[Profile] = field(default=None, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": self.point.tolist(),
            "direction": self.direction.tolist(),
            "t_value": self.t_value,
            "f0": self.f_at_center,
            "cone": self.cone.to_dict(),
            "diagnostics": {
                "tie_broken": self.tie_broken,
                "start_point": self.start_point.tolist(),
                "supporting_piece": self.support.piece,
            },
        }


def find_center(
    body: ConvexBody,
    f: ConcaveFunction,
    x0: Optional[Sequence[float]] = None,
    knot_count: int = DEFAULT_KNOTS,
    tie_tol: float = SLICE_TIE_TOL,
    cone_tol: float = BISECTION_TOL,
) -> CenterResult:
    """Center point of the body for the concave function f.

    Args:
        body: Full-dimensional convex body
        f: Affine or min-affine function, nonnegative on the body
        x0: Start point of the supporting affine function (default: centroid)
        knot_count: Uniform knots of the symmetrization profile
        tie_tol: Relative tolerance defining the maximizing face of the slice
        cone_tol: Bisection width on the slope of the equal-split cone

    Returns:
        CenterResult with the point, direction, median abscissa, cone and f0

    Raises:
        NegativeFunctionError: If f is negative somewhere on the body
        InputError: If f has a radial gradient on a profile body of dimension 3 or more
        DegenerateBodyError: If the body or the median slice is degenerate
    """
    check_nonnegative(body, f)
    start = body.centroid() if x0 is None else _vector(x0, "Start point")
    g = supporting_affine(body, f, start)

    norm = float(np.linalg.norm(g.gradient))
    if norm <= 1e-15:
        u = np.zeros(body.dim)
        u[0] = 1.0
    else:
        u = g.gradient / norm
    if isinstance(body, ProfileBody) and not body.slices_along(u):
        raise InputError(
            f"f varies across the axis of a {body.dim}-dimensional profile body; "
            "only functions of the axis coordinate are supported there"
        )

    profile = schwarz_profile(body, u, knot_count)
    cone = equal_split_cone(profile, tol=cone_tol)
    t = cone.t_R
    point, tie = maximize_on_slice(body, f, u, t, tie_tol)
    f0 = float(f(point))
    logger.info(f"Center {np.round(point, 10).tolist()} at t={t:.10g}, f0={f0:.10g}")
    return CenterResult(point, u, t, cone, f0, tie, start, g, profile)
