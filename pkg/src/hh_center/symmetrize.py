"""Schwarz symmetrization profiles of convex bodies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Any, Callable, Dict

import numpy as np
from numpy.typing import NDArray

from .errors import DegenerateBodyError, InputError, NonConcaveProfileError
from .quadrature import composite_nodes, gauss_legendre
from .utils import get_logger

if TYPE_CHECKING:
    from .geometry import ConvexBody

logger = get_logger(__name__)

DEFAULT_KNOTS = 1025
MIN_KNOTS = 33
CONCAVITY_TOL = 1e-9
# relative gap allowed between profile volume and the integrated sections
PROFILE_RTOL = 1e-9
REFINE_ROUNDS = 60
REFINE_FACTOR = 64


@lru_cache(maxsize=None)
def kappa(d: int) -> float:
    """Volume of the d-dimensional Euclidean unit ball.

    Uses kappa_0 = 1, kappa_1 = 2, kappa_d = kappa_{d-2} * 2*pi/d.
    """
    if d < 0:
        raise InputError(f"Ball dimension must be nonnegative, got {d}")
    if d == 0:
        return 1.0
    if d == 1:
        return 2.0
    return kappa(d - 2) * 2.0 * math.pi / d


def _quadrature_order(dim: int) -> int:
    # exact for v^(n-1) and t*v^(n-1) with v linear per interval
    return dim // 2 + 2


@dataclass(frozen=True, eq=False)
class Profile:
    """Concave radius function v(t) on [t0, t1], piecewise linear in its knots.

    Attributes:
        t: Strictly increasing knot abscissae
        v: Nonnegative radii at the knots
        dim: Ambient dimension n of the rotationally symmetric body
    """

    t: NDArray[np.float64]
    v: NDArray[np.float64]
    dim: int

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        v = np.array(self.v, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or len(t) < 2:
            raise InputError("Profile needs matching 1-D knot arrays with at least two knots")
        if self.dim < 2:
            raise InputError(f"Profile dimension must be at least 2, got {self.dim}")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise InputError("Profile knots must be finite")
        if np.any(np.diff(t) <= 0):
            raise InputError("Profile abscissae must be strictly increasing")
        scale = max(1.0, float(np.max(np.abs(v))))
        if np.any(v < -CONCAVITY_TOL * scale):
            raise InputError("Profile radii must be nonnegative")
        v = np.maximum(v, 0.0)
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)
        if not self.is_concave(CONCAVITY_TOL * scale):
            raise NonConcaveProfileError("Profile radii are not concave across knots")

    @classmethod
    def from_function(
        cls,
        func: Callable[[NDArray[np.float64]], NDArray[np.float64]],
        t0: float,
        t1: float,
        dim: int,
        knot_count: int = DEFAULT_KNOTS,
        spacing: str = "uniform",
    ) -> "Profile":
        """Sample a radius function at uniform or Chebyshev-clustered knots."""
        if spacing == "chebyshev":
            theta = np.linspace(math.pi, 0.0, knot_count)
            t = t0 + 0.5 * (t1 - t0) * (np.cos(theta) + 1.0)
        elif spacing == "uniform":
            t = np.linspace(t0, t1, knot_count)
        else:
            raise InputError(f"Unknown knot spacing: {spacing}")
        t[0], t[-1] = t0, t1
        return cls(t, np.asarray(func(t), dtype=float), dim)

    @property
    def t0(self) -> float:
        return float(self.t[0])

    @property
    def t1(self) -> float:
        return float(self.t[-1])

    @property
    def length(self) -> float:
        return self.t1 - self.t0

    def __call__(self, t):
        return np.interp(t, self.t, self.v, left=0.0, right=0.0)

    def is_concave(self, tol: float = CONCAVITY_TOL) -> bool:
        """Midpoint test at every interior knot against its neighbours' chord."""
        if len(self.t) < 3:
            return True
        t, v = self.t, self.v
        span = t[2:] - t[:-2]
        chord = ((t[2:] - t[1:-1]) * v[:-2] + (t[1:-1] - t[:-2]) * v[2:]) / span
        return bool(np.all(v[1:-1] - chord >= -tol))

    def section_measure(self, t):
        """kappa_{n-1} v(t)^{n-1}."""
        return kappa(self.dim - 1) * self(t) ** (self.dim - 1)

    def volume(self) -> float:
        """kappa_{n-1} times the integral of v^{n-1}, Gauss-Legendre per knot interval."""
        x, w = composite_nodes(self.t, _quadrature_order(self.dim))
        return float(kappa(self.dim - 1) * np.dot(w, self(x) ** (self.dim - 1)))

    def moment(self) -> float:
        """kappa_{n-1} times the integral of t v^{n-1}."""
        x, w = composite_nodes(self.t, _quadrature_order(self.dim))
        return float(kappa(self.dim - 1) * np.dot(w, x * self(x) ** (self.dim - 1)))

    def mirrored(self) -> "Profile":
        """Profile of the body reflected through t = 0."""
        return Profile(-self.t[::-1], self.v[::-1], self.dim)

    def shifted(self, offset: float) -> "Profile":
        return Profile(self.t + offset, self.v, self.dim)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "type": "profile",
            "dim": self.dim,
            "t0": self.t0,
            "t1": self.t1,
            "knots": [[float(a), float(b)] for a, b in zip(self.t, self.v)],
        }


def merge_knots(points: NDArray[np.float64], t0: float, t1: float) -> NDArray[np.float64]:
    """Sorted union of knots inside [t0, t1] with near-duplicates removed."""
    eps = 1e-12 * max(1.0, abs(t0), abs(t1), t1 - t0)
    pts = np.sort(np.clip(points, t0, t1))
    keep = np.concatenate([[True], np.diff(pts) > eps])
    pts = pts[keep]
    pts[0], pts[-1] = t0, t1
    # the last interior point may sit within eps of t1
    if len(pts) > 2 and pts[-1] - pts[-2] <= eps:
        pts = np.delete(pts, -2)
    return pts


def _radii(sections: NDArray[np.float64], dim: int) -> NDArray[np.float64]:
    return (np.maximum(sections, 0.0) / kappa(dim - 1)) ** (1.0 / (dim - 1))


def _interval_volumes(t: NDArray[np.float64], v: NDArray[np.float64], dim: int) -> NDArray[np.float64]:
    """Volume of each knot interval of the piecewise-linear profile (t, v)."""
    s, w = gauss_legendre(_quadrature_order(dim))
    lines = v[:-1, None] + np.diff(v)[:, None] * s[None, :]
    return kappa(dim - 1) * np.diff(t) * (lines ** (dim - 1) @ w)


def refine_knots(
    body: "ConvexBody",
    u: NDArray[np.float64],
    knots: NDArray[np.float64],
    sections: NDArray[np.float64],
    max_knots: int,
    rtol: float = PROFILE_RTOL,
):
    """Bisect knot intervals until the profile volume matches the sections.

    The reference volume of an interval is Simpson's rule on the section
    measure, which is exact between breakpoints of a polytope in 3-space
    where the section area is quadratic. Intervals whose gap exceeds an
    equal share of `rtol` times the total are halved.

    Returns:
        Tuple (knots, sections) with the inserted midpoints
    """
    eps = 1e-12 * max(1.0, float(np.max(np.abs(knots))), knots[-1] - knots[0])
    for _ in range(REFINE_ROUNDS):
        mids = 0.5 * (knots[:-1] + knots[1:])
        mid_sections = body.section_measures(u, mids)
        h = np.diff(knots)
        reference = h / 6.0 * (sections[:-1] + 4.0 * mid_sections + sections[1:])
        gap = np.abs(reference - _interval_volumes(knots, _radii(sections, body.dim), body.dim))
        budget = rtol * float(reference.sum())
        if float(gap.sum()) <= budget:
            return knots, sections
        split = (gap > budget / len(gap)) & (h > 4.0 * eps)
        room = max_knots - len(knots)
        if room <= 0 or not np.any(split):
            break
        where = np.nonzero(split)[0]
        if len(where) > room:
            where = np.sort(where[np.argsort(gap[where])[::-1][:room]])
        knots = np.insert(knots, where + 1, mids[where])
        sections = np.insert(sections, where + 1, mid_sections[where])
    logger.warning(f"Profile refinement stopped at {len(knots)} knots above relative gap {rtol:.1e}")
    return knots, sections


def schwarz_profile(body: "ConvexBody", direction, knot_count: int = DEFAULT_KNOTS) -> Profile:
    """Radius profile of the Schwarz symmetrization of `body` along `direction`.

    The knot set starts from `knot_count` uniform points of the support
    interval plus the projections of the body's vertices (or profile
    knots), so polygon profiles are exact and polytope profiles are sampled
    at every kink. Intervals are then bisected where the linear radius
    misses the section integral, which concentrates knots at square-root
    ends such as an edge-type endpoint of a polytope.

    Args:
        body: A full-dimensional convex body
        direction: Unit vector u
        knot_count: Number of uniform knots (at least 33)

    Returns:
        Profile with v(t) = (|body ∩ {<x,u> = t}| / kappa_{n-1})^(1/(n-1))

    Raises:
        InputError: If knot_count is below the minimum
        DegenerateBodyError: If the body has zero volume
    """
    from .geometry import unit_direction

    if knot_count < MIN_KNOTS:
        raise InputError(f"knot_count must be at least {MIN_KNOTS}, got {knot_count}")
    u = unit_direction(direction, body.dim)
    t0, t1 = body.support_interval(u)
    if t1 - t0 <= 1e-12 * max(1.0, abs(t0), abs(t1)):
        raise DegenerateBodyError("Body has empty interior along the symmetrization axis")

    uniform = np.linspace(t0, t1, knot_count)
    knots = merge_knots(np.concatenate([uniform, body.breakpoints(u)]), t0, t1)
    sections = body.section_measures(u, knots)
    knots, sections = refine_knots(body, u, knots, sections, REFINE_FACTOR * knot_count)
    profile = Profile(knots, _radii(sections, body.dim), body.dim)
    logger.debug(f"Schwarz profile on [{t0:.6g}, {t1:.6g}] with {len(knots)} knots")
    if profile.volume() <= 0.0:
        raise DegenerateBodyError("Symmetrized body has zero volume")
    return profile


def profile_volume(p: Profile) -> float:
    """Volume of the rotationally symmetric body described by `p`."""
    return p.volume()
