"""Equal-split truncated cones and their parameter formulas.

A truncated cone on [t0, t1] has radius v_R(t) = r + m (t - t0). The
equal-split cone of a concave profile has the same volume and support as
the profile, and the two parts of the cone sticking out of the profile
near t0 and near t1 carry equal volume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateBodyError, InputError, OutOfRangeError
from .quadrature import composite_nodes, gauss_legendre
from .symmetrize import Profile, kappa
from .utils import get_logger

logger = get_logger(__name__)

BISECTION_TOL = 1e-12
MAX_BISECTIONS = 200
CHORD_TOL = 1e-10
ROOT_SCAN = 33
SLOPE_SLACK = 1e-12
# below this |m|/r the closed-form median loses digits to cancellation
SMALL_SLOPE = 1e-4


def _order(n: int) -> int:
    # Gauss-Legendre order exact for polynomials of degree n - 1
    return n // 2 + 1


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not (value > 0 and math.isfinite(value)):
            raise InputError(f"{name} must be positive and finite, got {value}")


def max_slope(n: int, c: float, length: float = 1.0) -> float:
    """Steepest admissible slope m0 = (c n / (kappa_{n-1} length^n))^(1/(n-1)).

    At |m| = m0 the cone of volume c on an interval of this length closes to
    a vertex at one of its bases.
    """
    if n < 2:
        raise InputError(f"Dimension must be at least 2, got {n}")
    _check_positive(c=c, length=length)
    return (c * n / (kappa(n - 1) * length**n)) ** (1.0 / (n - 1))


def _unit_volume(n: int, r: float, m: float) -> float:
    x, w = gauss_legendre(_order(n))
    return float(kappa(n - 1) * np.dot(w, (r + m * x) ** (n - 1)))


def solve_r(n: int, c: float, m: float, length: float = 1.0) -> float:
    """Base radius r >= 0 of the truncated cone with slope m and volume c.

    The interval is rescaled to [0, 1] (volume c/length, slope m*length);
    closed forms are used for n = 2 and n = 3, Brent's method otherwise.

    Raises:
        OutOfRangeError: If |m| exceeds max_slope(n, c, length)
    """
    m0 = max_slope(n, c, length)
    if abs(m) > m0 * (1.0 + SLOPE_SLACK) + SLOPE_SLACK:
        raise OutOfRangeError(f"Slope {m} is outside [-{m0}, {m0}]")
    m = float(np.clip(m, -m0, m0))
    cu = c / length
    mu = m * length

    if n == 2:
        r = 0.5 * (cu - mu)
    elif n == 3:
        r = 0.5 * (-mu + math.sqrt(max(4.0 * cu / math.pi - mu * mu / 3.0, 0.0)))
    elif mu == 0.0:
        r = (cu / kappa(n - 1)) ** (1.0 / (n - 1))
    else:
        lo = max(0.0, -mu)
        hi = abs(mu) + (cu / kappa(n - 1)) ** (1.0 / (n - 1))

        def excess(rr: float) -> float:
            return _unit_volume(n, rr, mu) - cu

        if excess(lo) >= 0.0:
            r = lo
        else:
            r = brentq(excess, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    # endpoint slopes close the cone exactly
    return max(r, max(0.0, -mu))


def median_t(n: int, r: float, m: float) -> float:
    """Volume-halving abscissa of the unit-length cone with radius r + m t.

    Returns t in [0, 1] with (r + m t)^n - r^n = (r + m)^n - (r + m t)^n.

    Raises:
        DegenerateBodyError: If r = m = 0
        InputError: If the radius is negative somewhere on [0, 1]
    """
    if r < 0 or r + m < -SLOPE_SLACK * max(1.0, abs(m)):
        raise InputError(f"Cone radius is negative on [0, 1] (r={r}, m={m})")
    if r == 0.0 and m == 0.0:
        raise DegenerateBodyError("Cone with r = m = 0 has no volume")
    if m == 0.0:
        return 0.5
    if abs(m) > SMALL_SLOPE * r:
        top = max(r + m, 0.0)
        t = (((r**n + top**n) / 2.0) ** (1.0 / n) - r) / m
        return float(np.clip(t, 0.0, 1.0))

    x, w = gauss_legendre(_order(n))

    def lower(t: float) -> float:
        return t * float(np.dot(w, (r + m * t * x) ** (n - 1)))

    half = 0.5 * lower(1.0)
    return float(brentq(lambda t: lower(t) - half, 0.0, 1.0, xtol=1e-15, maxiter=200))


@dataclass(frozen=True)
class TruncatedCone:
    """Rotationally symmetric cone with radius r + m (t - t0) on [t0, t1].

    Attributes:
        dim: Ambient dimension n
        t0: Left base abscissa
        t1: Right base abscissa
        r: Radius at t0
        m: Slope of the radius
        t0_star: First crossing with the source profile (equal-split cones)
        t1_star: Last crossing with the source profile (equal-split cones)
        a0: Excess volume of the cone over the profile on [t0, t0_star]
        a1: Excess volume of the cone over the profile on [t1_star, t1]
        multiple_roots: Whether the balancing function changed sign more than once
    """

    dim: int
    t0: float
    t1: float
    r: float
    m: float
    t0_star: Optional[float] = None
    t1_star: Optional[float] = None
    a0: float = 0.0
    a1: float = 0.0
    multiple_roots: bool = False

    def __post_init__(self):
        if self.t1 <= self.t0:
            raise InputError("Cone support interval is empty")
        end = self.r + self.m * self.length
        scale = max(1.0, abs(self.r), abs(self.m) * self.length)
        if self.r < -SLOPE_SLACK * scale or end < -1e-10 * scale:
            raise InputError("Cone radius must be nonnegative on its support")

    @property
    def length(self) -> float:
        return self.t1 - self.t0

    @property
    def t_R(self) -> float:
        """Abscissa splitting the cone volume in half."""
        return self.t0 + self.length * median_t(self.dim, self.r, self.m * self.length)

    def radius(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.t0) & (t <= self.t1)
        return np.where(inside, np.maximum(self.r + self.m * (t - self.t0), 0.0), 0.0)

    def lower_volume(self, t: float) -> float:
        """Volume of the part of the cone with abscissa at most t."""
        b = float(np.clip(t, self.t0, self.t1))
        if b <= self.t0:
            return 0.0
        x, w = gauss_legendre(_order(self.dim), self.t0, b)
        return float(kappa(self.dim - 1) * np.dot(w, self.radius(x) ** (self.dim - 1)))

    def volume(self) -> float:
        return self.lower_volume(self.t1)

    def as_profile(self) -> Profile:
        return Profile(np.array([self.t0, self.t1]), self.radius(np.array([self.t0, self.t1])), self.dim)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.dim,
            "t0": self.t0,
            "t1": self.t1,
            "r": self.r,
            "m": self.m,
            "t_R": self.t_R,
            "t0_star": self.t0_star,
            "t1_star": self.t1_star,
            "multiple_roots": self.multiple_roots,
        }


def _cone(p: Profile, c: float, m: float) -> Tuple[float, np.ndarray]:
    r = solve_r(p.dim, c, m, p.length)
    return r, np.maximum(r + m * (p.t - p.t0), 0.0)


def _lobes(p: Profile, v_cone: np.ndarray, m: float) -> Tuple[float, float, float, float]:
    """Excess lobes and crossing points for a cone sampled at the profile knots."""
    t = p.t
    diff = v_cone - p.v
    tol = 1e-12 * max(1.0, float(np.max(p.v)), float(np.max(v_cone)))
    d = np.where(np.abs(diff) <= tol, 0.0, diff)

    # v_R - v_p is linear on every knot interval: at most one root each
    flips = d[:-1] * d[1:] < 0
    k = np.nonzero(flips)[0]
    roots = t[k] + (t[k + 1] - t[k]) * d[k] / (d[k] - d[k + 1])
    breaks = np.sort(np.concatenate([t, roots]))

    order = _order(p.dim)
    x, w = composite_nodes(breaks, order)
    radius_cone = np.maximum(v_cone[0] + m * (x - p.t0), 0.0)
    density = kappa(p.dim - 1) * (radius_cone ** (p.dim - 1) - p(x) ** (p.dim - 1))
    pieces = (w * density).reshape(-1, order).sum(axis=1)

    mids = 0.5 * (breaks[:-1] + breaks[1:])
    sign = (v_cone[0] + m * (mids - p.t0)) - p(mids)
    negative = np.nonzero(sign < -tol)[0]
    if len(negative) == 0:
        return 0.0, 0.0, p.t0, p.t1
    first, last = negative[0], negative[-1]
    positive = np.maximum(pieces, 0.0)
    a0 = float(positive[:first].sum())
    a1 = float(positive[last + 1 :].sum())
    return a0, a1, float(breaks[first]), float(breaks[last + 1])


def balancing_function(p: Profile, m: float) -> Tuple[float, float, float, float]:
    """Excess lobes of the volume-matched cone with slope m over the profile.

    Returns:
        Tuple (A0, A1, t0_star, t1_star): the cone's excess volume over the
        profile before t0_star and after t1_star, and the outermost crossings
    """
    c = p.volume()
    if c <= 0:
        raise DegenerateBodyError("Profile has zero volume")
    _, v_cone = _cone(p, c, m)
    return _lobes(p, v_cone, m)


def _chord_cone(p: Profile) -> Optional[TruncatedCone]:
    """The profile itself when it is a truncated cone, else None."""
    slope = (p.v[-1] - p.v[0]) / p.length
    chord = p.v[0] + slope * (p.t - p.t0)
    if np.max(np.abs(p.v - chord)) > CHORD_TOL * max(1.0, float(np.max(p.v))):
        return None
    return TruncatedCone(p.dim, p.t0, p.t1, float(p.v[0]), float(slope), p.t0, p.t1)


def _count_sign_changes(p: Profile, m0: float) -> int:
    values = []
    for m in np.linspace(-m0, m0, ROOT_SCAN):
        a0, a1, _, _ = balancing_function(p, float(m))
        values.append(a0 - a1)
    b = np.array(values)
    b = b[np.abs(b) > 1e-12 * max(1.0, float(np.max(np.abs(b))))]
    return int(np.count_nonzero(np.sign(b[:-1]) != np.sign(b[1:])))


def equal_split_cone(p: Profile, tol: float = BISECTION_TOL) -> TruncatedCone:
    """Truncated cone of equal volume and support whose excess lobes balance.

    The balancing function B(m) = A0(m) - A1(m) is nonnegative at m = -m0
    (the cone closes at t1, so no excess near t1) and nonpositive at m = m0;
    bisection on [-m0, m0] returns a root.

    Args:
        p: Concave profile with positive volume
        tol: Bisection tolerance on m, relative to max(1, m0)

    Returns:
        TruncatedCone with crossings, lobe volumes and the multiple-roots flag

    Raises:
        DegenerateBodyError: If the profile has zero volume
    """
    c = p.volume()
    if c <= 0:
        raise DegenerateBodyError("Profile has zero volume")
    chord = _chord_cone(p)
    if chord is not None:
        logger.debug("Profile is a truncated cone; returning it unchanged")
        return chord

    m0 = max_slope(p.dim, c, p.length)
    lo, hi = -m0, m0
    width = tol * max(1.0, m0)
    for step in range(MAX_BISECTIONS):
        if hi - lo <= width:
            break
        mid = 0.5 * (lo + hi)
        a0, a1, _, _ = balancing_function(p, mid)
        if a0 - a1 > 0:
            lo = mid
        elif a0 - a1 < 0:
            hi = mid
        else:
            lo = hi = mid
            break
    m = 0.5 * (lo + hi)
    logger.debug(f"Balancing bisection stopped after {step} steps at m={m:.12g}")

    r, v_cone = _cone(p, c, m)
    a0, a1, t0_star, t1_star = _lobes(p, v_cone, m)
    multiple = _count_sign_changes(p, m0) > 1
    if multiple:
        logger.warning("Balancing function changes sign more than once; using the bisection root")
    cone = TruncatedCone(p.dim, p.t0, p.t1, r, m, t0_star, t1_star, a0, a1, multiple)
    logger.info(f"Equal-split cone: r={r:.10g}, m={m:.10g}, t_R={cone.t_R:.10g}")
    return cone
