"""Upper bounds for integrals of convex gauges of concave functions.

For a body of volume c and a concave f with value f0 at the center point,
the integral of phi(f) is bounded by the maximum over truncated cones on
[0, 1] of volume c of

    F(m) = ∫_0^1 phi(f0 t / t_m) kappa_{n-1} (r_m + m t)^{n-1} dt,

where m is the slope, r_m the base radius and t_m the volume-halving
abscissa of the cone.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from .conesolver import max_slope, median_t, solve_r
from .errors import InputError, InvalidGaugeError, OutOfRangeError
from .quadrature import adaptive_gauss_legendre, composite_nodes
from .symmetrize import kappa
from .utils import get_logger

logger = get_logger(__name__)

GRID_SIZE = 257
OBJECTIVE_NODES = 64
OPTIMIZER_TOL = 1e-10
# objective values this close (relative) to the best are ties
VALUE_TIE_TOL = 1e-13
ERFI_MAX = 8.0
SQRT2 = math.sqrt(2.0)
# m0 = c at n = 2 and the maximizing cone has t_m = 1 - 1/sqrt(2)
TRIANGLE_RATIO = SQRT2 / (SQRT2 - 1.0)

METHODS = ("generic", "closed-form-2d", "closed-form-3d", "conjecture")


class ConvexGauge(ABC):
    """Convex phi on [0, inf) with phi(0) = 0."""

    name: str = "gauge"
    strictly_convex: bool = True

    @abstractmethod
    def __call__(self, x):
        ...

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        ...

    def kinks(self) -> NDArray[np.float64]:
        """Arguments where phi is not smooth."""
        return np.empty(0)

    def validate(self, grid: int = 201, top: float = 8.0, tol: float = 1e-10) -> None:
        """Check phi(0) = 0 and nondecreasing difference quotients on a grid.

        Raises:
            InvalidGaugeError: If either property fails
        """
        if abs(float(self(np.array([0.0]))[0])) > tol:
            raise InvalidGaugeError(f"{self.name}: phi(0) must be 0")
        x = np.linspace(0.0, top, grid)
        y = np.asarray(self(x), dtype=float)
        if not np.all(np.isfinite(y)):
            raise InvalidGaugeError(f"{self.name}: phi is not finite on [0, {top}]")
        q = np.diff(y) / np.diff(x)
        if np.any(np.diff(q) < -tol * np.maximum(1.0, np.abs(q[1:]))):
            raise InvalidGaugeError(f"{self.name}: phi is not convex")

    def label(self) -> str:
        return self.name


@dataclass(frozen=True)
class Power(ConvexGauge):
    """phi(t) = t^alpha, alpha >= 1."""

    alpha: float = 1.0
    name: str = field(default="power", init=False)

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 1.0):
            raise OutOfRangeError(f"Power gauge needs alpha >= 1, got {self.alpha}")

    @property
    def strictly_convex(self) -> bool:
        return self.alpha > 1.0

    def __call__(self, x):
        return np.power(np.maximum(np.asarray(x, dtype=float), 0.0), self.alpha)

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "power", "alpha": self.alpha}

    def label(self) -> str:
        return f"power(alpha={self.alpha:g})"


@dataclass(frozen=True)
class ExpMinusOne(ConvexGauge):
    """phi(t) = e^t - 1."""

    name: str = field(default="exp", init=False)

    def __call__(self, x):
        return np.expm1(np.asarray(x, dtype=float))

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "exp"}


@dataclass(frozen=True)
class ExpSquareMinusOne(ConvexGauge):
    """phi(t) = e^(t^2) - 1."""

    name: str = field(default="exp-square", init=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.expm1(x * x)

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "exp-square"}

    def validate(self, grid: int = 201, top: float = 4.0, tol: float = 1e-10) -> None:
        super().validate(grid, top, tol)


@dataclass(frozen=True)
class PiecewiseLinearConvex(ConvexGauge):
    """Convex broken line through (0, 0) and the given knots.

    Extended beyond the last knot with the last slope.
    """

    knots: Tuple[Tuple[float, float], ...] = ((0.0, 0.0), (1.0, 1.0))
    name: str = field(default="pwl-convex", init=False)
    strictly_convex: bool = field(default=False, init=False)

    def __post_init__(self):
        pts = np.asarray(self.knots, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2 or not np.all(np.isfinite(pts)):
            raise InvalidGaugeError("Piecewise-linear gauge needs at least two finite (t, y) knots")
        if pts[0, 0] != 0.0 or pts[0, 1] != 0.0:
            raise InvalidGaugeError("Piecewise-linear gauge must start at (0, 0)")
        if np.any(np.diff(pts[:, 0]) <= 0):
            raise InvalidGaugeError("Piecewise-linear gauge knots must be strictly increasing in t")
        slopes = np.diff(pts[:, 1]) / np.diff(pts[:, 0])
        if slopes[0] < 0 or np.any(np.diff(slopes) < -1e-10 * np.maximum(1.0, np.abs(slopes[1:]))):
            raise InvalidGaugeError("Piecewise-linear gauge slopes must be nonnegative and nondecreasing")
        object.__setattr__(self, "knots", tuple((float(a), float(b)) for a, b in pts))

    def __call__(self, x):
        pts = np.asarray(self.knots)
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        last = (pts[-1, 1] - pts[-2, 1]) / (pts[-1, 0] - pts[-2, 0])
        inner = np.interp(x, pts[:, 0], pts[:, 1])
        return np.where(x > pts[-1, 0], pts[-1, 1] + last * (x - pts[-1, 0]), inner)

    def kinks(self) -> NDArray[np.float64]:
        return np.asarray(self.knots)[1:, 0]

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "pwl-convex", "knots": [list(k) for k in self.knots]}


def erfi(x: float) -> float:
    """Imaginary error function (2/sqrt(pi)) ∫_0^x e^(t^2) dt for 0 <= x <= 8.

    Raises:
        OutOfRangeError: Outside [0, 8]
    """
    if not (0.0 <= x <= ERFI_MAX):
        raise OutOfRangeError(f"erfi is evaluated on [0, {ERFI_MAX:g}], got {x}")
    if x == 0.0:
        return 0.0
    integral = adaptive_gauss_legendre(lambda t: np.exp(t * t), 0.0, x, rtol=1e-12)
    return 2.0 / math.sqrt(math.pi) * integral


def _unit_nodes(phi: ConvexGauge, scale: float) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Gauss-Legendre rule on [0, 1] split where phi(scale * t) has kinks."""
    breaks = [0.0, 1.0]
    if scale > 0:
        inner = phi.kinks() / scale
        breaks.extend(float(k) for k in inner if 0.0 < k < 1.0)
    return composite_nodes(np.unique(np.array(breaks)), OBJECTIVE_NODES)


def cone_objective(n: int, c: float, f0: float, phi: ConvexGauge, m: float) -> float:
    """F(m) for the cone on [0, 1] with slope m and volume c."""
    r = solve_r(n, c, m, 1.0)
    t_m = median_t(n, r, m)
    scale = f0 / t_m
    x, w = _unit_nodes(phi, scale)
    radius = np.maximum(r + m * x, 0.0)
    return float(np.dot(w, phi(scale * x) * kappa(n - 1) * radius ** (n - 1)))


def golden_section_max(func: Callable[[float], float], a: float, b: float, tol: float = OPTIMIZER_TOL):
    """Golden-section search for a maximum of func on [a, b].

    Returns:
        Tuple (argmax, value)
    """
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = func(c), func(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = func(d)
    return (c, fc) if fc >= fd else (d, fd)


@dataclass(frozen=True)
class BoundReport:
    """Value of the truncated-cone bound and the cone where it is attained."""

    bound: float
    argmax_m: float
    t_m: float
    r_m: float
    n: int
    c: float
    f0: float
    method: str
    m0: float
    gauge: Dict[str, Any] = field(default_factory=dict)
    per_volume: bool = False

    def per_unit_volume(self) -> "BoundReport":
        """Same report with the bound divided by the body volume."""
        if self.per_volume:
            return self
        return replace(self, bound=self.bound / self.c, per_volume=True)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _validate_inputs(n: int, c: float, f0: float, phi: ConvexGauge) -> None:
    if n < 2:
        raise InputError(f"Dimension must be at least 2, got {n}")
    if not (c > 0 and math.isfinite(c)):
        raise InputError(f"Volume must be positive, got {c}")
    if not (f0 >= 0 and math.isfinite(f0)):
        raise InputError(f"f0 must be nonnegative, got {f0}")
    phi.validate()


def _pick_maximum(candidates: List[Tuple[float, float]]) -> Tuple[float, float]:
    """Best (value, m) pair; ties go to the earliest candidate.

    Candidates are listed endpoints first, so a flat maximum at -m0 is
    reported at -m0 rather than at a golden-section point that wins by
    rounding noise.
    """
    top = max(value for value, _ in candidates)
    slack = VALUE_TIE_TOL * max(1.0, abs(top))
    for value, m in candidates:
        if value >= top - slack:
            return value, m
    return candidates[0]


def reduced_bound(
    n: int,
    c: float,
    f0: float,
    phi: ConvexGauge,
    grid: int = GRID_SIZE,
    tol: float = OPTIMIZER_TOL,
) -> BoundReport:
    """Maximize F(m) over m in [-m0, m0].

    A coarse scan of `grid` slopes locates the best bracket, then
    golden-section search refines it; the bracket ends and the scan
    maximum are kept as candidates so a maximum at an endpoint of
    [-m0, m0] is returned exactly.

    Args:
        n: Dimension
        c: Body volume
        f0: Value of f at the center point
        phi: Convex gauge
        grid: Number of scanned slopes
        tol: Golden-section tolerance on m

    Returns:
        BoundReport with method "generic"
    """
    _validate_inputs(n, c, f0, phi)
    m0 = max_slope(n, c, 1.0)
    if f0 == 0.0:
        r = solve_r(n, c, -m0)
        return BoundReport(0.0, -m0, median_t(n, r, -m0), r, n, c, f0, "generic", m0, phi.to_dict())

    def objective(m: float) -> float:
        return cone_objective(n, c, f0, phi, m)

    slopes = np.linspace(-m0, m0, grid)
    values = np.array([objective(float(m)) for m in slopes])
    best = int(np.argmax(values))
    a = float(slopes[max(best - 1, 0)])
    b = float(slopes[min(best + 1, grid - 1)])
    m_star, f_star = golden_section_max(objective, a, b, tol * max(1.0, m0))
    value, m_best = _pick_maximum(
        [
            (float(values[0]), float(slopes[0])),
            (float(values[-1]), float(slopes[-1])),
            (float(values[best]), float(slopes[best])),
            (f_star, m_star),
        ]
    )
    r = solve_r(n, c, m_best)
    t_m = median_t(n, r, m_best)
    logger.debug(f"reduced_bound n={n} c={c:.6g} f0={f0:.6g} {phi.label()}: m*={m_best:.10g}")
    return BoundReport(value, m_best, t_m, r, n, c, f0, "generic", m0, phi.to_dict())


def slope_trace(n: int, c: float, f0: float, phi: ConvexGauge, count: int = GRID_SIZE) -> List[Dict[str, float]]:
    """Rows (m, F(m), r_m, t_m) on an even grid of [-m0, m0]."""
    _validate_inputs(n, c, f0, phi)
    m0 = max_slope(n, c, 1.0)
    rows = []
    for m in np.linspace(-m0, m0, count):
        r = solve_r(n, c, float(m))
        rows.append(
            {
                "m": float(m),
                "F": cone_objective(n, c, f0, phi, float(m)),
                "r_m": r,
                "t_m": median_t(n, r, float(m)),
            }
        )
    return rows


def power_bound_2d(alpha: float, c: float, f0: float) -> float:
    """c f0^alpha 2/((alpha+1)(alpha+2)) (sqrt2/(sqrt2-1))^alpha."""
    if not alpha >= 1.0:
        raise OutOfRangeError(f"alpha must be at least 1, got {alpha}")
    return c * f0**alpha * 2.0 / ((alpha + 1.0) * (alpha + 2.0)) * TRIANGLE_RATIO**alpha


def conjecture_bound(n: int, f0: float, phi: ConvexGauge) -> float:
    """n ∫_0^1 phi(f0 2^(1/n) t / (2^(1/n) - 1)) (1 - t)^(n-1) dt, per unit volume."""
    if n < 2:
        raise InputError(f"Dimension must be at least 2, got {n}")
    root = 2.0 ** (1.0 / n)
    scale = f0 * root / (root - 1.0)
    x, w = _unit_nodes(phi, scale)
    return float(n * np.dot(w, phi(scale * x) * (1.0 - x) ** (n - 1)))


def params_2d(c: float, m: float) -> Tuple[float, float]:
    """Planar cone parameters: r = (c - m)/2 and its median abscissa.

    The median is written as c / ((c - m) + sqrt(c^2 + m^2)), which equals
    (-(c - m) + sqrt(c^2 + m^2)) / (2m) and stays accurate near m = 0.
    """
    if not c > 0:
        raise InputError(f"Volume must be positive, got {c}")
    if abs(m) > c * (1.0 + 1e-12):
        raise OutOfRangeError(f"Slope {m} is outside [-{c}, {c}]")
    return 0.5 * (c - m), c / ((c - m) + math.hypot(c, m))


def params_3d(c: float, m: float) -> Tuple[float, float]:
    """Spatial cone parameters from the quadratic volume equation."""
    m0 = max_slope(3, c, 1.0)
    if abs(m) > m0 * (1.0 + 1e-12):
        raise OutOfRangeError(f"Slope {m} is outside [-{m0}, {m0}]")
    r = 0.5 * (-m + math.sqrt(max(4.0 * c / math.pi - m * m / 3.0, 0.0)))
    return r, median_t(3, r, m)


def evaluate_bound(
    n: int, c: float, f0: float, phi: ConvexGauge, method: str = "generic", tol: float = OPTIMIZER_TOL
) -> BoundReport:
    """Bound by the requested method.

    generic optimizes F(m); closed-form-2d applies the planar power formula
    (n = 2, power gauge); closed-form-3d evaluates the linear gauge at the
    closing cone m = -m0 (n = 3); conjecture scales the conjectured integral
    by c.

    tol is the golden-section width of the generic method.

    Raises:
        InputError: If the method does not apply to (n, phi)
    """
    if method == "generic":
        return reduced_bound(n, c, f0, phi, tol=tol)
    _validate_inputs(n, c, f0, phi)
    m0 = max_slope(n, c, 1.0)
    if method == "closed-form-2d":
        if n != 2 or not isinstance(phi, Power):
            raise InputError("closed-form-2d needs n = 2 and a power gauge")
        r, t = params_2d(c, -m0)
        return BoundReport(power_bound_2d(phi.alpha, c, f0), -m0, t, r, n, c, f0, method, m0, phi.to_dict())
    if method == "closed-form-3d":
        if n != 3 or not isinstance(phi, Power) or phi.alpha != 1.0:
            raise InputError("closed-form-3d needs n = 3 and the linear gauge")
        r, t = params_3d(c, -m0)
        m = -m0
        bound = f0 / t * math.pi * (r * r / 2.0 + 2.0 * r * m / 3.0 + m * m / 4.0)
        return BoundReport(bound, m, t, r, n, c, f0, method, m0, phi.to_dict())
    if method == "conjecture":
        r = solve_r(n, c, -m0)
        t = median_t(n, r, -m0)
        return BoundReport(c * conjecture_bound(n, f0, phi), -m0, t, r, n, c, f0, method, m0, phi.to_dict())
    raise InputError(f"Unknown bound method {method!r}; expected one of {', '.join(METHODS)}")


def make_gauge(kind: str, alpha: float | None = None, knots: Sequence[Sequence[float]] | None = None) -> ConvexGauge:
    """Gauge from its CLI name: power, exp, exp-square or pwl."""
    if kind != "power" and alpha is not None:
        raise InputError("--alpha applies to the power gauge only")
    if kind == "power":
        return Power(1.0 if alpha is None else alpha)
    if kind == "exp":
        return ExpMinusOne()
    if kind == "exp-square":
        return ExpSquareMinusOne()
    if kind in ("pwl", "pwl-convex"):
        if knots is None:
            raise InputError("The piecewise-linear gauge needs knots")
        return PiecewiseLinearConvex(tuple(tuple(k) for k in knots))
    raise InputError(f"Unknown gauge {kind!r}")
