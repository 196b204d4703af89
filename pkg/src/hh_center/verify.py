"""Numerical verification of the truncated-cone bound.

Direct integration of phi(f) over polygons, polytopes and profile bodies,
seeded random instances, the section/projection volume check for
polytopes, and the table comparing printed constants with optimizer
values.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .bounds import (
    ConvexGauge,
    ExpMinusOne,
    ExpSquareMinusOne,
    Power,
    conjecture_bound,
    erfi,
    evaluate_bound,
    power_bound_2d,
    reduced_bound,
)
from .center import (
    Affine,
    CenterResult,
    ConcaveFunction,
    MinAffine,
    check_nonnegative,
    find_center,
    function_scale,
)
from .config import Tolerances
from .errors import DegenerateBodyError, InputError, RetryExhaustedError
from .geometry import ConvexBody, Polygon2, Polytope3, ProfileBody, fiber_axis, plane_axes, project_shadow
from .quadrature import composite_nodes, integrate_tetrahedra, integrate_triangles
from .symmetrize import DEFAULT_KNOTS, kappa
from .utils import get_logger

logger = get_logger(__name__)

EQUALITY_TOL = 1e-7
VIOLATION_TOL = 1e-7
FIBER_LIFT_TOL = 1e-9
TRIANGLE_DEGREE = 20
TETRAHEDRON_DEGREE = 15
REPRO_TOL = 1e-7

STATUS_OK = "ok"
STATUS_EQUALITY = "equality-within-tol"
STATUS_VIOLATION = "violation"


def _active_regions(body: ConvexBody, f: ConcaveFunction) -> List[Tuple[ConvexBody, Affine]]:
    """Split the body into the regions where each piece of f is the minimum."""
    if isinstance(f, Affine) or len(f.pieces) == 1:
        piece = f if isinstance(f, Affine) else f.pieces[0]
        return [(body, piece)]
    grads, offs = f.gradients, f.offsets
    regions = []
    for i, piece in enumerate(f.pieces):
        region: Optional[ConvexBody] = body
        for j in range(len(f.pieces)):
            if j == i or region is None:
                continue
            region = region.clip(grads[i] - grads[j], offs[j] - offs[i])
        if region is not None:
            regions.append((region, piece))
    return regions


def _gauge_values(phi: ConvexGauge, piece: Affine, pts: np.ndarray) -> np.ndarray:
    # nonnegativity is checked on the vertices; nodes only carry rounding
    return phi(np.maximum(piece(pts), 0.0))


def _integrate_profile(body: ProfileBody, f: ConcaveFunction, phi: ConvexGauge, order: int = 16) -> float:
    if np.any(np.abs(f.gradients[:, 1:]) > 0):
        raise InputError("Profile bodies integrate functions of the axis coordinate only")
    p = body.profile
    slopes, offs = f.gradients[:, 0], f.offsets
    breaks = [p.t]
    for i in range(len(slopes)):
        for j in range(i + 1, len(slopes)):
            if slopes[i] != slopes[j]:
                s = (offs[j] - offs[i]) / (slopes[i] - slopes[j])
                if p.t0 < s < p.t1:
                    breaks.append(np.array([s]))
    knots = np.unique(np.concatenate(breaks))
    x, w = composite_nodes(knots, order)
    values = np.min(slopes[None, :] * x[:, None] + offs[None, :], axis=1)
    weight = kappa(p.dim - 1) * p(x) ** (p.dim - 1)
    return float(np.dot(w, phi(np.maximum(values, 0.0)) * weight))


def integrate_phi_f(body: ConvexBody, f: ConcaveFunction, phi: ConvexGauge) -> float:
    """∫_body phi(f(x)) dx.

    Min-affine f is split into its active-piece regions, which are convex,
    so the integrand is smooth on every cell; regions are then fanned into
    triangles or tetrahedra and integrated with conical product rules.

    Raises:
        NegativeFunctionError: If f is negative on the body beyond rounding
    """
    check_nonnegative(body, f)
    if isinstance(body, ProfileBody):
        if body.dim == 2 and np.any(np.abs(f.gradients[:, 1]) > 0):
            return integrate_phi_f(body.as_polygon(), f, phi)
        return _integrate_profile(body, f, phi)
    total = 0.0
    for region, piece in _active_regions(body, f):
        if isinstance(region, Polygon2):
            total += integrate_triangles(
                region.triangles(), lambda pts: _gauge_values(phi, piece, pts), TRIANGLE_DEGREE
            )
        elif isinstance(region, Polytope3):
            total += integrate_tetrahedra(
                region.tetrahedra(), lambda pts: _gauge_values(phi, piece, pts), TETRAHEDRON_DEGREE
            )
        else:
            raise InputError(f"Unsupported body type {type(region).__name__}")
    return total


@dataclass
class VerificationRecord:
    """One checked instance of the inequality."""

    instance_id: str
    body: str
    function: str
    gauge: Dict[str, Any]
    n: int
    volume: float
    integral: float
    bound: float
    slack: float
    center: CenterResult
    status: str
    jensen_slack: Optional[float] = None
    seed: Optional[int] = None
    method: str = "generic"
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def is_violation(self) -> bool:
        return self.status == STATUS_VIOLATION

    def to_dict(self) -> Dict[str, Any]:
        return {
            "instance_id": self.instance_id,
            "seed": self.seed,
            "body": self.body,
            "function": self.function,
            "gauge": self.gauge,
            "n": self.n,
            "volume": self.volume,
            "integral": self.integral,
            "bound": self.bound,
            "slack": self.slack,
            "status": self.status,
            "jensen_slack": self.jensen_slack,
            "method": self.method,
            "center": self.center.to_dict(),
            **self.extras,
        }


def classify(slack: float, bound: float, equality_tol: float = EQUALITY_TOL, violation_tol: float = VIOLATION_TOL) -> str:
    scale = max(1.0, bound)
    if abs(slack) <= equality_tol * scale:
        return STATUS_EQUALITY
    if slack >= -violation_tol * scale:
        return STATUS_OK
    return STATUS_VIOLATION


def check_inequality(
    body: ConvexBody,
    f: ConcaveFunction,
    phi: ConvexGauge,
    instance_id: str = "instance",
    seed: Optional[int] = None,
    x0: Optional[Sequence[float]] = None,
    method: str = "generic",
    knot_count: int = DEFAULT_KNOTS,
    tolerances: Optional[Tolerances] = None,
) -> VerificationRecord:
    """Run center -> bound -> direct integral on one instance.

    `tolerances` sets the slice tie, cone, optimizer and classification
    tolerances (defaults when None).

    Returns:
        VerificationRecord with slack = bound - integral and the mean-value
        check f(centroid) - (1/|C|) ∫ f
    """
    tol = tolerances or Tolerances()
    center = find_center(body, f, x0=x0, knot_count=knot_count, tie_tol=tol.slice_tie, cone_tol=tol.cone)
    c = body.volume()
    report = evaluate_bound(body.dim, c, center.f_at_center, phi, method, tol=tol.optimizer)
    integral = integrate_phi_f(body, f, phi)
    slack = report.bound - integral
    status = classify(slack, report.bound, tol.equality, tol.violation)
    mean_f = integrate_phi_f(body, f, Power(1.0)) / c
    jensen = float(f(body.centroid())) - mean_f
    if status == STATUS_VIOLATION:
        logger.warning(f"Violation on {instance_id}: integral={integral:.12g} bound={report.bound:.12g}")
    return VerificationRecord(
        instance_id=instance_id,
        body=body.summary(),
        function=f.summary(),
        gauge=phi.to_dict(),
        n=body.dim,
        volume=c,
        integral=integral,
        bound=report.bound,
        slack=slack,
        center=center,
        status=status,
        jensen_slack=jensen,
        seed=seed,
        method=method,
        extras={"argmax_m": report.argmax_m, "m0": report.m0},
    )


def random_instance(
    seed: int,
    n: int,
    min_points: int = 8,
    max_points: int = 24,
    max_pieces: int = 6,
    retries: int = 20,
) -> Tuple[ConvexBody, MinAffine]:
    """Seeded random (body, min-affine function) pair.

    The body is the hull of uniform points in [-1, 1]^n; the function has
    1 to max_pieces pieces and is shifted so its minimum over the body is 0
    (about half the instances) or a uniform value in [0.1, 1].

    Raises:
        RetryExhaustedError: If every sampled body is degenerate
    """
    if n not in (2, 3):
        raise InputError(f"Random instances exist for n in {{2, 3}}, got {n}")
    if seed < 0:
        raise InputError(f"Seed must be nonnegative, got {seed}")
    rng = np.random.default_rng([seed, n])
    for attempt in range(retries):
        count = int(rng.integers(min_points, max_points + 1))
        points = rng.uniform(-1.0, 1.0, size=(count, n))
        try:
            body = Polygon2.from_points(points) if n == 2 else Polytope3(points)
        except DegenerateBodyError as e:
            logger.warning(f"Seed {seed}: resampling degenerate body ({e})")
            continue
        if body.volume() < 1e-6:
            logger.warning(f"Seed {seed}: resampling thin body (attempt {attempt + 1})")
            continue
        pieces = int(rng.integers(1, max_pieces + 1))
        grads = rng.uniform(-1.0, 1.0, size=(pieces, n))
        offsets = rng.uniform(-1.0, 1.0, size=pieces)
        f = MinAffine(tuple(Affine(g, b) for g, b in zip(grads, offsets)))
        low = float(np.min(f(body.vertices)))
        target = 0.0 if rng.random() < 0.5 else float(rng.uniform(0.1, 1.0))
        shift = target - low
        f = MinAffine(tuple(Affine(p.gradient, p.offset + shift) for p in f.pieces))
        return body, f
    raise RetryExhaustedError(f"No full-dimensional body after {retries} attempts (seed {seed})")


def equality_instance(seed: int) -> Tuple[Polygon2, Affine]:
    """Random rotated and scaled triangle with an affine f vanishing on one edge."""
    rng = np.random.default_rng([seed, 2, 1])
    height = float(rng.uniform(0.5, 2.0))
    half_base = float(rng.uniform(0.2, 1.0))
    apex = float(rng.uniform(-1.0, 1.0))
    slope = float(rng.uniform(0.5, 2.0))
    scale = float(rng.uniform(0.5, 2.0))
    theta = float(rng.uniform(0.0, 2.0 * math.pi))
    shift = rng.uniform(-2.0, 2.0, size=2)
    triangle = Polygon2(scale * np.array([[0.0, -half_base], [height, apex], [0.0, half_base]]))
    f = Affine(np.array([slope / scale, 0.0]), 0.0)
    rotation = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    return triangle.transformed(rotation, shift), f.composed(rotation, shift)


def exact_fiber_function(K: Polytope3, plane) -> MinAffine:
    """Fiber length x -> |K ∩ (x + H^perp)| on the shadow, as a min of affines.

    Every facet with an upward normal bounds the fiber from above and every
    facet with a downward normal from below; the length is the minimum over
    (upper, lower) pairs of their difference. Vertical facets only shape
    the shadow.
    """
    axes = plane_axes(plane)
    k = fiber_axis(axes)
    eq = np.column_stack([K.normals, K.offsets])
    _, first = np.unique(np.round(eq, 12), axis=0, return_index=True)
    eq = eq[np.sort(first)]
    normals, offsets = eq[:, :3], eq[:, 3]
    nk = normals[:, k]
    flat = normals[:, list(axes)]
    upper = nk > 1e-12
    lower = nk < -1e-12
    # <n_xy, x> + n_k z <= d  =>  z <= (d - <n_xy, x>) / n_k  (bound flips for n_k < 0)
    u_grad = -flat[upper] / nk[upper, None]
    u_off = offsets[upper] / nk[upper]
    l_grad = -flat[lower] / nk[lower, None]
    l_off = offsets[lower] / nk[lower]
    pieces = [
        Affine(ug - lg, uo - lo)
        for ug, uo in zip(u_grad, u_off)
        for lg, lo in zip(l_grad, l_off)
    ]
    if not pieces:
        raise DegenerateBodyError("Polytope has no facets transverse to the fiber direction")
    fiber = MinAffine(tuple(pieces))
    # the fiber vanishes on parts of the shadow boundary; lift rounding below zero
    shadow = project_shadow(K, axes)
    low = float(np.min(fiber(shadow.vertices)))
    if -FIBER_LIFT_TOL * function_scale(shadow, fiber) <= low < 0.0:
        fiber = MinAffine(tuple(Affine(p.gradient, p.offset - low) for p in fiber.pieces))
    return fiber


def section_bound_check(
    K: Polytope3,
    plane="xy",
    knot_count: int = DEFAULT_KNOTS,
    tolerances: Optional[Tolerances] = None,
) -> VerificationRecord:
    """Check |K| <= (2+sqrt2)/3 |P| fiber(center of P) for the shadow P of K.

    Raises:
        DegenerateBodyError: If the shadow is degenerate
    """
    if not isinstance(K, Polytope3):
        raise InputError("The section bound is checked for 3D polytopes")
    shadow = project_shadow(K, plane)
    fiber = exact_fiber_function(K, plane)
    tol = tolerances or Tolerances()
    center = find_center(shadow, fiber, knot_count=knot_count, tie_tol=tol.slice_tie, cone_tol=tol.cone)
    bound = power_bound_2d(1.0, shadow.volume(), center.f_at_center)
    volume = K.volume()
    slack = bound - volume
    status = classify(slack, bound, tol.equality, tol.violation)
    label = plane if isinstance(plane, str) else "".join("xyz"[a] for a in plane)
    logger.info(f"Section bound on {label}: |K|={volume:.10g} bound={bound:.10g} ({status})")
    return VerificationRecord(
        instance_id=f"section-{label}",
        body=K.summary(),
        function=f"fiber-length({label}, {len(fiber.pieces)} pieces)",
        gauge=Power(1.0).to_dict(),
        n=3,
        volume=volume,
        integral=volume,
        bound=bound,
        slack=slack,
        center=center,
        status=status,
        method="section-bound",
        extras={"plane": label, "shadow_area": shadow.volume()},
    )


@dataclass(frozen=True)
class ReproRow:
    label: str
    printed: float
    oracle: float
    argmax_m: float
    known_discrepancy: bool = False

    @property
    def abs_diff(self) -> float:
        return abs(self.printed - self.oracle)

    @property
    def rel_diff(self) -> float:
        return self.abs_diff / max(abs(self.oracle), 1e-300)

    @property
    def status(self) -> str:
        return "ok" if self.rel_diff <= REPRO_TOL else "FLAG"

    def format(self) -> str:
        line = (
            f"{self.label} | {self.printed:.7f} | {self.oracle:.7f} | {self.status} | "
            f"abs={self.abs_diff:.3e} | rel={self.rel_diff:.3e} | m*={self.argmax_m:.7f}"
        )
        if self.known_discrepancy:
            line += " | printed constant differs from the optimum"
        return line

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "printed": self.printed,
            "oracle": self.oracle,
            "abs": self.abs_diff,
            "rel": self.rel_diff,
            "argmax_m": self.argmax_m,
            "status": self.status,
            "known_discrepancy": self.known_discrepancy,
        }


def repro_table() -> List[ReproRow]:
    """Printed constants next to the values the optimizer produces.

    Exponential gauges bound the mean of e^f (or e^(f^2)), so their oracle
    is the per-volume optimum plus one.
    """
    rows = []
    for alpha in (1.0, 2.0):
        report = reduced_bound(2, 1.0, 1.0, Power(alpha))
        rows.append(ReproRow(f"Thm 1.2 α={alpha:g}", power_bound_2d(alpha, 1.0, 1.0), report.bound, report.argmax_m))

    a = math.sqrt(2.0) / (math.sqrt(2.0) - 1.0)
    printed_exp = math.sqrt(2.0) * (math.sqrt(2.0) - 1.0) * (math.exp(a) / math.sqrt(2.0) - 1.0)
    report = reduced_bound(2, 1.0, 1.0, ExpMinusOne())
    rows.append(ReproRow("Thm 1.4", printed_exp, report.bound + 1.0, report.argmax_m, True))

    half_sqrt_pi = math.sqrt(math.pi) / 2.0
    e = erfi(a)
    printed_exp_sq = half_sqrt_pi * e + (1.0 / (1.0 - 2.0 * math.sqrt(2.0))) * (
        (math.exp(a * a) - 1.0) / (a * a) - half_sqrt_pi * e
    )
    report = reduced_bound(2, 1.0, 1.0, ExpSquareMinusOne())
    rows.append(ReproRow("Thm 1.5", printed_exp_sq, report.bound + 1.0, report.argmax_m, True))

    root = 2.0 ** (1.0 / 3.0)
    report = reduced_bound(3, 1.0, 1.0, Power(1.0))
    rows.append(ReproRow("Thm 1.6", 3.0 * root / (root - 1.0), report.bound, report.argmax_m, True))

    for n in (2, 3):
        report = reduced_bound(n, 1.0, 1.0, Power(1.0))
        rows.append(ReproRow(f"Conjecture n={n} φ=t", conjecture_bound(n, 1.0, Power(1.0)), report.bound, report.argmax_m))
    for row in rows:
        if row.status == "FLAG":
            logger.warning(f"{row.label}: printed {row.printed:.7f} vs optimum {row.oracle:.7f}")
    return rows


def format_repro_table(rows: Iterable[ReproRow]) -> str:
    header = "label | printed | oracle | status | abs | rel | argmax"
    return "\n".join([header] + [row.format() for row in rows])


@dataclass
class SweepSummary:
    count: int
    violations: int
    equalities: int
    min_slack: float
    max_jensen_violation: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "count": self.count,
            "violations": self.violations,
            "equalities": self.equalities,
            "min_slack": self.min_slack,
            "max_jensen_violation": self.max_jensen_violation,
        }


def summarize(records: Sequence[VerificationRecord]) -> SweepSummary:
    slacks = [r.slack for r in records]
    jensen = [-(r.jensen_slack or 0.0) for r in records]
    return SweepSummary(
        count=len(records),
        violations=sum(r.is_violation for r in records),
        equalities=sum(r.status == STATUS_EQUALITY for r in records),
        min_slack=min(slacks) if slacks else 0.0,
        max_jensen_violation=max(jensen) if jensen else 0.0,
    )


def sweep(
    seeds: Iterable[int],
    n: int,
    phi: ConvexGauge,
    threads: int = 1,
    method: str = "generic",
    knot_count: int = DEFAULT_KNOTS,
    tolerances: Optional[Tolerances] = None,
) -> Tuple[List[VerificationRecord], SweepSummary]:
    """check_inequality on random_instance(seed, n) for every seed.

    Records come back sorted by seed whatever the scheduling.
    """
    seeds = sorted(set(int(s) for s in seeds))
    if not seeds:
        raise InputError("Seed range is empty")

    def run(seed: int) -> VerificationRecord:
        body, f = random_instance(seed, n)
        return check_inequality(
            body,
            f,
            phi,
            instance_id=f"n{n}-seed{seed}",
            seed=seed,
            method=method,
            knot_count=knot_count,
            tolerances=tolerances,
        )

    if threads <= 1:
        records = [run(s) for s in seeds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            records = list(executor.map(run, seeds))
    records.sort(key=lambda r: r.seed)
    summary = summarize(records)
    logger.info(
        f"Sweep n={n} {phi.label()}: {summary.count} instances, "
        f"{summary.violations} violations, min slack {summary.min_slack:.3e}"
    )
    return records, summary
