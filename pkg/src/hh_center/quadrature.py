"""Gauss-type quadrature rules on intervals, triangles and tetrahedra."""

from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import NDArray
from scipy.special import roots_jacobi

from .errors import InputError
from .utils import get_logger

logger = get_logger(__name__)

Rule = Tuple[NDArray[np.float64], NDArray[np.float64]]


@lru_cache(maxsize=64)
def _leggauss(order: int) -> Rule:
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(order: int, a: float = 0.0, b: float = 1.0) -> Rule:
    """Gauss-Legendre nodes and weights mapped to [a, b].

    Args:
        order: Number of nodes (exact for polynomials of degree 2*order - 1)
        a: Left end of the interval
        b: Right end of the interval

    Returns:
        Tuple (nodes, weights)
    """
    x, w = _leggauss(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def composite_nodes(breaks: NDArray[np.float64], order: int) -> Rule:
    """Gauss-Legendre rule of the given order on every interval of `breaks`.

    Returns flattened nodes and weights covering [breaks[0], breaks[-1]].
    """
    x, w = _leggauss(order)
    a = breaks[:-1, None]
    half = 0.5 * (breaks[1:, None] - a)
    nodes = a + half * (x[None, :] + 1.0)
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()


def adaptive_gauss_legendre(
    func: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    a: float,
    b: float,
    rtol: float = 1e-12,
    atol: float = 0.0,
    order: int = 10,
    max_depth: int = 40,
) -> float:
    """Adaptive Gauss-Legendre integration by interval bisection.

    A cell is accepted when the rule on the cell agrees with the sum of the
    rule on its two halves within max(atol, rtol * |estimate|).

    Args:
        func: Vectorized integrand
        a: Left end
        b: Right end
        rtol: Relative tolerance
        atol: Absolute tolerance
        order: Nodes per cell
        max_depth: Maximum bisection depth

    Returns:
        The integral estimate

    Raises:
        InputError: If the tolerance is not met at max_depth
    """
    if a == b:
        return 0.0

    def rule(lo: float, hi: float) -> float:
        x, w = gauss_legendre(order, lo, hi)
        return float(np.dot(w, func(x)))

    total = 0.0
    stack = [(a, b, rule(a, b), 0)]
    while stack:
        lo, hi, coarse, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = rule(lo, mid), rule(mid, hi)
        fine = left + right
        if abs(fine - coarse) <= max(atol, rtol * abs(fine)):
            total += fine
            continue
        if depth >= max_depth:
            raise InputError(f"Adaptive quadrature did not converge on [{lo}, {hi}]")
        stack.append((lo, mid, left, depth + 1))
        stack.append((mid, hi, right, depth + 1))
    return total


@lru_cache(maxsize=16)
def triangle_rule(degree: int = 20) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Conical product rule on the reference triangle conv{0, e1, e2}.

    Collapsed coordinates p = u*e1 + v*(1-u)*e2 with a Gauss-Jacobi rule
    (weight 1-u) in u and Gauss-Legendre in v. Exact for total degree
    `degree`. Weights sum to 1 (barycentric normalization).

    Returns:
        Tuple (points of shape (q, 2), weights of shape (q,))
    """
    k = degree // 2 + 1
    xu, wu = roots_jacobi(k, 1.0, 0.0)
    xv, wv = _leggauss(k)
    u = 0.5 * (1.0 + xu)
    v = 0.5 * (1.0 + xv)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    points = np.stack([uu, vv * (1.0 - uu)], axis=-1).reshape(-1, 2)
    # |T| * 2 * (1/4 wu) * (1/2 wv) with |T| factored out
    weights = (0.25 * np.outer(wu, wv)).ravel()
    return points, weights


@lru_cache(maxsize=16)
def tetrahedron_rule(degree: int = 15) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Conical product rule on the reference tetrahedron conv{0, e1, e2, e3}.

    Weights sum to 1; multiply by the tetrahedron volume.
    """
    k = degree // 2 + 1
    xu, wu = roots_jacobi(k, 2.0, 0.0)
    xv, wv = roots_jacobi(k, 1.0, 0.0)
    xw, ww = _leggauss(k)
    u = 0.5 * (1.0 + xu)
    v = 0.5 * (1.0 + xv)
    w = 0.5 * (1.0 + xw)
    uu, vv, wwc = np.meshgrid(u, v, w, indexing="ij")
    points = np.stack(
        [uu, vv * (1.0 - uu), wwc * (1.0 - uu) * (1.0 - vv)], axis=-1
    ).reshape(-1, 3)
    # 6 * (1/8 wu) * (1/4 wv) * (1/2 ww)
    weights = (6.0 / 64.0 * wu[:, None, None] * wv[None, :, None] * ww[None, None, :]).ravel()
    return points, weights


def integrate_triangles(
    triangles: NDArray[np.float64],
    func: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    degree: int = 20,
) -> float:
    """Integrate `func` over a batch of triangles of shape (T, 3, 2).

    `func` receives points of shape (T, q, 2) and returns values (T, q).
    """
    if len(triangles) == 0:
        return 0.0
    ref, w = triangle_rule(degree)
    a = triangles[:, 0, :]
    e1 = triangles[:, 1, :] - a
    e2 = triangles[:, 2, :] - a
    area = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    pts = a[:, None, :] + ref[None, :, 0, None] * e1[:, None, :] + ref[None, :, 1, None] * e2[:, None, :]
    values = func(pts)
    return float(np.sum(area * (values @ w)))


def integrate_tetrahedra(
    tetrahedra: NDArray[np.float64],
    func: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    degree: int = 15,
) -> float:
    """Integrate `func` over a batch of tetrahedra of shape (T, 4, 3)."""
    if len(tetrahedra) == 0:
        return 0.0
    ref, w = tetrahedron_rule(degree)
    a = tetrahedra[:, 0, :]
    edges = tetrahedra[:, 1:, :] - a[:, None, :]
    vol = np.abs(np.linalg.det(edges)) / 6.0
    pts = a[:, None, :] + np.einsum("qk,tkd->tqd", ref, edges)
    values = func(pts)
    return float(np.sum(vol * (values @ w)))
