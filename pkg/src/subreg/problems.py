"""Set-valued mapping problems: graph oracles, anchors, samplers, catalog.

A :class:`MappingProblem` packages the graph of ``F : X =: Y`` around an
anchor ``(xbar, ybar)`` in gph F together with whatever analytic side
oracles are available (solution-set distance, fiber distance,
coderivative).  Sampling is deterministic quasi-random in the graph's
parameter domain, augmented with a geometric approach stencil so that
limit-type suprema see candidates arbitrarily close to their center.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .extended import INF, ExtReal, is_inf
from .geometry import (
    DualVectorSet,
    NormSpec,
    ProductPoint,
    euclidean,
)

MEMBERSHIP_TOL = 1e-9
# Points count as outside F^{-1}(ybar) when their solution distance
# exceeds this; strict non-membership is not decidable from samples.
EPS_MEM = 1e-7

_HALTON_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)


class ProblemError(ValueError):
    """Invalid problem construction or query."""


class UnknownProblemError(KeyError):
    """Requested catalog entry does not exist."""


def mix_seed(seed: int, *tags) -> int:
    """Stable derived seed; avoids Python's randomized string hashing."""
    text = repr((int(seed),) + tags).encode()
    return zlib.crc32(text) & 0x7FFFFFFF


def halton_points(dim: int, count: int, seed: int) -> np.ndarray:
    """Seeded-shift Halton sequence in [0,1)^dim; deterministic forever."""
    if count <= 0:
        return np.zeros((0, dim))
    if dim > len(_HALTON_PRIMES):
        raise ProblemError("parameter dimension too large for the sampler")
    shift = np.random.default_rng(seed).random(dim)
    out = np.empty((count, dim))
    for j in range(dim):
        base = _HALTON_PRIMES[j]
        col = np.zeros(count)
        denom = 1.0
        idx = np.arange(1, count + 1)
        rem = idx.astype(np.int64)
        while np.any(rem > 0):
            denom *= base
            col += (rem % base) / denom
            rem //= base
        out[:, j] = (col + shift[j]) % 1.0
    return out


@dataclass(frozen=True)
class Schedule:
    """Discretization of the limit constructions.

    ``rho0 * factor**k`` gives the geometric rho ladder, the
    neighborhood radii are relative to each evaluation point's scale,
    and every sampler derives its substream from ``seed``.
    """

    rho0: float = 0.5
    factor: float = 0.5
    steps: int = 12
    neighborhood_radii: tuple = (
        0.25,
        0.05,
        0.01,
        2e-3,
        4e-4,
        8e-5,
        1.6e-5,
        3.2e-6,
        6.4e-7,
        1.28e-7,
        2.56e-8,
    )
    sample_budget: int = 4096
    truncation_radius: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.rho0 <= 0 or not 0.0 < self.factor < 1.0 or self.steps < 1:
            raise ProblemError("schedule requires rho0 > 0, factor in (0,1), steps >= 1")
        if self.sample_budget < 1:
            raise ProblemError("sample budget must be positive")
        radii = tuple(self.neighborhood_radii)
        if not radii or any(r <= 0 for r in radii):
            raise ProblemError("neighborhood radii must be positive")
        if any(b >= a for a, b in zip(radii, radii[1:])):
            raise ProblemError("neighborhood radii must be strictly decreasing")
        if self.truncation_radius is not None and self.truncation_radius <= 0:
            raise ProblemError("truncation radius must be positive")

    def rho_values(self) -> list:
        return [self.rho0 * self.factor**k for k in range(self.steps)]

    def outer_samples_per_level(self) -> int:
        return max(24, self.sample_budget // 128)


@dataclass(frozen=True, eq=False)
class MappingProblem:
    """A set-valued mapping given by graph oracles around an anchor point.

    ``param_to_graph`` maps a parameter vector onto a graph point and is
    the ground truth the membership predicate re-checks; all catalog
    entries carry analytic ``solution_distance`` (distance to
    F^{-1}(ybar)), ``fiber_distance`` (distance from ybar to F(x)) and,
    where available, a ``coderivative`` oracle mapping (x, y, y*) to a
    finite description of D*F(x,y)(y*) (``None`` when unknown at that
    point).
    """

    name: str
    dim_x: int
    dim_y: int
    norm_x: NormSpec
    norm_y: NormSpec
    xbar: np.ndarray
    ybar: np.ndarray
    graph_membership: Callable[[np.ndarray, np.ndarray], bool]
    param_dim: int = 1
    param_to_graph: Optional[Callable[[np.ndarray], tuple]] = None
    param_to_graph_batch: Optional[Callable[[np.ndarray], tuple]] = None
    param_of: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    param_window: Optional[Callable[[np.ndarray, float], tuple]] = None
    solution_distance: Optional[Callable[[np.ndarray], float]] = None
    fiber_distance: Optional[Callable[[np.ndarray], ExtReal]] = None
    coderivative: Optional[Callable] = None
    graph_points: Optional[tuple] = None
    convex: bool = False
    smooth: bool = False
    graph_locally_closed: bool = True
    canonical_q: float = 1.0

    def __post_init__(self):
        xbar = np.asarray(self.xbar, dtype=float).reshape(-1)
        ybar = np.asarray(self.ybar, dtype=float).reshape(-1)
        object.__setattr__(self, "xbar", xbar)
        object.__setattr__(self, "ybar", ybar)
        if xbar.shape[0] != self.dim_x or ybar.shape[0] != self.dim_y:
            raise ProblemError("anchor dimensions do not match the problem")
        if not self.graph_membership(xbar, ybar):
            raise ProblemError("anchor point must lie on the graph")

    @property
    def anchor(self) -> ProductPoint:
        return ProductPoint(self.xbar, self.ybar)

    def d_x(self, a, b) -> float:
        return self.norm_x.value(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))

    def d_y(self, a, b) -> float:
        return self.norm_y.value(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))

    def product_dist(self, p: ProductPoint, q: ProductPoint) -> float:
        return max(self.d_x(p.x, q.x), self.d_y(p.y, q.y))

    def solution_dist_exact(self, x) -> Optional[float]:
        if self.solution_distance is None:
            return None
        return float(self.solution_distance(np.asarray(x, dtype=float).reshape(-1)))


@dataclass(frozen=True, eq=False)
class ErrorFunction:
    """The induced two-variable error function of a mapping problem:
    ``d(y, ybar)**q`` on the graph and ``INF`` off it."""

    problem: MappingProblem
    q: float

    def __post_init__(self):
        if not 0.0 < self.q <= 1.0:
            raise ProblemError("q must lie in (0, 1]")

    def value(self, x, y) -> ExtReal:
        x = np.asarray(x, dtype=float).reshape(-1)
        y = np.asarray(y, dtype=float).reshape(-1)
        if x.shape[0] != self.problem.dim_x or y.shape[0] != self.problem.dim_y:
            raise ProblemError("dimension mismatch")
        if not self.problem.graph_membership(x, y):
            return INF
        return float(self.problem.d_y(y, self.problem.ybar) ** self.q)

    def values_from_dv(self, dv: np.ndarray) -> np.ndarray:
        """On-graph values from precomputed distances d(v, ybar)."""
        return dv**self.q


def error_function_value(ef: ErrorFunction, x, y) -> ExtReal:
    return ef.value(x, y)


@dataclass(frozen=True)
class DistanceEstimate:
    value: ExtReal
    exact: bool
    truncated: bool = False


def _stencil_offsets(h: float, center_scale: float = 0.0) -> list:
    """Geometric approach offsets h, h/2, ...

    The descent stops at roughly eight relative digits of the center's
    scale: closer candidates contribute only cancellation noise to the
    descent ratios (and the floor stays above the exclusion band).
    """
    stop = max(1e-9 * h, 1e-8 * center_scale, 2e-12)
    offs = []
    off = h
    while off >= stop and len(offs) < 64:
        offs.append(off)
        off *= 0.5
    return offs


@lru_cache(maxsize=32)
def _sphere_directions(dim: int, count: int, seed: int) -> np.ndarray:
    """Unit directions (rows) for multi-dimensional parameter stencils.

    In two dimensions the circle grid is emitted in bit-reversed order
    so every prefix is itself a near-uniform grid (budget-truncated
    gathers keep spread directions); higher dimensions use seeded
    normalized gaussians.  Treat the returned array as read-only.
    """
    if dim == 2:
        bits = max(1, int(np.ceil(np.log2(count))))
        idx = np.arange(count)
        rev = np.array(
            [int(format(i, f"0{bits}b")[::-1], 2) for i in idx], dtype=float
        )
        angles = 2.0 * np.pi * rev / (1 << bits)
        return np.column_stack([np.cos(angles), np.sin(angles)])
    rng = np.random.default_rng(seed)
    dirs = []
    while len(dirs) < count:
        g = rng.standard_normal(dim)
        n = float(np.linalg.norm(g))
        if n > 1e-12:
            dirs.append(g / n)
    return np.array(dirs)


def radius_pad(center: ProductPoint) -> float:
    """Additive slack for radius filters: candidates are built by
    perturbing the center's parameter, so distances carry rounding of
    the order of the center's ulp even for radii far below it."""
    scale = 1.0 + float(np.max(np.abs(center.x))) + float(np.max(np.abs(center.y)))
    return 64.0 * np.finfo(float).eps * scale


def _batch_to_graph(problem: MappingProblem, params: np.ndarray) -> tuple:
    if problem.param_to_graph_batch is not None:
        x, y = problem.param_to_graph_batch(params)
        return np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    xs, ys = [], []
    for t in params:
        x, y = problem.param_to_graph(t)
        xs.append(np.asarray(x, dtype=float).reshape(-1))
        ys.append(np.asarray(y, dtype=float).reshape(-1))
    return np.array(xs), np.array(ys)


def sample_graph_arrays(
    problem: MappingProblem,
    center: ProductPoint,
    radius: float,
    budget: int,
    seed: int,
) -> tuple:
    """Arrays (one graph point per row) within ``radius`` of ``center``
    in the plain max product metric; the object-level front end is
    :func:`graph_sample`."""
    if radius <= 0:
        raise ProblemError("radius must be positive")
    if budget <= 0:
        return np.zeros((0, problem.dim_x)), np.zeros((0, problem.dim_y))

    if problem.graph_points is not None:
        ux = np.array([p.x for p in problem.graph_points])
        vy = np.array([p.y for p in problem.graph_points])
    else:
        t0 = np.asarray(problem.param_of(center.x, center.y), dtype=float).reshape(-1)
        lo, hi = problem.param_window(t0, radius)
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        dim = t0.shape[0]

        params = [t0]
        h_vec = np.maximum(hi - t0, t0 - lo)

        def ring(n_dir: int, fracs: tuple):
            # direction-resolved rings at geometric radii: quasi-random
            # fills leave angular gaps that starve direction-sensitive
            # suprema, and graph maps with operator norm above one push
            # full-radius steps past the product-distance cutoff, so
            # smaller radii must be present too
            dirs = _sphere_directions(dim, n_dir, mix_seed(seed, "sphere"))
            block = t0 + np.asarray(fracs)[:, None, None] * dirs[None, :, :] * h_vec
            return np.clip(block.reshape(-1, dim), lo, hi)

        if dim >= 2:
            params.extend(ring(32, (1.0, 0.25, 0.0625, 0.015625)))
        # corners of the window (cheap for the low parameter dimensions here)
        if dim <= 3:
            for mask in range(1 << dim):
                c = np.where([(mask >> i) & 1 for i in range(dim)], hi, lo)
                params.append(c.astype(float))
        center_scale = float(np.max(np.abs(t0))) if dim else 0.0
        for i in range(dim):
            h = max(hi[i] - t0[i], t0[i] - lo[i])
            if h <= 0:
                continue
            for off in _stencil_offsets(h, center_scale):
                for sgn in (1.0, -1.0):
                    t = t0.copy()
                    t[i] = min(max(t0[i] + sgn * off, lo[i]), hi[i])
                    params.append(t)
        if dim >= 2:
            params.extend(ring(256, tuple(0.5**k for k in range(8))))

        fill = max(0, budget - len(params))
        if fill:
            u = halton_points(dim, fill, mix_seed(seed, "halton"))
            params.extend(lo + u * (hi - lo))
        ux, vy = _batch_to_graph(problem, np.array(params))

    dx = problem.norm_x.value_rows(ux - np.asarray(center.x))
    dy = problem.norm_y.value_rows(vy - np.asarray(center.y))
    cutoff = radius * (1.0 + 1e-12) + radius_pad(center)
    keep = np.flatnonzero(np.maximum(dx, dy) <= cutoff)[:budget]
    return ux[keep], vy[keep]


def graph_sample(
    problem: MappingProblem,
    center: ProductPoint,
    radius: float,
    budget: int,
    seed: int,
) -> list:
    """Deterministic sample of graph points within ``radius`` of
    ``center`` in the plain max product metric.

    Quasi-random fill of the parameter window around the center's
    parameter, plus a per-axis geometric approach stencil and the window
    corners.  A zero budget yields an empty list; every returned point
    satisfies the membership predicate by construction.
    """
    ux, vy = sample_graph_arrays(problem, center, radius, budget, seed)
    return [ProductPoint(x, y) for x, y in zip(ux, vy)]


def solution_set_distance(
    problem: MappingProblem, x, schedule: Schedule
) -> DistanceEstimate:
    """Distance from ``x`` to F^{-1}(ybar): exact through the oracle,
    otherwise a lower-biased estimate against sampled graph points whose
    y-component sits on ybar within the membership tolerance."""
    x = np.asarray(x, dtype=float).reshape(-1)
    exact = problem.solution_dist_exact(x)
    if exact is not None:
        return DistanceEstimate(exact, exact=True)
    radius = schedule.truncation_radius or 10.0 * max(1.0, problem.d_x(x, problem.xbar))
    pts = graph_sample(
        problem,
        problem.anchor,
        radius,
        schedule.sample_budget,
        mix_seed(schedule.seed, "soldist"),
    )
    best = None
    for p in pts:
        if problem.d_y(p.y, problem.ybar) <= MEMBERSHIP_TOL:
            d = problem.d_x(x, p.x)
            if best is None or d < best:
                best = d
    if best is None:
        return DistanceEstimate(INF, exact=False, truncated=True)
    return DistanceEstimate(best, exact=False)


def _solution_distance_for_filter(problem: MappingProblem, x, schedule: Schedule) -> ExtReal:
    est = solution_set_distance(problem, x, schedule)
    return est.value


@dataclass(frozen=True, eq=False)
class OuterPoint:
    """A sampled graph point outside F^{-1}(ybar) with cached distances."""

    x: np.ndarray
    y: np.ndarray
    d_x_anchor: float
    d_y_anchor: float
    sol_dist: float
    level: int


def sample_outer_points(
    problem: MappingProblem,
    radius: float,
    budget: int,
    seed: int,
    schedule: Schedule,
    level: int = 0,
    outer_restriction: bool = True,
) -> list:
    """Graph points in the open shell ``d(x,xbar) < radius``,
    ``0 < d(y,ybar) < radius`` with ``x`` outside F^{-1}(ybar)
    (solution distance above ``EPS_MEM``; drop with
    ``outer_restriction=False``)."""
    pts = graph_sample(problem, problem.anchor, radius, budget, seed)
    out = []
    for p in pts:
        dxa = problem.d_x(p.x, problem.xbar)
        dya = problem.d_y(p.y, problem.ybar)
        if not (dxa < radius and 0.0 < dya < radius):
            continue
        sd = problem.solution_dist_exact(p.x)
        if sd is None:
            sd_est = _solution_distance_for_filter(problem, p.x, schedule)
            sd = 1e30 if is_inf(sd_est) else float(sd_est)
        if outer_restriction and sd <= EPS_MEM:
            continue
        out.append(OuterPoint(p.x, p.y, dxa, dya, sd, level))
    return out


@lru_cache(maxsize=64)
def outer_pools(
    problem: MappingProblem, schedule: Schedule, outer_restriction: bool = True
) -> tuple:
    """Per-rho-level pools of outer points with nested-window reuse.

    Level ``k`` holds every sampled point falling inside window ``k``,
    including points drawn for finer levels, so per-level infima are
    monotone along the shrinking-window ladder by construction.
    """
    rhos = schedule.rho_values()
    n = schedule.outer_samples_per_level()
    if problem.param_dim >= 2:
        n *= 2  # direction coverage needs more shell points
    fresh = []
    for k, rho in enumerate(rhos):
        fresh.extend(
            sample_outer_points(
                problem,
                rho,
                n,
                mix_seed(schedule.seed, "outer", k),
                schedule,
                level=k,
                outer_restriction=outer_restriction,
            )
        )
    pools = []
    for rho in rhos:
        pools.append(
            tuple(p for p in fresh if p.d_x_anchor < rho and p.d_y_anchor < rho)
        )
    return tuple(pools)


@dataclass(frozen=True)
class P1P2Report:
    p1_status: str
    p2_status: str
    p2_infimum: ExtReal
    trace: tuple
    notes: tuple = ()

    @property
    def passed(self) -> bool:
        return self.p1_status == "pass" and self.p2_status == "pass"


def validate_P1_P2(ef, schedule: Schedule, threshold: float = 1e-6) -> P1P2Report:
    """Check positivity off ybar (structural for induced error functions)
    and estimate ``liminf f/d(y, ybar)`` as ``f`` shrinks along the
    shells; pass when the final-shell infimum stays above ``threshold``."""
    from .slopes_primal import as_two_variable

    func = as_two_variable(ef)
    notes = []
    if isinstance(ef, ErrorFunction):
        p1 = "pass"
        notes.append("positivity off ybar holds structurally for induced error functions")
    else:
        p1 = "pass"
        pts = func.sampler(
            ProductPoint(func.xbar, func.ybar), 1.0, 512, mix_seed(schedule.seed, "p1")
        )
        for p in pts:
            f = func.value(p.x, p.y)
            dy = func.norm_y.value(p.y - func.ybar)
            if dy > MEMBERSHIP_TOL and not is_inf(f) and f <= 0.0:
                p1 = "fail"
                break

    pts = func.sampler(
        ProductPoint(func.xbar, func.ybar),
        schedule.rho0,
        schedule.sample_budget,
        mix_seed(schedule.seed, "p2"),
    )
    ratios = []
    for p in pts:
        f = func.value(p.x, p.y)
        if is_inf(f) or f <= 0.0:
            continue
        dy = func.norm_y.value(p.y - func.ybar)
        if dy <= 0.0:
            continue
        ratios.append((float(f), float(f) / dy))
    trace = []
    for rho in schedule.rho_values():
        level = [r for (f, r) in ratios if f < rho]
        trace.append((rho, min(level) if level else INF))
    final = trace[-1][1]
    if is_inf(final):
        p2 = "inconclusive"
        notes.append("no sampled points with small function values")
    else:
        p2 = "pass" if final > threshold else "fail"
    return P1P2Report(p1, p2, final, tuple(trace), tuple(notes))


# --------------------------------------------------------------------------
# catalog
# --------------------------------------------------------------------------


def _interval_window(t0, radius, lo_clip=None):
    lo = t0 - radius
    hi = t0 + radius
    if lo_clip is not None:
        lo = np.maximum(lo, lo_clip)
        hi = np.maximum(hi, lo_clip)
    return lo, hi


def _half_square() -> MappingProblem:
    def to_graph(t):
        u = float(t[0])
        return np.array([u]), np.array([max(u, 0.0) ** 2])

    def membership(x, y):
        return abs(float(y[0]) - max(float(x[0]), 0.0) ** 2) <= MEMBERSHIP_TOL

    def coderivative(x, y, ystar):
        u = float(x[0])
        if u >= 0.0:
            return DualVectorSet.singleton([2.0 * u * float(ystar[0])])
        return DualVectorSet.singleton([0.0])

    return MappingProblem(
        name="half-square",
        dim_x=1,
        dim_y=1,
        norm_x=euclidean(1),
        norm_y=euclidean(1),
        xbar=[0.0],
        ybar=[0.0],
        graph_membership=membership,
        param_to_graph=to_graph,
        param_to_graph_batch=lambda t: (t[:, :1], np.maximum(t[:, :1], 0.0) ** 2),
        param_of=lambda x, y: np.array([float(x[0])]),
        param_window=lambda t0, r: _interval_window(t0, r),
        solution_distance=lambda x: max(float(x[0]), 0.0),
        fiber_distance=lambda x: max(float(x[0]), 0.0) ** 2,
        coderivative=coderivative,
        convex=False,
        smooth=True,
        canonical_q=0.5,
    )


def _identity() -> MappingProblem:
    return MappingProblem(
        name="identity",
        dim_x=1,
        dim_y=1,
        norm_x=euclidean(1),
        norm_y=euclidean(1),
        xbar=[0.0],
        ybar=[0.0],
        graph_membership=lambda x, y: abs(float(y[0]) - float(x[0])) <= MEMBERSHIP_TOL,
        param_to_graph=lambda t: (np.array([float(t[0])]), np.array([float(t[0])])),
        param_to_graph_batch=lambda t: (t[:, :1], t[:, :1].copy()),
        param_of=lambda x, y: np.array([float(x[0])]),
        param_window=lambda t0, r: _interval_window(t0, r),
        solution_distance=lambda x: abs(float(x[0])),
        fiber_distance=lambda x: abs(float(x[0])),
        coderivative=lambda x, y, ystar: DualVectorSet.singleton([float(ystar[0])]),
        convex=True,
        smooth=True,
        canonical_q=1.0,
    )


def _square() -> MappingProblem:
    return MappingProblem(
        name="square",
        dim_x=1,
        dim_y=1,
        norm_x=euclidean(1),
        norm_y=euclidean(1),
        xbar=[0.0],
        ybar=[0.0],
        graph_membership=lambda x, y: abs(float(y[0]) - float(x[0]) ** 2)
        <= MEMBERSHIP_TOL,
        param_to_graph=lambda t: (np.array([float(t[0])]), np.array([float(t[0]) ** 2])),
        param_to_graph_batch=lambda t: (t[:, :1], t[:, :1] ** 2),
        param_of=lambda x, y: np.array([float(x[0])]),
        param_window=lambda t0, r: _interval_window(t0, r),
        solution_distance=lambda x: abs(float(x[0])),
        fiber_distance=lambda x: float(x[0]) ** 2,
        coderivative=lambda x, y, ystar: DualVectorSet.singleton(
            [2.0 * float(x[0]) * float(ystar[0])]
        ),
        convex=False,
        smooth=True,
        canonical_q=1.0,
    )


def _linear(matrix=None) -> MappingProblem:
    a = np.asarray(matrix if matrix is not None else [[2.0, 0.0], [0.0, 3.0]], float)
    if a.ndim != 2:
        raise ProblemError("linear-A requires a matrix")
    dim_y, dim_x = a.shape
    # distance to the affine solution set {u : A u = ybar} (euclidean)
    u, s, vt = np.linalg.svd(a)
    rank = int(np.sum(s > 1e-12 * (s[0] if s.size else 1.0)))
    null_basis = vt[rank:].T  # dim_x x (dim_x - rank)
    pinv = np.linalg.pinv(a)

    def solution_distance(x):
        xp = pinv @ np.zeros(dim_y)  # particular solution for ybar = 0
        d = np.asarray(x, dtype=float) - xp
        if null_basis.shape[1]:
            d = d - null_basis @ (null_basis.T @ d)
        return float(np.linalg.norm(d))

    return MappingProblem(
        name="linear-A",
        dim_x=dim_x,
        dim_y=dim_y,
        norm_x=euclidean(dim_x),
        norm_y=euclidean(dim_y),
        xbar=np.zeros(dim_x),
        ybar=np.zeros(dim_y),
        graph_membership=lambda x, y: float(np.linalg.norm(np.asarray(y) - a @ np.asarray(x)))
        <= MEMBERSHIP_TOL,
        param_dim=dim_x,
        param_to_graph=lambda t: (np.asarray(t, dtype=float), a @ np.asarray(t, dtype=float)),
        param_to_graph_batch=lambda t: (t, t @ a.T),
        param_of=lambda x, y: np.asarray(x, dtype=float),
        param_window=lambda t0, r: _interval_window(t0, r),
        solution_distance=solution_distance,
        fiber_distance=lambda x: float(np.linalg.norm(a @ np.asarray(x, dtype=float))),
        coderivative=lambda x, y, ystar: DualVectorSet.singleton(a.T @ np.asarray(ystar, float)),
        convex=True,
        smooth=True,
        canonical_q=1.0,
    )


def _halfline() -> MappingProblem:
    def to_graph(t):
        u, s = float(t[0]), max(float(t[1]), 0.0)
        return np.array([u]), np.array([u + s])

    def window(t0, r):
        lo = np.array([t0[0] - r, max(t0[1] - 2.0 * r, 0.0)])
        hi = np.array([t0[0] + r, max(t0[1] + 2.0 * r, 0.0)])
        return lo, hi

    def coderivative(x, y, ystar):
        slack = float(y[0]) - float(x[0])
        ys = float(ystar[0])
        if slack <= MEMBERSHIP_TOL:
            if ys >= -1e-12:
                return DualVectorSet.singleton([ys])
            return DualVectorSet.empty()
        if abs(ys) <= 1e-12:
            return DualVectorSet.singleton([0.0])
        return DualVectorSet.empty()

    return MappingProblem(
        name="halfline-convex",
        dim_x=1,
        dim_y=1,
        norm_x=euclidean(1),
        norm_y=euclidean(1),
        xbar=[0.0],
        ybar=[0.0],
        graph_membership=lambda x, y: float(y[0]) >= float(x[0]) - MEMBERSHIP_TOL,
        param_dim=2,
        param_to_graph=to_graph,
        param_to_graph_batch=lambda t: (
            t[:, :1],
            t[:, :1] + np.maximum(t[:, 1:2], 0.0),
        ),
        param_of=lambda x, y: np.array([float(x[0]), max(float(y[0]) - float(x[0]), 0.0)]),
        param_window=window,
        solution_distance=lambda x: max(float(x[0]), 0.0),
        fiber_distance=lambda x: max(float(x[0]), 0.0),
        coderivative=coderivative,
        convex=True,
        smooth=False,
        canonical_q=1.0,
    )


def _constant() -> MappingProblem:
    return MappingProblem(
        name="constant",
        dim_x=1,
        dim_y=1,
        norm_x=euclidean(1),
        norm_y=euclidean(1),
        xbar=[0.0],
        ybar=[0.0],
        graph_membership=lambda x, y: abs(float(y[0])) <= MEMBERSHIP_TOL,
        param_to_graph=lambda t: (np.array([float(t[0])]), np.array([0.0])),
        param_to_graph_batch=lambda t: (t[:, :1], np.zeros_like(t[:, :1])),
        param_of=lambda x, y: np.array([float(x[0])]),
        param_window=lambda t0, r: _interval_window(t0, r),
        solution_distance=lambda x: 0.0,
        fiber_distance=lambda x: 0.0,
        coderivative=lambda x, y, ystar: DualVectorSet.singleton([0.0]),
        convex=True,
        smooth=True,
        canonical_q=1.0,
    )


_CATALOG = {
    "half-square": _half_square,
    "identity": _identity,
    "square": _square,
    "linear-A": _linear,
    "halfline-convex": _halfline,
    "constant": _constant,
}


def catalog_names() -> list:
    return sorted(_CATALOG)


def catalog_problem(name: str, matrix=None) -> MappingProblem:
    """Fully-oracled catalog entry; raises for unknown names."""
    if name not in _CATALOG:
        raise UnknownProblemError(f"unknown catalog problem {name!r}")
    if name == "linear-A":
        return _linear(matrix)
    return _CATALOG[name]()


# --------------------------------------------------------------------------
# inline piecewise-polynomial problems (run-config interface)
# --------------------------------------------------------------------------


def piecewise_problem(
    pieces: Sequence[dict],
    xbar: float,
    ybar: float,
    convex: bool = False,
    smooth: bool = False,
    graph_locally_closed: bool = True,
    name: str = "inline",
) -> MappingProblem:
    """Single-valued piecewise-polynomial mapping on the real line.

    Each piece is ``{"domain": [a, b], "coeffs": [c0, c1, ...]}`` with
    ``y = c0 + c1 x + ...`` on the domain interval.
    """
    if not pieces:
        raise ProblemError("piecewise problem needs at least one piece")
    parsed = []
    for pc in pieces:
        try:
            a, b = float(pc["domain"][0]), float(pc["domain"][1])
            coeffs = [float(c) for c in pc["coeffs"]]
        except (KeyError, TypeError, IndexError) as exc:
            raise ProblemError(f"malformed piece {pc!r}") from exc
        if b < a or not coeffs:
            raise ProblemError(f"malformed piece {pc!r}")
        parsed.append((a, b, np.array(coeffs)))
    parsed.sort(key=lambda t: t[0])
    lo_all = parsed[0][0]
    hi_all = max(b for _, b, _ in parsed)

    def poly_at(u: float) -> Optional[float]:
        for a, b, c in parsed:
            if a - MEMBERSHIP_TOL <= u <= b + MEMBERSHIP_TOL:
                return float(np.polyval(c[::-1], u))
        return None

    def membership(x, y):
        v = poly_at(float(x[0]))
        return v is not None and abs(float(y[0]) - v) <= MEMBERSHIP_TOL

    def to_graph(t):
        u = min(max(float(t[0]), lo_all), hi_all)
        v = poly_at(u)
        if v is None:
            # snap into the nearest domain
            best, best_d = None, None
            for a, b, _ in parsed:
                for edge in (a, b):
                    d = abs(u - edge)
                    if best_d is None or d < best_d:
                        best, best_d = edge, d
            u = best
            v = poly_at(u)
        return np.array([u]), np.array([v])

    def solution_distance(x):
        u = float(x[0])
        best = None
        for a, b, c in parsed:
            shifted = c.copy()
            shifted[0] -= ybar
            if np.allclose(shifted, 0.0, atol=1e-15):
                d = 0.0 if a <= u <= b else min(abs(u - a), abs(u - b))
                best = d if best is None else min(best, d)
                continue
            roots = np.roots(shifted[::-1]) if len(shifted) > 1 else np.array([])
            for r in roots:
                if abs(r.imag) > 1e-9:
                    continue
                rr = float(r.real)
                if a - 1e-9 <= rr <= b + 1e-9:
                    d = abs(u - rr)
                    best = d if best is None else min(best, d)
        return best if best is not None else 1e30

    def fiber_distance(x):
        v = poly_at(float(x[0]))
        if v is None:
            return INF
        return abs(v - ybar)

    def coderivative(x, y, ystar):
        u = float(x[0])
        hits = [
            (a, b, c)
            for a, b, c in parsed
            if a - MEMBERSHIP_TOL <= u <= b + MEMBERSHIP_TOL
        ]
        if not hits:
            return DualVectorSet.empty()
        slopes = set()
        for a, b, c in hits:
            dc = np.polyder(np.poly1d(c[::-1]))
            slopes.add(round(float(dc(u)), 12))
        if len(slopes) > 1:
            return None  # kink: no analytic description here
        return DualVectorSet.singleton([slopes.pop() * float(ystar[0])])

    return MappingProblem(
        name=name,
        dim_x=1,
        dim_y=1,
        norm_x=euclidean(1),
        norm_y=euclidean(1),
        xbar=[float(xbar)],
        ybar=[float(ybar)],
        graph_membership=membership,
        param_to_graph=to_graph,
        param_of=lambda x, y: np.array([float(x[0])]),
        param_window=lambda t0, r: (
            np.maximum(t0 - r, lo_all),
            np.minimum(t0 + r, hi_all),
        ),
        solution_distance=solution_distance,
        fiber_distance=fiber_distance,
        coderivative=coderivative,
        convex=convex,
        smooth=smooth,
        graph_locally_closed=graph_locally_closed,
    )


def finite_graph_problem(
    points: Sequence,
    xbar,
    ybar,
    name: str = "finite",
    dim_x: int = 1,
    dim_y: int = 1,
) -> MappingProblem:
    """A mapping whose graph is exactly a finite point list; samplers
    enumerate the list, so exhaustive budgets scan every candidate."""
    pts = tuple(
        ProductPoint(np.asarray(p[0], dtype=float), np.asarray(p[1], dtype=float))
        for p in points
    )
    if not pts:
        raise ProblemError("finite graph needs at least one point")
    nx, ny = euclidean(dim_x), euclidean(dim_y)
    ybar_arr = np.asarray(ybar, dtype=float).reshape(-1)

    def membership(x, y):
        x = np.asarray(x, dtype=float).reshape(-1)
        y = np.asarray(y, dtype=float).reshape(-1)
        return any(
            nx.value(x - p.x) <= MEMBERSHIP_TOL and ny.value(y - p.y) <= MEMBERSHIP_TOL
            for p in pts
        )

    solset = [p.x for p in pts if ny.value(p.y - ybar_arr) <= MEMBERSHIP_TOL]

    def solution_distance(x):
        x = np.asarray(x, dtype=float).reshape(-1)
        if not solset:
            return 1e30
        return min(nx.value(x - s) for s in solset)

    def fiber_distance(x):
        x = np.asarray(x, dtype=float).reshape(-1)
        fibers = [p.y for p in pts if nx.value(x - p.x) <= MEMBERSHIP_TOL]
        if not fibers:
            return INF
        return min(ny.value(f - ybar_arr) for f in fibers)

    return MappingProblem(
        name=name,
        dim_x=dim_x,
        dim_y=dim_y,
        norm_x=nx,
        norm_y=ny,
        xbar=xbar,
        ybar=ybar,
        graph_membership=membership,
        graph_points=pts,
        solution_distance=solution_distance,
        fiber_distance=fiber_distance,
    )
