"""Primal (metric-space) slope estimation.

Nonlocal (q,rho)-slopes are suprema of descent ratios over sampled
graph candidates, local rho-slopes realize the shrinking-neighborhood
limsup as the supremum at the smallest relative radius, and the strict
slopes take per-level infima over outer-point pools along the
decreasing rho ladder, reporting the final (tightest) level.

All suprema are lower-biased (sampled subsets) and all infima are
upper-biased; comparisons downstream add slack in the direction that
sampling bias cannot explain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .extended import INF, ExtReal, is_inf
from .geometry import NormSpec, ProductPoint, euclidean
from .problems import (
    ErrorFunction,
    MappingProblem,
    OuterPoint,
    Schedule,
    graph_sample,
    mix_seed,
    outer_pools,
    radius_pad,
    sample_graph_arrays,
)

# Candidates closer than this (plain product metric, so the mask does
# not depend on rho) are treated as the center itself: the defining
# suprema exclude the center.
EXCLUSION_BAND = 1e-12
# Relative local-slope radii are floored here so candidate distances
# stay safely above the exclusion band.
LOCAL_RADIUS_FLOOR = 2.5e-12
# Sampled candidates closer than this fraction of the point's scale
# carry only cancellation noise in the descent numerators (the
# numerator rounds at the ulp of the center value) and are skipped.
NOISE_FLOOR_REL = 4e-9
# Window points this close to the anchor have their entire descent
# region inside the exclusion band; their slopes are numerically
# unresolvable and they are skipped rather than scored as zero.
UNRESOLVABLE_FLOOR = 1e-11


class SlopeError(ValueError):
    """Invalid input to a slope estimator."""


@dataclass(frozen=True)
class SlopeEstimate:
    """A slope value with its convergence trace along the schedule."""

    value: ExtReal
    trace: tuple
    truncated: bool
    budget_used: int
    kind: str
    flags: tuple = ()

    @property
    def inconclusive(self) -> bool:
        return "inconclusive" in self.flags


def _finite(problem: MappingProblem) -> bool:
    return problem.graph_points is not None


def _local_radius(schedule: Schedule, scale: float) -> float:
    return max(schedule.neighborhood_radii[-1] * scale, LOCAL_RADIUS_FLOOR)


def _local_budget(problem: MappingProblem, schedule: Schedule) -> int:
    if problem.param_dim <= 1:
        return min(96, schedule.sample_budget)
    # room for the full direction rings at every geometric radius
    return min(2560, 4 * schedule.sample_budget)


def _point_seed(schedule: Schedule, tag: str, at: ProductPoint) -> int:
    return mix_seed(schedule.seed, tag, at.x.tobytes(), at.y.tobytes())


@dataclass(eq=False)
class PointCandidates:
    """Graph candidates around one evaluation point with the distance
    arrays every ratio reduction needs; local candidates are a subset of
    the nonlocal superset so pointwise dominations hold sample-wise."""

    d_at: float
    dx: np.ndarray
    dy: np.ndarray
    dv: np.ndarray
    dist: np.ndarray
    local_mask: np.ndarray
    trunc_radius: float
    min_dist: float = EXCLUSION_BAND

    @property
    def size(self) -> int:
        return int(self.dx.shape[0])

    def _reduce(self, num: np.ndarray, rho: float, metric: str, mask=None):
        ok = self.dist > self.min_dist
        if mask is not None:
            ok = ok & mask
        den = (
            np.maximum(self.dx, rho * self.dy)
            if metric == "max"
            else self.dx + rho * self.dy
        )
        num = np.maximum(num, 0.0)
        if not np.any(ok):
            return 0.0, -1
        vals = np.where(ok, num / np.where(ok, den, 1.0), -1.0)
        idx = int(np.argmax(vals))
        return max(float(vals[idx]), 0.0), idx

    def nonlocal_value(self, q: float, rho: float, metric: str = "max"):
        num = self.d_at**q - self.dv**q
        value, idx = self._reduce(num, rho, metric)
        truncated = idx >= 0 and self.dist[idx] >= 0.99 * self.trunc_radius
        return value, truncated

    def local_value(self, rho: float, metric: str = "max") -> float:
        num = self.d_at - self.dv
        value, _ = self._reduce(num, rho, metric, mask=self.local_mask)
        return value

    def f_nonlocal_value(self, q: float, rho: float, metric: str = "max") -> float:
        # induced error function: f = d(v, ybar)**q on the graph
        num = self.d_at**q - np.maximum(self.dv**q, 0.0)
        value, _ = self._reduce(num, rho, metric)
        return value

    def f_local_value(self, q: float, rho: float, metric: str = "max") -> float:
        num = self.d_at**q - self.dv**q
        value, _ = self._reduce(num, rho, metric, mask=self.local_mask)
        return value


def gather_point_candidates(
    problem: MappingProblem,
    at: ProductPoint,
    schedule: Schedule,
    trunc_radius: Optional[float] = None,
) -> PointCandidates:
    """Multi-scale candidate superset around ``at``: a truncation-radius
    sweep, a near-anchor scale, the tight local shell and the anchor
    itself."""
    anchor = problem.anchor
    d_anchor = problem.product_dist(at, anchor)
    trunc = trunc_radius or schedule.truncation_radius or 10.0 * max(1.0, d_anchor)
    scale = max(d_anchor, 0.0)
    r_loc = _local_radius(schedule, scale)

    if _finite(problem):
        ux = np.array([p.x for p in problem.graph_points], dtype=float)
        vy = np.array([p.y for p in problem.graph_points], dtype=float)
    else:
        n = max(32, schedule.sample_budget // 4)
        blocks = [
            sample_graph_arrays(
                problem, at, trunc, n // 2, _point_seed(schedule, "far", at)
            )
        ]
        if d_anchor > 0:
            mid = min(trunc, 2.0 * d_anchor)
            blocks.append(
                sample_graph_arrays(
                    problem, at, mid, n // 4, _point_seed(schedule, "mid", at)
                )
            )
        blocks.append(
            sample_graph_arrays(
                problem,
                at,
                r_loc,
                _local_budget(problem, schedule),
                _point_seed(schedule, "loc", at),
            )
        )
        blocks.append((anchor.x.reshape(1, -1), anchor.y.reshape(1, -1)))
        ux = np.vstack([b[0] for b in blocks])
        vy = np.vstack([b[1] for b in blocks])
    dx = problem.norm_x.value_rows(ux - at.x)
    dy = problem.norm_y.value_rows(vy - at.y)
    dv = problem.norm_y.value_rows(vy - problem.ybar)
    dist = np.maximum(dx, dy)
    min_dist = EXCLUSION_BAND
    if not _finite(problem):
        min_dist = max(min_dist, NOISE_FLOOR_REL * scale)
    return PointCandidates(
        d_at=problem.d_y(at.y, problem.ybar),
        dx=dx,
        dy=dy,
        dv=dv,
        dist=dist,
        local_mask=dist <= r_loc + radius_pad(at),
        trunc_radius=trunc,
        min_dist=min_dist,
    )


class CandidateCache:
    """Per-run cache of candidate gatherings keyed by point identity."""

    def __init__(self, problem: MappingProblem, schedule: Schedule):
        self.problem = problem
        self.schedule = schedule
        self._store: dict = {}

    def for_point(self, pt: OuterPoint) -> PointCandidates:
        key = id(pt)
        if key not in self._store:
            self._store[key] = gather_point_candidates(
                self.problem, ProductPoint(pt.x, pt.y), self.schedule
            )
        return self._store[key]


def _require_on_graph(problem: MappingProblem, at: ProductPoint):
    if not problem.graph_membership(at.x, at.y):
        raise SlopeError("evaluation point is not on the graph")


def _exhaustive_nonlocal(problem, q, rho, at, metric) -> tuple:
    """Scalar scan over an explicit finite graph (bitwise-reproducible)."""
    d_at = problem.d_y(at.y, problem.ybar)
    a_q = d_at**q
    best = 0.0
    count = 0
    for p in problem.graph_points:
        dx = problem.d_x(p.x, at.x)
        dy = problem.d_y(p.y, at.y)
        if max(dx, dy) <= EXCLUSION_BAND:
            continue
        den = max(dx, rho * dy) if metric == "max" else dx + rho * dy
        count += 1
        num = a_q - problem.d_y(p.y, problem.ybar) ** q
        if num < 0.0:
            num = 0.0
        r = num / den
        if r > best:
            best = r
    if count == 0:
        raise SlopeError("empty candidate sample")
    return best, count


def nonlocal_q_rho_slope(
    problem: MappingProblem,
    q: float,
    rho: float,
    at: ProductPoint,
    schedule: Schedule,
    metric: str = "max",
) -> SlopeEstimate:
    """Supremum of ``[(d(y,ybar))^q - (d(v,ybar))^q]_+ / d_rho`` over
    sampled graph candidates within the truncation radius.

    At points with ``y == ybar`` every numerator is nonpositive and the
    value is 0.  The estimate is lower-biased; the truncated flag marks
    a supremum attained near the truncation boundary.
    """
    if rho <= 0:
        raise SlopeError("rho must be positive")
    if not 0.0 < q <= 1.0:
        raise SlopeError("q must lie in (0, 1]")
    _require_on_graph(problem, at)
    if problem.d_y(at.y, problem.ybar) <= 0.0:
        return SlopeEstimate(0.0, ((rho, 0.0),), False, 0, "nonlocal_q_rho")
    if _finite(problem):
        value, used = _exhaustive_nonlocal(problem, q, rho, at, metric)
        return SlopeEstimate(value, ((rho, value),), False, used, "nonlocal_q_rho")
    cands = gather_point_candidates(problem, at, schedule)
    if cands.size == 0:
        raise SlopeError("empty candidate sample")
    value, truncated = cands.nonlocal_value(q, rho, metric)
    return SlopeEstimate(
        value, ((rho, value),), truncated, cands.size, "nonlocal_q_rho"
    )


def local_rho_slope(
    problem: MappingProblem,
    rho: float,
    at: ProductPoint,
    schedule: Schedule,
    metric: str = "max",
) -> SlopeEstimate:
    """Shrinking-neighborhood limsup of ``[d(y,ybar) - d(v,ybar)]_+ /
    d_rho`` realized as the supremum at the smallest relative radius;
    the trace over the whole radius ladder makes non-stabilization
    visible."""
    if rho <= 0:
        raise SlopeError("rho must be positive")
    _require_on_graph(problem, at)
    d_at = problem.d_y(at.y, problem.ybar)
    scale = max(problem.product_dist(at, problem.anchor), 0.0)
    trace = []
    used = 0

    if _finite(problem):
        pairs = []
        for p in problem.graph_points:
            dx = problem.d_x(p.x, at.x)
            dy = problem.d_y(p.y, at.y)
            num = d_at - problem.d_y(p.y, problem.ybar)
            pairs.append((max(dx, dy), dx, dy, num))
        pad = radius_pad(at)
        for nr in schedule.neighborhood_radii:
            r = max(nr * max(scale, 1.0), LOCAL_RADIUS_FLOOR)
            best = 0.0
            for dist, dx, dy, num in pairs:
                if dist > r + pad or dist <= EXCLUSION_BAND:
                    continue
                den = max(dx, rho * dy) if metric == "max" else dx + rho * dy
                used += 1
                val = (num if num > 0.0 else 0.0) / den
                if val > best:
                    best = val
            trace.append((r, best))
        return SlopeEstimate(trace[-1][1], tuple(trace), False, used, "local_rho")

    n_loc = _local_budget(problem, schedule)
    for j, nr in enumerate(schedule.neighborhood_radii):
        r = max(nr * scale, LOCAL_RADIUS_FLOOR)
        ux, vy = sample_graph_arrays(
            problem, at, r, n_loc, mix_seed(_point_seed(schedule, "ls", at), j)
        )
        if ux.shape[0] == 0:
            trace.append((r, 0.0))
            continue
        dx = problem.norm_x.value_rows(ux - at.x)
        dy = problem.norm_y.value_rows(vy - at.y)
        dv = problem.norm_y.value_rows(vy - problem.ybar)
        den = np.maximum(dx, rho * dy) if metric == "max" else dx + rho * dy
        ok = np.maximum(dx, dy) > max(EXCLUSION_BAND, NOISE_FLOOR_REL * scale)
        used += int(np.sum(ok))
        num = np.maximum(d_at - dv, 0.0)
        vals = np.where(ok, num / np.where(ok, den, 1.0), -1.0)
        trace.append((r, max(float(np.max(vals)), 0.0)))
    return SlopeEstimate(trace[-1][1], tuple(trace), False, used, "local_rho")


# --------------------------------------------------------------------------
# strict slopes (outer sweeps)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class StrictSweepResult:
    """Per-level infima of every primal strict-slope family computed on
    shared outer pools, so the family orderings hold sample-wise."""

    uniform: SlopeEstimate
    plain: SlopeEstimate
    modified: SlopeEstimate
    anchor_ratio: SlopeEstimate


def _finish(kind: str, trace: list, truncated: bool, used: int) -> SlopeEstimate:
    flags = ()
    if any(is_inf(v) for _, v in trace):
        flags += ("empty-levels",)
    if all(is_inf(v) for _, v in trace):
        flags += ("inconclusive",)
    return SlopeEstimate(trace[-1][1], tuple(trace), truncated, used, kind, flags)


def strict_sweep(
    problem: MappingProblem,
    q: float,
    schedule: Schedule,
    cache: Optional[CandidateCache] = None,
    metric: str = "max",
    outer_restriction: bool = True,
) -> StrictSweepResult:
    """Shared-pool evaluation of the uniform strict q-slope, the plain
    and modified strict q-slopes and the anchor-distance ratio liminf.

    Empty pools contribute ``INF`` levels (infimum of the empty set).
    """
    if not 0.0 < q <= 1.0:
        raise SlopeError("q must lie in (0, 1]")
    cache = cache or CandidateCache(problem, schedule)
    pools = outer_pools(problem, schedule, outer_restriction)
    rhos = schedule.rho_values()

    tr_uniform, tr_plain, tr_modified, tr_ratio = [], [], [], []
    used = 0
    truncated_any = False
    for k, rho in enumerate(rhos):
        pool = pools[k]
        best_u: ExtReal = INF
        best_p: ExtReal = INF
        best_m: ExtReal = INF
        best_r: ExtReal = INF
        for pt in pool:
            cands = cache.for_point(pt)
            used += cands.size
            nl, trunc_flag = cands.nonlocal_value(q, rho, metric)
            truncated_any = truncated_any or trunc_flag
            loc = cands.local_value(rho, metric)
            weight = q * pt.d_y_anchor ** (q - 1.0)
            plain = weight * loc
            ratio = pt.d_y_anchor**q / pt.d_x_anchor if pt.d_x_anchor > 0 else INF
            if nl < best_u:
                best_u = nl
            if plain < best_p:
                best_p = plain
            m = max(plain, ratio) if not is_inf(ratio) else INF
            if m < best_m:
                best_m = m
            if ratio < best_r:
                best_r = ratio
        tr_uniform.append((rho, best_u))
        tr_plain.append((rho, best_p))
        tr_modified.append((rho, best_m))
        tr_ratio.append((rho, best_r))

    return StrictSweepResult(
        uniform=_finish("uniform_strict_q", tr_uniform, truncated_any, used),
        plain=_finish("strict_q", tr_plain, False, used),
        modified=_finish("modified_strict_q", tr_modified, False, used),
        anchor_ratio=_finish("anchor_ratio_liminf", tr_ratio, False, used),
    )


def uniform_strict_q_slope(
    problem: MappingProblem,
    q: float,
    schedule: Schedule,
    metric: str = "max",
    outer_restriction: bool = True,
) -> SlopeEstimate:
    """Limit proxy of per-level infima of the nonlocal (q,rho)-slope
    over outer points in the shrinking shells; the unrestricted variant
    (``outer_restriction=False``) keeps points inside F^{-1}(ybar) and
    yields a stronger sufficient condition."""
    return strict_sweep(
        problem, q, schedule, metric=metric, outer_restriction=outer_restriction
    ).uniform


def strict_q_slopes(
    problem: MappingProblem, q: float, schedule: Schedule
) -> tuple:
    """(plain, modified) strict q-slopes on one shared sample set per
    level, so modified >= plain holds sample-wise."""
    sweep = strict_sweep(problem, q, schedule)
    return sweep.plain, sweep.modified


# --------------------------------------------------------------------------
# generic two-variable functions
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TwoVariableFunction:
    """An extended-real function of (x, y) with an anchor where it
    vanishes and a sampler producing finite-value points."""

    f: Callable
    xbar: np.ndarray
    ybar: np.ndarray
    norm_x: NormSpec
    norm_y: NormSpec
    sampler: Callable
    solution_distance: Optional[Callable] = None
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "xbar", np.asarray(self.xbar, dtype=float).reshape(-1))
        object.__setattr__(self, "ybar", np.asarray(self.ybar, dtype=float).reshape(-1))

    def value(self, x, y) -> ExtReal:
        return self.f(np.asarray(x, dtype=float).reshape(-1), np.asarray(y, dtype=float).reshape(-1))


def as_two_variable(obj) -> TwoVariableFunction:
    if isinstance(obj, TwoVariableFunction):
        return obj
    if isinstance(obj, ErrorFunction):
        pr = obj.problem

        def sampler(center, radius, budget, seed):
            return graph_sample(pr, center, radius, budget, seed)

        return TwoVariableFunction(
            f=obj.value,
            xbar=pr.xbar,
            ybar=pr.ybar,
            norm_x=pr.norm_x,
            norm_y=pr.norm_y,
            sampler=sampler,
            solution_distance=pr.solution_distance,
            name=f"induced[{pr.name}]",
        )
    raise SlopeError(f"cannot interpret {type(obj).__name__} as a two-variable function")


def single_variable_embedding(
    f: Callable[[float], float],
    xbar: float = 0.0,
    solution_distance: Optional[Callable] = None,
    name: str = "embedded",
) -> TwoVariableFunction:
    """Embed a one-variable function: finite on the slice ``y == ybar``
    and infinite elsewhere."""
    xbar_arr = np.array([float(xbar)])
    ybar_arr = np.array([0.0])

    def value(x, y):
        if abs(float(y[0])) > 0.0:
            return INF
        return float(f(float(x[0])))

    def sampler(center, radius, budget, seed):
        if budget <= 0:
            return []
        c = float(center.x[0])
        params = [c]
        for off in _embedding_offsets(radius):
            params.extend([c + off, c - off])
        fill = max(0, budget - len(params))
        if fill:
            from .problems import halton_points

            u = halton_points(1, fill, mix_seed(seed, "embed"))[:, 0]
            params.extend(c - radius + 2.0 * radius * u)
        out = []
        for t in params:
            if abs(t - c) <= radius * (1.0 + 1e-12):
                out.append(ProductPoint([t], [0.0]))
            if len(out) >= budget:
                break
        return out

    return TwoVariableFunction(
        f=value,
        xbar=xbar_arr,
        ybar=ybar_arr,
        norm_x=euclidean(1),
        norm_y=euclidean(1),
        sampler=sampler,
        solution_distance=solution_distance,
        name=name,
    )


def _embedding_offsets(radius: float) -> list:
    stop = max(1e-9 * radius, 1e-11)
    offs = []
    off = radius
    while off >= stop and len(offs) < 64:
        offs.append(off)
        off *= 0.5
    return offs


@dataclass(eq=False)
class _FCandidates:
    f_at: float
    fvals: np.ndarray
    dx: np.ndarray
    dy: np.ndarray
    local_mask: Optional[np.ndarray] = None

    def reduce(
        self, numerator: str, rho: float, metric: str = "max", local: bool = False
    ) -> float:
        den = (
            np.maximum(self.dx, rho * self.dy)
            if metric == "max"
            else self.dx + rho * self.dy
        )
        ok = np.maximum(self.dx, self.dy) > EXCLUSION_BAND
        if local and self.local_mask is not None:
            ok = ok & self.local_mask
        if not np.any(ok):
            return 0.0
        fv = np.maximum(self.fvals, 0.0) if numerator == "plus" else self.fvals
        num = np.maximum(self.f_at - fv, 0.0)
        vals = np.where(ok, num / np.where(ok, den, 1.0), -1.0)
        return max(float(np.max(vals)), 0.0)


def _from_points(
    func: TwoVariableFunction,
    at: ProductPoint,
    pts: list,
    include_anchor: bool,
) -> _FCandidates:
    if include_anchor:
        pts = list(pts) + [ProductPoint(func.xbar, func.ybar)]
    f_at = func.value(at.x, at.y)
    rows = []
    for p in pts:
        fv = func.value(p.x, p.y)
        if is_inf(fv):
            continue
        rows.append(
            (
                float(fv),
                func.norm_x.value(p.x - at.x),
                func.norm_y.value(p.y - at.y),
            )
        )
    if rows:
        arr = np.array(rows, dtype=float)
        fvals, dx, dy = arr[:, 0], arr[:, 1], arr[:, 2]
    else:
        fvals = dx = dy = np.zeros(0)
    return _FCandidates(float(f_at) if not is_inf(f_at) else 0.0, fvals, dx, dy)


def _gather_f_candidates(
    func: TwoVariableFunction,
    at: ProductPoint,
    radius: float,
    budget: int,
    seed: int,
    include_anchor: bool = True,
) -> _FCandidates:
    pts = list(func.sampler(at, radius, budget, seed))
    return _from_points(func, at, pts, include_anchor)


def f_level_slopes(
    func_or_ef,
    rho: float,
    at: ProductPoint,
    schedule: Schedule,
    variants: Sequence[str] = ("nonlocal", "local"),
) -> dict:
    """Slopes of a generic two-variable function.

    Point variants (``nonlocal``, ``local``) use ``rho`` and ``at``;
    anchor variants (``uniform-strict``, ``strict-outer``,
    ``modified-strict-outer``) sweep the schedule windows
    ``0 < f < rho_k`` and ignore ``rho``/``at``.
    """
    func = as_two_variable(func_or_ef)
    out = {}
    point_variants = {"nonlocal", "local"} & set(variants)
    if point_variants:
        fv = func.value(at.x, at.y)
        if is_inf(fv):
            for v in point_variants:
                out[v] = SlopeEstimate(INF, ((rho, INF),), False, 0, f"f_{v}")
        else:
            trunc = schedule.truncation_radius or 10.0 * max(
                1.0,
                max(
                    func.norm_x.value(at.x - func.xbar),
                    func.norm_y.value(at.y - func.ybar),
                ),
            )
            if "nonlocal" in point_variants:
                cands = _gather_f_candidates(
                    func,
                    at,
                    trunc,
                    max(64, schedule.sample_budget // 4),
                    mix_seed(schedule.seed, "fnl", at.x.tobytes(), at.y.tobytes()),
                )
                val = cands.reduce("plus", rho)
                out["nonlocal"] = SlopeEstimate(
                    val, ((rho, val),), False, cands.fvals.shape[0], "f_nonlocal"
                )
            if "local" in point_variants:
                scale = max(
                    func.norm_x.value(at.x - func.xbar),
                    func.norm_y.value(at.y - func.ybar),
                )
                trace = []
                used = 0
                for j, nr in enumerate(schedule.neighborhood_radii):
                    r = max(nr * scale, LOCAL_RADIUS_FLOOR)
                    cands = _gather_f_candidates(
                        func,
                        at,
                        r,
                        max(64, schedule.sample_budget // 16),
                        mix_seed(
                            schedule.seed, "floc", j, at.x.tobytes(), at.y.tobytes()
                        ),
                        include_anchor=False,
                    )
                    used += cands.fvals.shape[0]
                    trace.append((r, cands.reduce("raw", rho)))
                out["local"] = SlopeEstimate(
                    trace[-1][1], tuple(trace), False, used, "f_local"
                )

    anchor_variants = {
        "uniform-strict",
        "strict-outer",
        "modified-strict-outer",
    } & set(variants)
    if anchor_variants:
        strict = f_level_strict(func, schedule)
        if "uniform-strict" in anchor_variants:
            out["uniform-strict"] = strict["uniform"]
        if "strict-outer" in anchor_variants:
            out["strict-outer"] = strict["plain"]
        if "modified-strict-outer" in anchor_variants:
            out["modified-strict-outer"] = strict["modified"]
    return out


def f_level_strict(func_or_ef, schedule: Schedule) -> dict:
    """Uniform / plain / modified strict outer slopes of a two-variable
    function over the windows ``d(x,xbar) < rho_k``, ``0 < f < rho_k``,
    with one shared sample pool per level."""
    func = as_two_variable(func_or_ef)
    anchor = ProductPoint(func.xbar, func.ybar)
    rhos = schedule.rho_values()
    n = schedule.outer_samples_per_level()

    sampled = []
    for k, rho in enumerate(rhos):
        pts = func.sampler(anchor, rho, n, mix_seed(schedule.seed, "fstrict", k))
        for p in pts:
            fv = func.value(p.x, p.y)
            if is_inf(fv) or fv <= 0.0:
                continue
            dxa = func.norm_x.value(p.x - func.xbar)
            dya = func.norm_y.value(p.y - func.ybar)
            if max(dxa, dya) <= UNRESOLVABLE_FLOOR:
                continue
            sampled.append((float(fv), dxa, p))

    tr_u, tr_p, tr_m = [], [], []
    used = 0
    cache: dict = {}
    for rho in rhos:
        best_u: ExtReal = INF
        best_p: ExtReal = INF
        best_m: ExtReal = INF
        for fv, dxa, p in sampled:
            if not (fv < rho and dxa < rho):
                continue
            key = id(p)
            if key not in cache:
                scale = max(
                    func.norm_x.value(p.x - func.xbar),
                    func.norm_y.value(p.y - func.ybar),
                )
                r_loc = max(
                    schedule.neighborhood_radii[-1] * scale, LOCAL_RADIUS_FLOOR
                )
                far = func.sampler(
                    p,
                    10.0 * max(1.0, scale),
                    max(64, schedule.sample_budget // 8),
                    mix_seed(schedule.seed, "fnlc", p.x.tobytes(), p.y.tobytes()),
                )
                near = func.sampler(
                    p,
                    r_loc,
                    max(64, schedule.sample_budget // 16),
                    mix_seed(schedule.seed, "flocc", p.x.tobytes(), p.y.tobytes()),
                )
                # one shared superset with a local mask, so the nonlocal
                # supremum dominates the local one sample-wise
                cands = _from_points(func, p, list(far) + list(near), True)
                from .problems import radius_pad

                cands.local_mask = (
                    np.maximum(cands.dx, cands.dy) <= r_loc + radius_pad(p)
                )
                cache[key] = cands
            cands = cache[key]
            used += cands.fvals.shape[0]
            u = cands.reduce("plus", rho)
            l = cands.reduce("raw", rho, local=True)
            m = max(l, fv / dxa) if dxa > 0 else INF
            if u < best_u:
                best_u = u
            if l < best_p:
                best_p = l
            if m < best_m:
                best_m = m
        tr_u.append((rho, best_u))
        tr_p.append((rho, best_p))
        tr_m.append((rho, best_m))

    return {
        "uniform": _finish("f_uniform_strict", tr_u, False, used),
        "plain": _finish("f_strict_outer", tr_p, False, used),
        "modified": _finish("f_modified_strict_outer", tr_m, False, used),
    }


def rho_slope_profiles(
    problem: MappingProblem,
    at: ProductPoint,
    q: float,
    rhos: Sequence[float],
    schedule: Schedule,
) -> dict:
    """Slope values across a rho list on one fixed candidate set per
    family; used to check monotonicity along the decreasing-rho ladder."""
    _require_on_graph(problem, at)
    cands = gather_point_candidates(problem, at, schedule)
    out = {"nonlocal": [], "local": [], "f_nonlocal": [], "f_local": []}
    for rho in rhos:
        nl, _ = cands.nonlocal_value(q, rho)
        out["nonlocal"].append(nl)
        out["local"].append(cands.local_value(rho))
        out["f_nonlocal"].append(cands.f_nonlocal_value(q, rho))
        out["f_local"].append(cands.f_local_value(q, rho))
    return out
