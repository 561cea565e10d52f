"""Seeded Monte Carlo simulation of random convex chains.

Points are uniform in the triangle T with corners (0,0), (1,0), (0,1); the
chain is the convex hull of the points together with (0,1) and (1,0).

Reproducibility: replicates are grouped into fixed-size chunks; chunk ``c``
for ``n`` points draws from a Philox counter-based generator whose counter
starts at ``(0, 0, n, c)`` and whose key is derived from the seed. Replicate
``r`` therefore always sees the same uniforms regardless of how chunks are
assigned to workers, and chunk statistics are merged in chunk order.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

__all__ = [
    "CHUNK_SIZE",
    "ChainSample",
    "Point2D",
    "SimSummary",
    "batch_chain_stats",
    "chi_square_test",
    "compare_to_exact",
    "convex_chain",
    "draw_chunk",
    "estimate",
    "orientation",
    "reflect_into_triangle",
    "sample_point",
]

CHUNK_SIZE = 1 << 16
Z_LIMIT = 4.0
CHI2_ALPHA = 1e-4

_EPS = np.finfo(float).eps / 2  # unit roundoff 2^-53
# Shewchuk's first-stage error bound for the 2x2 orientation determinant
_CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float


ANCHOR_TOP = Point2D(0.0, 1.0)
ANCHOR_RIGHT = Point2D(1.0, 0.0)


@dataclass(frozen=True)
class ChainSample:
    n: int
    hull_vertices: Tuple[Point2D, ...]
    vertex_count: int
    area: float

    @property
    def normalized_volume(self) -> float:
        return 2.0 * self.area


def reflect_into_triangle(u: float, v: float) -> Point2D:
    """Map (u, v) uniform on the unit square to a uniform point of T."""
    if u + v > 1.0:
        return Point2D(1.0 - u, 1.0 - v)
    return Point2D(u, v)


def sample_point(rng: np.random.Generator) -> Point2D:
    u, v = rng.random(2)
    return reflect_into_triangle(float(u), float(v))


def _orient_exact(ax, ay, bx, by, cx, cy) -> int:
    ax, ay, bx, by, cx, cy = map(Fraction, (ax, ay, bx, by, cx, cy))
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (det > 0) - (det < 0)


def orientation(a: Point2D, b: Point2D, c: Point2D) -> int:
    """Sign of the turn a -> b -> c: +1 counterclockwise, -1 clockwise, 0 collinear.

    Floating-point determinant with a forward error bound; inputs whose
    determinant falls inside the bound are re-evaluated exactly.
    """
    detleft = (a.x - c.x) * (b.y - c.y)
    detright = (a.y - c.y) * (b.x - c.x)
    det = detleft - detright
    if abs(det) > _CCW_ERRBOUND * (abs(detleft) + abs(detright)):
        return 1 if det > 0 else -1
    return _orient_exact(a.x, a.y, b.x, b.y, c.x, c.y)


def _shoelace(vertices: Sequence[Point2D], exact: bool) -> float:
    m = len(vertices)
    if m < 3:
        return 0.0
    if exact:
        acc = Fraction(0)
        for i in range(m):
            p, q = vertices[i], vertices[(i + 1) % m]
            acc += Fraction(p.x) * Fraction(q.y) - Fraction(q.x) * Fraction(p.y)
        return float(acc / 2)
    return 0.5 * math.fsum(
        vertices[i].x * vertices[(i + 1) % m].y - vertices[(i + 1) % m].x * vertices[i].y
        for i in range(m)
    )


def convex_chain(points: Sequence[Point2D], exact_area: bool = False) -> ChainSample:
    """Hull of ``points`` plus the anchors (0,1) and (1,0), by monotone chain.

    Vertices are listed counterclockwise starting at (1, 0); the vertex
    count excludes the two anchors. With no points the hull degenerates to
    the anchor segment (zero vertices, zero area).
    """
    pts = sorted(set((p.x, p.y) for p in points) | {(0.0, 1.0), (1.0, 0.0)})
    P = [Point2D(x, y) for x, y in pts]

    def half(seq: Sequence[Point2D]) -> List[Point2D]:
        out: List[Point2D] = []
        for p in seq:
            while len(out) >= 2 and orientation(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(P)
    upper = half(P[::-1])
    hull = lower[:-1] + upper[:-1]
    start = hull.index(ANCHOR_RIGHT)
    hull = hull[start:] + hull[:start]
    return ChainSample(
        n=len(points),
        hull_vertices=tuple(hull),
        vertex_count=len(hull) - 2,
        area=_shoelace(hull, exact_area),
    )


# -- batch path ---------------------------------------------------------------


def _chunk_generator(seed: int, n: int, chunk: int) -> np.random.Generator:
    key = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, n, chunk]))


def draw_chunk(seed: int, n: int, chunk: int, count: int) -> np.ndarray:
    """Points for replicates chunk*CHUNK_SIZE .. +count, shape (count, n, 2)."""
    if not 0 <= count <= CHUNK_SIZE:
        raise ValueError("count must lie in [0, CHUNK_SIZE]")
    raw = _chunk_generator(seed, n, chunk).random(count * n * 2).reshape(count, n, 2)
    u, v = raw[..., 0], raw[..., 1]
    flip = u + v > 1.0
    return np.stack([np.where(flip, 1.0 - u, u), np.where(flip, 1.0 - v, v)], axis=-1)


def _orient_batch(ax, ay, bx, by, cx, cy) -> np.ndarray:
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    sign = np.sign(det).astype(np.int8)
    unsure = np.abs(det) <= _CCW_ERRBOUND * (np.abs(detleft) + np.abs(detright))
    for i in np.flatnonzero(unsure):
        sign[i] = _orient_exact(ax[i], ay[i], bx[i], by[i], cx[i], cy[i])
    return sign


def batch_chain_stats(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vertex counts and areas for a (B, n, 2) array of replicates.

    Runs the lower monotone chain from (0,1) to (1,0) on all replicates at
    once. Replicates with a point on the line x = 0 (where (0,1) would not
    be the leftmost-lowest point) go through :func:`convex_chain` instead.
    """
    B, n = points.shape[0], points.shape[1]
    counts = np.zeros(B, dtype=np.int64)
    areas = np.zeros(B, dtype=float)
    if B == 0:
        return counts, areas
    if n == 0:
        return counts, areas
    order = np.lexsort((points[..., 1], points[..., 0]), axis=1)
    sx = np.take_along_axis(points[..., 0], order, axis=1)
    sy = np.take_along_axis(points[..., 1], order, axis=1)
    xs = np.concatenate([np.zeros((B, 1)), sx, np.ones((B, 1))], axis=1)
    ys = np.concatenate([np.ones((B, 1)), sy, np.zeros((B, 1))], axis=1)

    rows_all = np.arange(B)
    stack = np.zeros((B, n + 2), dtype=np.int64)
    h = np.zeros(B, dtype=np.int64)
    for i in range(n + 2):
        rows = rows_all[h >= 2]
        while rows.size:
            a = stack[rows, h[rows] - 2]
            b = stack[rows, h[rows] - 1]
            s = _orient_batch(
                xs[rows, a], ys[rows, a], xs[rows, b], ys[rows, b], xs[rows, i], ys[rows, i]
            )
            rows = rows[s <= 0]
            h[rows] -= 1
            rows = rows[h[rows] >= 2]
        stack[rows_all, h] = i
        h += 1

    hx = np.take_along_axis(xs, stack, axis=1)
    hy = np.take_along_axis(ys, stack, axis=1)
    valid = np.arange(n + 1)[None, :] < (h - 1)[:, None]
    cross = hx[:, :-1] * hy[:, 1:] - hx[:, 1:] * hy[:, :-1]
    # closing edge (1,0) -> (0,1) contributes 1
    areas = 0.5 * (np.where(valid, cross, 0.0).sum(axis=1) + 1.0)
    counts = h - 2

    for r in np.flatnonzero((points[..., 0] == 0.0).any(axis=1)):
        sample = convex_chain([Point2D(float(x), float(y)) for x, y in points[r]])
        counts[r] = sample.vertex_count
        areas[r] = sample.area
    return counts, areas


@dataclass
class _ChunkStats:
    counts: List[int]
    power_sums: List[float]


def _chunk_task(args: Tuple[int, int, int, int, int, bool]) -> _ChunkStats:
    seed, n, chunk, count, max_power, exact_area = args
    pts = draw_chunk(seed, n, chunk, count)
    if exact_area:
        samples = [
            convex_chain([Point2D(float(x), float(y)) for x, y in rep], exact_area=True)
            for rep in pts
        ]
        N = np.array([s.vertex_count for s in samples], dtype=np.int64)
        V = np.array([s.normalized_volume for s in samples], dtype=float)
    else:
        N, A = batch_chain_stats(pts)
        V = 2.0 * A
    counts = np.bincount(N, minlength=n + 1).tolist()
    sums = []
    Vp = np.ones_like(V)
    for _ in range(max_power):
        Vp = Vp * V
        sums.append(float(np.sum(Vp)))
    return _ChunkStats(counts, sums)


@dataclass
class SimSummary:
    n: int
    samples: int
    seed: int
    max_k: int
    mean_N: float
    var_N: Optional[float]
    se_N: Optional[float]
    mean_N2: float
    se_N2: Optional[float]
    mean_V: List[float]  # entry k-1 is the empirical E V^k
    se_V: List[Optional[float]]
    counts: Dict[int, int]
    empirical_pk: Dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["counts"] = {str(k): v for k, v in sorted(self.counts.items())}
        d["empirical_pk"] = {str(k): v for k, v in sorted(self.empirical_pk.items())}
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "SimSummary":
        d = dict(d)
        d["counts"] = {int(k): int(v) for k, v in d["counts"].items()}
        d["empirical_pk"] = {int(k): float(v) for k, v in d.get("empirical_pk", {}).items()}
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _mean_se(s1: float, s2: float, m: int) -> Tuple[float, Optional[float], Optional[float]]:
    mean = s1 / m
    if m < 2:
        return mean, None, None
    var = max((s2 - m * mean * mean) / (m - 1), 0.0)
    return mean, var, math.sqrt(var / m)


def default_jobs() -> int:
    return max(1, int(os.environ.get("RANDCHAIN_JOBS", "1")))


def estimate(
    n: int,
    samples: int,
    seed: int,
    max_k: int = 2,
    jobs: Optional[int] = None,
    exact_area: bool = False,
) -> SimSummary:
    """Simulate ``samples`` chains of ``n`` points and summarise N_n and V_n^k."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if max_k < 1:
        raise ValueError("max_k must be >= 1")
    jobs = default_jobs() if jobs is None else jobs
    tasks = []
    for chunk, start in enumerate(range(0, samples, CHUNK_SIZE)):
        count = min(CHUNK_SIZE, samples - start)
        tasks.append((seed, n, chunk, count, 2 * max_k, exact_area))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_chunk_task, tasks))
    else:
        parts = [_chunk_task(t) for t in tasks]

    counts = [0] * (n + 1)
    for p in parts:
        for k, c in enumerate(p.counts):
            counts[k] += c
    power_sums = [math.fsum(p.power_sums[j] for p in parts) for j in range(2 * max_k)]

    m = samples
    sn = [sum(k**j * c for k, c in enumerate(counts)) for j in range(5)]
    mean_N, var_N, se_N = _mean_se(sn[1], sn[2], m)
    mean_N2, _, se_N2 = _mean_se(sn[2], sn[4], m)
    mean_V, se_V = [], []
    for k in range(1, max_k + 1):
        mu, _, se = _mean_se(power_sums[k - 1], power_sums[2 * k - 1], m)
        mean_V.append(mu)
        se_V.append(se)
    nonzero = {k: c for k, c in enumerate(counts) if c}
    return SimSummary(
        n=n,
        samples=m,
        seed=seed,
        max_k=max_k,
        mean_N=mean_N,
        var_N=var_N,
        se_N=se_N,
        mean_N2=mean_N2,
        se_N2=se_N2,
        mean_V=mean_V,
        se_V=se_V,
        counts=nonzero,
        empirical_pk={k: c / m for k, c in nonzero.items()},
    )


# -- comparison against exact values ------------------------------------------


def chi_square_test(
    counts: Mapping[int, int], probs: Sequence[Fraction], min_expected: float = 5.0
) -> dict:
    """Pearson chi-square of observed counts against exact probabilities.

    Adjacent categories are pooled left to right until each pooled bin
    expects at least ``min_expected`` observations.
    """
    total = sum(counts.values())
    if total == 0:
        raise ValueError("no observations")
    groups: List[Tuple[float, int]] = []
    exp_acc, obs_acc = 0.0, 0
    for k, p in enumerate(probs):
        exp_acc += total * float(p)
        obs_acc += counts.get(k, 0)
        if exp_acc >= min_expected:
            groups.append((exp_acc, obs_acc))
            exp_acc, obs_acc = 0.0, 0
    stray = obs_acc + sum(c for k, c in counts.items() if k >= len(probs))
    if groups:
        e, o = groups[-1]
        groups[-1] = (e + exp_acc, o + stray)
    else:
        groups.append((exp_acc, stray))
    statistic = math.fsum((o - e) ** 2 / e for e, o in groups if e > 0)
    dof = len(groups) - 1
    p_value = float(stats.chi2.sf(statistic, dof)) if dof > 0 else 1.0
    return {"statistic": statistic, "dof": dof, "p_value": p_value, "pass": p_value >= CHI2_ALPHA}


def _z_check(name: str, empirical: float, exact: Fraction, se: Optional[float]) -> dict:
    diff = abs(empirical - float(exact))
    if se is None or se == 0.0:
        z = 0.0 if diff <= 1e-12 * max(1.0, abs(float(exact))) else math.inf
    else:
        z = diff / se
    return {
        "statistic": name,
        "empirical": empirical,
        "exact": exact,
        "se": se,
        "z": z,
        "pass": z <= Z_LIMIT,
    }


def exact_targets(n: int, max_k: int) -> dict:
    """Exact E N, E N^2, E V^k (k <= max_k) and p_k for the comparison."""
    from .distribution import nn_moment, pk_row
    from .moments import moment_closed

    ev = {k: (moment_closed(n, k) if n >= 1 else Fraction(int(k == 0))) for k in range(1, max_k + 1)}
    return {
        "EN": nn_moment(n, 1),
        "EN2": nn_moment(n, 2),
        "EV": ev,
        "pk": pk_row(n),
    }


def compare_to_exact(summary: SimSummary, exact: Optional[Mapping] = None) -> dict:
    """z-scores of each empirical mean against its exact value, plus a
    chi-square test of the vertex-count frequencies."""
    if summary.samples < 1 or not summary.counts:
        return {"n": summary.n, "samples": summary.samples, "error": "summary has no samples", "pass": False}
    exact = exact or exact_targets(summary.n, summary.max_k)
    checks = [
        _z_check("E[N]", summary.mean_N, exact["EN"], summary.se_N),
        _z_check("E[N^2]", summary.mean_N2, exact["EN2"], summary.se_N2),
    ]
    for k in range(1, summary.max_k + 1):
        if k in exact["EV"]:
            checks.append(
                _z_check(f"E[V^{k}]", summary.mean_V[k - 1], exact["EV"][k], summary.se_V[k - 1])
            )
    chi = chi_square_test(summary.counts, exact["pk"])
    return {
        "n": summary.n,
        "samples": summary.samples,
        "seed": summary.seed,
        "checks": checks,
        "chi_square": chi,
        "pass": all(c["pass"] for c in checks) and chi["pass"],
    }
