"""Dynamic-programming baseline for elastic alignment.

Minimizes the discretized energy ||q1 - (q2 o w) sqrt(w')||^2 over PL
warps whose knots sit on grid nodes and whose segment slopes come from a
fixed neighborhood of integer steps.  Closed curves add an exhaustive
search over seed shifts.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .srvf import Srvf, _check_same_grid, _interp_columns, _require_uniform
from .shapeops import apply_seed
from .warpmap import PLWarp, uniform_grid

__all__ = ["DpConfig", "dp_align", "dp_align_closed", "dp_warp_energy"]

_DEFAULT_STEPS = ((1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2))


@dataclass(frozen=True)
class DpConfig:
    """Lattice size, slope-step neighborhood and closed-curve seed stride."""

    grid_size: int = 100
    neighborhood: tuple[tuple[int, int], ...] = _DEFAULT_STEPS
    seed_stride: int = 1

    def __post_init__(self):
        if self.grid_size < 3:
            raise ValueError("grid_size must be at least 3")
        steps = tuple((int(a), int(b)) for a, b in self.neighborhood)
        if not steps:
            raise ValueError("neighborhood must be nonempty")
        if any(a < 1 or b < 1 for a, b in steps):
            raise ValueError("neighborhood steps must be positive")
        if self.seed_stride < 1:
            raise ValueError("seed_stride must be at least 1")
        # diagonal step first so that ties break toward identity-like warps
        if (1, 1) in steps:
            steps = ((1, 1),) + tuple(s for s in steps if s != (1, 1))
        object.__setattr__(self, "neighborhood", steps)


def _refinement(steps) -> int:
    r = 1
    for a, _ in steps:
        r = math.lcm(r, a)
    return r


def _regrid(q: Srvf, m: int) -> Srvf:
    grid = uniform_grid(m)
    return Srvf(grid, _interp_columns(q.grid, q.values, grid), q.topology, False)


def _fine_values(q: Srvf, refine: int) -> np.ndarray:
    m = q.grid.size
    fine = np.linspace(0.0, 1.0, refine * (m - 1) + 1)
    return _interp_columns(q.grid, q.values, fine)


def _segment_costs(q1v: np.ndarray, q2f: np.ndarray, m: int, refine: int,
                   step: tuple[int, int], dt: float) -> np.ndarray:
    """Cost of one (a,b) move from every start node (i,j).

    The segment integrand |q1(t) - q2(j + (b/a)(t - i)) sqrt(b/a)|^2 is
    integrated by the trapezoid rule on the a+1 grid nodes the move
    spans, with q2 read off a refine-times finer precomputed grid.
    """
    a, b = step
    sq = math.sqrt(b / a)
    weights = np.full(a + 1, dt)
    weights[0] = weights[-1] = dt / 2.0
    stride = refine * b // a
    imax, jmax = m - a, m - b
    cost = np.full((m, m), np.inf)
    acc = np.zeros((imax, jmax))
    j_fine = np.arange(jmax) * refine
    for k in range(a + 1):
        lhs = q1v[k:k + imax]
        rhs = sq * q2f[j_fine + k * stride]
        sq_l = np.sum(lhs ** 2, axis=1)
        sq_r = np.sum(rhs ** 2, axis=1)
        cross = lhs @ rhs.T
        acc += weights[k] * (sq_l[:, None] + sq_r[None, :] - 2.0 * cross)
    cost[:imax, :jmax] = acc
    return cost


def dp_align(q1: Srvf, q2: Srvf, cfg: DpConfig = DpConfig()) -> tuple[PLWarp, float]:
    """Optimal lattice warp and its energy.

    SRVFs are interpolated onto a uniform lattice of ``cfg.grid_size``
    nodes if needed; the DP then finds the cheapest monotone path from
    (0,0) to the far corner using the configured steps.
    """
    _check_same_grid(q1, q2)
    _require_uniform(q1.grid)
    if q1.grid.size != cfg.grid_size:
        q1 = _regrid(q1, cfg.grid_size)
        q2 = _regrid(q2, cfg.grid_size)
    m = cfg.grid_size
    steps = cfg.neighborhood
    refine = _refinement(steps)
    dt = 1.0 / (m - 1)
    q2f = _fine_values(q2, refine)
    costs = [_segment_costs(q1.values, q2f, m, refine, s, dt) for s in steps]

    dist = np.full((m, m), np.inf)
    dist[0, 0] = 0.0
    choice = np.full((m, m), -1, dtype=np.int16)
    for i in range(1, m):
        best = np.full(m, np.inf)
        arg = np.full(m, -1, dtype=np.int16)
        for si, (a, b) in enumerate(steps):
            if i - a < 0:
                continue
            cand = np.full(m, np.inf)
            src = dist[i - a, :m - b] + costs[si][i - a, :m - b]
            cand[b:] = src[:m - b]
            better = cand < best
            best[better] = cand[better]
            arg[better] = si
        dist[i] = best
        choice[i] = arg

    energy = dist[m - 1, m - 1]
    if not np.isfinite(energy):
        raise ValueError("end node unreachable with the configured neighborhood")
    # backtrack the visited lattice nodes
    nodes = [(m - 1, m - 1)]
    i, j = m - 1, m - 1
    while (i, j) != (0, 0):
        a, b = steps[choice[i, j]]
        i, j = i - a, j - b
        nodes.append((i, j))
    nodes.reverse()
    grid = q1.grid
    xs = np.array([grid[i] for i, _ in nodes])
    ys = np.array([grid[j] for _, j in nodes])
    return PLWarp(xs, ys), float(energy)


def dp_warp_energy(q1: Srvf, q2: Srvf, warp: PLWarp, cfg: DpConfig = DpConfig()) -> float:
    """Recompute the DP energy of a lattice warp from its segment costs."""
    _check_same_grid(q1, q2)
    if q1.grid.size != cfg.grid_size:
        q1 = _regrid(q1, cfg.grid_size)
        q2 = _regrid(q2, cfg.grid_size)
    m = cfg.grid_size
    refine = _refinement(cfg.neighborhood)
    dt = 1.0 / (m - 1)
    q2f = _fine_values(q2, refine)
    idx_x = np.rint(warp.x * (m - 1)).astype(int)
    idx_y = np.rint(warp.y * (m - 1)).astype(int)
    if not (np.allclose(warp.x, idx_x * dt, atol=1e-9)
            and np.allclose(warp.y, idx_y * dt, atol=1e-9)):
        raise ValueError("warp knots do not sit on the DP lattice")
    total = 0.0
    cache: dict[tuple[int, int], np.ndarray] = {}
    for k in range(idx_x.size - 1):
        a = idx_x[k + 1] - idx_x[k]
        b = idx_y[k + 1] - idx_y[k]
        if (a, b) not in cache:
            cache[(a, b)] = _segment_costs(q1.values, q2f, m, refine, (a, b), dt)
        total = total + cache[(a, b)][idx_x[k], idx_y[k]]
    return float(total)


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("WARPALIGN_THREADS", "1")))
    except ValueError:
        return 1


def dp_align_closed(q1: Srvf, q2: Srvf,
                    cfg: DpConfig = DpConfig()) -> tuple[float, PLWarp, float]:
    """Best (seed, warp, energy) over cyclic seed shifts of q2.

    Seeds run over every ``seed_stride``-th grid point; the reported seed
    is the shift applied to q2 before the interval alignment.
    """
    if q1.topology != "closed" or q2.topology != "closed":
        raise ValueError("closed-curve alignment needs closed SRVFs")
    _check_same_grid(q1, q2)
    n_distinct = q1.grid.size - 1
    seeds = [k / n_distinct for k in range(0, n_distinct, cfg.seed_stride)]

    def solve(s: float) -> tuple[PLWarp, float]:
        return dp_align(q1, apply_seed(q2, s), cfg)

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve, seeds))
    else:
        results = [solve(s) for s in seeds]
    best = int(np.argmin([e for _, e in results]))
    warp, energy = results[best]
    return seeds[best], warp, energy
