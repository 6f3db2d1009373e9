"""Stage-1 merge scheduling: greedily pair root children by entropy drop.

The scheduler works on compact integer ids (graph vertices 0..n-1, merged
nodes n, n+1, ... in creation order) and returns the merge sequence plus the
cut size and exact entropy delta of every step. It runs either as a numba
kernel or as the pure-Python implementation below; both follow the same
lazy-invalidation pattern, so their outputs are identical.

Selection: numba when importable, unless the SETREE_NO_NUMBA environment
variable is set to a non-empty value other than "0".
"""

from __future__ import annotations

import heapq
import math
import os
from dataclasses import dataclass

import numpy as np

from .graph import Graph

ENV_FLAG = "SETREE_NO_NUMBA"

try:  # jit path is optional; anything that breaks its import only disables it
    from . import _kernels
except Exception:  # pragma: no cover - exercised only on broken numba installs
    _kernels = None

NUMBA_AVAILABLE = _kernels is not None


def _env_disabled() -> bool:
    return os.environ.get(ENV_FLAG, "") not in ("", "0")


def active_backend() -> str:
    """Backend merge_schedule() would use right now: "numba" or "python"."""
    if NUMBA_AVAILABLE and not _env_disabled():
        return "numba"
    return "python"


def warmup() -> None:
    """Force jit compilation so later calls (and timings) are steady-state."""
    if active_backend() == "numba":
        deg = np.array([2, 2, 2], dtype=np.int64)
        eu = np.array([0, 0, 1], dtype=np.int64)
        ev = np.array([1, 2, 2], dtype=np.int64)
        _kernels.merge_schedule_kernel(3, deg, eu, ev)


@dataclass(frozen=True)
class MergeSchedule:
    """Merge steps in execution order.

    left/right are scheduler ids (left has the smaller min-leaf); cut is the
    edge count between the two markers; delta the exact entropy change.
    """

    left: np.ndarray
    right: np.ndarray
    cut: np.ndarray
    delta: np.ndarray
    backend: str

    def __len__(self) -> int:
        return int(self.left.shape[0])


def merge_schedule(g: Graph, backend: str | None = None) -> MergeSchedule:
    """Greedy pairing schedule for ``g``; see module docstring for id scheme."""
    if g.n == 0:
        raise ValueError("cannot schedule merges on an empty graph")
    if backend is None:
        backend = active_backend()
    if backend not in ("numba", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not NUMBA_AVAILABLE:
        raise ValueError("numba backend requested but numba is not importable")
    eu, ev = g.edge_arrays()
    deg = g.degrees
    if backend == "numba":
        l, r, c, d = _kernels.merge_schedule_kernel(g.n, deg, eu, ev)
    else:
        l, r, c, d = _merge_schedule_py(g.n, deg, eu, ev)
    return MergeSchedule(left=l, right=r, cut=c, delta=d, backend=backend)


def _merge_schedule_py(n, deg, eu, ev):
    vol_g = float(deg.sum())
    cap = 2 * n if n > 0 else 2
    vol = [0] * cap
    ml = [0] * cap
    alive = bytearray(cap)
    for i in range(n):
        vol[i] = int(deg[i])
        ml[i] = i
        alive[i] = 1
    cuts = [dict() for _ in range(cap)]
    heap = []
    for u, v in zip(eu.tolist(), ev.tolist()):
        cuts[u][v] = 1
        cuts[v][u] = 1
    for u, v in zip(eu.tolist(), ev.tolist()):
        c = cuts[u][v]
        d = (2.0 * c / vol_g) * math.log2((vol[u] + vol[v]) / vol_g)
        heap.append((d, u, v, u, v))
    heapq.heapify(heap)

    out_l, out_r, out_c, out_d = [], [], [], []
    live = n
    nxt = n
    while live > 2:
        found = False
        a = b = -1
        dab = 0.0
        while heap:
            d, t1, t2, x, y = heapq.heappop(heap)
            if alive[x] and alive[y]:
                a, b, dab = x, y, d
                found = True
                break
        if not found:
            # No crossing edges remain among live nodes: fold the rest into a
            # left chain by ascending min-leaf, every step entropy-neutral.
            rem = sorted((i for i in range(nxt) if alive[i]), key=lambda i: ml[i])
            acc = rem[0]
            idx = 1
            while live > 2:
                z = rem[idx]
                idx += 1
                w = nxt
                nxt += 1
                vol[w] = vol[acc] + vol[z]
                ml[w] = min(ml[acc], ml[z])
                alive[acc] = 0
                alive[z] = 0
                alive[w] = 1
                live -= 1
                out_l.append(acc if ml[acc] <= ml[z] else z)
                out_r.append(z if ml[acc] <= ml[z] else acc)
                out_c.append(0)
                out_d.append(0.0)
                acc = w
            break

        cab = cuts[a][b]
        w = nxt
        nxt += 1
        vol[w] = vol[a] + vol[b]
        ml[w] = min(ml[a], ml[b])
        alive[a] = 0
        alive[b] = 0
        alive[w] = 1
        live -= 1
        dw = cuts[w]
        for z, c in cuts[a].items():
            if alive[z]:
                dw[z] = c
        for z, c in cuts[b].items():
            if alive[z]:
                dw[z] = dw.get(z, 0) + c
        for z, c in dw.items():
            cuts[z][w] = c
            dz = (2.0 * c / vol_g) * math.log2((vol[w] + vol[z]) / vol_g)
            if ml[w] < ml[z]:
                heapq.heappush(heap, (dz, ml[w], ml[z], w, z))
            else:
                heapq.heappush(heap, (dz, ml[z], ml[w], z, w))
        out_l.append(a if ml[a] <= ml[b] else b)
        out_r.append(b if ml[a] <= ml[b] else a)
        out_c.append(cab)
        out_d.append(dab)

    return (
        np.array(out_l, dtype=np.int64),
        np.array(out_r, dtype=np.int64),
        np.array(out_c, dtype=np.int64),
        np.array(out_d, dtype=np.float64),
    )
