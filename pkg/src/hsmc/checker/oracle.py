"""Deterministic realizations of the nondeterministic track oracle.

``config_graph_search``
    Breadth-first reachability over configurations ``(state, column)``.  The
    column after extending a track by one state is a function of the previous
    column and that state, so two prefixes reaching the same configuration
    have the same futures and one of them can be dropped.  The search ends
    when the configuration set is closed; no length cap is involved.

``bounded_dfs_search``
    Depth-first enumeration of tracks up to an explicit length cap, with the
    prefix table ``T[phi, i]`` filled row by row from the formula's
    subformulas exactly as in the textbook recurrences.  A pair
    ``(last state, last column)`` already expanded with at least as much
    remaining length is not expanded again.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .. import formula as F
from ..core import KripkeStructure
from ..errors import ConfigLimitExceeded, MissingTableEntry
from ..formula import Formula, Mod
from . import kernels
from .program import ColumnProgram


@dataclass
class SearchResult:
    found: bool
    witness: tuple[int, ...] | None
    configurations: int


def _csr(kripke: KripkeStructure):
    cached = kripke.__dict__.get("_csr")
    if cached is None:
        succ = kripke.successors
        ptr = np.zeros(len(succ) + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(s) for s in succ])
        idx = np.fromiter((u for s in succ for u in s), dtype=np.int32, count=int(ptr[-1]))
        cached = (ptr, idx)
        kripke.__dict__["_csr"] = cached
    return cached


def config_graph_search(
    program: ColumnProgram,
    sources: list[int],
    target: int | None = None,
    max_configs: int | None = None,
) -> SearchResult:
    """Find a track starting in ``sources`` (ending at ``target`` if given)
    whose last column has the root bit set."""
    k = program.kripke
    ptr, idx = _csr(k)
    root = program.root
    hard_cap = k.num_states * (1 << program.width)

    starts = np.asarray(sorted(set(sources)), dtype=np.int32)
    cols = kernels.start_batch(
        starts, program.ops, program.arg0, program.arg1,
        program.letters, program.a_vals, program.abar_vals,
    )
    node_state: list[int] = []
    node_parent: list[int] = []
    seen: set[bytes] = set()

    def admit(states, new_cols, parents):
        keys = np.concatenate(
            [states.astype("<i4").view(np.uint8).reshape(-1, 4), np.packbits(new_cols, axis=1)],
            axis=1,
        )
        keep = []
        for r in range(states.shape[0]):
            key = keys[r].tobytes()
            if key in seen:
                continue
            seen.add(key)
            keep.append(r)
            node_state.append(int(states[r]))
            node_parent.append(parents[r])
        if max_configs is not None and len(seen) > max_configs:
            raise ConfigLimitExceeded(max_configs)
        if len(seen) > hard_cap:
            raise RuntimeError("configuration count exceeded |W| * 2^rows")
        return keep

    first = len(node_state)
    keep = admit(starts, cols, [-1] * starts.shape[0])
    f_states, f_cols = starts[keep], cols[keep]
    f_ids = np.arange(first, first + len(keep))
    while f_states.shape[0]:
        hits = f_cols[:, root] == 1
        if target is not None:
            hits &= f_states == target
        if hits.any():
            node = int(f_ids[np.argmax(hits)])
            path = []
            while node != -1:
                path.append(node_state[node])
                node = node_parent[node]
            return SearchResult(True, tuple(reversed(path)), len(seen))
        parent, new_states, new_cols = kernels.step_batch(
            f_states, f_cols, ptr, idx, program.ops, program.arg0, program.arg1,
            program.letters, program.a_vals,
        )
        first = len(node_state)
        keep = admit(new_states, new_cols, [int(f_ids[p]) for p in parent])
        f_states, f_cols = new_states[keep], new_cols[keep]
        f_ids = np.arange(first, first + len(keep))
    return SearchResult(False, None, len(seen))


# literal prefix table --------------------------------------------------------


def table_order(psi: Formula) -> list[Formula]:
    """Rows of the prefix table: mods first, then the remaining subformulas
    not contained in a mods member, by increasing length."""
    top = F.mods(psi)
    inner: dict[Formula, None] = {}

    def visit(n):
        if n in inner or n in top:
            return
        for c in F.children(n):
            visit(c)
        inner[n] = None

    visit(psi)
    rest = sorted(inner, key=F.size)  # stable: children keep precedence on ties
    return list(top) + rest


def fill_position(order, T, i, state, first, kripke, tables) -> None:
    """Write ``T[phi, i]`` for every row, the ``i``-th state being ``state``."""
    for phi in order:
        if isinstance(phi, F.Diamond) and phi.mod is Mod.A:
            val = tables.lookup("forward", phi.arg, state)
        elif isinstance(phi, F.Diamond) and phi.mod is Mod.ABAR:
            val = tables.lookup("backward", phi.arg, first)
        elif isinstance(phi, F.Letter):
            here = phi.name in kripke.labels[state]
            val = here if i == 1 else (T[phi, i - 1] and here)
        elif isinstance(phi, F.Top):
            val = True
        elif isinstance(phi, F.Bottom):
            val = False
        elif isinstance(phi, F.Not):
            val = not T[phi.arg, i]
        elif isinstance(phi, F.Or):
            val = T[phi.left, i] or T[phi.right, i]
        elif isinstance(phi, F.Diamond) and phi.mod is Mod.B:
            val = False if i == 1 else (T[phi, i - 1] or T[phi.arg, i - 1])
        else:
            raise MissingTableEntry(f"no table recurrence for {F.to_text(phi)}")
        T[phi, i] = val


def prefix_table(kripke: KripkeStructure, psi: Formula, track, tables) -> dict:
    """The full table ``T`` for a given track (1-based positions)."""
    order = table_order(psi)
    states = tuple(track)
    T: dict = {}
    for i, s in enumerate(states, 1):
        fill_position(order, T, i, s, states[0], kripke, tables)
    return T


def _reverse_distances(kripke: KripkeStructure, v: int) -> dict[int, int]:
    """Edge distance from each state to ``v`` (BFS in the transposed graph)."""
    dist = {v: 0}
    queue = deque([v])
    while queue:
        w = queue.popleft()
        for u in kripke.predecessors[w]:
            if u not in dist:
                dist[u] = dist[w] + 1
                queue.append(u)
    return dist


def bounded_dfs_search(
    kripke: KripkeStructure,
    psi: Formula,
    v: int,
    direction: str,
    tables,
    cap: int,
) -> SearchResult:
    """Is there a track from (forward) / to (backward) ``v`` of length <= cap
    satisfying ``psi``?"""
    order = table_order(psi)
    root = psi
    if direction == "forward":
        starts, dist, target = [v], None, None
    else:
        dist = _reverse_distances(kripke, v)
        starts, target = sorted(dist), v
    best: dict[tuple, int] = {}
    visited = 0
    for u in starts:
        if dist is not None and dist[u] + 1 > cap:
            continue
        T: dict = {}
        fill_position(order, T, 1, u, u, kripke, tables)
        stack = [((u,), T)]
        while stack:
            track, T = stack.pop()
            i = len(track)
            last = track[-1]
            visited += 1
            if T[root, i] and (target is None or last == target):
                return SearchResult(True, track, visited)
            remaining = cap - i
            key = (last, tuple(T[phi, i] for phi in order))
            if best.get(key, -1) >= remaining:
                continue
            best[key] = remaining
            if remaining == 0:
                continue
            for w in reversed(kripke.successors[last]):
                if dist is not None and (w not in dist or i + 1 + dist[w] > cap):
                    continue
                T2 = {key2: val for key2, val in T.items() if key2[1] == i}
                fill_position(order, T2, i + 1, w, track[0], kripke, tables)
                stack.append((track + (w,), T2))
    return SearchResult(False, None, visited)
