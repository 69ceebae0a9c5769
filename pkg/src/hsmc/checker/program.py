"""Compilation of a normal AĀB formula into a column program.

A *column* holds one bit per table row (subformula) for a fixed prefix length
``i``.  Rows are ordered children-first.  A/Ā diamonds from ``mods(psi)`` are
leaves whose bits come from the valuation tables; everything nested under
them is handled by earlier ``mc`` levels and does not appear here.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import formula as F
from ..core import KripkeStructure
from ..errors import MissingTableEntry, UnsupportedFragment
from ..formula import Formula, Mod

OP_LETTER, OP_TRUE, OP_FALSE, OP_NOT, OP_OR, OP_B, OP_A, OP_ABAR = range(8)


@dataclass(frozen=True, eq=False)
class ColumnProgram:
    kripke: KripkeStructure
    psi: Formula
    rows: tuple[Formula, ...]
    ops: np.ndarray  # int8, one opcode per row
    arg0: np.ndarray  # int32: child row / letter column / table column
    arg1: np.ndarray  # int32: right child row for OP_OR
    letters: np.ndarray  # uint8 [state, letter]
    a_vals: np.ndarray  # uint8 [A-mod, state], from the forward table
    abar_vals: np.ndarray  # uint8 [Ā-mod, state], from the backward table
    root: int

    @property
    def width(self) -> int:
        return len(self.rows)

    def row(self, phi: Formula) -> int:
        return self.rows.index(phi)

    def start_column(self, v: int) -> np.ndarray:
        """T[., 1] for the point track at ``v`` (which is also fst)."""
        col = np.zeros(self.width, dtype=np.uint8)
        for i in range(self.width):
            op, a, b = self.ops[i], self.arg0[i], self.arg1[i]
            if op == OP_LETTER:
                col[i] = self.letters[v, a]
            elif op == OP_TRUE:
                col[i] = 1
            elif op == OP_NOT:
                col[i] = 1 - col[a]
            elif op == OP_OR:
                col[i] = col[a] | col[b]
            elif op == OP_A:
                col[i] = self.a_vals[a, v]
            elif op == OP_ABAR:
                col[i] = self.abar_vals[a, v]
            # OP_FALSE and OP_B stay 0
        return col

    def step(self, prev: np.ndarray, u: int) -> np.ndarray:
        """T[., i] from T[., i-1] when the track is extended by state ``u``."""
        col = np.zeros(self.width, dtype=np.uint8)
        for i in range(self.width):
            op, a, b = self.ops[i], self.arg0[i], self.arg1[i]
            if op == OP_LETTER:
                col[i] = prev[i] & self.letters[u, a]
            elif op == OP_TRUE:
                col[i] = 1
            elif op == OP_NOT:
                col[i] = 1 - col[a]
            elif op == OP_OR:
                col[i] = col[a] | col[b]
            elif op == OP_B:
                col[i] = prev[i] | prev[a]
            elif op == OP_A:
                col[i] = self.a_vals[a, u]
            elif op == OP_ABAR:
                col[i] = prev[i]
        return col


def eval_column_step(prev, new_state: int, first_state: int, program: ColumnProgram) -> np.ndarray:
    """Next column of the prefix table; ``prev=None`` yields the start column.

    Ā rows depend on ``first_state`` only, so they are fixed by the start
    column and copied forward afterwards.
    """
    if prev is None:
        if new_state != first_state:
            raise ValueError("the start column is taken at the first state")
        return program.start_column(new_state)
    return program.step(np.asarray(prev, dtype=np.uint8), new_state)


def table_rows(psi: Formula) -> list[Formula]:
    """Subformulas of ``psi`` not strictly inside a member of ``mods(psi)``."""
    rows: dict[Formula, None] = {}

    def visit(n):
        if n in rows:
            return
        if not (isinstance(n, F.Diamond) and n.mod in (Mod.A, Mod.ABAR)):
            for c in F.children(n):
                visit(c)
        rows[n] = None

    visit(psi)
    return list(rows)


def compile_program(kripke: KripkeStructure, psi: Formula, tables) -> ColumnProgram:
    """Build the column program of ``psi``, reading mods values from ``tables``."""
    rows = table_rows(psi)
    index = {phi: i for i, phi in enumerate(rows)}
    letter_names: list[str] = []
    a_bodies: list[Formula] = []
    abar_bodies: list[Formula] = []
    n = len(rows)
    ops = np.zeros(n, dtype=np.int8)
    arg0 = np.zeros(n, dtype=np.int32)
    arg1 = np.zeros(n, dtype=np.int32)
    for i, phi in enumerate(rows):
        if isinstance(phi, F.Letter):
            ops[i] = OP_LETTER
            if phi.name not in letter_names:
                letter_names.append(phi.name)
            arg0[i] = letter_names.index(phi.name)
        elif isinstance(phi, F.Top):
            ops[i] = OP_TRUE
        elif isinstance(phi, F.Bottom):
            ops[i] = OP_FALSE
        elif isinstance(phi, F.Not):
            ops[i], arg0[i] = OP_NOT, index[phi.arg]
        elif isinstance(phi, F.Or):
            ops[i], arg0[i], arg1[i] = OP_OR, index[phi.left], index[phi.right]
        elif isinstance(phi, F.Diamond) and phi.mod is Mod.B:
            ops[i], arg0[i] = OP_B, index[phi.arg]
        elif isinstance(phi, F.Diamond) and phi.mod is Mod.A:
            ops[i], arg0[i] = OP_A, len(a_bodies)
            a_bodies.append(phi.arg)
        elif isinstance(phi, F.Diamond) and phi.mod is Mod.ABAR:
            ops[i], arg0[i] = OP_ABAR, len(abar_bodies)
            abar_bodies.append(phi.arg)
        elif isinstance(phi, F.Diamond):
            raise UnsupportedFragment(f"<{phi.mod.value}> cannot be checked on the AĀB route")
        else:
            raise UnsupportedFragment(f"formula is not normalized: {type(phi).__name__} node")

    nw = kripke.num_states
    letters = np.zeros((nw, max(len(letter_names), 1)), dtype=np.uint8)
    for j, p in enumerate(letter_names):
        for s in range(nw):
            letters[s, j] = p in kripke.labels[s]
    a_vals = np.zeros((max(len(a_bodies), 1), nw), dtype=np.uint8)
    for j, body in enumerate(a_bodies):
        a_vals[j] = _table_column(tables, "forward", body, nw)
    abar_vals = np.zeros((max(len(abar_bodies), 1), nw), dtype=np.uint8)
    for j, body in enumerate(abar_bodies):
        abar_vals[j] = _table_column(tables, "backward", body, nw)
    return ColumnProgram(
        kripke, psi, tuple(rows), ops, arg0, arg1, letters, a_vals, abar_vals, index[psi]
    )


def _table_column(tables, direction, body, nw):
    vals = tables.column(direction, body)
    if vals is None:
        raise MissingTableEntry(f"no {direction} table entry for {F.to_text(body)}")
    if len(vals) != nw:
        raise MissingTableEntry(f"{direction} entry for {F.to_text(body)} has {len(vals)} states")
    return np.asarray(vals, dtype=np.uint8)
