"""Recursive model checking driver over the valuation tables.

``mc`` fills the forward table (track *from* a state satisfies the formula) or
the backward table (track *to* a state) for one formula, after recursively
filling the entries its top-level A/Ā diamonds read.  ``model_check`` answers
``K |= phi`` by checking that no initial track satisfies ``~phi``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .. import formula as F
from ..core import KripkeStructure, Track, transpose
from ..errors import MissingTableEntry, UnsupportedFragment
from ..formula import Formula, Mod
from ..semantics import track_bound
from .oracle import SearchResult, bounded_dfs_search, config_graph_search
from .program import compile_program

FORWARD = "forward"
BACKWARD = "backward"
REALIZATIONS = ("configgraph", "dfs")


def _env_max_configs() -> int | None:
    raw = os.environ.get("HSMC_MAX_CONFIGS")
    return int(raw) if raw else None


@dataclass(frozen=True)
class OracleConfig:
    realization: str = "configgraph"
    cap: int | None = None  # BoundedDFS length cap; None means track_bound
    max_configs: int | None = field(default_factory=_env_max_configs)
    threads: int = 1

    def __post_init__(self):
        if self.realization not in REALIZATIONS:
            raise ValueError(f"unknown oracle realization {self.realization!r}")
        if self.cap is not None and self.cap < 1:
            raise ValueError("cap must be >= 1")


@dataclass
class Stats:
    oracle_calls: int = 0
    configurations: int = 0
    mc_calls: int = 0

    def to_dict(self) -> dict:
        return {"oracle_calls": self.oracle_calls, "configurations": self.configurations}


class ValuationTables:
    """Per-formula Boolean vectors indexed by state, one map per direction.

    Each ``(direction, formula)`` entry is written once; witnesses found for
    positive entries are kept alongside.
    """

    def __init__(self, num_states: int):
        self.num_states = num_states
        self.fwd: dict[Formula, tuple[bool, ...]] = {}
        self.bwd: dict[Formula, tuple[bool, ...]] = {}
        self.witnesses: dict[tuple[str, Formula, int], tuple[int, ...]] = {}

    def _map(self, direction):
        return self.fwd if direction == FORWARD else self.bwd

    def has(self, direction: str, phi: Formula) -> bool:
        return phi in self._map(direction)

    def column(self, direction: str, phi: Formula):
        return self._map(direction).get(phi)

    def lookup(self, direction: str, phi: Formula, v: int) -> bool:
        try:
            return self._map(direction)[phi][v]
        except KeyError:
            raise MissingTableEntry(f"no {direction} entry for {F.to_text(phi)}") from None

    def store(self, direction: str, phi: Formula, values) -> None:
        table = self._map(direction)
        if phi in table:
            raise RuntimeError(f"{direction} entry for {F.to_text(phi)} written twice")
        values = tuple(bool(x) for x in values)
        if len(values) != self.num_states:
            raise ValueError("one value per state expected")
        table[phi] = values


@dataclass(frozen=True)
class OracleAnswer:
    found: bool
    witness: Track | None
    configurations: int


def _check_normal_aab(psi: Formula) -> None:
    if not F.is_normal(psi):
        raise UnsupportedFragment("mc expects a normalized formula")
    frag = F.fragment_of(psi)
    if frag.kind not in (F.AAB.kind, F.AA.kind):
        raise UnsupportedFragment(f"mc handles AĀB formulas only, got {frag}")


def oracle_exists(
    kripke: KripkeStructure,
    psi: Formula,
    v: int,
    direction: str,
    tables: ValuationTables,
    cfg: OracleConfig | None = None,
    program=None,
) -> OracleAnswer:
    """Does a track from (forward) or to (backward) ``v`` satisfy ``psi``?

    ``tables`` must already hold the entries for every member of ``mods(psi)``.
    """
    cfg = cfg or OracleConfig()
    if cfg.realization == "configgraph":
        if program is None:
            program = compile_program(kripke, psi, tables)
        if direction == FORWARD:
            res = config_graph_search(program, [v], None, cfg.max_configs)
        else:
            res = config_graph_search(program, range(kripke.num_states), v, cfg.max_configs)
    else:
        # a missing entry must fail even when the search never reads it
        for m in F.mods(psi):
            tables.lookup(FORWARD if m.mod is Mod.A else BACKWARD, m.arg, v)
        cap = cfg.cap if cfg.cap is not None else track_bound(kripke.num_states, F.size(psi))
        res: SearchResult = bounded_dfs_search(kripke, psi, v, direction, tables, cap)
    witness = Track(kripke, res.witness) if res.witness is not None else None
    return OracleAnswer(res.found, witness, res.configurations)


def mc(
    kripke: KripkeStructure,
    psi: Formula,
    direction: str,
    tables: ValuationTables,
    cfg: OracleConfig | None = None,
    stats: Stats | None = None,
) -> None:
    """Fill ``tables`` for ``psi`` in ``direction`` (and, first, for the bodies
    of its top-level A/Ā diamonds)."""
    cfg = cfg or OracleConfig()
    stats = stats if stats is not None else Stats()
    _check_normal_aab(psi)
    if tables.has(direction, psi):
        return
    stats.mc_calls += 1
    for m in F.mods(psi):
        sub_dir = FORWARD if m.mod is Mod.A else BACKWARD
        if not tables.has(sub_dir, m.arg):
            mc(kripke, m.arg, sub_dir, tables, cfg, stats)

    program = compile_program(kripke, psi, tables) if cfg.realization == "configgraph" else None

    def ask(v):
        return oracle_exists(kripke, psi, v, direction, tables, cfg, program)

    states = range(kripke.num_states)
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            answers = list(pool.map(ask, states))
    else:
        answers = [ask(v) for v in states]
    stats.oracle_calls += len(answers)
    stats.configurations += sum(a.configurations for a in answers)
    for v, a in zip(states, answers):
        if a.found:
            tables.witnesses[direction, psi, v] = a.witness.states
    tables.store(direction, psi, [a.found for a in answers])


@dataclass(frozen=True)
class Verdict:
    answer: bool
    counterexample: Track | None
    stats: Stats
    route: str

    def to_dict(self) -> dict:
        cex = list(self.counterexample.states) if self.counterexample is not None else None
        return {"answer": self.answer, "counterexample": cex, "stats": self.stats.to_dict()}


def model_check(
    kripke: KripkeStructure,
    phi: Formula,
    cfg: OracleConfig | None = None,
    route: str | None = None,
) -> Verdict:
    """Decide ``kripke |= phi`` for AĀB, AĀE and AĀ formulas.

    ``route`` forces the ``"B"`` or ``"E"`` procedure for AĀ formulas.
    """
    cfg = cfg or OracleConfig()
    frag = F.fragment_of(phi)
    if not frag.supported:
        raise UnsupportedFragment(f"{F.to_text(phi)}: {frag.reason}")
    if route is None:
        route = "E" if frag == F.AAE else "B"
    elif route == "B" and frag == F.AAE or route == "E" and frag == F.AAB:
        raise UnsupportedFragment(f"route {route} cannot check a {frag} formula")
    stats = Stats()
    w0 = kripke.initial
    if route == "B":
        target = F.normalize(F.Not(phi))
        tables = ValuationTables(kripke.num_states)
        mc(kripke, target, FORWARD, tables, cfg, stats)
        bad = tables.lookup(FORWARD, target, w0)
        cex = None
        if bad:
            cex = Track(kripke, tables.witnesses[FORWARD, target, w0])
    else:
        # initial tracks of K are the reversals of tracks of K^T ending at w0
        kt = transpose(kripke)
        target = F.normalize(F.mirror(F.Not(phi)))
        tables = ValuationTables(kt.num_states)
        mc(kt, target, BACKWARD, tables, cfg, stats)
        bad = tables.lookup(BACKWARD, target, w0)
        cex = None
        if bad:
            cex = Track(kripke, tables.witnesses[BACKWARD, target, w0][::-1])
    return Verdict(not bad, cex, stats, route)
