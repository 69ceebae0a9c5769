"""Seeded random Kripke structures and formulas for differential testing."""
from __future__ import annotations

import random

from . import formula as F
from .core import KripkeStructure
from .formula import Formula, Mod

DEFAULT_LETTERS = ("p", "q")


def random_kripke(
    rng: random.Random,
    max_states: int = 3,
    max_edges: int = 6,
    letters=DEFAULT_LETTERS,
    min_states: int = 1,
) -> KripkeStructure:
    """A left-total structure: every state gets one successor, then extra
    edges are added up to a random total not above ``max_edges``."""
    n = rng.randint(min_states, max_states)
    if max_edges < n:
        raise ValueError("left-totality needs at least one edge per state")
    names = [f"v{i}" for i in range(n)]
    edges = {(s, rng.choice(names)) for s in names}
    others = [(a, b) for a in names for b in names if (a, b) not in edges]
    rng.shuffle(others)
    target = rng.randint(n, min(max_edges, n * n))
    edges.update(others[: target - len(edges)])
    labels = {s: {p for p in letters if rng.random() < 0.5} for s in names}
    return KripkeStructure.from_names(names, sorted(edges), labels, names[0], ap=letters)


_FRAGMENT_MODS = {
    "B": (Mod.A, Mod.ABAR, Mod.B),
    "E": (Mod.A, Mod.ABAR, Mod.E),
}


def random_formula(
    rng: random.Random,
    size: int,
    max_depth: int = 3,
    route: str = "B",
    letters=DEFAULT_LETTERS,
) -> Formula:
    """A formula with exactly ``size`` nodes and modal depth <= ``max_depth``,
    using A, Ā and B (``route="B"``) or A, Ā and E (``route="E"``)."""
    mods = _FRAGMENT_MODS[route]

    def build(k: int, depth: int) -> Formula:
        if k == 1:
            r = rng.random()
            if r < 0.8:
                return F.Letter(rng.choice(letters))
            return F.TRUE if r < 0.9 else F.FALSE
        choices = ["not"]
        if depth > 0:
            choices += ["dia", "dia", "box"]
        if k >= 3:
            choices += ["or", "and", "imp"]
        kind = rng.choice(choices)
        if kind == "not":
            return F.Not(build(k - 1, depth))
        if kind in ("dia", "box"):
            node = F.Diamond if kind == "dia" else F.Box
            return node(rng.choice(mods), build(k - 1, depth - 1))
        left = rng.randint(1, k - 2)
        op = {"or": F.Or, "and": F.And, "imp": F.Implies}[kind]
        return op(build(left, depth), build(k - 1 - left, depth))

    return build(size, max_depth)


def random_pair(rng: random.Random, max_size: int = 8, route: str = "B", **kw):
    k = random_kripke(rng, **kw)
    phi = random_formula(rng, rng.randint(1, max_size), route=route)
    return k, phi
