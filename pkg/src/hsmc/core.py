"""Finite Kripke structures, tracks, and the homogeneous interval labeling.

States are interned to dense integers (their position in ``KripkeStructure.names``)
and label sets are stored as bit masks over ``KripkeStructure.ap``.  The public
track accessors use 1-based positions, so ``track.sub(i, j)`` is the subtrack
``v_i ... v_j``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import (
    IndexOutOfRange,
    InvalidTrack,
    KripkeSyntaxError,
    LabelOutsideAP,
    NotLeftTotal,
    UnknownState,
)

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class KripkeStructure:
    """A finite Kripke structure ``(AP, W, delta, mu, w0)``.

    ``edges`` holds pairs of interned state ids; ``labels[i]`` is the set of
    letters true at state ``i``.  Instances are immutable; use
    :meth:`from_names` to build one from state names.
    """

    ap: tuple[str, ...]
    names: tuple[str, ...]
    edges: frozenset[tuple[int, int]]
    labels: tuple[frozenset[str], ...]
    initial: int

    @classmethod
    def from_names(
        cls,
        states: Iterable[str],
        edges: Iterable[tuple[str, str]],
        labels: Mapping[str, Iterable[str]],
        initial: str,
        ap: Iterable[str] | None = None,
    ) -> "KripkeStructure":
        names = tuple(dict.fromkeys(states))
        index = {n: i for i, n in enumerate(names)}

        def lookup(name):
            try:
                return index[name]
            except KeyError:
                raise UnknownState(name) from None

        edge_ids = frozenset((lookup(a), lookup(b)) for a, b in edges)
        for name in labels:
            lookup(name)
        lab = tuple(frozenset(labels.get(n, ())) for n in names)
        if ap is None:
            ap_t = tuple(sorted(set().union(*lab))) if lab else ()
        else:
            ap_t = tuple(dict.fromkeys(ap))
            allowed = set(ap_t)
            for n, ls in zip(names, lab):
                for letter in sorted(ls):
                    if letter not in allowed:
                        raise LabelOutsideAP(n, letter)
        return cls(ap_t, names, edge_ids, lab, lookup(initial))

    # derived, cached views --------------------------------------------------

    @property
    def num_states(self) -> int:
        return len(self.names)

    @cached_property
    def index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.names]
        for a, b in self.edges:
            out[a].append(b)
        return tuple(tuple(sorted(s)) for s in out)

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.names]
        for a, b in self.edges:
            out[b].append(a)
        return tuple(tuple(sorted(s)) for s in out)

    @cached_property
    def letter_bit(self) -> dict[str, int]:
        return {p: 1 << i for i, p in enumerate(self.ap)}

    @cached_property
    def label_masks(self) -> tuple[int, ...]:
        bit = self.letter_bit
        return tuple(sum(bit[p] for p in ls if p in bit) for ls in self.labels)

    def state_id(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise UnknownState(name) from None

    def track(self, states: Iterable[str | int]) -> "Track":
        ids = tuple(s if isinstance(s, int) else self.state_id(s) for s in states)
        return Track(self, ids)

    def mask_to_letters(self, mask: int) -> frozenset[str]:
        return frozenset(p for p in self.ap if mask & self.letter_bit[p])


def validate(k: KripkeStructure) -> None:
    """Raise if ``k`` violates a structural invariant (left-totality included)."""
    n = k.num_states
    if not 0 <= k.initial < n:
        raise UnknownState(k.initial)
    for a, b in k.edges:
        for s in (a, b):
            if not 0 <= s < n:
                raise UnknownState(s)
    if len(k.labels) != n:
        raise UnknownState(f"labels given for {len(k.labels)} of {n} states")
    allowed = set(k.ap)
    for name, ls in zip(k.names, k.labels):
        for letter in sorted(ls):
            if letter not in allowed:
                raise LabelOutsideAP(name, letter)
    for i, succ in enumerate(k.successors):
        if not succ:
            raise NotLeftTotal(k.names[i])


def transpose(k: KripkeStructure) -> KripkeStructure:
    # The result may not be left-total; it only feeds track search.
    return KripkeStructure(
        k.ap, k.names, frozenset((b, a) for a, b in k.edges), k.labels, k.initial
    )


@dataclass(frozen=True)
class Track:
    """A nonempty finite path of a Kripke structure (1-based accessors)."""

    kripke: KripkeStructure = field(repr=False, compare=False)
    states: tuple[int, ...]

    def __post_init__(self):
        if not self.states:
            raise InvalidTrack("a track has at least one state")
        n = self.kripke.num_states
        for s in self.states:
            if not 0 <= s < n:
                raise UnknownState(s)
        edges = self.kripke.edges
        for a, b in zip(self.states, self.states[1:]):
            if (a, b) not in edges:
                raise InvalidTrack(
                    f"{self.kripke.names[a]}->{self.kripke.names[b]} is not an edge"
                )

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[int]:
        return iter(self.states)

    @property
    def fst(self) -> int:
        return self.states[0]

    @property
    def lst(self) -> int:
        return self.states[-1]

    def at(self, i: int) -> int:
        if not 1 <= i <= len(self.states):
            raise IndexOutOfRange(f"position {i} outside 1..{len(self.states)}")
        return self.states[i - 1]

    def sub(self, i: int, j: int) -> "Track":
        if not 1 <= i <= j <= len(self.states):
            raise IndexOutOfRange(f"subtrack ({i},{j}) outside 1..{len(self.states)}")
        return Track(self.kripke, self.states[i - 1 : j])

    def prefixes(self) -> list["Track"]:
        """Proper prefixes, shortest first."""
        return [Track(self.kripke, self.states[:i]) for i in range(1, len(self.states))]

    def suffixes(self) -> list["Track"]:
        """Proper suffixes, longest first."""
        return [Track(self.kripke, self.states[i:]) for i in range(1, len(self.states))]

    def reversed(self, kripke: KripkeStructure) -> "Track":
        return Track(kripke, self.states[::-1])

    def state_names(self) -> list[str]:
        return [self.kripke.names[s] for s in self.states]

    def __str__(self) -> str:
        return " ".join(self.state_names())


def induced_mask(k: KripkeStructure, states: Iterable[int]) -> int:
    masks = k.label_masks
    acc = (1 << len(k.ap)) - 1
    for s in states:
        acc &= masks[s]
    return acc


def induced_label(track: Track) -> frozenset[str]:
    """Letters holding on every state of the track."""
    k = track.kripke
    return k.mask_to_letters(induced_mask(k, track.states))


# text format -----------------------------------------------------------------


def parse_kripke(text: str) -> KripkeStructure:
    """Parse the line-oriented ``kripke`` text format."""
    lines = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((no, line))
    if not lines or lines[0][1] != "kripke":
        raise KripkeSyntaxError(lines[0][0] if lines else 1, "expected header 'kripke'")

    states: list[str] | None = None
    init = None
    labels: dict[str, list[str]] = {}
    edges: list[tuple[str, str]] = []

    def idents(no, items):
        for it in items:
            if not IDENT.match(it):
                raise KripkeSyntaxError(no, f"bad identifier {it!r}")
        return items

    for no, line in lines[1:]:
        head, sep, rest = line.partition(":")
        if not sep:
            raise KripkeSyntaxError(no, f"expected 'key: values', got {line!r}")
        head = head.strip()
        items = rest.split()
        if head == "states":
            if states is not None:
                raise KripkeSyntaxError(no, "duplicate 'states' line")
            states = idents(no, items)
        elif head == "init":
            if len(items) != 1 or init is not None:
                raise KripkeSyntaxError(no, "'init' takes exactly one state, once")
            init = idents(no, items)[0]
        elif head.startswith("label"):
            parts = head.split()
            if len(parts) != 2 or parts[0] != "label":
                raise KripkeSyntaxError(no, f"bad label line {line!r}")
            name = idents(no, parts[1:])[0]
            if name in labels:
                raise KripkeSyntaxError(no, f"duplicate label line for {name!r}")
            labels[name] = idents(no, items)
        elif head == "edges":
            for it in items:
                a, arrow, b = it.partition("->")
                if not arrow:
                    raise KripkeSyntaxError(no, f"bad edge {it!r}")
                edges.append(tuple(idents(no, [a, b])))
        else:
            raise KripkeSyntaxError(no, f"unknown key {head!r}")

    if states is None:
        raise KripkeSyntaxError(lines[-1][0], "missing 'states' line")
    if init is None:
        raise KripkeSyntaxError(lines[-1][0], "missing 'init' line")
    ap = sorted({p for ls in labels.values() for p in ls})
    k = KripkeStructure.from_names(states, edges, labels, init, ap=ap)
    validate(k)
    return k


def format_kripke(k: KripkeStructure) -> str:
    out = ["kripke", "states: " + " ".join(k.names), f"init: {k.names[k.initial]}"]
    for name, ls in zip(k.names, k.labels):
        out.append(f"label {name}: " + " ".join(p for p in k.ap if p in ls))
    pairs = sorted(k.edges)
    for i in range(0, len(pairs), 8):
        chunk = pairs[i : i + 8]
        out.append("edges: " + " ".join(f"{k.names[a]}->{k.names[b]}" for a, b in chunk))
    return "\n".join(line.rstrip() for line in out) + "\n"


def load_kripke(path) -> KripkeStructure:
    with open(path, encoding="utf-8") as fh:
        return parse_kripke(fh.read())
