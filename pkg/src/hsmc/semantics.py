"""Reference evaluator for HS formulas over tracks of a Kripke structure.

Truth on a concrete track follows the semantic clauses directly: letters by
label intersection, ``<B>``/``<E>`` by enumerating proper prefixes/suffixes.
The infinite quantification of ``<A>``/``<~A>`` is an enumeration of tracks,
shortest first, up to a length budget.  Enumeration is quotiented by the
truth vector of the body's local subformulas together with the track's
endpoints: two tracks that agree on these agree on every extension (appending
for B-style bodies, prepending for E-style ones), so dropping the longer one
loses no bounded witness.  Bodies mixing B and E are enumerated without the
quotient.

This module shares no code with :mod:`hsmc.checker`; the test-suite uses it as
the ground truth for the checker.
"""
from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

from . import formula as F
from .core import KripkeStructure, Track
from .errors import BudgetZero, UnsupportedFragment
from .formula import Formula, Mod


def track_bound(num_states: int, formula_size: int) -> int:
    """Small-model length bound ``|W| * (2|psi| + 1)**2``."""
    if num_states < 1 or formula_size < 1:
        raise ValueError("track_bound expects positive arguments")
    return num_states * (2 * formula_size + 1) ** 2


@dataclass(frozen=True)
class ExplorationBudget:
    max_track_length: int

    def __post_init__(self):
        if self.max_track_length < 1:
            raise BudgetZero(f"max_track_length must be >= 1, got {self.max_track_length}")


@dataclass(frozen=True)
class Evaluation:
    value: bool
    budget_limited: bool = False

    def __bool__(self) -> bool:
        return self.value


def _local_modalities(phi: Formula) -> set[Mod]:
    """Modalities occurring outside the scope of every A/Ā."""
    out = set()
    stack = [phi]
    while stack:
        n = stack.pop()
        if isinstance(n, (F.Diamond, F.Box)):
            if n.mod in (Mod.A, Mod.ABAR):
                continue
            out.add(n.mod)
        stack.extend(F.children(n))
    return out


def _local_closure(phi: Formula) -> list[Formula]:
    out: dict[Formula, None] = {}

    def visit(n):
        if n in out:
            return
        if isinstance(n, (F.Diamond, F.Box)) and n.mod in (Mod.A, Mod.ABAR):
            return
        for c in F.children(n):
            visit(c)
        out[n] = None

    visit(phi)
    return list(out)


class Evaluator:
    """Memoizing evaluator bound to one structure and one length budget.

    ``budget_limited`` becomes true once some ``<A>``/``<~A>`` search was cut
    off by the budget before its enumeration closed.
    """

    def __init__(self, kripke: KripkeStructure, max_track_length: int):
        ExplorationBudget(max_track_length)
        self.k = kripke
        self.budget = max_track_length
        self.budget_limited = False
        self._memo: dict[tuple[tuple[int, ...], Formula], bool] = {}
        self._search_memo: dict[tuple, tuple[int, ...] | None] = {}

    # truth on a concrete track ------------------------------------------------

    def holds(self, states: tuple[int, ...], phi: Formula) -> bool:
        key = (states, phi)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = self._eval(states, phi)
        return hit

    def _eval(self, states, phi) -> bool:
        k = self.k
        if isinstance(phi, F.Letter):
            return all(phi.name in k.labels[s] for s in states)
        if isinstance(phi, F.Top):
            return True
        if isinstance(phi, F.Bottom):
            return False
        if isinstance(phi, F.Not):
            return not self.holds(states, phi.arg)
        if isinstance(phi, F.Or):
            return self.holds(states, phi.left) or self.holds(states, phi.right)
        if isinstance(phi, F.And):
            return self.holds(states, phi.left) and self.holds(states, phi.right)
        if isinstance(phi, F.Implies):
            return not self.holds(states, phi.left) or self.holds(states, phi.right)
        if isinstance(phi, F.Iff):
            return self.holds(states, phi.left) == self.holds(states, phi.right)
        if isinstance(phi, (F.Diamond, F.Box)):
            want = isinstance(phi, F.Diamond)
            # [X]phi holds iff no related track makes phi false
            return self._related(states, phi.mod, phi.arg, want) == want
        raise TypeError(f"not a formula: {phi!r}")

    def _related(self, states, mod, arg, want) -> bool:
        """Is there a track related to ``states`` by ``mod`` where ``arg`` == want?"""
        n = len(states)
        if mod is Mod.B:
            return any(self.holds(states[:i], arg) == want for i in range(1, n))
        if mod is Mod.E:
            return any(self.holds(states[i:], arg) == want for i in range(1, n))
        if mod is Mod.A:
            return self.find("from", states[-1], arg, want) is not None
        if mod is Mod.ABAR:
            return self.find("to", states[0], arg, want) is not None
        raise UnsupportedFragment(f"modality <{mod.value}> is not evaluated")

    # bounded search for related tracks ----------------------------------------

    def find(self, anchor: str, v: int, phi: Formula, want: bool = True):
        """Shortest track starting ("from") or ending ("to") at ``v`` on which
        ``phi`` evaluates to ``want``, within the budget; ``None`` if none."""
        key = (anchor, v, phi, want)
        if key in self._search_memo:
            return self._search_memo[key]
        local = _local_modalities(phi)
        if Mod.BBAR in local or Mod.EBAR in local:
            raise UnsupportedFragment("<~B>/<~E> are not evaluated")
        if Mod.B in local and Mod.E in local:
            result = self._naive_search(anchor, v, phi, want)
        else:
            result = self._quotient_search(anchor, v, phi, want, prepend=Mod.E in local)
        self._search_memo[key] = result
        return result

    def _seeds_and_goal(self, anchor, v, prepend):
        all_states = range(self.k.num_states)
        # growing end is lst when appending, fst when prepending
        if anchor == "from":
            return ([v], None) if not prepend else (all_states, ("fst", v))
        return (all_states, ("lst", v)) if not prepend else ([v], None)

    def _grow(self, states, prepend):
        if prepend:
            for u in self.k.predecessors[states[0]]:
                yield (u,) + states
        else:
            for u in self.k.successors[states[-1]]:
                yield states + (u,)

    def _accepts(self, states, phi, want, goal):
        if goal is not None:
            end, v = goal
            if (states[0] if end == "fst" else states[-1]) != v:
                return False
        return self.holds(states, phi) == want

    def _quotient_search(self, anchor, v, phi, want, prepend):
        closure = _local_closure(phi)
        seeds, goal = self._seeds_and_goal(anchor, v, prepend)
        seen = set()
        level = []
        for s in seeds:
            t = (s,)
            sig = self._signature(t, closure)
            if sig not in seen:
                seen.add(sig)
                level.append(t)
        length = 1
        while level:
            for t in level:
                if self._accepts(t, phi, want, goal):
                    return t
            nxt = []
            for t in level:
                for ext in self._grow(t, prepend):
                    sig = self._signature(ext, closure)
                    if sig not in seen:
                        seen.add(sig)
                        nxt.append(ext)
            if nxt and length >= self.budget:
                self.budget_limited = True
                return None
            level = nxt
            length += 1
        return None

    def _signature(self, states, closure):
        return (states[0], states[-1]) + tuple(self.holds(states, c) for c in closure)

    def _naive_search(self, anchor, v, phi, want):
        seeds, goal = self._seeds_and_goal(anchor, v, prepend=False)
        level = [(s,) for s in seeds]
        length = 1
        while level:
            for t in level:
                if self._accepts(t, phi, want, goal):
                    return t
            if length >= self.budget:
                self.budget_limited = True
                return None
            level = [ext for t in level for ext in self._grow(t, False)]
            length += 1
        return None

    # convenience -------------------------------------------------------------

    def exists_from(self, v: int, phi: Formula) -> bool:
        return self.find("from", v, phi) is not None

    def exists_to(self, v: int, phi: Formula) -> bool:
        return self.find("to", v, phi) is not None


def default_budget(kripke: KripkeStructure, phi: Formula) -> int:
    return track_bound(kripke.num_states, F.size(F.normalize(phi)))


def holds(
    kripke: KripkeStructure,
    track: Track,
    phi: Formula,
    budget: ExplorationBudget | int | None = None,
) -> Evaluation:
    """Evaluate ``phi`` on ``track``; truthiness of the result is the answer."""
    if budget is None:
        budget = default_budget(kripke, phi)
    elif isinstance(budget, ExplorationBudget):
        budget = budget.max_track_length
    ev = Evaluator(kripke, budget)
    value = ev.holds(tuple(track.states), phi)
    return Evaluation(value, ev.budget_limited)


def exists_track(
    kripke: KripkeStructure,
    v: int,
    phi: Formula,
    direction: str = "forward",
    budget: int | None = None,
) -> Track | None:
    """A satisfying track starting (forward) or ending (backward) at ``v``."""
    if budget is None:
        budget = default_budget(kripke, phi)
    ev = Evaluator(kripke, budget)
    found = ev.find("from" if direction == "forward" else "to", v, phi)
    return None if found is None else Track(kripke, found)


@dataclass(frozen=True)
class BruteVerdict:
    answer: bool
    counterexample: Track | None
    bound: int
    budget_limited: bool


def brute_model_check(
    kripke: KripkeStructure, phi: Formula, max_len: int | None = None
) -> BruteVerdict:
    """Decide ``K |= phi`` by searching initial tracks that satisfy ``~phi``."""
    frag = F.fragment_of(phi)
    if not frag.supported:
        raise UnsupportedFragment(f"{F.to_text(phi)}: {frag.reason}")
    neg = F.Not(phi)
    bound = max_len if max_len is not None else default_budget(kripke, neg)
    ev = Evaluator(kripke, bound)
    found = ev.find("from", kripke.initial, neg)
    cex = None if found is None else Track(kripke, found)
    return BruteVerdict(found is None, cex, bound, ev.budget_limited)


def enumerate_tracks(
    kripke: KripkeStructure, max_len: int, start: int | None = None
) -> Iterator[Track]:
    """Every track of length <= max_len (from ``start`` if given), shortest first."""
    level = [(s,) for s in ([start] if start is not None else range(kripke.num_states))]
    length = 1
    while level and length <= max_len:
        for t in level:
            yield Track(kripke, t)
        level = [t + (u,) for t in level for u in kripke.successors[t[-1]]]
        length += 1
