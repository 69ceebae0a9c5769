"""SNSAT instances and their reduction to AB model checking.

An instance has variables ``x1..xn``; the formula ``F_i`` may mention
``x1..x(i-1)`` and its own block of local variables ``Z_i``.  The valuation
``v(x_i)`` is true iff ``F_i`` is satisfiable once ``x1..x(i-1)`` are fixed to
their earlier values.

``build_kripke`` and ``build_psi`` produce the structure ``K_I`` and the
formulas ``psi_0..psi_(n+1)``; ``v(x_n)`` holds iff ``K_I |= [B]false -> psi_n``.
"""
from __future__ import annotations

import itertools
import random
import warnings
from dataclasses import dataclass, field

from . import formula as F
from .core import IDENT, KripkeStructure
from .errors import SnsatError
from .formula import Formula, Mod


@dataclass(frozen=True)
class SnsatInstance:
    n: int
    local_vars: tuple[tuple[str, ...], ...]  # Z_1 .. Z_n
    formulas: tuple[Formula, ...]  # F_1 .. F_n

    def __post_init__(self):
        validate_instance(self)

    def x(self, i: int) -> str:
        return f"x{i}"

    @property
    def x_names(self) -> list[str]:
        return [self.x(i) for i in range(1, self.n + 1)]

    @property
    def all_locals(self) -> list[str]:
        return [z for block in self.local_vars for z in block]


def reserved_letters(n: int) -> set[str]:
    return (
        {f"x{i}" for i in range(1, n + 1)}
        | {f"r{i}" for i in range(1, n + 1)}
        | {f"pbar_x{i}" for i in range(1, n + 1)}
        | {"s", "t", "true", "false"}
    )


def validate_instance(inst: SnsatInstance) -> None:
    n = inst.n
    if n < 1:
        raise SnsatError("an instance needs at least one x-variable")
    if len(inst.local_vars) != n or len(inst.formulas) != n:
        raise SnsatError(f"expected {n} local blocks and {n} formulas")
    reserved = reserved_letters(n)
    owner: dict[str, int] = {}
    for i, block in enumerate(inst.local_vars, 1):
        for z in block:
            if not IDENT.match(z):
                raise SnsatError(f"bad local variable name {z!r}")
            if z in reserved or (z.startswith("x") and z[1:].isdigit()):
                raise SnsatError(f"local variable {z!r} of F{i} clashes with a reserved name")
            if z in owner:
                raise SnsatError(f"local variable {z!r} shared by F{owner[z]} and F{i}")
            owner[z] = i
    for i, phi in enumerate(inst.formulas, 1):
        if any(isinstance(nd, (F.Diamond, F.Box)) for nd in F.walk(phi)):
            raise SnsatError(f"F{i} must be propositional")
        allowed = {f"x{j}" for j in range(1, i)} | set(inst.local_vars[i - 1])
        stray = sorted(F.letters(phi) - allowed)
        if stray:
            raise SnsatError(f"F{i} mentions variables outside x1..x{i - 1} and Z{i}: {stray}")


def eval_prop(phi: Formula, assignment: dict[str, bool]) -> bool:
    """Truth value of a propositional formula; unassigned letters are false."""
    if isinstance(phi, F.Letter):
        return assignment.get(phi.name, False)
    if isinstance(phi, F.Top):
        return True
    if isinstance(phi, F.Bottom):
        return False
    if isinstance(phi, F.Not):
        return not eval_prop(phi.arg, assignment)
    if isinstance(phi, F.Or):
        return eval_prop(phi.left, assignment) or eval_prop(phi.right, assignment)
    if isinstance(phi, F.And):
        return eval_prop(phi.left, assignment) and eval_prop(phi.right, assignment)
    if isinstance(phi, F.Implies):
        return not eval_prop(phi.left, assignment) or eval_prop(phi.right, assignment)
    if isinstance(phi, F.Iff):
        return eval_prop(phi.left, assignment) == eval_prop(phi.right, assignment)
    raise SnsatError(f"not propositional: {F.to_text(phi)}")


def eval_v(inst: SnsatInstance) -> dict[str, bool]:
    """The valuation of x1..xn, one exhaustive satisfiability query per variable."""
    v: dict[str, bool] = {}
    for i, (block, phi) in enumerate(zip(inst.local_vars, inst.formulas), 1):
        v[inst.x(i)] = any(
            eval_prop(phi, {**v, **dict(zip(block, bits))})
            for bits in itertools.product((False, True), repeat=len(block))
        )
    return v


# reduction -------------------------------------------------------------------


def state_names(inst: SnsatInstance, i: int) -> dict[str, object]:
    """Names of gadget ``i``'s states: entries, s-bar, and z-levels (pos, neg)."""
    return {
        "w": f"w_x{i}",
        "wbar": f"wbar_x{i}",
        "sbar": f"sbar_{i}",
        "levels": [
            (f"w_z{i}_{u}", f"wbar_z{i}_{u}") for u in range(1, len(inst.local_vars[i - 1]) + 1)
        ],
    }


def build_kripke(inst: SnsatInstance) -> KripkeStructure:
    n = inst.n
    X = set(inst.x_names)
    Z = set(inst.all_locals)
    R = {f"r{i}" for i in range(1, n + 1)}
    ap = sorted(X | Z | {"s", "t"} | R | {f"pbar_x{i}" for i in range(1, n + 1)})

    states: list[str] = []
    labels: dict[str, set[str]] = {}
    edges: list[tuple[str, str]] = []
    for i in range(n, 0, -1):
        g = state_names(inst, i)
        base = X | Z | {"s", "t"} | (R - {f"r{i}"})
        states += [g["w"], g["wbar"], g["sbar"]]
        labels[g["w"]] = set(base)
        labels[g["wbar"]] = (base - {f"x{i}"}) | {f"pbar_x{i}"}
        labels[g["sbar"]] = base - {"s"}
        for (pos, neg), z in zip(g["levels"], inst.local_vars[i - 1]):
            states += [pos, neg]
            labels[pos] = set(base)
            labels[neg] = base - {z}
        edges += [(g["wbar"], g["sbar"]), (g["sbar"], g["w"])]
        # entries, then each z-level, feed the next layer with both of its states
        layers = [(g["w"], g["wbar"])] + g["levels"]
        if i > 1:
            nxt = state_names(inst, i - 1)
            layers.append((nxt["w"], nxt["wbar"]))
        else:
            layers.append(("s0",))
        for src, dst in zip(layers, layers[1:]):
            edges += [(a, b) for a in src for b in dst]
    states.append("s0")
    labels["s0"] = X | Z | {"s"} | R
    edges.append(("s0", "s0"))
    return KripkeStructure.from_names(states, edges, labels, f"w_x{n}", ap=ap)


def gadget_states(inst: SnsatInstance, i: int) -> list[str]:
    g = state_names(inst, i)
    return [g["w"], g["wbar"], g["sbar"]] + [name for level in g["levels"] for name in level]


def _reachable(kripke: KripkeStructure, start: int) -> set[int]:
    seen, todo = {start}, [start]
    while todo:
        for u in kripke.successors[todo.pop()]:
            if u not in seen:
                seen.add(u)
                todo.append(u)
    return seen


def audit_structure(inst: SnsatInstance, kripke: KripkeStructure) -> dict[str, bool]:
    """Graph-level checks of the properties the reduction relies on.

    ``no_s_in_sbar``: the states without ``s`` are exactly the ``sbar_i``.
    ``t_everywhere_but_sink``: only ``s0`` lacks ``t`` and ``s0`` only loops.
    ``r_marks_gadget``: ``r_i`` is missing exactly on gadget ``i``.
    ``pbar_unique``: ``pbar_x{i}`` labels only ``wbar_x{i}``, which has no self-loop.
    ``top_entries_unreachable``: ``sbar_n`` and ``wbar_x{n}`` are unreachable
    from the initial state.
    """
    lab = {name: kripke.labels[kripke.state_id(name)] for name in kripke.names}
    sink = kripke.state_id("s0")
    n = inst.n
    sbars = {f"sbar_{i}" for i in range(1, n + 1)}
    checks = {
        "no_s_in_sbar": {w for w, ls in lab.items() if "s" not in ls} == sbars,
        "t_everywhere_but_sink": {w for w, ls in lab.items() if "t" not in ls} == {"s0"}
        and kripke.successors[sink] == (sink,),
        "r_marks_gadget": all(
            {w for w, ls in lab.items() if f"r{i}" not in ls} == set(gadget_states(inst, i))
            for i in range(1, n + 1)
        ),
        "pbar_unique": all(
            {w for w, ls in lab.items() if f"pbar_x{i}" in ls} == {f"wbar_x{i}"}
            and (kripke.state_id(f"wbar_x{i}"),) * 2 not in kripke.edges
            for i in range(1, n + 1)
        ),
    }
    reach = {kripke.names[u] for u in _reachable(kripke, kripke.initial)}
    checks["top_entries_unreachable"] = not ({f"sbar_{n}", f"wbar_x{n}"} & reach)
    return checks


def ell2() -> Formula:
    """Holds exactly on tracks of length 2."""
    return F.And(F.Diamond(Mod.B, F.TRUE), F.Box(Mod.B, F.Box(Mod.B, F.FALSE)))


def build_phi_body(inst: SnsatInstance, k: int) -> Formula:
    """The body of ``psi_k = <A> body`` (k >= 1)."""
    if k < 1:
        raise ValueError("psi_0 has no body")
    n = inst.n
    A = Mod.A
    consistency = F.conj(
        *[
            F.Implies(F.And(F.Letter(f"x{i}"), F.Not(F.Letter(f"r{i}"))), inst.formulas[i - 1])
            for i in range(1, n + 1)
        ]
    )
    some_bar = F.disj(*[F.Diamond(A, F.Letter(f"pbar_x{i}")) for i in range(1, n + 1)])
    l2 = ell2()
    refute = F.Diamond(
        A,
        F.conj(F.Not(F.Letter("s")), l2, F.Diamond(A, F.And(l2, F.Not(build_psi(inst, k - 1))))),
    )
    return F.conj(
        F.And(F.Letter("s"), F.Not(F.Letter("t"))),
        consistency,
        F.Box(Mod.B, F.Implies(some_bar, refute)),
    )


def build_psi(inst: SnsatInstance, k: int) -> Formula:
    if not 0 <= k <= inst.n + 1:
        raise ValueError(f"k must lie in 0..{inst.n + 1}")
    if k == 0:
        return F.FALSE
    return F.Diamond(Mod.A, build_phi_body(inst, k))


def build_property(inst: SnsatInstance) -> Formula:
    """``[B]false -> psi_n``, true on K_I iff v(x_n) is true."""
    return F.Implies(F.Box(Mod.B, F.FALSE), build_psi(inst, inst.n))


@dataclass
class ReductionReport:
    expected: bool
    verdict: bool
    state_checks: list[dict] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return self.expected == self.verdict and all(c["ok"] for c in self.state_checks)

    def to_dict(self) -> dict:
        return {
            "expected": self.expected,
            "verdict": self.verdict,
            "agree": self.agree,
            "state_checks": self.state_checks,
        }


def reduction_check(inst: SnsatInstance, cfg=None, per_state: bool = True, allow_large: bool = False):
    """Compare ``v(x_n)`` with the model checking verdict on ``K_I``.

    With ``per_state`` set, also compares every ``v(x_r)`` with the truth of
    ``psi_k`` on the point tracks at ``w_x{r}`` (k >= r) and ``wbar_x{r}``
    (k >= r + 1), for all k up to n + 1.
    """
    from .checker import FORWARD, ValuationTables, mc, model_check

    if inst.n >= 3:
        if not allow_large:
            raise SnsatError("reduction_check on n >= 3 needs allow_large=True")
        warnings.warn("reduction_check with n >= 3 can take a long time", RuntimeWarning)
    val = eval_v(inst)
    kripke = build_kripke(inst)
    verdict = model_check(kripke, build_property(inst), cfg)
    report = ReductionReport(val[f"x{inst.n}"], verdict.answer)
    if per_state:
        tables = ValuationTables(kripke.num_states)
        for k in range(1, inst.n + 2):
            body = F.normalize(build_phi_body(inst, k))
            mc(kripke, body, FORWARD, tables, cfg)
            for r in range(1, inst.n + 1):
                names = state_names(inst, r)
                if k >= r:
                    got = tables.lookup(FORWARD, body, kripke.state_id(names["w"]))
                    report.state_checks.append(
                        {"item": 1, "k": k, "r": r, "value": val[f"x{r}"], "holds": got,
                         "ok": got == val[f"x{r}"]}
                    )
                if k >= r + 1:
                    got = tables.lookup(FORWARD, body, kripke.state_id(names["wbar"]))
                    report.state_checks.append(
                        {"item": 2, "k": k, "r": r, "value": val[f"x{r}"], "holds": got,
                         "ok": got == (not val[f"x{r}"])}
                    )
    return report


# text format -----------------------------------------------------------------


def parse_snsat(text: str) -> SnsatInstance:
    lines = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((no, line))
    if not lines:
        raise SnsatError("empty SNSAT file")
    head = lines[0][1].split()
    if len(head) != 2 or head[0] != "snsat" or not head[1].isdigit():
        raise SnsatError("line 1: expected 'snsat <n>'")
    n = int(head[1])
    blocks: dict[int, tuple[str, ...]] = {}
    formulas: dict[int, Formula] = {}
    for no, line in lines[1:]:
        key, sep, rest = line.partition(":")
        if not sep:
            raise SnsatError(f"line {no}: expected 'key: value'")
        key = key.strip()
        parts = key.split()
        if len(parts) == 2 and parts[0] == "local" and parts[1].isdigit():
            i = int(parts[1])
            if i in blocks:
                raise SnsatError(f"line {no}: duplicate local block {i}")
            blocks[i] = tuple(rest.split())
        elif key[:1] == "F" and key[1:].isdigit():
            i = int(key[1:])
            if i in formulas:
                raise SnsatError(f"line {no}: duplicate formula F{i}")
            formulas[i] = F.parse(rest)
        else:
            raise SnsatError(f"line {no}: unknown key {key!r}")
        if not 1 <= i <= n:
            raise SnsatError(f"line {no}: index {i} outside 1..{n}")
    missing = [i for i in range(1, n + 1) if i not in formulas]
    if missing:
        raise SnsatError(f"missing formulas: {', '.join(f'F{i}' for i in missing)}")
    return SnsatInstance(
        n,
        tuple(blocks.get(i, ()) for i in range(1, n + 1)),
        tuple(formulas[i] for i in range(1, n + 1)),
    )


def format_snsat(inst: SnsatInstance) -> str:
    out = [f"snsat {inst.n}"]
    for i in range(1, inst.n + 1):
        if inst.local_vars[i - 1]:
            out.append(f"local {i}: " + " ".join(inst.local_vars[i - 1]))
        out.append(f"F{i}: {F.to_text(inst.formulas[i - 1])}")
    return "\n".join(out) + "\n"


def load_snsat(path) -> SnsatInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_snsat(fh.read())


def random_prop(rng: random.Random, names: list[str], size: int) -> Formula:
    """Random propositional formula with exactly ``size`` nodes."""
    if size <= 1 or (size == 2 and not names):
        if names and rng.random() < 0.85:
            return F.Letter(rng.choice(names))
        return rng.choice([F.TRUE, F.FALSE])
    if size == 2 or rng.random() < 0.3:
        return F.Not(random_prop(rng, names, size - 1))
    left = rng.randint(1, size - 2)
    op = rng.choice([F.And, F.Or, F.Implies])
    return op(random_prop(rng, names, left), random_prop(rng, names, size - 1 - left))


def random_instance(
    rng: random.Random, n: int, max_locals: int = 2, max_size: int = 6
) -> SnsatInstance:
    blocks = []
    formulas = []
    for i in range(1, n + 1):
        block = tuple(f"z{i}_{u}" for u in range(1, rng.randint(0, max_locals) + 1))
        blocks.append(block)
        names = [f"x{j}" for j in range(1, i)] + list(block)
        formulas.append(random_prop(rng, names, rng.randint(1, max_size)))
    return SnsatInstance(n, tuple(blocks), tuple(formulas))
