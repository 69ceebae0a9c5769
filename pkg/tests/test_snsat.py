import random
import warnings

import pytest

from hsmc import formula as F
from hsmc.core import format_kripke, parse_kripke, validate
from hsmc.errors import SnsatError
from hsmc.semantics import enumerate_tracks, holds
from hsmc.snsat import (
    SnsatInstance,
    audit_structure,
    build_kripke,
    build_property,
    build_psi,
    eval_v,
    format_snsat,
    parse_snsat,
    random_instance,
    reduction_check,
)


def inst(blocks, forms):
    return SnsatInstance(
        len(forms), tuple(tuple(b) for b in blocks), tuple(F.parse(f) for f in forms)
    )


@pytest.mark.parametrize(
    "blocks, forms, expected",
    [
        ([["z"]], ["z & ~z"], {"x1": False}),
        ([["z"]], ["z"], {"x1": True}),
        ([["z1"], []], ["z1", "~x1"], {"x1": True, "x2": False}),
        ([[], ["a", "b"]], ["false", "~x1 & (a <-> ~b)"], {"x1": False, "x2": True}),
    ],
)
def test_eval_v(blocks, forms, expected):
    assert eval_v(inst(blocks, forms)) == expected


@pytest.mark.parametrize(
    "blocks, forms",
    [
        ([["z"], ["z"]], ["z", "z"]),  # shared local
        ([["x1"]], ["x1"]),  # local named like an x-variable
        ([["s"]], ["s"]),  # reserved letter
        ([["z"]], ["x1 | z"]),  # F1 may not read x1
        ([["z"], []], ["z", "z"]),  # F2 may not read Z1
        ([["z"]], ["<A> z"]),  # modality
    ],
)
def test_invalid_instances(blocks, forms):
    with pytest.raises(SnsatError):
        inst(blocks, forms)


def test_single_gadget_structure():
    k = build_kripke(inst([["z"]], ["z"]))
    validate(k)
    assert sorted(k.names) == sorted(["w_x1", "wbar_x1", "sbar_1", "w_z1_1", "wbar_z1_1", "s0"])
    assert k.names[k.initial] == "w_x1"
    lab = {n: k.labels[k.state_id(n)] for n in k.names}
    assert lab["s0"] == {"x1", "z", "s", "r1"}
    assert lab["w_x1"] == {"x1", "z", "s", "t"}
    assert lab["wbar_x1"] == {"z", "s", "t", "pbar_x1"}
    assert lab["wbar_z1_1"] == {"x1", "s", "t"}
    assert lab["sbar_1"] == {"x1", "z", "t"}


def test_empty_local_block_wires_entries_onward():
    k = build_kripke(inst([[], []], ["true", "x1"]))
    succ = {k.names[a]: {k.names[b] for b in k.successors[a]} for a in range(k.num_states)}
    assert succ["w_x2"] == {"w_x1", "wbar_x1"}
    assert succ["w_x1"] == {"s0"}
    assert succ["wbar_x1"] == {"sbar_1", "s0"}


def test_pbar_only_on_point_track():
    I = inst([["a"], ["b"]], ["a", "b | x1"])
    k = build_kripke(I)
    for i in (1, 2):
        sat = [t.state_names() for t in enumerate_tracks(k, 4) if holds(k, t, F.Letter(f"pbar_x{i}"))]
        assert sat == [[f"wbar_x{i}"]]


def test_audit_passes_on_random_instances():
    rng = random.Random(2)
    for _ in range(30):
        I = random_instance(rng, rng.choice([1, 2, 3]))
        assert all(audit_structure(I, build_kripke(I)).values())


def test_psi_family_shape():
    I = inst([["z1"], []], ["z1", "~x1"])
    assert build_psi(I, 0) == F.FALSE
    sizes = [F.size(F.normalize(build_psi(I, k))) for k in range(1, 4)]
    assert sizes[2] - sizes[1] == sizes[1] - sizes[0] > 0
    for k in range(4):
        assert F.fragment_of(build_psi(I, k)).kind in (F.AAB.kind, F.AA.kind)
    assert F.fragment_of(build_psi(I, 2)) == F.AAB
    with pytest.raises(ValueError):
        build_psi(I, 4)


def test_psi_embeds_predecessor_once():
    I = inst([["z"]], ["z"])
    prev = build_psi(I, 1)
    assert sum(1 for n in F.walk(build_psi(I, 2)) if n == prev) == 1


@pytest.mark.parametrize(
    "blocks, forms, expected",
    [([["z"]], ["z"], True), ([["z"]], ["z & ~z"], False), ([["z1"], []], ["z1", "~x1"], False)],
)
def test_reduction_examples(blocks, forms, expected):
    rep = reduction_check(inst(blocks, forms))
    assert rep.expected is expected and rep.verdict is expected
    assert rep.agree and rep.state_checks


def test_reduction_gates_large_instances():
    I = random_instance(random.Random(0), 3, max_locals=0, max_size=2)
    with pytest.raises(SnsatError):
        reduction_check(I)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = reduction_check(I, allow_large=True, per_state=False)
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)
    assert rep.agree


def test_text_format_roundtrip():
    I = inst([["a", "b"], []], ["a & ~b", "~x1"])
    assert parse_snsat(format_snsat(I)) == I
    text = "snsat 1\n# comment\nlocal 1: z\nF1: z | ~z\n"
    assert eval_v(parse_snsat(text)) == {"x1": True}


@pytest.mark.parametrize(
    "text",
    ["", "snsat x\n", "snsat 1\n", "snsat 1\nF2: true\n", "snsat 1\nF1: true\nF1: true\n",
     "snsat 1\nG1: true\n", "snsat 1\nF1 true\n"],
)
def test_text_format_errors(text):
    with pytest.raises(SnsatError):
        parse_snsat(text)


def test_reduced_artifacts_reparse():
    I = random_instance(random.Random(9), 2)
    k = build_kripke(I)
    assert parse_kripke(format_kripke(k)) == k
    phi = build_property(I)
    assert F.parse(F.to_text(phi)) == phi
