"""``hsmc`` command-line front end.

Exit codes: 0 the property holds (or the run agreed), 1 it does not,
2 bad input or unsupported formula, 3 the configuration cap was hit.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from pathlib import Path

from . import __version__
from . import formula as F
from .core import parse_kripke
from .errors import ConfigLimitExceeded, HSError
from .checker import OracleConfig, model_check
from .semantics import brute_model_check

EXIT_HOLDS, EXIT_FAILS, EXIT_ERROR, EXIT_CAP = 0, 1, 2, 3
DEFAULT_SEED = 2024


class StageError(Exception):
    """An input problem, tagged with the stage that rejected it."""

    def __init__(self, stage: str, error: Exception):
        super().__init__(f"{stage}: {error}")
        self.stage = stage


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class Report:
    """Collects the RunReport fields in a fixed order."""

    def __init__(self, argv):
        self.command = list(argv)
        self.inputs: dict[str, str] = {}
        self.verdict: dict = {}
        self.stats: dict = {}
        self._t0 = time.perf_counter()

    def add_input(self, name: str, data: bytes) -> None:
        self.inputs[name] = "sha256:" + _digest(data)

    def to_dict(self, exit_code: int) -> dict:
        return {
            "tool": "hsmc",
            "version": __version__,
            "command": self.command,
            "inputs": self.inputs,
            "verdict": self.verdict,
            "timing": {"wall_seconds": round(time.perf_counter() - self._t0, 6)},
            "stats": self.stats,
            "exit_code": exit_code,
        }


def _read(path: str, stage: str, report: Report, name: str) -> str:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise StageError(stage, exc) from None
    report.add_input(name, data)
    return data.decode("utf-8")


def _load_kripke(args, report):
    text = _read(args.kripke, "kripke", report, "kripke")
    try:
        return parse_kripke(text)
    except HSError as exc:
        raise StageError("kripke", exc) from None


def _formula_text(text: str) -> str:
    return " ".join(line for line in text.splitlines() if not line.lstrip().startswith("#"))


def _load_formula(args, report):
    if args.formula_file is not None:
        if args.formula is not None:
            raise StageError("usage", ValueError("give a formula inline or with -f, not both"))
        text = _formula_text(_read(args.formula_file, "formula", report, "formula"))
    elif args.formula is not None:
        text = args.formula
        report.add_input("formula", text.encode("utf-8"))
    else:
        raise StageError("usage", ValueError("no formula given"))
    try:
        phi = F.parse(text)
    except HSError as exc:
        raise StageError("formula", exc) from None
    frag = F.fragment_of(phi)
    if not frag.supported:
        raise StageError("fragment", ValueError(frag.reason))
    return phi


def _oracle_config(args) -> OracleConfig:
    return OracleConfig(realization=args.oracle, threads=args.threads)


# commands --------------------------------------------------------------------


def cmd_check(args, report: Report, out) -> int:
    kripke = _load_kripke(args, report)
    phi = _load_formula(args, report)
    verdict = model_check(kripke, phi, _oracle_config(args))
    cex = verdict.counterexample
    report.verdict = {"holds": verdict.answer, "fragment": F.fragment_of(phi).kind,
                      "route": verdict.route,
                      "counterexample": cex.state_names() if cex is not None else None}
    report.stats = verdict.stats.to_dict()
    if not args.json:
        print("holds" if verdict.answer else "fails", file=out)
        if args.witness and verdict.counterexample is not None:
            print("counterexample: " + str(verdict.counterexample), file=out)
    return EXIT_HOLDS if verdict.answer else EXIT_FAILS


def _brute_against_checker(args, report: Report, out) -> int:
    from .generators import random_pair

    rng = random.Random(args.seed)
    mismatches = []
    cfg = _oracle_config(args)
    for i in range(args.random):
        route = "B" if i % 2 == 0 else "E"
        kripke, phi = random_pair(rng, route=route)
        a = model_check(kripke, phi, cfg).answer
        b = brute_model_check(kripke, phi, args.max_len).answer
        if a != b:
            mismatches.append({"index": i, "formula": F.to_text(phi), "checker": a, "brute": b})
    report.verdict = {"agree": not mismatches, "pairs": args.random, "mismatches": mismatches}
    report.stats = {"seed": args.seed}
    if not args.json:
        print(f"{args.random - len(mismatches)}/{args.random} verdicts agree", file=out)
        for m in mismatches:
            print(f"  mismatch #{m['index']}: {m['formula']}", file=out)
    return EXIT_HOLDS if not mismatches else EXIT_FAILS


def cmd_brute(args, report: Report, out) -> int:
    if args.max_len is not None and args.max_len < 1:
        raise StageError("usage", ValueError("--max-len must be at least 1"))
    if args.against is not None:
        if args.random is None:
            raise StageError("usage", ValueError("--against needs --random N"))
        return _brute_against_checker(args, report, out)
    if args.kripke is None:
        raise StageError("usage", ValueError("a kripke file is required"))
    kripke = _load_kripke(args, report)
    phi = _load_formula(args, report)
    v = brute_model_check(kripke, phi, args.max_len)
    cex = v.counterexample.state_names() if v.counterexample is not None else None
    report.verdict = {"holds": v.answer, "fragment": F.fragment_of(phi).kind,
                      "counterexample": cex}
    report.stats = {"bound": v.bound, "budget_limited": v.budget_limited}
    if not args.json:
        print("holds" if v.answer else "fails", file=out)
        print(f"track length bound: {v.bound}", file=out)
        if args.witness and cex is not None:
            print("counterexample: " + " ".join(cex), file=out)
    return EXIT_HOLDS if v.answer else EXIT_FAILS


def cmd_snsat(args, report: Report, out) -> int:
    from . import snsat
    from .core import format_kripke

    text = _read(args.instance, "instance", report, "instance")
    try:
        inst = snsat.parse_snsat(text)
    except HSError as exc:
        raise StageError("instance", exc) from None
    if args.action == "eval":
        val = snsat.eval_v(inst)
        report.verdict = {"valuation": val}
        if not args.json:
            for name, b in val.items():
                print(f"{name}={'true' if b else 'false'}", file=out)
        return EXIT_HOLDS
    if args.action == "reduce":
        if not args.out_kripke or not args.out_formula:
            raise StageError("usage", ValueError("reduce needs --out-kripke and --out-formula"))
        kripke = snsat.build_kripke(inst)
        phi = snsat.build_property(inst)
        Path(args.out_kripke).write_text(format_kripke(kripke), encoding="utf-8")
        Path(args.out_formula).write_text(F.to_text(phi) + "\n", encoding="utf-8")
        report.verdict = {"states": kripke.num_states, "formula_size": F.size(phi)}
        if not args.json:
            print(f"wrote {args.out_kripke} ({kripke.num_states} states)", file=out)
            print(f"wrote {args.out_formula} (size {F.size(phi)})", file=out)
        return EXIT_HOLDS
    try:
        rep = snsat.reduction_check(inst, _oracle_config(args), allow_large=args.allow_large)
    except snsat.SnsatError as exc:
        raise StageError("usage", exc) from None
    report.verdict = rep.to_dict()
    if not args.json:
        print(f"v(x{inst.n}) = {rep.expected}, model check = {rep.verdict}", file=out)
        failed = [c for c in rep.state_checks if not c["ok"]]
        print(f"per-state checks: {len(rep.state_checks) - len(failed)}/"
              f"{len(rep.state_checks)} hold", file=out)
        print("agree" if rep.agree else "DISAGREE", file=out)
    return EXIT_HOLDS if rep.agree else EXIT_FAILS


# parser ----------------------------------------------------------------------


def _add_formula_args(p):
    p.add_argument("formula", nargs="?", help="formula text (quote it)")
    p.add_argument("-f", "--formula-file", help="read the formula from a file")


def _add_common(p):
    p.add_argument("--json", action="store_true", help="print a JSON run report")
    p.add_argument("--oracle", choices=("configgraph", "dfs"), default="configgraph")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hsmc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hsmc {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("check", help="model check a formula on a Kripke structure")
    p.add_argument("kripke")
    _add_formula_args(p)
    _add_common(p)
    p.add_argument("--witness", action="store_true", help="print a counterexample track")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("brute", help="decide by brute-force track search")
    p.add_argument("kripke", nargs="?")
    _add_formula_args(p)
    _add_common(p)
    p.add_argument("--witness", action="store_true")
    p.add_argument("--max-len", type=int, help="track length bound (default |W|(2|psi|+1)^2)")
    p.add_argument("--against", choices=("checker",), help="compare with the checker")
    p.add_argument("--random", type=int, metavar="N", help="number of random pairs")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(run=cmd_brute)

    p = sub.add_parser("snsat", help="SNSAT valuation and reduction")
    p.add_argument("action", choices=("eval", "reduce", "roundtrip"))
    p.add_argument("instance")
    _add_common(p)
    p.add_argument("--out-kripke")
    p.add_argument("--out-formula")
    p.add_argument("--allow-large", action="store_true", help="permit n >= 3 round trips")
    p.set_defaults(run=cmd_snsat)
    return parser


def main(argv=None, out=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_HOLDS
    if args.threads < 1:
        print("hsmc: usage: --threads must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    report = Report(["hsmc", *argv])
    try:
        code = args.run(args, report, out)
    except StageError as exc:
        print(f"hsmc: {exc}", file=sys.stderr)
        code = EXIT_ERROR
        report.verdict = {"error": str(exc), "stage": exc.stage}
    except ConfigLimitExceeded as exc:
        print(f"hsmc: check: {exc}", file=sys.stderr)
        code = EXIT_CAP
        report.verdict = {"error": str(exc), "stage": "check"}
    if args.json:
        print(json.dumps(report.to_dict(code), indent=2), file=out)
    return code


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
