"""Command-line entry point: ``qgvc build-op | synth | compile | simulate``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import compiler, sim, su2, synthesis
from .ir import Circuit, ResourceReport, resource_report


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # one line on stderr, exit 2
        raise UsageError(message)


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _report_text(rep: ResourceReport, title: str) -> str:
    row = rep.as_row()
    cells = "  ".join(f"{k}={v}" for k, v in row.items())
    return f"{title}: {cells}  wires={rep.wires}"


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


def _emit_circuit(c: Circuit, args, title: str) -> None:
    rep = resource_report(c)
    _write(args.out, c.to_json())
    if args.format == "json":
        print(json.dumps({"title": title, "resources": rep.as_row(), "wires": rep.wires,
                          "aux_wires": rep.aux_wires}, sort_keys=True))
    else:
        print(_report_text(rep, title))


# commands --------------------------------------------------------------------


def cmd_build_op(args) -> int:
    if not 2 <= args.d <= su2.MAX_DIM:
        raise UsageError(f"--d must be in [2, {su2.MAX_DIM}], got {args.d}")
    op = su2.build_plaquette_operator(args.d)
    _write(args.out, op.to_json())
    s = su2.summary(op)
    if args.format == "json":
        print(json.dumps(s, sort_keys=True))
    else:
        print(f"d={s['d']}: {s['classes']} classes, {s['terms']} terms, {s['entries']} entries")
    return 0


def cmd_synth(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.kind == "ucr":
        if args.d < 2 or args.k < 1:
            raise UsageError("ucr needs --d >= 2 and --k >= 1")
        thetas = rng.uniform(-np.pi, np.pi, args.d**args.k)
        c = synthesis.ucr_synthesize(args.k, args.d, args.axis, thetas)
        _emit_circuit(c, args, f"ucr d={args.d} k={args.k}")
    elif args.kind == "ccr":
        if args.preset == "eq9":
            seq = compiler.qutrit_sequence()
        elif args.words:
            data = json.loads(Path(args.words).read_text())
            seq = synthesis.ControlSequence.of([tuple(w) for w in data["words"]], data["dims"])
        else:
            raise UsageError("ccr needs --preset eq9 or --words FILE")
        tr = synthesis.ccr_transform(seq)
        thetas = rng.uniform(-np.pi, np.pi, len(seq))
        c = synthesis.ccr_synthesize(seq, args.axis, thetas, transform=tr)
        _emit_circuit(c, args, f"ccr |C|={len(seq)} corrections={len(tr.corrections)}")
    else:
        if args.lor3_qutrit:
            gc = synthesis.or_gate(3, 3, 3, "OR3_QUTRIT", detect=[2, 2, 0])
        elif args.or_wide:
            gc = synthesis.or_gate(4, args.d, [3, 3], "OR_WIDE", detect=2)
        elif args.toffoli:
            c = synthesis.qudit_toffoli(args.d)
            _emit_circuit(c, args, f"toffoli d={args.d}")
            return 0
        else:
            levels = tuple(frozenset({0, 1}) for _ in range(args.k))
            wires = compiler.make_wires([args.d] * args.k + [args.k + 1],
                                        [f"in{i}" for i in range(args.k)] + ["aux"])
            gc = synthesis.and_verifier(synthesis.GatingSpec(levels, tuple(range(args.k)), args.k), wires)
        _emit_circuit(gc.circuit, args, f"gate {gc.spec.variant}")
    return 0


def cmd_compile(args) -> int:
    params = compiler.EvolutionParams(args.g2, args.t, args.nt)
    if args.style == "alternate":
        if args.d != 3:
            raise UsageError("the alternate decomposition is built for d = 3")
        if args.scope == "trotter-step":
            raise UsageError("the alternate decomposition compiles a face pair, not a Trotter step")
        if args.scope == "term":
            term = su2.build_plaquette_operator(3).term(args.pqrs)
            c = compiler.compile_alternate_term(term, params.tau)
        else:
            c = compiler.compile_alternate_pair("A", "Abar", params.tau)
        _emit_circuit(c, args, f"alternate {args.scope} (faces A, Abar)")
        return 0
    style = "auto" if args.style == "primary" else args.style
    if args.scope == "term":
        op = su2.build_plaquette_operator(args.d)
        c = compiler.compile_term_evolution(op.term(args.pqrs), args.d, params.tau, style)
    elif args.scope == "plaquette":
        c = compiler.compile_plaquette_evolution(args.d, params.tau, style)
    else:
        c = compiler.compile_trotter_step(args.d, params, style)
    _emit_circuit(c, args, f"{args.scope} d={args.d}")
    return 0


def cmd_simulate(args) -> int:
    times = sim.time_grid(args.t0, args.tmax, args.dt)
    if args.mode == "exact":
        ts = sim.exact_evolution(args.g2, times, args.face)
    else:
        ts = sim.trotter_simulate(args.g2, times, args.nt, args.face)
    text = ts.to_json() if args.format == "json" else ts.to_csv()
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qgvc", description="Qudit circuits for the truncated SU(2) plaquette operator.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build-op", help="build the plaquette operator and print its size")
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--out")
    b.add_argument("--format", choices=("text", "json"), default="text")
    b.set_defaults(func=cmd_build_op)

    s = sub.add_parser("synth", help="synthesize a multiplexed rotation or a gating gate")
    s.add_argument("kind", choices=("ucr", "ccr", "gate"))
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--axis", choices=("Z", "Y"), default="Z")
    s.add_argument("--preset", choices=("eq9",))
    s.add_argument("--words", help="JSON file with 'dims' and 'words'")
    s.add_argument("--lor3-qutrit", action="store_true")
    s.add_argument("--or-wide", action="store_true")
    s.add_argument("--toffoli", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_synth)

    c = sub.add_parser("compile", help="compile a term, a plaquette or a cube Trotter step")
    c.add_argument("scope", choices=("term", "plaquette", "trotter-step"))
    c.add_argument("--d", type=int, default=3)
    c.add_argument("--pqrs", type=int, nargs=4, default=[0, 0, 0, 0])
    c.add_argument("--g2", type=float, default=0.2)
    c.add_argument("--t", type=float, default=0.1)
    c.add_argument("--nt", type=_positive_int, default=1)
    c.add_argument("--style", choices=("primary", "general", "alternate"), default="primary")
    c.add_argument("--faces", choices=("pair",), default="pair",
                   help="the alternate decomposition always evolves an opposite-face pair")
    c.add_argument("--out")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.set_defaults(func=cmd_compile)

    m = sub.add_parser("simulate", help="electric energy of face A from the vacuum")
    m.add_argument("mode", choices=("exact", "trotter"))
    m.add_argument("--g2", type=float, default=0.2)
    m.add_argument("--t0", type=float, default=0.02)
    m.add_argument("--tmax", type=float, default=0.92)
    m.add_argument("--dt", type=float, default=0.1)
    m.add_argument("--nt", type=_positive_int, default=1)
    m.add_argument("--face", choices=tuple(compiler.FACE_TABLE), default="A")
    m.add_argument("--out")
    m.add_argument("--format", choices=("csv", "json"), default="csv")
    m.set_defaults(func=cmd_simulate)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"qgvc: usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, synthesis.SynthesisError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"qgvc: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
