"""Command-line front end: ``coset-forge <command> --gens ... [--f ...]``.

Exit status is 0 on success, 1 on domain errors (e.g. f in C) and 2 on
parse errors.  ``COSET_FORGE_SEED`` overrides the default seed 0.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from . import automata as fa
from . import cosets
from .errors import CosetForgeError, FixtureMismatch
from .pieces import admissible_factorization, piece_alphabet
from .stallings import SubgroupGraph, fold, graph_generators, nielsen_basis
from .words import Alphabet, Word, format_word, parse_word, parse_words

WORKED_GENERATORS = "a^3,b^3,ab^2A,ba^3B,bab^2AB"

# Values from the worked example; the last three are derived by hand and by the oracle.
WORKED_FIXTURES = {
    "decompositions": ["a∘a∘a", "b∘b∘b", "ab∘b∘A", "ba∘a∘aB", "bab∘b∘AB"],
    "constants": {"M": 4, "p": 13121, "k": 104968},
    "sigma": {"a11": "aaa", "a74": "BB", "m123": "bbb", "m742": "aaa", "b42": "bb"},
    "m742_split": "a|a|a",
    "stabilizer": ["BBaaabb", "aaa", "bbbbbb"],
    "z": [[-2, 4, 2], [1], [2, 2]],
    "z_factorizations": ["a74 ∘ m742 ∘ b42", "h1", "a22 ∘ b22"],
    "transversal_internal": ["1", "BBB"],
    "coset_ball_10": 1993,
}


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("COSET_FORGE_SEED", "0"))


class Job:
    """Parsed inputs shared by the subcommands."""

    def __init__(self, args):
        self.args = args
        words = parse_words(args.gens) if getattr(args, "gens", None) is not None else []
        extra = [parse_word(getattr(args, name)) for name in ("f", "g", "word", "w1", "w2")
                 if getattr(args, name, None) is not None]
        used = max((w.rank for w in words + extra), default=1)
        self.rank = max(args.rank or 1, used, 1)
        self.alphabet = Alphabet(self.rank)
        self.generators = words
        self.graph = fold(words, self.rank)

    def word(self, name: str) -> Word:
        value = getattr(self.args, name, None)
        if value is None:
            raise ValueError(f"--{name.replace('_', '-')} is required")
        return parse_word(value, self.alphabet)

    def fmt(self, w: Sequence[int]) -> str:
        return format_word(w, self.alphabet)


def _graph_text(job: Job, graph: SubgroupGraph) -> str:
    lines = [f"vertices {graph.n_vertices} edges {graph.n_edges} rank {graph.subgroup_rank}"]
    lines += [f"{u} {job.alphabet.name(x)} {v}" for u, x, v in graph.edges]
    return "\n".join(lines)


def _emit_graph(job: Job, graph: SubgroupGraph):
    fmt = job.args.format
    if fmt == "json":
        return graph.to_json(job.alphabet)
    if fmt == "dot":
        return graph.to_dot(job.alphabet)
    return _graph_text(job, graph)


def cmd_fold(job: Job):
    return _emit_graph(job, job.graph)


def cmd_member(job: Job):
    return job.graph.accepts(job.word("word"))


def cmd_nielsen(job: Job):
    basis = nielsen_basis(job.graph)
    gens = [{"h": job.fmt(g.h), "s1": job.fmt(g.s1), "mu": job.alphabet.name(g.mu), "s2": job.fmt(g.s2),
             "decomposition": _decomposition(job, g)} for g in basis.generators]
    if job.args.format == "json":
        return {"generators": gens, "M": basis.M, "p": basis.p, "k": basis.k}
    lines = [f"h{i} = {g['decomposition']}" for i, g in enumerate(gens, start=1)]
    lines.append(f"M = {basis.M}  p = {basis.p}  k = {basis.k}")
    return "\n".join(lines)


def _decomposition(job: Job, g) -> str:
    parts = [job.fmt(g.s1) if g.s1 else "", job.alphabet.name(g.mu), job.fmt(g.s2.inverse()) if g.s2 else ""]
    return "∘".join(p for p in parts if p)


def cmd_pieces(job: Job):
    rows = piece_alphabet(nielsen_basis(job.graph)).table()
    if job.args.format == "json":
        return [{"symbol": s, "word": w, "split": sp} for s, w, sp in rows]
    return "\n".join("\t".join(r).rstrip() for r in rows)


def cmd_stabilizer(job: Job):
    graph = cosets.stabilizer(job.graph, job.word("f"))
    if job.args.format in ("dot",):
        return graph.to_dot(job.alphabet)
    gens = [job.fmt(w) for w in graph_generators(graph)]
    if job.args.format == "json":
        return {"generators": gens, "rank": graph.subgroup_rank, "graph": graph.to_json(job.alphabet)}
    return ",".join(gens) if gens else "1"


def cmd_malnormal(job: Job):
    return cosets.is_f_malnormal(job.graph, job.word("f"))


def cmd_essential(job: Job):
    found = cosets.essential_cosets(job.graph)
    rows = [{"f": job.fmt(dc.minimal_rep), "stabilizer": [job.fmt(w) for w in graph_generators(dc.C_f)]}
            for dc in found]
    if job.args.format == "json":
        return rows
    return "\n".join(f"{r['f']}\t{','.join(r['stabilizer'])}" for r in rows) if rows else "(none)"


def cmd_solve(job: Job):
    f, g = job.word("f"), job.word("g")
    sol = cosets.solve_uniform(job.graph, f) if f == g else cosets.solve_equation(job.graph, g, f)
    pairs = [(job.fmt(x), job.fmt(y)) for x, y in sol.pairs(job.args.max_param_len)]
    if job.args.format == "json":
        return {"kind": sol.kind, "pairs": [list(p) for p in pairs]}
    return "\n".join([sol.kind] + [f"{x}\t{y}" for x, y in pairs])


def cmd_normal_form(job: Job):
    c, t = cosets.normal_form(job.graph, job.word("f"), job.word("g"))
    if job.args.format == "json":
        return {"c": job.fmt(c), "t": job.fmt(t)}
    return f"{job.fmt(c)}\t{job.fmt(t)}"


def cmd_minrep(job: Job):
    return job.fmt(cosets.minimal_representative(job.graph, job.word("f")))


def cmd_verify_k(job: Job):
    seed = _seed(job.args)
    report = cosets.verify_k_reduced(job.graph, job.word("f"), samples=job.args.samples, seed=seed,
                                     pairs=job.args.pairs, max_y_len=job.args.max_y_len)
    if job.args.format == "json":
        return report
    return "\n".join(f"{key}: {value}" for key, value in report.items())


def _build_automaton(job: Job, kind: str) -> fa.Automaton:
    if kind == "subgroup":
        return fa.subgroup_automaton(job.graph)
    if kind == "coset":
        return cosets.double_coset_automaton(job.graph, job.word("f"))
    if kind == "cone":
        w1 = parse_word(job.args.w1 or "", job.alphabet)
        w2 = parse_word(job.args.w2 or "", job.alphabet)
        return fa.cone_automaton(w1, w2, job.rank)
    if kind == "reduced":
        return fa.canonical_dfa(fa.reduced_acceptor(job.rank))
    raise ValueError(f"unknown automaton kind {kind!r}")


def cmd_automaton(job: Job):
    a = _build_automaton(job, job.args.kind)
    if job.args.format == "dot":
        return a.to_dot()
    if job.args.format == "json":
        return {"states": a.n, "initial": sorted(a.initial), "final": sorted(a.final),
                "arrows": [{"src": s, "label": job.alphabet.name(x), "dst": t} for s, x, t in sorted(a.arrows)]}
    return a.to_text().rstrip("\n")


def cmd_enumerate(job: Job):
    words = [job.fmt(w) for w in _build_automaton(job, job.args.automaton).enumerate(job.args.max_len)]
    if job.args.format == "json":
        return words
    return "\n".join(words)


def _check(stage: str, got, expected) -> None:
    if got != expected:
        raise FixtureMismatch(f"{stage}: got {got!r}, expected {expected!r}")


def reproduce_worked_example(generators: str = WORKED_GENERATORS, out_dir: str | Path | None = None) -> dict:
    """Run the worked example end to end and diff each value against the fixtures.

    Raises :class:`FixtureMismatch` at the first diverging value.
    """
    fx = WORKED_FIXTURES
    graph = fold(parse_words(generators), 2)
    basis = nielsen_basis(graph)
    decomps = [str(g) for g in basis.generators]
    _check("basis decompositions", decomps, fx["decompositions"])
    constants = {"M": basis.M, "p": basis.p, "k": basis.k}
    _check("constants", constants, fx["constants"])

    sigma = piece_alphabet(basis)
    picks = {"a11": ("a", (1, 1)), "a74": ("a", (7, 4)), "m123": ("m", (1, 2, 3)),
             "m742": ("m", (7, 4, 2)), "b42": ("b", (4, 2))}
    values = {name: str(sigma.word(sym)) for name, sym in picks.items()}
    _check("sigma", values, fx["sigma"])
    m742 = sigma.m[(7, 4, 2)]
    split = f"{m742.alpha}|{Word([m742.mu])}|{m742.beta}"
    _check("m742 split", split, fx["m742_split"])

    a = parse_word("a")
    c_a = cosets.stabilizer(graph, a)
    expected_z = parse_words(",".join(fx["stabilizer"]))
    same = all(c_a.accepts(w) for w in expected_z) and fold(expected_z, 2) == c_a
    _check("stabilizer C_a", same, True)

    rt = cosets.relative_transversal(basis, z=[Word(z) for z in fx["z"]])
    _check("d_i factorizations", [str(x) for x in rt.z_factorizations()], fx["z_factorizations"])
    internal = sorted(str(rt.expand(t)) for t in rt.internal)
    _check("transversal internal part", internal, fx["transversal_internal"])

    automaton = cosets.double_coset_automaton(graph, a)
    ball = len(automaton.enumerate(10))
    _check("CaC words of length <= 10", ball, fx["coset_ball_10"])

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "gamma_C.dot").write_text(graph.to_dot(name="GammaC"))
        (out / "gamma_Ca.dot").write_text(c_a.to_dot(name="GammaCa"))
        (out / "CaC.dot").write_text(automaton.to_dot(name="CaC"))
    return {
        "decompositions": decomps,
        "constants": constants,
        "sigma": values,
        "m742_split": split,
        "stabilizer": [str(w) for w in graph_generators(c_a)],
        "z_factorizations": [str(x) for x in rt.z_factorizations()],
        "transversal_internal": internal,
        "coset_ball_10": ball,
        "automaton_states": automaton.n,
        "graphs": {"C": graph, "C_a": c_a, "automaton": automaton},
    }


def cmd_reproduce(job: Job):
    report = reproduce_worked_example(job.args.gens or WORKED_GENERATORS, job.args.out_dir)
    graphs = report.pop("graphs")
    if job.args.format == "dot":
        return "\n".join([graphs["C"].to_dot(name="GammaC"), graphs["C_a"].to_dot(name="GammaCa"),
                          graphs["automaton"].to_dot(name="CaC")])
    if job.args.format == "json":
        return {**report, "match": True}
    lines = [f"{key}: {value}" for key, value in report.items()]
    return "\n".join(lines + ["all fixtures match"])


COMMANDS = {
    "fold": cmd_fold,
    "member": cmd_member,
    "nielsen": cmd_nielsen,
    "pieces": cmd_pieces,
    "stabilizer": cmd_stabilizer,
    "malnormal": cmd_malnormal,
    "essential": cmd_essential,
    "solve": cmd_solve,
    "normal-form": cmd_normal_form,
    "minrep": cmd_minrep,
    "verify-k": cmd_verify_k,
    "automaton": cmd_automaton,
    "enumerate": cmd_enumerate,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coset-forge", description="Double cosets of subgroups of free groups.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gens", help="comma-separated generators, e.g. a^3,b^3,ab^2A")
    common.add_argument("--rank", type=int, help="rank of the ambient free group (default: inferred)")
    common.add_argument("--format", choices=["text", "json", "dot"], default="text")
    common.add_argument("--seed", type=int, help="PRNG seed (default 0 or $COSET_FORGE_SEED)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    add("fold", "fold the generators into a subgroup graph")
    add("member", "membership of --word in C").add_argument("--word", required=True)
    add("nielsen", "Nielsen basis with central-letter decompositions")
    add("pieces", "the piece alphabet as a table")
    add("stabilizer", "generators of C_f").add_argument("--f", required=True)
    add("malnormal", "whether C is f-malnormal").add_argument("--f", required=True)
    add("essential", "list the essential double cosets")
    p = add("solve", "solutions of x g = f y")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--max-param-len", type=int, default=4)
    p = add("normal-form", "the unique (c, t) with g = c f t")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    add("minrep", "shortest representative of CfC").add_argument("--f", required=True)
    p = add("verify-k", "sample the cancellation bound of CfC")
    p.add_argument("--f", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--pairs", choices=["auto", "CxC", "CxT"], default="auto")
    p.add_argument("--max-y-len", type=int)
    p = add("automaton", "build an automaton")
    p.add_argument("kind", choices=["subgroup", "coset", "cone", "reduced"])
    p.add_argument("--f")
    p.add_argument("--w1")
    p.add_argument("--w2")
    p = add("enumerate", "shortlex words of an automaton")
    p.add_argument("--automaton", choices=["subgroup", "coset", "cone", "reduced"], required=True)
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--f")
    p.add_argument("--w1")
    p.add_argument("--w2")
    add("reproduce", "reproduce the worked example").add_argument("--out-dir")
    return parser


def _render(result, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(result, indent=2, ensure_ascii=False)
    if isinstance(result, bool):
        return "true" if result else "false"
    return str(result)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.format
    try:
        job = Job(args)
        if args.command == "verify-k" and fmt == "text":
            print(f"seed: {_seed(args)}")
        result = COMMANDS[args.command](job)
    except CosetForgeError as exc:
        _error(fmt, exc.code, str(exc))
        return 1
    except ValueError as exc:
        _error(fmt, "parse_error", str(exc))
        return 2
    out = _render(result, fmt)
    print(out, end="" if out.endswith("\n") else "\n")
    return 0


def _error(fmt: str, code: str, message: str) -> None:
    if fmt == "json":
        print(json.dumps({"error": message, "code": code}))
    else:
        print(f"error [{code}]: {message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
