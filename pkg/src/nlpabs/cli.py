"""``nlpabs graph|analyze|check|trace <file>``.

Exit codes: 0 success, 1 soundness violations or solver failure,
2 usage or input errors.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .fixpoint import SolverError, solve
from .graph import build_graph
from .groundness import GroundnessDomain
from .oracle import (
    DEFAULT_DEPTH, DEFAULT_MAX_STATES, bindings_text, final_answers, parse_samples,
    project_edges, reachable, render_state, soundness_check,
)
from .semantics import DIAMOND, FLAT, build_system, count_unify_ops, query_thetas
from .syntax import ParseError, parse_program
from .terms import format_subst

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_INPUT = 2

# name -> zero-argument factory; tests may register extra domains here
DOMAINS = {"groundness": GroundnessDomain}


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    program: Path
    semantics: str = FLAT
    domain: str = "groundness"
    format: str = "text"
    queries: Optional[Path] = None
    depth: int = DEFAULT_DEPTH
    max_states: int = DEFAULT_MAX_STATES
    stats: bool = False
    dump_equations: bool = False


def _read(path: Path, what: str) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {what} {path}: {exc.strerror or exc}") from None


def _load(cfg: RunConfig):
    text = _read(cfg.program, "program")
    try:
        program = parse_program(text)
    except ParseError as exc:
        raise InputError(f"{cfg.program}:{exc.line}:{exc.col}: {exc.message}") from None
    return program, build_graph(program)


def _thetas(program, domain, cfg):
    try:
        return query_thetas(program, domain)
    except ValueError as exc:
        raise InputError(f"{cfg.program}: {exc}") from None


def _samples(cfg: RunConfig, program, domain, thetas):
    if cfg.queries is None:
        raise InputError(f"'{cfg.command}' needs a sample fixture (--queries FILE)")
    text = _read(cfg.queries, "sample fixture")
    try:
        samples = parse_samples(text, program)
        samples.validate(program, domain, thetas)
    except ParseError as exc:
        raise InputError(f"{cfg.queries}:{exc.line}:{exc.col}: {exc.message}") from None
    except ValueError as exc:
        raise InputError(f"{cfg.queries}: {exc}") from None
    return samples


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_graph(cfg: RunConfig, out) -> int:
    _, graph = _load(cfg)
    if cfg.format == "json":
        out.write(graph.to_json())
    elif cfg.format == "dot":
        out.write(graph.to_dot())
    else:
        for e in graph.edges:
            out.write(f"{e} {e.kind}\n")
    return EXIT_OK


def _analyze(cfg: RunConfig):
    program, graph = _load(cfg)
    domain = DOMAINS[cfg.domain]()
    thetas = _thetas(program, domain, cfg)
    system = build_system(cfg.semantics, graph, domain, thetas)
    return program, graph, domain, thetas, system, solve(system, domain)


def cmd_analyze(cfg: RunConfig, out) -> int:
    _, graph, domain, _, system, solution = _analyze(cfg)
    stats = {
        "equations": len(system),
        "unify_operands": count_unify_ops(system),
        "evaluations": solution.stats.evaluations,
        "updates": solution.stats.total_updates,
    }
    if cfg.format == "json":
        key = "edge" if cfg.semantics == FLAT else "point"
        obj = {
            "schema": 1,
            "semantics": cfg.semantics,
            "domain": cfg.domain,
            "values": [{key: str(idx), "value": domain.to_json(solution[idx])} for idx in system.indices],
        }
        if cfg.stats:
            obj["stats"] = stats
        if cfg.dump_equations:
            obj["equations"] = system.to_json_obj(domain)
        out.write(_dump(obj))
        return EXIT_OK
    for idx in system.indices:
        out.write(f"{idx}: {domain.render(solution[idx])}\n")
    if cfg.stats:
        out.write("% " + ", ".join(f"{k} {v}" for k, v in stats.items()) + "\n")
    if cfg.dump_equations:
        out.write(system.to_json(domain))
    return EXIT_OK


def cmd_check(cfg: RunConfig, out) -> int:
    program, graph, domain, thetas, _, solution = _analyze(cfg)
    samples = _samples(cfg, program, domain, thetas)
    exploration = reachable(graph, samples, cfg.depth, cfg.max_states)
    report = soundness_check(project_edges(exploration.states), solution.values, domain, cfg.semantics)
    if cfg.format == "json":
        out.write(_dump({
            "schema": 1,
            "semantics": cfg.semantics,
            "violations": [v.to_json(cfg.semantics) for v in report.violations],
            "truncated": exploration.truncated,
            "states": len(exploration.states),
        }))
    else:
        for v in report.violations:
            out.write(f"violation at {v.index}: {format_subst(v.substitution)} not described by {v.abstract}\n")
        out.write(f"{len(report.violations)} violations ({report.checked} substitutions checked, "
                  f"{len(exploration.states)} states{', truncated' if exploration.truncated else ''})\n")
    return EXIT_OK if report.ok else EXIT_FINDINGS


def cmd_trace(cfg: RunConfig, out) -> int:
    program, graph = _load(cfg)
    domain = DOMAINS[cfg.domain]()
    thetas = _thetas(program, domain, cfg)
    samples = _samples(cfg, program, domain, thetas)
    exploration = reachable(graph, samples, cfg.depth, cfg.max_states)
    answers = final_answers(program, exploration)
    if cfg.format == "json":
        out.write(_dump({
            "schema": 1,
            "states": [[{"edge": str(it.edge), "substitution": format_subst(it.theta)} for it in s]
                       for s in exploration.states],
            "answers": [{"query": k, "substitution": format_subst(theta)} for k, theta in answers],
            "truncated": exploration.truncated,
            "dead": len(exploration.dead),
        }))
        return EXIT_OK
    for n, state in enumerate(exploration.states):
        out.write(f"{n}: {render_state(state)}\n")
    for k, theta in answers:
        out.write(f"answer {k}: {bindings_text(theta) or 'true'}\n")
    out.write(f"% {len(exploration.states)} states, {len(answers)} answers, {len(exploration.dead)} dead"
              f"{', truncated' if exploration.truncated else ''}\n")
    return EXIT_OK


COMMANDS = {"graph": cmd_graph, "analyze": cmd_analyze, "check": cmd_check, "trace": cmd_trace}


def _non_negative(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nlpabs", description="Abstract interpretation of normal logic programs.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("program", type=Path)
    ap.add_argument("--semantics", choices=(FLAT, DIAMOND), default=FLAT)
    ap.add_argument("--domain", choices=sorted(DOMAINS), default="groundness")
    ap.add_argument("--format", choices=("text", "json", "dot"), default="text")
    ap.add_argument("--queries", type=Path)
    ap.add_argument("--depth", type=_non_negative, default=DEFAULT_DEPTH)
    ap.add_argument("--max-states", type=_non_negative, default=DEFAULT_MAX_STATES)
    ap.add_argument("--stats", action="store_true")
    ap.add_argument("--dump-equations", action="store_true")
    return ap


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            ns = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = RunConfig(
        command=ns.command, program=ns.program, semantics=ns.semantics, domain=ns.domain,
        format=ns.format, queries=ns.queries, depth=ns.depth, max_states=ns.max_states,
        stats=ns.stats, dump_equations=ns.dump_equations,
    )
    if cfg.format == "dot" and cfg.command != "graph":
        err.write("nlpabs: error: --format dot only applies to 'graph'\n")
        return EXIT_INPUT
    if cfg.max_states < 1:
        err.write("nlpabs: error: --max-states must be at least 1\n")
        return EXIT_INPUT
    try:
        return COMMANDS[cfg.command](cfg, out)
    except InputError as exc:
        err.write(f"nlpabs: error: {exc}\n")
        return EXIT_INPUT
    except SolverError as exc:
        err.write(f"nlpabs: solver failure: {exc}\n")
        return EXIT_FINDINGS


def main_exit() -> None:
    try:
        code = main()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main_exit()
