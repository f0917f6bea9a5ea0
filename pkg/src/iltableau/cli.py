"""Command-line front end.

Exit codes: 0 when the verdict is the one asked for (closed for ``--prove``,
open for ``--sat``), 1 for the opposite verdict, 2 when a bound tripped,
3 when the run is unsupported, 64 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .formula import FormulaSyntaxError, Neg, parse, render
from .frames import FrameCondition, FrameSyntaxError, load_horn, preset
from .output import render_tableau, result_json
from .semantics import write_model
from .tableau import Bounds, Status, run

EX_USAGE = 64


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    mode: str                 # "prove" or "sat"
    formulas: tuple
    condition: FrameCondition
    bounds: Bounds
    output: str = "text"
    dump_tableau: bool = False
    seed: int = 0
    out: Path | None = None


def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _ArgumentParser(prog="iltableau",
                        description="Labelled tableau prover for Horn interpretability logics.")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--prove", metavar="FORMULA", help="try to prove FORMULA")
    mode.add_argument("--sat", metavar="FORMULAS",
                      help="check satisfiability of ';'-separated formulas")
    logic = p.add_mutually_exclusive_group()
    logic.add_argument("--logic", type=str.lower, choices=["il", "ilm", "ilp"],
                       help="preset frame condition (default il)")
    logic.add_argument("--frames", metavar="FILE", help="Horn frame condition file")
    p.add_argument("--max-stages", type=_positive, default=Bounds.max_stages)
    p.add_argument("--max-labels", type=_positive, default=Bounds.max_labels_per_branch,
                   help="label budget per branch")
    p.add_argument("--output", choices=["text", "dot", "json"], default="text")
    p.add_argument("--dump-tableau", action="store_true", help="include the tableau in the output")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    p.add_argument("--seed", type=int, default=0,
                   help="recorded in the output; the search itself is deterministic")
    return p


def config_from_args(ns) -> RunConfig:
    if ns.frames:
        try:
            condition = load_horn(ns.frames)
        except OSError as exc:
            raise UsageError(f"cannot read frames file: {exc}") from None
        except FrameSyntaxError as exc:
            raise UsageError(f"bad frames file: {exc}") from None
    else:
        condition = preset(ns.logic or "il")
    try:
        if ns.prove is not None:
            mode, formulas = "prove", (parse(ns.prove),)
        else:
            parts = [s for s in ns.sat.split(";") if s.strip()]
            if not parts:
                raise UsageError("--sat needs at least one formula")
            mode, formulas = "sat", tuple(parse(s) for s in parts)
    except FormulaSyntaxError as exc:
        raise UsageError(f"bad formula: {exc}") from None
    return RunConfig(mode, formulas, condition,
                     Bounds(ns.max_stages, ns.max_labels), ns.output, ns.dump_tableau,
                     ns.seed, Path(ns.out) if ns.out else None)


def exit_code(mode: str, status: Status) -> int:
    if status is Status.EXHAUSTED:
        return 2
    if status is Status.UNSUPPORTED:
        return 3
    wanted = Status.CLOSED if mode == "prove" else Status.OPEN
    return 0 if status is wanted else 1


def execute(cfg: RunConfig) -> tuple[int, str]:
    gamma = [Neg(cfg.formulas[0])] if cfg.mode == "prove" else list(cfg.formulas)
    result = run(gamma, cfg.condition, cfg.bounds)
    text = "; ".join(render(f) for f in cfg.formulas)
    if cfg.output == "json":
        extra = {"mode": cfg.mode, "seed": cfg.seed}
        if cfg.dump_tableau:
            extra["tableau"] = render_tableau(result.tableau, "text")
        body = result_json(result, text, cfg.condition.name, **extra)
    elif cfg.output == "dot":
        body = render_tableau(result.tableau, "dot")
    else:
        lines = [
            f"status: {result.status.value}",
            f"mode: {cfg.mode}",
            f"logic: {cfg.condition.name}",
            f"formula: {text}",
            f"stages: {result.stages}",
            f"labels: {result.labels}",
        ]
        if result.reason:
            lines.append(f"reason: {result.reason}")
        body = "\n".join(lines) + "\n"
        if result.model is not None:
            body += "countermodel:\n" if cfg.mode == "prove" else "model:\n"
            body += write_model(result.model)
        if cfg.dump_tableau:
            body += "tableau:\n" + render_tableau(result.tableau, "text")
    return exit_code(cfg.mode, result.status), body


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except UsageError as exc:
        print(f"iltableau: error: {exc}", file=sys.stderr)
        return EX_USAGE
    code, body = execute(cfg)
    if cfg.out is not None:
        cfg.out.write_text(body, encoding="utf-8")
    else:
        sys.stdout.write(body)
    return code


if __name__ == "__main__":
    sys.exit(main())
