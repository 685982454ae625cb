"""Command-line entry point: ``cito analyze | chains | order | compare | gen``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from .cfg import PathAnalysis, extract_statements
from .coupling import Weights, ocplx
from .eord import CHAIN_LENGTHS, Eord, build_eord, dumps_eord, relationship_stats
from .frontend import MinijSyntaxError, lower, parse_files
from .model import ModelError, ProgramModel, load_pmif, save_pmif
from .orders import STRATEGIES, CycleLimitError, StuckCycleError, run_strategy
from .report import RunReport, StrategyRun
from .synth import SynthSpec, generate_source, generate_synthetic

EXIT_OK, EXIT_INPUT, EXIT_ANALYSIS, EXIT_INTERNAL = 0, 1, 2, 3

HISTOGRAM_BUCKETS = ("<0.01", "0.01-0.5", "0.5", "0.5-1", "1")


class InputError(Exception):
    pass


class InvariantError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------
# input


def _expand(paths: Sequence[str]) -> list[Path]:
    out: list[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            found = sorted(p.glob("*.minij"))
            if not found:
                raise InputError(f"{p}: directory holds no .minij files")
            out.extend(found)
        elif p.exists():
            out.append(p)
        else:
            raise InputError(f"{p}: no such file")
    return out


def _guess_format(paths: list[Path]) -> str:
    return "pmif" if all(p.suffix in (".json", ".pmif") for p in paths) else "minij"


def load_model(paths: Sequence[str], fmt: Optional[str] = None) -> ProgramModel:
    files = _expand(paths)
    fmt = fmt or _guess_format(files)
    if fmt == "pmif":
        if len(files) != 1:
            raise InputError("PMIF input takes exactly one file")
        return load_pmif(files[0].read_bytes())
    name = files[0].stem if len(files) == 1 else files[0].parent.name or "program"
    return lower(parse_files(files), name=name)


def _weights(text: Optional[str]) -> Weights:
    if text is None:
        return Weights()
    try:
        return Weights.parse(text)
    except ValueError as e:
        raise InputError(f"--weights: {e}") from None


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _eord(model: ProgramModel, args) -> Eord:
    return build_eord(model, args.max_chain_len, _weights(args.weights), transitive=not args.no_transitive)


# --------------------------------------------------------------------------
# commands


def probability_histogram(probabilities) -> dict[str, int]:
    counts = Counter()
    for t in probabilities:
        if t < 0.01:
            counts["<0.01"] += 1
        elif t < 0.5:
            counts["0.01-0.5"] += 1
        elif t == 0.5:
            counts["0.5"] += 1
        elif t < 1:
            counts["0.5-1"] += 1
        else:
            counts["1"] += 1
    return {b: counts[b] for b in HISTOGRAM_BUCKETS}


def analyze(model: ProgramModel, max_len: int = 3, weights: Weights = Weights(), transitive: bool = True) -> tuple[dict, Eord]:
    eord = build_eord(model, max_len, weights, transitive=transitive)
    lengths = Counter(len(ch) for ch in eord.chains)
    report = {
        "model": model.name,
        "max_chain_len": max_len,
        **relationship_stats(eord),
        "chains_by_length": {str(k): lengths.get(k, 0) for k in CHAIN_LENGTHS},
        "chain_probability_histogram": probability_histogram(ch.chain_probability for ch in eord.chains),
    }
    return report, eord


def cmd_analyze(args) -> int:
    model = load_model(args.input, args.format)
    report, eord = analyze(model, args.max_chain_len, _weights(args.weights), not args.no_transitive)
    if args.eord_out:
        Path(args.eord_out).write_text(dumps_eord(eord, args.eord_format))
    if args.table:
        lines = [f"{k:<28} {v}" for k, v in report.items() if not isinstance(v, dict)]
        for k in ("chains_by_length", "chain_probability_histogram"):
            lines.append(k + ": " + "  ".join(f"{b}={n}" for b, n in report[k].items()))
        _write("\n".join(lines) + "\n", args.out)
    else:
        _write(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


def explain_chains(model: ProgramModel, eord: Eord) -> str:
    analysis = PathAnalysis(model)
    lines = []
    for ch in eord.chains:
        lines.append(f"{ch.describe()}  t={ch.chain_probability:g}")
        for op, pc in zip(ch.call_ops, ch.op_probabilities):
            lines.append(f"  {op}  pc={pc:g}")
            for s in extract_statements(model, op):
                sp = analysis.statement_probability(s)
                cond = " && ".join(c.describe() for c in sp.path_condition) or "true"
                lines.append(f"    {s.cls}.{s.method} line {s.line}: p={sp.probability:g}  when {cond}")
    return "\n".join(lines) + ("\n" if lines else "")


def cmd_chains(args) -> int:
    model = load_model(args.input, args.format)
    eord = build_eord(model, args.max_chain_len, _weights(args.weights))
    if args.explain:
        _write(explain_chains(model, eord), args.out)
    else:
        _write("".join(f"{ch.describe()}  t={ch.chain_probability:g}\n" for ch in eord.chains), args.out)
    return EXIT_OK


def _check_order(eord: Eord, order: Sequence[str]) -> None:
    if sorted(order) != sorted(eord.nodes) or len(set(order)) != len(order):
        raise InvariantError(f"strategy returned a non-permutation: {list(order)}")


def _run_once(model: ProgramModel, strategy: str, args, seed: int) -> StrategyRun:
    start = time.perf_counter()
    eord = _eord(model, args)
    order = run_strategy(
        strategy, eord, break_any=args.break_any, cycle_cap=args.cycle_cap,
        seed=seed, iterations=args.iterations, sa_temp=args.sa_temp,
    )
    elapsed = time.perf_counter() - start
    _check_order(eord, order.sequence)
    return StrategyRun(strategy, order.sequence, ocplx(eord, order), elapsed, order.metadata)


def _settings(args, strategies: list[str]) -> dict:
    return {
        "strategies": strategies,
        "max_chain_len": args.max_chain_len,
        "weights": list(_weights(args.weights).as_tuple()),
        "transitive": not args.no_transitive,
        "break_any": args.break_any,
        "cycle_cap": args.cycle_cap,
        "seed": args.seed,
        "iterations": args.iterations,
        "sa_temp": args.sa_temp,
        "repeats": getattr(args, "repeats", 1),
    }


def _stamp(args) -> Optional[str]:
    return None if args.no_timestamp else datetime.now(timezone.utc).isoformat(timespec="seconds")


def _emit(report: RunReport, args) -> None:
    _write(report.table() if args.table else report.dumps(), args.out)


def cmd_order(args) -> int:
    model = load_model(args.input, args.format)
    run = _run_once(model, args.strategy, args, args.seed)
    report = RunReport(
        "order", list(args.input), _settings(args, [args.strategy]), {args.strategy: [run]},
        rt_base=None, timing=not args.no_timestamp, timestamp=_stamp(args),
    )
    _emit(report, args)
    return EXIT_OK


def parse_strategies(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in names if s not in STRATEGIES]
    if bad or not names:
        raise InputError(f"--strategies: unknown {bad or 'empty list'}; choose from {', '.join(STRATEGIES)}")
    return list(dict.fromkeys(names))


def compare(model: ProgramModel, strategies: list[str], args) -> RunReport:
    if args.repeats < 1:
        raise InputError("--repeats must be >= 1")
    if args.rt_base not in strategies:
        strategies = strategies + [args.rt_base]
    jobs = [(s, k) for s in strategies for k in range(args.repeats)]

    def job(sk):
        s, k = sk
        return _run_once(model, s, args, args.seed + k if s == "ria" else args.seed)

    if args.serial:
        results = [job(j) for j in jobs]
    else:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(job, jobs))
    runs: dict[str, list[StrategyRun]] = {s: [] for s in strategies}
    for (s, _), r in zip(jobs, results):
        runs[s].append(r)
    report = RunReport(
        "compare", list(args.input), _settings(args, strategies), runs,
        rt_base=args.rt_base, timing=not args.no_timestamp, timestamp=_stamp(args),
    )
    report.compute_wilcoxon()
    for name in runs:
        if report.rt(name) is not None and name == args.rt_base and report.rt(name) != 1.0:
            raise InvariantError("runtime ratio of the base strategy is not 1")
    return report


def cmd_compare(args) -> int:
    model = load_model(args.input, args.format)
    _emit(compare(model, parse_strategies(args.strategies), args), args)
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = SynthSpec(
        classes=args.classes, edge_density=args.density, branch_density=args.branch_density,
        chain_fraction=args.chain_fraction, seed=args.seed,
    )
    if args.format == "pmif":
        data = save_pmif(generate_synthetic(spec))
        if args.out is None:
            sys.stdout.buffer.write(data)
        else:
            Path(args.out).write_bytes(data)
    else:
        _write(generate_source(spec), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cito", description="Class integration test orders from transitive relationships.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, strategies: bool = False):
        sp.add_argument("--input", action="extend", nargs="+", required=True,
                        help="minij source files, a directory of them, or one PMIF file")
        sp.add_argument("--format", choices=("pmif", "minij"), help="input format (default: by extension)")
        sp.add_argument("--max-chain-len", type=int, choices=CHAIN_LENGTHS, default=3)
        sp.add_argument("--weights", help="wa,wm,wt summing to 1 (default: 1/3 each)")
        sp.add_argument("--no-transitive", action="store_true", help="use direct dependencies only")
        sp.add_argument("--out", help="write output here instead of stdout")
        mode = sp.add_mutually_exclusive_group()
        mode.add_argument("--json", action="store_true", help="JSON output (default)")
        mode.add_argument("--table", action="store_true", help="aligned text table")
        if strategies:
            sp.add_argument("--break-any", action="store_true", help="allow removing inheritance/aggregation edges")
            sp.add_argument("--cycle-cap", type=int, default=1_000_000)
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--iterations", type=int, default=1000, help="random iterative search steps")
            sp.add_argument("--sa-temp", type=float, default=None, help="enable annealing from this temperature")
            sp.add_argument("--no-timestamp", action="store_true", help="omit timestamp and timings")

    a = sub.add_parser("analyze", help="relationship statistics")
    common(a)
    a.add_argument("--eord-out", help="also write the extended diagram here")
    a.add_argument("--eord-format", choices=("json", "dot"), default="json")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("chains", help="list transitive relationship chains")
    common(c)
    c.add_argument("--explain", action="store_true", help="show statements and path conditions per hop")
    c.set_defaults(func=cmd_chains)

    o = sub.add_parser("order", help="generate one test order")
    common(o, strategies=True)
    o.add_argument("--strategy", choices=STRATEGIES, default="feedback")
    o.set_defaults(func=cmd_order)

    m = sub.add_parser("compare", help="compare strategies over repeated runs")
    common(m, strategies=True)
    m.add_argument("--strategies", default=",".join(STRATEGIES))
    m.add_argument("--repeats", type=int, default=30)
    m.add_argument("--rt-base", choices=STRATEGIES, default="feedback")
    m.add_argument("--serial", action="store_true", help="run sequentially for cleaner timings")
    m.set_defaults(func=cmd_compare)

    g = sub.add_parser("gen", help="write a synthetic program")
    g.add_argument("--classes", type=int, default=10)
    g.add_argument("--density", type=float, default=0.2)
    g.add_argument("--branch-density", type=float, default=0.5)
    g.add_argument("--chain-fraction", type=float, default=0.5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=("pmif", "minij"), default="minij")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # usage errors and --help
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, MinijSyntaxError, ModelError, OSError, ValueError) as e:
        print(f"cito: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (CycleLimitError, StuckCycleError) as e:
        print(f"cito: analysis error: {e}", file=sys.stderr)
        return EXIT_ANALYSIS
    except Exception as e:  # noqa: BLE001
        print(f"cito: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
