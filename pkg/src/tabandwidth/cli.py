"""Command-line driver: automaton or graph in, bandwidth report out.

Exit codes: 0 success, 2 parse or validation error, 3 non-meagerness witness
found, 4 root finder did not converge, 5 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import yaml

from . import polynomials as P
from .barycentric import AbstractState, build_abstraction
from .model import ParseError, ValidationError, as_rational, format_rational, parse_automaton
from .orbit import meagerness_witness_search
from .polynomials import RootFindingError
from .regions import EmptyLanguageError, RegionSplitAutomaton, UnboundedRegionError, region_split
from .stg import (
    BudgetExceeded,
    GrowthResult,
    SimplyTimedGraph,
    adjacency_matrix,
    characteristic,
    format_label,
    growth_pipeline,
    oracle_growth_estimate,
    parse_stg,
)

EXIT_OK, EXIT_INPUT, EXIT_WITNESS, EXIT_NUMERIC, EXIT_BUDGET = 0, 2, 3, 4, 5
STAGES = ("rsta", "abstraction", "zero_free", "deterministic")


class StageError(RuntimeError):
    def __init__(self, stage: str, exit_code: int, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.exit_code = exit_code


@dataclass
class Options:
    mode: str | None = None  # "ta", "stg", or None to guess from the document
    oracle_horizons: list[Fraction] = field(default_factory=list)
    tolerance: float = 1e-12
    assume_meager: bool = False
    witness_bound: int = 6
    budget: int = 1_000_000


@dataclass
class Artifacts:
    rsta: RegionSplitAutomaton | None = None
    abstraction: SimplyTimedGraph | None = None
    zero_free: SimplyTimedGraph | None = None
    deterministic: SimplyTimedGraph | None = None
    growth: GrowthResult | None = None


@dataclass
class AnalysisReport:
    data: dict
    exit_code: int = EXIT_OK

    @property
    def bandwidth(self) -> float | None:
        return self.data.get("bandwidth")


def _guess_mode(text: str) -> str:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError:
        return "ta"
    return "stg" if isinstance(doc, dict) and "transitions" in doc else "ta"


def _graph_stats(g: SimplyTimedGraph) -> dict:
    return {"states": len(g.states), "transitions": len(g.transitions)}


def _poly_data(p) -> dict:
    return {
        "z_form": str(p),
        "scale": p.scale,
        "zeta_coefficients": list(p.to_zeta()) or [0],
        "zeta_form": P.format_poly(p.to_zeta()),
    }


def _number(z):
    if z is None:
        return None
    if isinstance(z, complex):
        return {"re": z.real, "im": z.imag}
    return float(z)


def run_pipeline(text: str, options: Options | None = None) -> tuple[AnalysisReport, Artifacts]:
    """Run every stage on a document; stage failures raise StageError."""
    options = options or Options()
    mode = options.mode or _guess_mode(text)
    art = Artifacts()
    timings: dict[str, float] = {}
    data: dict = {"input": {"sha256": hashlib.sha256(text.encode()).hexdigest(), "mode": mode}}

    def stage(name):
        timings[name] = time.perf_counter()

    def done(name):
        timings[name] = round(time.perf_counter() - timings[name], 6)

    if mode == "ta":
        stage("parse")
        try:
            automaton = parse_automaton(text)
        except (ParseError, ValidationError) as exc:
            raise StageError("parse", EXIT_INPUT, str(exc)) from exc
        done("parse")
        stage("region_split")
        try:
            art.rsta = region_split(automaton)
        except (ValidationError, EmptyLanguageError, UnboundedRegionError) as exc:
            raise StageError("region_split", EXIT_INPUT, str(exc)) from exc
        done("region_split")
        data["region_split"] = {
            "locations": len(art.rsta.locations),
            "edges": len(art.rsta.edges),
            "final": len(art.rsta.final),
        }
        if options.assume_meager:
            data["witness"] = {"searched": False, "bound": None, "found": None,
                               "note": "meagerness assumed per user flag"}
        else:
            stage("witness")
            witness = meagerness_witness_search(art.rsta, options.witness_bound)
            done("witness")
            if witness is not None:
                data["witness"] = {"searched": True, "bound": options.witness_bound,
                                   "found": witness.to_data(), "note": "automaton is not meager"}
                data["bandwidth"] = None
                data["timings"] = timings
                return AnalysisReport(data, EXIT_WITNESS), art
            data["witness"] = {
                "searched": True, "bound": options.witness_bound, "found": None,
                "note": f"no witness up to bound {options.witness_bound}; meagerness assumed",
            }
        stage("abstraction")
        art.abstraction = build_abstraction(art.rsta)
        done("abstraction")
        dims: dict[str, int] = {}
        for s in art.abstraction.states:
            dims[str(s.dimension)] = dims.get(str(s.dimension), 0) + 1
        data["abstraction"] = {**_graph_stats(art.abstraction), "states_per_dimension": dims}
    elif mode == "stg":
        stage("parse")
        try:
            art.abstraction = parse_stg(text)
        except ValidationError as exc:
            raise StageError("parse", EXIT_INPUT, str(exc)) from exc
        done("parse")
        data["abstraction"] = _graph_stats(art.abstraction)
    else:
        raise StageError("parse", EXIT_INPUT, f"unknown mode {mode!r}")

    stage("growth")
    try:
        growth, graphs = growth_pipeline(art.abstraction, options.tolerance)
    except RootFindingError as exc:
        raise StageError("roots", EXIT_NUMERIC, f"{exc}; residuals {exc.residuals}") from exc
    done("growth")
    art.zero_free, art.deterministic, art.growth = graphs.zero_free, graphs.deterministic, growth
    data["zero_free"] = _graph_stats(graphs.zero_free)
    data["deterministic"] = _graph_stats(graphs.deterministic)
    n = art.abstraction.common_denominator()
    data["denominator"] = n
    data["epsilon_bound"] = {"value": format_rational(Fraction(1, 2 * n)), "float": 1 / (2 * n)}
    data["characteristic"] = _poly_data(growth.characteristic)
    data["zero_free_characteristic"] = _poly_data(characteristic(adjacency_matrix(graphs.zero_free)))
    data["roots"] = [
        {"re": r.value.real, "im": r.value.imag, "modulus": r.modulus,
         "multiplicity": r.multiplicity, "residual": r.residual}
        for r in sorted(growth.roots, key=lambda r: (r.modulus, r.value.real, r.value.imag))
    ]
    data["roots_variable"] = f"zeta with z = zeta^{growth.scale}"
    data["z0"] = _number(growth.z0)
    data["bandwidth"] = float(growth.beta)
    data["checks"] = growth.checks

    if options.oracle_horizons:
        stage("oracle")
        try:
            estimates = oracle_growth_estimate(graphs.deterministic, options.oracle_horizons, options.budget)
        except BudgetExceeded as exc:
            raise StageError("oracle", EXIT_BUDGET, str(exc)) from exc
        done("oracle")
        data["oracle"] = [
            {"T": format_rational(e.horizon), "upsilon": e.upsilon, "rate": e.rate, "slope": e.slope}
            for e in estimates
        ]
    data["timings"] = timings
    return AnalysisReport(data), art


# --------------------------------------------------------------------------
# output

def emit_report(report: AnalysisReport, fmt: str = "human") -> str:
    data = report.data
    if fmt == "structured":
        return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)
    if fmt != "human":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = [f"input: {data['input']['mode']} document, sha256 {data['input']['sha256'][:16]}"]
    if "region_split" in data:
        rs = data["region_split"]
        lines.append(f"region-split form: {rs['locations']} locations, {rs['edges']} edges")
    w = data.get("witness")
    if w is not None:
        if w["found"]:
            f = w["found"]
            lines.append(
                f"non-meagerness witness: edge path {f['edges']} from {f['location']}; "
                f"vertex {tuple(f['vertex_pair'][0])} returns to itself in {f['paths']} ways "
                f"after {f['power']} repetition(s)"
            )
            lines.append("no bandwidth reported: the analysis only applies to meager automata")
            return "\n".join(lines) + "\n"
        lines.append(f"witness search: {w['note']}")
    if "abstraction" in data:
        ab = data["abstraction"]
        per_dim = ab.get("states_per_dimension")
        extra = f" (per dimension {per_dim})" if per_dim else ""
        lines.append(f"abstraction: {ab['states']} states{extra}, {ab['transitions']} transitions")
    if "zero_free" in data:
        lines.append(f"0-free form: {data['zero_free']['states']} states, {data['zero_free']['transitions']} transitions")
        lines.append(f"deterministic form: {data['deterministic']['states']} states, "
                     f"{data['deterministic']['transitions']} transitions")
        ch = data["characteristic"]
        lines.append(f"characteristic: {ch['z_form']}   [in zeta, z = zeta^{ch['scale']}: {ch['zeta_form']}]")
        lines.append(f"0-free characteristic: {data['zero_free_characteristic']['z_form']}")
        for r in data["roots"]:
            lines.append(f"  root {r['re']:+.12f}{r['im']:+.12f}i  |.|={r['modulus']:.12f}  "
                         f"mult {r['multiplicity']}  residual {r['residual']:.1e}")
        z0 = data["z0"]
        lines.append(f"z0: {'none (acyclic)' if z0 is None else z0}")
        lines.append(f"bandwidth: {data['bandwidth']:.12g} bits per time unit")
        lines.append(
            f"valid for precision eps < {data['epsilon_bound']['value']} "
            f"(delays share denominator {data['denominator']})"
        )
    for row in data.get("oracle", []):
        lines.append(f"  oracle T={row['T']}: upsilon={row['upsilon']}  log2/T={row['rate']:.6f}  "
                     f"slope={row['slope']:.6f}")
    return "\n".join(lines) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _state_label(s) -> str:
    if isinstance(s, AbstractState):
        coords = ",".join(format_rational(v) for v in s.point.values)
        return f"{s.location.base} [{s.location.start_region.describe()}]\\ndim {s.dimension} ({coords})"
    return str(s)


def graph_to_dot(g: SimplyTimedGraph, name: str = "stg", names: dict | None = None) -> str:
    index = {s: i for i, s in enumerate(g.states)}
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for s, i in index.items():
        label = names[s] if names and s in names else _state_label(s)
        lines.append(f'  n{i} [label="{_dot_escape(label)}"];')
    for t in g.transitions:
        lines.append(
            f'  n{index[t.origin]} -> n{index[t.dest]} '
            f'[label="{format_rational(t.delay)} {_dot_escape(format_label(t.label))}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def rsta_to_dot(r: RegionSplitAutomaton) -> str:
    index = {loc: i for i, loc in enumerate(r.locations)}
    lines = ["digraph rsta {", "  rankdir=LR;"]
    for loc, i in index.items():
        shape = "doublecircle" if loc in r.final else "circle"
        style = ', style=bold' if loc == r.initial else ""
        label = f"{loc.base}\\n{loc.start_region.describe()}"
        lines.append(f'  n{i} [label="{_dot_escape(label)}", shape={shape}{style}];')
    for e in r.edges:
        resets = ",".join(sorted(e.resets))
        label = f"{e.label} @ {e.firing_region.describe()} / {{{resets}}}"
        lines.append(f'  n{index[e.source]} -> n{index[e.target]} [label="{_dot_escape(label)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(stage: str, artifacts: Artifacts, path: str | Path | None = None) -> str:
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}; choose from {', '.join(STAGES)}")
    obj = getattr(artifacts, stage)
    if obj is None:
        raise StageError("dump", EXIT_INPUT, f"stage {stage} was not reached")
    if stage == "rsta":
        text = rsta_to_dot(obj)
    elif stage == "deterministic":
        order = {s: i for i, s in enumerate(artifacts.zero_free.states)}
        names = {s: "{" + ",".join(str(i) for i in sorted(order[q] for q in s)) + "}" for s in obj.states}
        text = graph_to_dot(obj, stage, names)
    else:
        text = graph_to_dot(obj, stage)
    if path is not None:
        Path(path).write_text(text)
    return text


# --------------------------------------------------------------------------
# entry point

def _parse_dump(value: str) -> tuple[str, str]:
    stage, sep, path = value.partition("=")
    if not sep or stage not in STAGES or not path:
        raise argparse.ArgumentTypeError(f"expected <stage>=<path> with stage in {', '.join(STAGES)}")
    return stage, path


def _parse_horizons(value: str) -> list[Fraction]:
    try:
        return [as_rational(v) for v in value.replace(",", " ").split()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad horizon list {value!r}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tabandwidth",
        description="Bandwidth of meager deterministic timed automata and of simply-timed graphs.",
    )
    p.add_argument("--input", required=True, help="automaton or graph document ('-' for stdin)")
    p.add_argument("--mode", choices=("ta", "stg"), help="input kind (guessed from the document if omitted)")
    p.add_argument("--oracle-T", dest="oracle_T", type=_parse_horizons, default=[],
                   help="horizons for the brute-force growth estimate, e.g. '5,10,15'")
    p.add_argument("--dump", action="append", type=_parse_dump, default=[], metavar="STAGE=PATH",
                   help=f"write a DOT graph of a stage ({', '.join(STAGES)}); repeatable")
    p.add_argument("--tolerance", type=float, default=1e-12, help="relative residual allowed for roots")
    p.add_argument("--assume-meager", action="store_true", help="skip the non-meagerness witness search")
    p.add_argument("--witness-bound", type=int, default=6, help="longest cycle explored by the witness search")
    p.add_argument("--report", choices=("human", "structured"), default="human")
    p.add_argument("--budget", type=int, default=1_000_000, help="cap on oracle enumeration states")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text()
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    options = Options(
        mode=args.mode,
        oracle_horizons=args.oracle_T,
        tolerance=args.tolerance,
        assume_meager=args.assume_meager,
        witness_bound=args.witness_bound,
        budget=args.budget,
    )
    try:
        report, art = run_pipeline(text, options)
        for stage, path in args.dump:
            export_dot(stage, art, path)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    sys.stdout.write(emit_report(report, args.report))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
