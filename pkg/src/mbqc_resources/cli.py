"""Command-line entry point.

Exit status: 0 success, 1 a certificate or check failed, 2 bad input
(including usage errors and exceeded resource caps). Structured output is
JSON with sorted keys, scans are CSV and graphs can also be written as DOT.
Nothing is read from the environment; every setting is a flag.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import graph as graph_mod
from .calculus import MeasurementPattern, apply_pattern
from .errors import InputError, ResourceError
from .graph import Graph, LatticeSpec, lattice

log = logging.getLogger("mbqc_resources")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
DEFAULT_SEED = 1234
KIND_ALIASES = {"hex": "hexagonal", "tri": "triangular", "kag": "kagome", "square": "grid"}


@dataclass
class CommandConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    output: str | None = None
    params: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None
    verbosity: int = 0


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # usage errors -> exit 2 with usage text
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _dump(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
        log.info("wrote %s", path)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def _kind(text: str) -> str:
    return KIND_ALIASES.get(text, text)


def _load_graph(args: argparse.Namespace) -> Graph:
    if getattr(args, "lattice", None):
        kind, _, dims = args.lattice.partition(":")
        return lattice(LatticeSpec(_kind(kind), tuple(_int_list(dims))))
    if not getattr(args, "input", None):
        raise InputError("give a graph with -i FILE or --lattice KIND:DIMS")
    try:
        text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror}") from None
    return graph_mod.from_json(text)


def _add_graph_input(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("-i", "--input", help="graph JSON file ('-' for stdin)")
    g.add_argument("--lattice", metavar="KIND:DIMS", help="generate the input instead, e.g. grid:3,3")


def _load_pattern(args: argparse.Namespace) -> MeasurementPattern:
    if args.pattern:
        try:
            return MeasurementPattern.from_json(Path(args.pattern).read_text())
        except OSError as exc:
            raise InputError(f"cannot read {args.pattern}: {exc.strerror}") from None
    steps = []
    for item in (args.measure or "").split(","):
        if not item.strip():
            continue
        parts = item.split(":")
        if len(parts) not in (2, 3):
            raise InputError(f"measurement {item!r} must be V:BASIS or V:BASIS:OUTCOME")
        try:
            steps.append((int(parts[0]), parts[1].upper(), int(parts[2]) if len(parts) == 3 else 1))
        except ValueError:
            raise InputError(f"measurement {item!r} must be V:BASIS or V:BASIS:OUTCOME") from None
    return MeasurementPattern.of(steps)


# -- subcommands -------------------------------------------------------------


def cmd_gen(args: argparse.Namespace) -> int:
    g = lattice(LatticeSpec(_kind(args.kind), tuple(_int_list(args.dims))))
    if args.format == "dot":
        _emit(graph_mod.to_dot(g), args.output)
    else:
        _emit(graph_mod.to_json(g) + "\n", args.output)
    if args.dot:
        Path(args.dot).write_text(graph_mod.to_dot(g))
    return EXIT_OK


def cmd_rewrite(args: argparse.Namespace) -> int:
    g = _load_graph(args)
    h, record, _ = apply_pattern(g, _load_pattern(args))
    _emit(_dump({"graph": graph_mod.to_dict(h), "corrections": record.to_dict()}), args.output)
    if args.dot:
        Path(args.dot).write_text(graph_mod.to_dot(h))
    return EXIT_OK


def cmd_cutrank(args: argparse.Namespace) -> int:
    from .width import cut_rank

    g = _load_graph(args)
    subset = _int_list(args.subset)
    bad = [v for v in subset if not 0 <= v < g.n]
    if bad:
        raise InputError(f"subset vertices {bad} out of range [0, {g.n})")
    _emit(f"{cut_rank(g, subset)}\n", args.output)
    return EXIT_OK


def cmd_rankwidth(args: argparse.Namespace) -> int:
    from .width import rank_width

    g = _load_graph(args)
    res = rank_width(g, method=args.method, cap=args.cap)
    if args.json:
        _emit(_dump(res.to_dict()), args.output)
    else:
        _emit(f"{res.value}\n{res.witness.to_json()}\n", args.output)
    if args.dot:
        Path(args.dot).write_text(res.witness.to_dot())
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    from .width import grid_lower_bound, treewidth_upper_bound

    if args.k is None and args.treewidth is None:
        raise InputError("give --k and/or --treewidth")
    doc: dict[str, Any] = {}
    if args.k is not None:
        doc["grid_lower_bound"] = {"k": args.k, "value": grid_lower_bound(args.k)}
    if args.treewidth is not None:
        doc["treewidth_upper_bound"] = {"treewidth": args.treewidth, "value": treewidth_upper_bound(args.treewidth)}
    _emit(_dump(doc), args.output)
    return EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    from . import reduction as red

    kind = _kind(args.source)
    if args.route == "chain":
        if kind != "hexagonal":
            raise InputError("the chained route starts from the hexagonal lattice")
        report = red.chain_route(args.k)
        _emit(json.dumps(report.to_dict(), sort_keys=True) + "\n", args.output)
        print(f"chain k={args.k}: {'pass' if report.passed else 'FAIL'}", file=sys.stderr)
        return EXIT_OK if report.passed else EXIT_FAIL
    if args.dims:
        spec = LatticeSpec(kind, tuple(_int_list(args.dims)))
        src = lattice(spec)
        space = red.SearchSpace(kind=kind, budget=args.budget, max_measured_fraction=args.max_measured)
        pattern = red.search_pattern(src, args.k, space)
        if pattern is None:
            print(f"no pattern found on {kind} {spec.dims} for k={args.k}", file=sys.stderr)
            return EXIT_FAIL
        cert = red.verify_reduction(src, pattern, args.k, source_spec=spec)
    else:
        cert = red.certify_asset(kind, args.k)
    _emit(cert.to_json() + "\n", args.output)
    print(f"{kind} -> grid({args.k},{args.k}): {'pass' if cert.passed else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if cert.passed else EXIT_FAIL


def cmd_verify_cert(args: argparse.Namespace) -> int:
    from .reduction import replay_certificate

    try:
        text = Path(args.input).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror}") from None
    ok, problems = replay_certificate(text)
    passed = json.loads(text).get("pass") is True
    for p in problems:
        print(f"replay: {p}", file=sys.stderr)
    _emit(_dump({"replays": ok, "pass": passed, "problems": problems}), args.output)
    return EXIT_OK if ok and passed else EXIT_FAIL


def cmd_le(args: argparse.Namespace) -> int:
    from .localizable import pauli_le_pair

    g = _load_graph(args)
    pair = _int_list(args.pair)
    if len(pair) != 2:
        raise InputError("--pair takes two vertices, e.g. 0,3")
    _emit(_dump(pauli_le_pair(g, pair[0], pair[1], cap=args.cap).to_dict()), args.output)
    return EXIT_OK


def cmd_nle(args: argparse.Namespace) -> int:
    from .localizable import n_le

    _emit(_dump(n_le(_load_graph(args), cap=args.cap).to_dict()), args.output)
    return EXIT_OK


def cmd_perc_scan(args: argparse.Namespace) -> int:
    from .percolation import parse_lambda_grid, percolation_scan, scan_to_csv

    res = percolation_scan(
        _int_list(args.k), parse_lambda_grid(args.lambdas), args.trials, args.seed, threads=args.threads
    )
    _emit(scan_to_csv(res), args.output)
    return EXIT_OK


def cmd_perc_threshold(args: argparse.Namespace) -> int:
    from .percolation import SITE_THRESHOLD_SQUARE, estimate_occupation_threshold

    est = estimate_occupation_threshold(args.k, args.trials, args.seed, tol=args.tol)
    doc = {
        "k": args.k,
        "trials": args.trials,
        "seed": args.seed,
        "estimate": round(est, 6),
        "reference": SITE_THRESHOLD_SQUARE,
        "reference_note": "square-lattice site percolation threshold, calibration constant",
    }
    _emit(_dump(doc), args.output)
    return EXIT_OK


def cmd_oracle_rules(args: argparse.Namespace) -> int:
    from .oracle import verify_rule

    g = _load_graph(args)
    verts = _int_list(args.vertices) if args.vertices else list(range(g.n))
    rows = []
    for v in verts:
        for basis in args.bases.split(","):
            for outcome in (1, -1):
                rep = verify_rule(g, v, basis.strip().upper(), outcome, cap=args.cap)
                rows.append({"vertex": v, "basis": basis.strip().upper(), "outcome": outcome, **rep.to_dict()})
    ok = all(r["passed"] for r in rows)
    _emit(_dump({"all_passed": ok, "checks": rows}), args.output)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_oracle_entropy(args: argparse.Namespace) -> int:
    from .oracle import entanglement_entropy, graph_state
    from .width import cut_rank

    g = _load_graph(args)
    subset = _int_list(args.subset)
    s = entanglement_entropy(graph_state(g, cap=args.cap), subset)
    doc = {"subset": subset, "entropy_bits": round(s, 12), "cut_rank": cut_rank(g, subset)}
    _emit(_dump(doc), args.output)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mbqc-resources", description="Graph-state resource toolkit.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="log progress to stderr (repeatable)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def out(q: argparse.ArgumentParser) -> None:
        q.add_argument("-o", "--output", help="output file (default: stdout)")

    q = sub.add_parser("gen", help="generate a lattice graph")
    q.add_argument("--kind", required=True, help="path, cycle, star, grid, hexagonal (hex), triangular (tri), kagome")
    q.add_argument("--dims", required=True, help="comma-separated dimensions, e.g. 3,3 or 5")
    q.add_argument("--format", choices=("json", "dot"), default="json", help="output format (default: json)")
    q.add_argument("--dot", help="also write DOT to this file")
    out(q)
    q.set_defaults(func=cmd_gen)

    q = sub.add_parser("rewrite", help="apply a Y/Z measurement pattern to a graph")
    _add_graph_input(q)
    pg = q.add_mutually_exclusive_group(required=True)
    pg.add_argument("-p", "--pattern", help="pattern JSON file")
    pg.add_argument("--measure", help="inline pattern, e.g. 1:Y,4:Z:-1")
    q.add_argument("--dot", help="also write the rewritten graph as DOT")
    out(q)
    q.set_defaults(func=cmd_rewrite)

    q = sub.add_parser("cutrank", help="cut-rank of a vertex subset")
    _add_graph_input(q)
    q.add_argument("--subset", required=True, help="comma-separated vertices")
    out(q)
    q.set_defaults(func=cmd_cutrank)

    q = sub.add_parser("rankwidth", help="exact rank width with a witness tree")
    _add_graph_input(q)
    q.add_argument("--method", choices=("subset_dp", "enumerate"), default="subset_dp", help="solver (default: subset_dp)")
    q.add_argument("--cap", type=int, default=None, help="vertex cap (default: 16 for subset_dp, 9 for enumerate)")
    q.add_argument("--json", action="store_true", help="print one JSON document instead of value + tree")
    q.add_argument("--dot", help="write the witness tree as DOT")
    out(q)
    q.set_defaults(func=cmd_rankwidth)

    q = sub.add_parser("bounds", help="closed-form width bounds")
    q.add_argument("--k", type=int, help="grid side for the lower bound (k >= 3)")
    q.add_argument("--treewidth", type=int, help="tree width for the upper bound (>= 1)")
    out(q)
    q.set_defaults(func=cmd_bounds)

    q = sub.add_parser("reduce", help="certify a lattice -> grid(k,k) reduction")
    q.add_argument("--source", required=True, help="hexagonal (hex), triangular (tri), kagome or grid")
    q.add_argument("--k", type=int, required=True, help="target grid side")
    q.add_argument("--dims", help="search on this patch instead of using the shipped asset")
    q.add_argument("--route", choices=("direct", "chain"), default="direct", help="direct (default) or hex->tri->kagome->grid")
    q.add_argument("--budget", type=int, default=None, help="max search candidates with --dims (default: no cap)")
    q.add_argument("--max-measured", type=float, default=1.0, help="max fraction of vertices measured by the class assignment (default: 1.0)")
    out(q)
    q.set_defaults(func=cmd_reduce)

    q = sub.add_parser("verify-cert", help="replay a reduction certificate")
    q.add_argument("-i", "--input", required=True, help="certificate JSON file")
    out(q)
    q.set_defaults(func=cmd_verify_cert)

    q = sub.add_parser("le", help="Pauli-localizable entanglement of a pair")
    _add_graph_input(q)
    q.add_argument("--pair", required=True, help="two vertices, e.g. 0,3")
    q.add_argument("--cap", type=int, default=10, help="qubit cap (default: 10)")
    out(q)
    q.set_defaults(func=cmd_le)

    q = sub.add_parser("nle", help="largest subset with unit localizable entanglement")
    _add_graph_input(q)
    q.add_argument("--cap", type=int, default=10, help="qubit cap (default: 10)")
    out(q)
    q.set_defaults(func=cmd_nle)

    q = sub.add_parser("perc", help="defect percolation on deformed cluster states")
    psub = q.add_subparsers(dest="perc_command", required=True, parser_class=_Parser)
    r = psub.add_parser("scan", help="crossing frequency over lattice sizes and lambda")
    r.add_argument("--k", required=True, help="comma-separated lattice sides")
    r.add_argument("--lambda", dest="lambdas", required=True, help="lo:hi:step (inclusive) or a comma list")
    r.add_argument("--trials", type=int, default=200, help="trials per point (default: 200)")
    r.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"root seed (default: {DEFAULT_SEED})")
    r.add_argument("--threads", type=int, default=1, help="worker threads; results do not depend on it (default: 1)")
    out(r)
    r.set_defaults(func=cmd_perc_scan)
    r = psub.add_parser("threshold", help="calibration estimate of the site threshold")
    r.add_argument("--k", type=int, default=64, help="lattice side, >= 16 (default: 64)")
    r.add_argument("--trials", type=int, default=2000, help="trials (default: 2000)")
    r.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"root seed (default: {DEFAULT_SEED})")
    r.add_argument("--tol", type=float, default=1e-4, help="bisection tolerance (default: 1e-4)")
    out(r)
    r.set_defaults(func=cmd_perc_threshold)

    q = sub.add_parser("oracle", help="dense state-vector checks")
    osub = q.add_subparsers(dest="oracle_command", required=True, parser_class=_Parser)
    r = osub.add_parser("verify-rules", help="check Y/Z rewrite rules against simulation")
    _add_graph_input(r)
    r.add_argument("--vertices", help="comma-separated vertices (default: all)")
    r.add_argument("--bases", default="Y,Z", help="bases to check (default: Y,Z)")
    r.add_argument("--cap", type=int, default=14, help="qubit cap (default: 14)")
    out(r)
    r.set_defaults(func=cmd_oracle_rules)
    r = osub.add_parser("entropy", help="entanglement entropy of a subset, next to its cut-rank")
    _add_graph_input(r)
    r.add_argument("--subset", required=True, help="comma-separated vertices")
    r.add_argument("--cap", type=int, default=14, help="qubit cap (default: 14)")
    out(r)
    r.set_defaults(func=cmd_oracle_entropy)
    return p


def _config(args: argparse.Namespace) -> CommandConfig:
    name = " ".join(x for x in (args.command, getattr(args, "perc_command", None), getattr(args, "oracle_command", None)) if x)
    inputs = [x for x in (getattr(args, "input", None), getattr(args, "pattern", None)) if x]
    skip = {"func", "command", "perc_command", "oracle_command", "input", "pattern", "output", "seed", "verbose"}
    params = {k: v for k, v in vars(args).items() if k not in skip}
    return CommandConfig(name, inputs, getattr(args, "output", None), params, getattr(args, "seed", None), args.verbose)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = _config(args)
    logging.basicConfig(level=logging.WARNING - 10 * min(cfg.verbosity, 2), format="%(levelname)s %(message)s")
    log.debug("config %s", cfg)
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
