"""Command-line front end.

Exit codes: 0 success, 1 negative verdict (UNSAT, failed check, false
connectivity), 2 usage or input errors, 3 enumeration caps exceeded.
All output is deterministic for identical inputs and seeds.
"""

import argparse
import json
import os
import sys
from fractions import Fraction

from . import checks
from .csp import CspInstance, brute_force_solve, enumerate_M_small, \
    make_M_consistent, PowerBound
from .decomposition import (TreeDecomposition, fractional_hypertree_width,
                            generalized_hypertree_width, min_f_width, mu_width,
                            treewidth, validate_decomposition)
from .errors import BoundViolationError, DomainError, ResourceLimitError
from .fractional import (FractionalIndependentSet, FractionalSeparator,
                         max_flow, max_uniform_concurrent_flow,
                         min_fractional_separator)
from .hypergraph import Hypergraph, induced_subhypergraph, primal_graph
from .reductions import (CnfFormula, Embedding, construct_embedding,
                         sat_to_csp, simulate_csp_via_embedding,
                         transfer_decomposition, validate_embedding)
from .submodular import (SetFunctionOracle, b_star,
                         decompose_or_highly_connected,
                         round_fractional_separator)
from .uniform import solve_fpt, split_uniform


def _rat(text):
    return Fraction(text)


def _fmt(value):
    if isinstance(value, Fraction):
        return str(value)
    return value


def _read(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _vertices(text):
    return frozenset(x for x in text.split(",") if x)


def _load_mu(path):
    weights = {}
    for line in _read(path).splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, value = line.split()
        weights[name] = Fraction(value)
    return FractionalIndependentSet(weights)


def _load_separator(path, H, X, Y):
    weights = {e: Fraction(0) for e in H.edges}
    for line in _read(path).splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, value = line.split()
        edge = frozenset(name.split(","))
        if edge not in weights:
            raise DomainError(f"unknown edge {name!r}")
        weights[edge] = Fraction(value)
    return FractionalSeparator(weights, X, Y)


def _emit(args, payload, human_lines):
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in human_lines:
            print(line)


def _separator_lines(sep):
    out = []
    for e in sorted(sep.weights, key=sorted):
        w = sep.weights[e]
        if w:
            out.append(f"{','.join(sorted(e))} {w}")
    return out


def cmd_width(args):
    H = Hypergraph.from_text(_read(args.hypergraph))
    if args.measure == "tw":
        value, td = treewidth(H)
    elif args.measure == "ghw":
        value, td = generalized_hypertree_width(H)
    elif args.measure == "fhw":
        value, td = fractional_hypertree_width(H)
    elif args.measure == "mu":
        if not args.mu:
            raise DomainError("--measure mu needs --mu FILE")
        value, td = mu_width(H, _load_mu(args.mu))
    else:
        if not args.oracle:
            raise DomainError("--measure b needs --oracle FILE")
        b = SetFunctionOracle.from_text(H, _read(args.oracle))
        from .decomposition import b_width
        value, td = b_width(H, b)
    if args.td_out:
        with open(args.td_out, "w", encoding="utf-8") as fh:
            fh.write(td.to_text())
    _emit(args, {"measure": args.measure, "value": _fmt(value),
                 "bags": {str(t): sorted(td.bags[t]) for t in td.nodes}},
          [f"{args.measure} = {_fmt(value)}"])
    return 0


def cmd_solve(args):
    I = CspInstance.from_text(_read(args.instance))
    if args.c0 == "auto-fhw":
        H = I.hypergraph()
        covered = induced_subhypergraph(H, H.names_of(H.covered_mask()))
        c0 = fractional_hypertree_width(covered)[0] if I.constraints \
            else Fraction(1)
    else:
        c0 = _rat(args.c0)
    res = solve_fpt(I, c0)
    payload = {"verdict": res.verdict, "bound": _fmt(c0),
               "pieces": res.pieces, "method": res.method}
    lines = [f"verdict {res.verdict}"]
    if res.assignment:
        payload["assignment"] = dict(sorted(res.assignment.items()))
        lines += [f"  {v} = {val}" for v, val in sorted(res.assignment.items())]
    _emit(args, payload, lines)
    return 0 if res.verdict == "SAT" else 1


def cmd_split(args):
    I = CspInstance.from_text(_read(args.instance))
    N = args.N if args.N is not None else (I.max_relation_size() or 1)
    outs, trace = split_uniform(I, N, _rat(args.c), _rat(args.eps))
    os.makedirs(args.out_dir, exist_ok=True)
    names = []
    for i, piece in enumerate(outs):
        name = os.path.join(args.out_dir, f"piece_{i:03d}.csp")
        with open(name, "w", encoding="utf-8") as fh:
            fh.write(piece.to_text())
        names.append(name)
    trace_path = os.path.join(args.out_dir, "trace.txt")
    with open(trace_path, "w", encoding="utf-8") as fh:
        for node in trace.nodes:
            pair = "-"
            sizes = "-"
            if node.split_pair:
                A, B = node.split_pair
                pair = f"{','.join(sorted(A))}|{','.join(sorted(B))}"
                sizes = ",".join(str(s) for s in node.split_sizes)
            status = ("dropped" if node.dropped else
                      f"piece={node.emitted_index}"
                      if node.emitted_index is not None else "split")
            fh.write(f"node {node.node_id} parent {node.parent} "
                     f"branch {node.branch} {status} pair {pair} "
                     f"sizes {sizes}\n")
    _emit(args, {"pieces": names, "trace": trace_path,
                 "N": N, "c": args.c, "eps": args.eps},
          [f"{len(outs)} pieces -> {args.out_dir}"])
    return 0


def cmd_consistency(args):
    I = CspInstance.from_text(_read(args.instance))
    out = make_M_consistent(I, args.M)
    _emit(args, out.to_json_dict(), [out.to_text().rstrip("\n")])
    return 0


def cmd_small_sets(args):
    I = CspInstance.from_text(_read(args.instance))
    family, _ = enumerate_M_small(I, args.M)
    listing = sorted((sorted(S) for S in family), key=lambda s: (len(s), s))
    _emit(args, {"M": args.M, "small_sets": listing,
                 "sizes": {" ".join(sorted(S)): len(family[S])
                           for S in family}},
          [" ".join(s) if s else "(empty)" for s in listing])
    return 0


def cmd_separator(args):
    H = Hypergraph.from_text(_read(args.hypergraph))
    X, Y = _vertices(args.x), _vertices(args.y)
    weight, sep = min_fractional_separator(H, X, Y)
    _emit(args, {"weight": _fmt(weight),
                 "weights": {",".join(sorted(e)): _fmt(w)
                             for e, w in sep.weights.items() if w}},
          [f"weight {weight}"] + _separator_lines(sep))
    return 0


def cmd_flow(args):
    H = Hypergraph.from_text(_read(args.hypergraph))
    X, Y = _vertices(args.x), _vertices(args.y)
    value, flow = max_flow(H, X, Y)
    lines = [f"value {value}"]
    payload_paths = []
    for p, w in flow.items():
        lines.append(f"{w} {' '.join(p.vertices)}")
        payload_paths.append({"weight": _fmt(w), "path": list(p.vertices)})
    _emit(args, {"value": _fmt(value), "paths": payload_paths}, lines)
    return 0


def cmd_concurrent_flow(args):
    H = Hypergraph.from_text(_read(args.hypergraph))
    parts = [_vertices(p) for p in args.parts.split(";") if p]
    res = max_uniform_concurrent_flow(H, parts)
    lines = [f"epsilon {res.epsilon}"]
    payload = {"epsilon": _fmt(res.epsilon), "pairs": {}}
    for (i, j), flow in sorted(res.flows.items()):
        payload["pairs"][f"{i}-{j}"] = [
            {"weight": _fmt(w), "path": list(p.vertices)}
            for p, w in flow.items()]
        for p, w in flow.items():
            lines.append(f"{i}-{j} {w} {' '.join(p.vertices)}")
    _emit(args, payload, lines)
    return 0


def cmd_round_separator(args):
    H = Hypergraph.from_text(_read(args.hypergraph))
    X, Y = _vertices(args.x), _vertices(args.y)
    sep = _load_separator(args.separator, H, X, Y)
    b = SetFunctionOracle.from_text(H, _read(args.oracle))
    rr = round_fractional_separator(H, X, Y, sep, b)
    _emit(args, {"separator": sorted(rr.separator), "cost": _fmt(rr.cost),
                 "b_value": _fmt(rr.b_value), "threshold": _fmt(rr.threshold)},
          [f"separator {' '.join(sorted(rr.separator))}",
           f"cost {rr.cost}", f"b {rr.b_value}"])
    return 0


def cmd_bstar(args):
    H = Hypergraph.from_text(_read(args.hypergraph))
    b = SetFunctionOracle.from_text(H, _read(args.oracle))
    Z = _vertices(args.z)
    value, pi = b_star(b, H, Z)
    _emit(args, {"value": _fmt(value), "ordering": list(pi)},
          [f"value {value}", "ordering " + " ".join(pi)])
    return 0


def cmd_decompose_or_connected(args):
    H = Hypergraph.from_text(_read(args.hypergraph))
    b = SetFunctionOracle.from_text(H, _read(args.oracle))
    res = decompose_or_highly_connected(H, b, _rat(args.w), _rat(args.lam))
    if res.kind == "decomposition":
        td = res.decomposition
        _emit(args, {"kind": "decomposition",
                     "bags": {str(t): sorted(td.bags[t]) for t in td.nodes},
                     "bag_costs": {str(t): _fmt(c)
                                   for t, c in res.bag_costs.items()}},
              ["decomposition"] + td.to_text().rstrip("\n").splitlines())
        return 0
    _emit(args, {"kind": "connected", "W": sorted(res.W),
                 "mass": _fmt(res.mu.mass(res.W)),
                 "mu": {v: _fmt(w) for v, w in sorted(res.mu.weights.items())}},
          ["highly connected " + " ".join(sorted(res.W)),
           f"mass {res.mu.mass(res.W)}"])
    return 0


def cmd_sat2csp(args):
    phi = CnfFormula.from_dimacs(_read(args.cnf))
    I = sat_to_csp(phi)
    _emit(args, I.to_json_dict(), [I.to_text().rstrip("\n")])
    return 0


def cmd_embed(args):
    G = primal_graph(Hypergraph.from_text(_read(args.graph)))
    H = Hypergraph.from_text(_read(args.hypergraph))
    res = construct_embedding(G, H)
    lines = res.embedding.to_text().rstrip("\n").splitlines()
    lines.append(f"vertex-depth {res.report.vertex_depth}")
    lines.append(f"edge-depth {res.report.edge_depth}")
    _emit(args, {"mapping": {v: sorted(img) for v, img in
                             res.embedding.mapping.items()},
                 "vertex_depth": res.report.vertex_depth,
                 "edge_depth": res.report.edge_depth,
                 "weak_edge_depth": res.report.weak_edge_depth,
                 "epsilon": _fmt(res.epsilon)}, lines)
    return 0


def cmd_simulate(args):
    I1 = CspInstance.from_text(_read(args.instance))
    H = Hypergraph.from_text(_read(args.hypergraph))
    psi = Embedding.from_text(_read(args.embedding))
    I2 = simulate_csp_via_embedding(I1, H, psi, depth_kind=args.depth)
    _emit(args, I2.to_json_dict(), [I2.to_text().rstrip("\n")])
    return 0


def cmd_transfer(args):
    G = primal_graph(Hypergraph.from_text(_read(args.graph)))
    H = Hypergraph.from_text(_read(args.hypergraph))
    psi = Embedding.from_text(_read(args.embedding))
    T = TreeDecomposition.from_text(_read(args.td))
    out = transfer_decomposition(G, H, psi, T)
    _emit(args, {"bags": {str(t): sorted(out.bags[t]) for t in out.nodes}},
          out.to_text().rstrip("\n").splitlines())
    return 0


def _suite_worker(task):
    name, kwargs = task
    return checks.run_suite(name, **kwargs).__dict__


def cmd_check(args):
    names = sorted(checks.SUITES) if args.suite == "all" else [args.suite]
    kwargs = {"seed": args.seed}
    if args.count is not None:
        kwargs["count"] = args.count
    results = []
    if args.jobs > 1 and len(names) > 1:
        import multiprocessing
        with multiprocessing.Pool(args.jobs) as pool:
            raw = pool.map(_suite_worker, [(n, kwargs) for n in names])
        results = [checks.CheckResult(**r) for r in raw]
    else:
        for n in names:
            results.append(checks.run_suite(n, **kwargs))
    for res in results:
        if args.format != "json":
            print(res.line())
    if args.format == "json":
        print(json.dumps({r.criterion: {"passed": r.passed, "detail": r.detail}
                          for r in results}, sort_keys=True))
    return 0 if all(r.passed for r in results) else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hgcsp",
        description="Hypergraph width calculus, exact flows/separators, and"
                    " uniform-split CSP solving.")
    parser.add_argument("--format", choices=("human", "json"), default="human")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("width", help="width measures of a hypergraph")
    p.add_argument("hypergraph")
    p.add_argument("--measure", choices=("tw", "ghw", "fhw", "mu", "b"),
                   required=True)
    p.add_argument("--mu", help="vertex weight file for --measure mu")
    p.add_argument("--oracle", help="oracle file for --measure b")
    p.add_argument("--td-out", help="write the witness decomposition here")
    p.set_defaults(func=cmd_width)

    p = sub.add_parser("solve", help="decide a CSP instance")
    p.add_argument("instance")
    p.add_argument("--c0", default="auto-fhw",
                   help="width bound as a rational, or auto-fhw")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("split", help="split into uniform instances")
    p.add_argument("instance")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--c", default="1")
    p.add_argument("--eps", default="1/8")
    p.add_argument("--out-dir", default="pieces")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("consistency", help="make an instance M-consistent")
    p.add_argument("instance")
    p.add_argument("--M", type=int, required=True)
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("small-sets", help="list all M-small variable sets")
    p.add_argument("instance")
    p.add_argument("--M", type=int, required=True)
    p.set_defaults(func=cmd_small_sets)

    p = sub.add_parser("separator", help="minimum fractional separator")
    p.add_argument("hypergraph")
    p.add_argument("--x", required=True, help="comma-separated vertices")
    p.add_argument("--y", required=True)
    p.set_defaults(func=cmd_separator)

    p = sub.add_parser("flow", help="maximum flow between vertex sets")
    p.add_argument("hypergraph")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("concurrent-flow", help="uniform concurrent flow")
    p.add_argument("hypergraph")
    p.add_argument("--parts", required=True,
                   help="semicolon-separated comma lists, e.g. a,b;c;d")
    p.set_defaults(func=cmd_concurrent_flow)

    p = sub.add_parser("round-separator",
                       help="round a fractional separator to vertices")
    p.add_argument("hypergraph")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--separator", required=True,
                   help="file of `edge weight` lines, edges comma-joined")
    p.add_argument("--oracle", required=True)
    p.set_defaults(func=cmd_round_separator)

    p = sub.add_parser("bstar", help="minimum ordered-marginal cost")
    p.add_argument("hypergraph")
    p.add_argument("--oracle", required=True)
    p.add_argument("--z", required=True)
    p.set_defaults(func=cmd_bstar)

    p = sub.add_parser("decompose-or-connected",
                       help="decomposition or highly connected set")
    p.add_argument("hypergraph")
    p.add_argument("--oracle", required=True)
    p.add_argument("--w", required=True)
    p.add_argument("--lam", default="1/1000")
    p.set_defaults(func=cmd_decompose_or_connected)

    p = sub.add_parser("sat2csp", help="reduce a DIMACS 3SAT file to a CSP")
    p.add_argument("cnf")
    p.set_defaults(func=cmd_sat2csp)

    p = sub.add_parser("embed", help="embed a graph into a hypergraph")
    p.add_argument("graph", help="graph as a hypergraph file of binary edges")
    p.add_argument("hypergraph")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("simulate", help="compile a binary CSP along an embedding")
    p.add_argument("instance")
    p.add_argument("hypergraph")
    p.add_argument("--embedding", required=True)
    p.add_argument("--depth", choices=("edge", "weak"), default="edge")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("transfer", help="pull a decomposition back along an embedding")
    p.add_argument("graph")
    p.add_argument("hypergraph")
    p.add_argument("--embedding", required=True)
    p.add_argument("--td", required=True)
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("check", help="run a verification suite")
    p.add_argument("--suite", default="all",
                   help="suite name or 'all': " + ", ".join(sorted(checks.SUITES)))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BoundViolationError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1
    except ResourceLimitError as ex:
        print(f"resource limit: {ex}", file=sys.stderr)
        return 3
    except (DomainError, OSError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
