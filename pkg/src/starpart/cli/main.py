"""``starpart`` command line.

Exit status: 0 success, 1 verification or class-membership failure (details
as JSON on stderr), 2 usage or parse error, 3 size limit.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Sequence

from ..cochromatic import cochromatic_matching, matching_partition
from ..encoding import Code, decode, encode
from ..errors import ArgumentError, ClassMembershipError, ContractError, GraphParseError, SizeLimitError
from ..graph import BipartiteGraph, Graph, LabelledPartition, read_any_graph, write_bipartite, write_graph6
from ..matching import bipartite_matching_partition, build_chain_template, refine_to_nm_template
from ..patterns import contains, parse_pattern, parse_pattern_list
from ..stars import StarParams, bipartite_star_partition, d_template_procedure, main_partition
from ..verify import count_labelled, verify_partition
from .generate import random_bipartite_member, random_graph_member

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SIZE = 0, 1, 2, 3


class _Failure(Exception):
    """Verification or membership failure carrying a JSON payload for stderr."""

    def __init__(self, payload: dict):
        self.payload = payload
        super().__init__(payload.get("error", "failure"))


def _read(args) -> str:
    if args.inp and args.inp != "-":
        with open(args.inp, encoding="utf-8") as fh:
            return fh.read()
    return sys.stdin.read()


def _write(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _graph(args, max_vertices: int | None = None) -> Graph | BipartiteGraph:
    g = read_any_graph(_read(args))
    size = g.n if isinstance(g, Graph) else g.order
    limit = args.max_vertices if max_vertices is None else max_vertices
    if size > limit:
        raise SizeLimitError(f"{size} vertices exceed --max-vertices {limit}")
    return g


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ArgumentError(f"--params expects comma separated integers, got {text!r}") from None


def _need(g, cls, mode: str):
    if not isinstance(g, cls):
        want = "bipartite ('bip' format)" if cls is BipartiteGraph else "general (graph6)"
        raise ArgumentError(f"mode {mode} needs a {want} graph")
    return g


def _star_params(vals: list[int]) -> StarParams:
    if len(vals) == 2:  # n, k
        return StarParams.uniform(vals[0], vals[1])
    if len(vals) == 3:  # n, m, k: n bounds both star multiplicities, m both co-star ones
        n, m, k = vals
        return StarParams(n, n, m, m, k)
    if len(vals) == 5:
        return StarParams(*vals)
    raise ArgumentError("star parameters are n,k or n,m,k or n_up,n_lambda,m_up,m_lambda,k")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_detect(args) -> int:
    g = _graph(args)
    spec = parse_pattern(args.pattern, bipartite=isinstance(g, BipartiteGraph))
    if spec.bipartite != isinstance(g, BipartiteGraph):
        raise ArgumentError(f"pattern {spec.name} does not match the host type")
    emb = contains(g, spec)
    _write(args, "free" if emb is None else json.dumps({"pattern": spec.name, **emb.to_json()}))
    return EXIT_OK


def cmd_partition(args) -> int:
    g = _graph(args)
    vals = _ints(args.params)
    mode = args.mode
    if mode == "bip-matching":
        if len(vals) != 2:
            raise ArgumentError("bip-matching needs --params n,m")
        p = bipartite_matching_partition(_need(g, BipartiteGraph, mode), *vals)
        k = 1
    elif mode == "matching":
        g = _need(g, Graph, mode)
        if len(vals) == 1:
            p, k = matching_partition(g, vals[0]), 1
        elif len(vals) == 2:
            p, k = cochromatic_matching(g, *vals), None
        else:
            raise ArgumentError("matching needs --params n ((t,1)-partition) or n,m (cochromatic partition)")
    elif mode == "bip-stars":
        sp = _star_params(vals)
        p, k = bipartite_star_partition(_need(g, BipartiteGraph, mode), sp), sp.k
    elif mode == "main":
        if len(vals) != 3:
            raise ArgumentError("main needs --params n,k,l")
        p, k = main_partition(_need(g, Graph, mode), *vals, max_vertices=args.max_vertices), vals[1]
    else:  # argparse restricts choices
        raise ArgumentError(f"unknown mode {mode}")
    report = verify_partition(g, p, k)
    if not report["verdict"]:
        raise _Failure({"error": "verification", "report": report})
    _write(args, p.dumps())
    return EXIT_OK


def cmd_template(args) -> int:
    b = _need(_graph(args), BipartiteGraph, f"template --kind {args.kind}")
    vals = _ints(args.params) if args.params else []
    if args.kind == "chain":
        if vals and len(vals) != 2:
            raise ArgumentError("chain template takes --params n,m or none")
        t = refine_to_nm_template(b, *vals) if vals else build_chain_template(b)
    else:
        if not vals:
            raise ArgumentError("d template needs --params")
        t = d_template_procedure(b, _star_params(vals))
    _write(args, json.dumps(t.to_json()))
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _graph(args)
    with open(args.partition, encoding="utf-8") as fh:
        p = LabelledPartition.from_json(fh.read())
    report = verify_partition(g, p, args.k)
    _write(args, json.dumps(report))
    if not report["verdict"]:
        raise _Failure({"error": "verification", "report": report})
    return EXIT_OK


def cmd_encode(args) -> int:
    g = _need(_graph(args), BipartiteGraph, "encode")
    _write(args, encode(g, args.s).to_text())
    return EXIT_OK


def cmd_decode(args) -> int:
    code = Code.from_text(_read(args))
    if args.s is not None and args.s != code.s:
        raise ArgumentError(f"--s {args.s} does not match the code header s = {code.s}")
    if code.b_size + code.a_size > args.max_vertices:
        raise SizeLimitError(f"{code.a_size + code.b_size} vertices exceed --max-vertices {args.max_vertices}")
    b = decode(code)
    _write(args, write_bipartite(b))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    specs = parse_pattern_list(args.free)
    lo = args.n if args.only else 1
    rows = ["n,count"]
    for n in range(lo, args.n + 1):
        rows.append(f"{n},{count_labelled(specs, n, method=args.method, jobs=args.jobs, cap=args.cap)}")
    _write(args, "\n".join(rows))
    return EXIT_OK


def cmd_generate(args) -> int:
    rng = random.Random(args.seed)
    specs = parse_pattern_list(args.free, bipartite=args.bipartite)
    if args.bipartite:
        b = random_bipartite_member(specs, args.a, args.b, rng)
        _write(args, write_bipartite(b))
    else:
        _write(args, write_graph6(random_graph_member(specs, args.a, rng)))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="starpart", description=__doc__.splitlines()[0])
    io = argparse.ArgumentParser(add_help=False)
    io.add_argument("--in", dest="inp", help="input file (default stdin)")
    io.add_argument("--out", help="output file (default stdout)")
    io.add_argument("--max-vertices", type=int, default=64, help="size cap (exit 3 above it)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", parents=[io], help="find an induced pattern")
    p.add_argument("--pattern", required=True)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("partition", parents=[io], help="verified labelled partition")
    p.add_argument("--mode", required=True, choices=["bip-matching", "matching", "bip-stars", "main"])
    p.add_argument("--params", required=True)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("template", parents=[io], help="chain or d-template as JSON")
    p.add_argument("--kind", required=True, choices=["chain", "d"])
    p.add_argument("--params")
    p.set_defaults(func=cmd_template)

    p = sub.add_parser("verify", parents=[io], help="check a partition against a graph")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--partition", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("encode", parents=[io], help="code of a 2-lambda(s)-free bipartite graph")
    p.add_argument("--s", type=int, required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", parents=[io], help="bipartite graph of a code")
    p.add_argument("--s", type=int)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("enumerate", parents=[io], help="labelled counts as CSV")
    p.add_argument("--free", required=True, help="pattern list, e.g. 'nK2(2) co-nK2(2)'")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--only", action="store_true", help="only the row for n")
    p.add_argument("--method", choices=["atlas", "brute"], default="atlas")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cap", type=int, default=7)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("generate", parents=[io], help="random class member (seeded)")
    p.add_argument("--free", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bipartite", action="store_true")
    p.add_argument("--a", type=int, default=8, help="vertex cap (top side when bipartite)")
    p.add_argument("--b", type=int, default=8, help="bottom side cap")
    p.set_defaults(func=cmd_generate)
    return parser


def _err(payload: dict) -> None:
    sys.stderr.write(json.dumps(payload) + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ClassMembershipError as exc:
        _err(exc.to_json())
        return EXIT_FAIL
    except _Failure as exc:
        _err(exc.payload)
        return EXIT_FAIL
    except ContractError as exc:
        _err({"error": "contract", "message": str(exc)})
        return EXIT_FAIL
    except SizeLimitError as exc:
        _err({"error": "size-limit", "message": str(exc)})
        return EXIT_SIZE
    except (ArgumentError, GraphParseError, OSError) as exc:
        _err({"error": "usage", "message": str(exc)})
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
