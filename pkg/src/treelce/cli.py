"""Command-line front end: ``treelce <command> ...``.

Exit codes: 0 on success, 1 on malformed input (or selftest mismatches),
2 on queries that violate their preconditions. Errors go to stderr with the
offending line number.
"""
from __future__ import annotations

import argparse
import sys
import time
from typing import Callable, TextIO

import numpy as np

from .errors import QueryError, TreeFormatError
from .lce_pp import PpConfig, PpIndex
from .lce_pt import PtConfig, PtIndex
from .lce_tt import SetFamilyIndex, TtIndex, default_tau, parse_sets
from .naming import NamingIndex
from .oracle import SHAPES, GenSpec, gen_random_tree, oracle_pp, oracle_pt, oracle_tt, random_pp_query, symbol_tokens
from .tree import LabeledTree, SymbolTable, build_trie, parse_tree, path_string, read_strings, serialize_tree

ARITY = {"PP": 4, "PT": 3, "TT": 2}


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, text: str, stdout: TextIO) -> None:
    if path is None or path == "-":
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def parse_query_lines(text: str) -> list[tuple[int, str, list[int]]]:
    """``(line number, kind, ids)`` for each query line; blank and ``#`` lines are skipped."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        fields = line.split()
        if not fields or fields[0].startswith("#"):
            continue
        kind = fields[0].upper()
        if kind not in ARITY:
            raise TreeFormatError(f"unknown query kind {fields[0]!r}", lineno)
        if len(fields) - 1 != ARITY[kind]:
            raise TreeFormatError(f"{kind} takes {ARITY[kind]} node ids, got {len(fields) - 1}", lineno)
        try:
            ids = [int(t) for t in fields[1:]]
        except ValueError:
            raise TreeFormatError(f"non-integer node id in {line.strip()!r}", lineno) from None
        out.append((lineno, kind, ids))
    return out


class Engine:
    """Indexes for one tree, built on first use."""

    def __init__(self, tree: LabeledTree, mode: str = "simple", tau: int | None = None):
        self.tree = tree
        self.mode = mode
        self.tau = tau
        self._naming: NamingIndex | None = None
        self._pp: PpIndex | None = None
        self._pt: PtIndex | None = None
        self._tt: TtIndex | None = None

    @property
    def naming(self) -> NamingIndex:
        if self._naming is None:
            self._naming = NamingIndex(self.tree)
        return self._naming

    def index(self, kind: str):
        if kind == "PP":
            if self._pp is None:
                self._pp = PpIndex(self.tree, PpConfig(self.mode), self.naming)
            return self._pp
        if kind == "PT":
            if self._pt is None:
                self._pt = PtIndex(self.tree, PtConfig(self.mode), self.naming)
            return self._pt
        if self._tt is None:
            self._tt = TtIndex(self.tree, self.tau)
        return self._tt

    def run(self, kind: str, ids: list[int]):
        for v in ids:
            self.tree.check_node(v)
        return self.index(kind).query(*ids)


def _format_result(tree: LabeledTree, symbols: SymbolTable, kind: str, ids: list[int], res, with_path: bool) -> str:
    text = f"{res[0]} {res[1]} {res[2]}"
    if with_path:
        top = ids[0]
        tokens = [symbols.token(s) for s in path_string(tree, top, res[1])]
        text += " " + ("".join(tokens) if all(len(t) == 1 for t in tokens) else " ".join(tokens))
    return text


def cmd_gen(args, stdout: TextIO, stderr: TextIO) -> int:
    spec = GenSpec(args.n, args.sigma, args.shape, args.seed)
    tree = gen_random_tree(spec)
    if tree.n != args.n:
        print(f"normalization merged nodes: n = {tree.n}", file=stderr)
    _write(args.output, serialize_tree(tree, SymbolTable(symbol_tokens(args.sigma))), stdout)
    return 0


def cmd_trie(args, stdout: TextIO, stderr: TextIO) -> int:
    strings = read_strings(_read(args.input), args.sep)
    tree, symbols, leaf_map = build_trie(strings)
    _write(args.output, serialize_tree(tree, symbols), stdout)
    if args.map:
        _write(args.map, "".join(f"{v}\n" for v in leaf_map), stdout)
    return 0


def cmd_query(args, stdin: TextIO, stdout: TextIO, stderr: TextIO) -> int:
    tree, symbols, remap = parse_tree(_read(args.tree))
    engine = Engine(tree, args.mode, args.tau)
    for lineno, kind, ids in parse_query_lines(stdin.read()):
        try:
            if any(not 0 <= v < len(remap) for v in ids):
                raise QueryError(f"unknown node id in {ids}")
            ids = [remap[v] for v in ids]
            res = engine.run(kind, ids)
        except QueryError as exc:
            print(f"line {lineno}: {exc}", file=stderr)
            return 2
        print(_format_result(tree, symbols, kind, ids, res, args.print_path), file=stdout)
    return 0


def _random_queries(tree: LabeledTree, kind: str, count: int, rng: np.random.Generator) -> list[list[int]]:
    out = []
    for _ in range(count):
        if kind == "PP":
            out.append(list(random_pp_query(tree, rng)))
        elif kind == "PT":
            v1, w1, v2, _ = random_pp_query(tree, rng)
            out.append([v1, w1, v2])
        else:
            out.append([int(x) for x in rng.integers(0, tree.n, size=2)])
    return out


ORACLES: dict[str, Callable] = {"PP": oracle_pp, "PT": oracle_pt, "TT": oracle_tt}


def selftest(n: int, sigma: int, iters: int, seed: int, shapes, out: TextIO | None = None) -> int:
    """Compare every index against the oracles; returns the number of mismatches."""
    total = 0
    bad = 0
    for i, shape in enumerate(shapes):
        tree = gen_random_tree(GenSpec(n, sigma, shape, seed + i))
        naming = NamingIndex(tree)
        indexes = {
            "PP": [PpIndex(tree, PpConfig("simple"), naming), PpIndex(tree, PpConfig("compact"), naming)],
            "PT": [PtIndex(tree, PtConfig("simple"), naming), PtIndex(tree, PtConfig("compact"), naming)],
            "TT": [TtIndex(tree)],
        }
        rng = np.random.default_rng(seed + i)
        shape_bad = 0
        for kind, idxs in indexes.items():
            for q in _random_queries(tree, kind, iters, rng):
                want = ORACLES[kind](tree, *q)
                for idx in idxs:
                    total += 1
                    if idx.query(*q) != want:
                        shape_bad += 1
        bad += shape_bad
        if out is not None:
            print(f"{shape}: n={tree.n} mismatches={shape_bad}", file=out)
    if out is not None:
        print(f"selftest: {total} queries, {bad} mismatches", file=out)
    return bad


def cmd_selftest(args, stdout: TextIO, stderr: TextIO) -> int:
    shapes = [s.strip() for s in args.shapes.split(",") if s.strip()]
    for s in shapes:
        if s not in SHAPES:
            print(f"unknown shape {s!r}; expected one of {', '.join(SHAPES)}", file=stderr)
            return 1
    return 0 if selftest(args.n, args.sigma, args.iters, args.seed, shapes, stdout) == 0 else 1


def cmd_bench(args, stdout: TextIO, stderr: TextIO) -> int:
    tree, _, remap = parse_tree(_read(args.tree))
    queries = parse_query_lines(_read(args.queries))
    engine = Engine(tree, args.mode, args.tau)
    by_kind: dict[str, list[list[int]]] = {}
    for lineno, kind, ids in queries:
        if any(not 0 <= v < len(remap) for v in ids):
            print(f"line {lineno}: unknown node id in {ids}", file=stderr)
            return 2
        by_kind.setdefault(kind, []).append([remap[v] for v in ids])
    for kind in sorted(by_kind):
        t0 = time.perf_counter()
        idx = engine.index(kind)
        build = time.perf_counter() - t0
        stats = idx.stats
        stats.reset()
        qs = by_kind[kind]
        t0 = time.perf_counter()
        try:
            for _ in range(args.repeat):
                for q in qs:
                    idx.query(*q)
        except QueryError as exc:
            print(f"{kind} query failed: {exc}", file=stderr)
            return 2
        wall = time.perf_counter() - t0
        count = max(len(qs) * args.repeat, 1)
        counters = " ".join(f"{k}={v / count:.2f}" for k, v in stats.as_dict().items() if k != "queries")
        print(f"{kind}: queries={len(qs)} repeat={args.repeat} build={build:.3f}s "
              f"wall={wall:.3f}s per_query={wall / count * 1e6:.1f}us {counters}", file=stdout)
    return 0


def cmd_setdemo(args, stdin: TextIO, stdout: TextIO, stderr: TextIO) -> int:
    idx = SetFamilyIndex(parse_sets(_read(args.sets)), args.tau)
    for lineno, line in enumerate(stdin.read().splitlines(), 1):
        fields = line.split()
        if not fields or fields[0].startswith("#"):
            continue
        try:
            if len(fields) != 2:
                raise ValueError
            i, j = int(fields[0]), int(fields[1])
        except ValueError:
            raise TreeFormatError(f"expected 'i j', got {line.strip()!r}", lineno) from None
        try:
            print("disjoint" if idx.disjoint(i, j) else "intersect", file=stdout)
        except QueryError as exc:
            print(f"line {lineno}: {exc}", file=stderr)
            return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treelce", description="Longest common extension queries on labeled trees.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random tree file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--sigma", type=int, default=2)
    g.add_argument("--shape", choices=SHAPES, default="random")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")

    t = sub.add_parser("trie", help="build the trie of a strings file")
    t.add_argument("--in", dest="input", required=True)
    t.add_argument("-o", "--output")
    t.add_argument("--map", help="write the node of each string, one per line")
    t.add_argument("--sep", help="split lines into tokens on this separator instead of characters")

    for name, text in (("query", "answer queries read from stdin"), ("bench", "time a query file")):
        q = sub.add_parser(name, help=text)
        q.add_argument("--tree", required=True)
        q.add_argument("--mode", choices=("simple", "compact"), default="simple")
        q.add_argument("--tau", type=int, default=None)
        if name == "query":
            q.add_argument("--print-path", action="store_true", help="append the matched string")
        else:
            q.add_argument("--queries", required=True)
            q.add_argument("--repeat", type=int, default=1)

    s = sub.add_parser("selftest", help="check all indexes against the oracles")
    s.add_argument("--n", type=int, default=200)
    s.add_argument("--sigma", type=int, default=2)
    s.add_argument("--iters", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--shapes", default=",".join(SHAPES))

    d = sub.add_parser("setdemo", help="set disjointness through tree-tree LCE")
    d.add_argument("--sets", required=True)
    d.add_argument("--tau", type=int, default=None)
    return p


def run_cli(argv=None, stdin: TextIO | None = None, stdout: TextIO | None = None,
            stderr: TextIO | None = None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            return cmd_gen(args, stdout, stderr)
        if args.command == "trie":
            return cmd_trie(args, stdout, stderr)
        if args.command == "query":
            return cmd_query(args, stdin, stdout, stderr)
        if args.command == "selftest":
            return cmd_selftest(args, stdout, stderr)
        if args.command == "bench":
            return cmd_bench(args, stdout, stderr)
        return cmd_setdemo(args, stdin, stdout, stderr)
    except TreeFormatError as exc:
        print(f"format error: {exc}", file=stderr)
        return 1
    except (QueryError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())
