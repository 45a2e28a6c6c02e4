"""Exit criteria. Each test prints one PASS/FAIL line and then asserts.

Run alone with ``pytest -m acceptance -v``; the whole module takes several minutes.
"""
import gc
import io
import math
import time

import numpy as np
import pytest

from checks import check_pp, check_pt, check_tt
from conftest import FOUR_SETS, TREE_A_TEXT
from treelce.cli import run_cli
from treelce.diffcover import DiffCover
from treelce.lce_pp import PpConfig, PpIndex
from treelce.lce_pt import PtConfig, PtIndex
from treelce.lce_tt import SetFamilyIndex, TtIndex, build_clusters, default_tau
from treelce.naming import NamingIndex
from treelce.oracle import (GenSpec, gen_random_tree, oracle_pp, oracle_pt, oracle_tt,
                            random_pp_query, string_lce)
from treelce.primitives import PrimitivesIndex
from treelce.results import LcePtResult, LceResult, LceTtResult
from treelce.tree import build_trie, normalize, parse_tree, path_string

pytestmark = pytest.mark.acceptance

SHAPES = ("path", "caterpillar", "star", "binary", "random")


def report(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
    assert ok, detail


def leaves_below(tree, v):
    out, stack = [], [v]
    while stack:
        u = stack.pop()
        kids = tree.children[u]
        if not kids:
            out.append(u)
        stack.extend(c for _, c in kids)
    return out


def descendants(tree, v):
    out, stack = [], [v]
    while stack:
        u = stack.pop()
        out.append(u)
        stack.extend(c for _, c in tree.children[u])
    return out


# -- 1 ----------------------------------------------------------------


def test_oracle_equivalence(capsys):
    sigmas = (1, 2, 4, 16)
    queries = 10_000
    bad = {"pp": 0, "pt": 0, "tt": 0}
    unchecked = {"pp": 0, "pt": 0, "tt": 0}
    total = 0
    t0 = time.time()
    for shape in SHAPES:
        for i in range(50):
            tree = gen_random_tree(GenSpec(200, sigmas[i % 4], shape, seed=i))
            naming = NamingIndex(tree)
            pp = PpIndex(tree, naming=naming)
            pt = PtIndex(tree, naming=naming)
            tt = TtIndex(tree, default_tau(tree.n)) if tree.n > 1 else None
            rng = np.random.default_rng(1000 + i)
            for _ in range(queries):
                q = random_pp_query(tree, rng)
                r = pp.query(*q)
                if r.length != oracle_pp(tree, *q).length:
                    bad["pp"] += 1
                elif not check_pp(tree, q, r):
                    unchecked["pp"] += 1
                q3 = q[:3]
                r = pt.query(*q3)
                if r.length != oracle_pt(tree, *q3).length:
                    bad["pt"] += 1
                elif not check_pt(tree, q3, r):
                    unchecked["pt"] += 1
                q2 = (q[0], q[2])
                r = tt.query(*q2) if tt is not None else LceTtResult(0, q2[0], q2[1])
                if r.length != oracle_tt(tree, *q2).length:
                    bad["tt"] += 1
                elif not check_tt(tree, q2, r):
                    unchecked["tt"] += 1
            total += queries
    ok = not any(bad.values()) and not any(unchecked.values())
    report(capsys, 1, "oracle equivalence", ok,
           f"250 trees, {total} queries per kind, length mismatches {bad}, "
           f"endpoint failures {unchecked}, {time.time() - t0:.0f}s")


# -- 2 ----------------------------------------------------------------


def test_set_family_example(capsys, tmp_path):
    idx = SetFamilyIndex(FOUR_SETS)
    got = (idx.lce(1, 3).length, idx.lce(2, 4).length, idx.disjoint(2, 4), idx.disjoint(1, 3))
    sets = tmp_path / "sets.txt"
    sets.write_text("".join(" ".join(map(str, s)) + "\n" for s in FOUR_SETS))
    out = io.StringIO()
    code = run_cli(["setdemo", "--sets", str(sets)], io.StringIO("2 4\n"), out, io.StringIO())
    ok = got == (1, 0, True, False) and code == 0 and out.getvalue() == "disjoint\n"
    report(capsys, 2, "set family example", ok,
           f"LCE(v1,v3)={got[0]} LCE(v2,v4)={got[1]} disjoint(2,4)={got[2]} "
           f"disjoint(1,3)={got[3]} setdemo '2 4' -> {out.getvalue().strip()!r}")


# -- 3 ----------------------------------------------------------------


def test_difference_cover(capsys):
    n = 10_000
    pairs_per_x = 100_000
    trees = [gen_random_tree(GenSpec(n, 16, "random", seed=3)),
             gen_random_tree(GenSpec(n, 2, "caterpillar", seed=3))]
    size_bad = 0
    pair_bad = 0
    checked = 0
    rng = np.random.default_rng(3)
    for x in (2, 3, 4, 8, 16):
        X = x * x
        covers = [DiffCover(t.depth_array, x) for t in trees]
        size_bad += sum(c.size > 2 * t.n / x for c, t in zip(covers, trees))
        pools = [np.flatnonzero(t.depth_array >= X) for t in trees]
        live = [k for k, p in enumerate(pools) if p.size]
        for k in live:
            tree, cover, pool = trees[k], covers[k], pools[k]
            m = pairs_per_x // len(live) + (k == live[0]) * (pairs_per_x % len(live))
            u = rng.choice(pool, m)
            v = rng.choice(pool, m)
            got = np.array([cover.find_d(int(a), int(b)) for a, b in zip(u, v)])
            par = tree.parent_array
            depth = tree.depth_array
            first = np.full(m, -1)
            hits = np.zeros(m, dtype=np.int64)
            cu, cv = u.copy(), v.copy()
            for d in range(X):
                ok = (cover.marked[cu] & cover.marked[cv]
                      & (depth[cu] % x == cover.r1) & ((depth[cv] // x) % x == cover.r2))
                first[ok & (first < 0)] = d
                hits += ok
                cu, cv = par[cu], par[cv]
            pair_bad += int(np.sum((got >= X) | (got != first) | (hits != 1)))
            checked += m
    ok = size_bad == 0 and pair_bad == 0
    report(capsys, 3, "difference cover", ok,
           f"size violations {size_bad}, find_d violations {pair_bad} over {checked} pairs")


# -- 4 ----------------------------------------------------------------


def cluster_violations(tree, tau):
    part = build_clusters(tree, tau)
    n = tree.n
    z = -(-n // tau)
    bad = []
    edges = sorted(e for c in part.clusters for e in c.edges)
    if edges != list(range(1, n)):
        bad.append("edge partition")
    if len(part.clusters) > 4 * tau:
        bad.append(f"{len(part.clusters)} clusters > 4*tau")
    for c in part.clusters:
        own = set(c.edges)
        if any(tree.parent[e] != c.top and tree.parent[e] not in own for e in c.edges):
            bad.append("disconnected cluster")
        if len(c.boundary) > 2:
            bad.append(f"{len(c.boundary)} boundary nodes")
        if len(c.nodes) > 4 * z + 2:
            bad.append(f"{len(c.nodes)} nodes > 4z+2")
    return bad, len(part.clusters)


def test_cluster_partition(capsys):
    bad = []
    runs = 0
    for n in (1000, 10_000):
        for shape, sigma in (("random", 16), ("caterpillar", 2), ("binary", 2)):
            tree = gen_random_tree(GenSpec(n, sigma, shape, seed=4))
            for tau in (1, math.isqrt(tree.n - 1) + 1, tree.n):
                found, _ = cluster_violations(tree, tau)
                bad += [f"{shape} n={tree.n} tau={tau}: {b}" for b in found]
                runs += 1
    report(capsys, 4, "cluster partition", not bad,
           f"{runs} partitions, {len(bad)} violations" + (f" first: {bad[0]}" if bad else ""))


# -- 5 ----------------------------------------------------------------


def test_mode_agreement(capsys):
    queries = 10_000
    diff = {"pp": 0, "pt": 0}
    for shape, sigma in (("path", 2), ("caterpillar", 4), ("random", 4)):
        tree = gen_random_tree(GenSpec(10_000, sigma, shape, seed=5))
        naming = NamingIndex(tree)
        pps = PpIndex(tree, PpConfig("simple"), naming)
        ppc = PpIndex(tree, PpConfig("compact"), naming)
        pts = PtIndex(tree, PtConfig("simple"), naming)
        ptc = PtIndex(tree, PtConfig("compact"), naming)
        rng = np.random.default_rng(5)
        for _ in range(queries):
            q = random_pp_query(tree, rng)
            diff["pp"] += pps.query(*q) != ppc.query(*q)
            diff["pt"] += pts.query(*q[:3]) != ptc.query(*q[:3])
    report(capsys, 5, "mode agreement", not any(diff.values()),
           f"3 trees x {queries} queries, differences {diff}")


# -- 6 ----------------------------------------------------------------


def mean_work(idx, run, qs):
    idx.stats.reset()
    for q in qs:
        run(q)
    return (idx.stats.comparisons + idx.stats.lookups) / len(qs)


def test_scaling_counters(capsys):
    pp_work, pt_work = {}, {}
    for e in (16, 20):
        tree = gen_random_tree(GenSpec(1 << e, 1, "path"))
        rng = np.random.default_rng(6)
        qs = [random_pp_query(tree, rng) for _ in range(2000)]
        naming = NamingIndex(tree)
        pp = PpIndex(tree, naming=naming)
        pp_work[e] = mean_work(pp, lambda q: pp.query(*q), qs)
        del pp
        gc.collect()
        pt = PtIndex(tree, naming=naming)
        pt_work[e] = mean_work(pt, lambda q: pt.query(q[0], q[1], q[2]), qs)
        del pt, naming, tree
        gc.collect()
    pp_ratio = pp_work[20] / pp_work[16]
    pt_ratio = pt_work[20] / pt_work[16]

    # the tree-tree table is quadratic to build, so this part stays at n <= 5000
    n = 4096
    tree = gen_random_tree(GenSpec(n, 1, "path"))
    tau = default_tau(n)
    tt = TtIndex(tree, tau)
    rng = np.random.default_rng(6)
    worst = 0
    total = 0
    for _ in range(2000):
        v1, v2 = (int(v) for v in rng.integers(0, n, size=2))
        tt.stats.reset()
        tt.query(v1, v2)
        worst = max(worst, tt.stats.traversal)
        total += tt.stats.traversal
    limit = 8 * n / tau
    ok = pp_ratio <= 1.5 and pt_ratio <= 2.0 and worst <= limit
    report(capsys, 6, "scaling counters", ok,
           f"PP work/query {pp_work[16]:.2f} -> {pp_work[20]:.2f} (ratio {pp_ratio:.2f} <= 1.5), "
           f"PT {pt_work[16]:.2f} -> {pt_work[20]:.2f} (ratio {pt_ratio:.2f} <= 2.0), "
           f"TT traversal n={n} tau={tau} max {worst} mean {total / 2000:.1f} <= {limit:.0f}")


# -- 7 ----------------------------------------------------------------


def random_strings(rng, count, alphabet="acgt"):
    """Mutated substrings of a few long base strings, so that suffixes share long runs."""
    bases = ["".join(rng.choice(list(alphabet), 2000)) for _ in range(20)]
    out, origin = [], []
    for _ in range(count):
        k = int(rng.integers(0, len(bases)))
        length = int(rng.integers(10, 181))
        start = int(rng.integers(0, 2000 - length + 1))
        s = list(bases[k][start:start + length])
        for j in np.flatnonzero(rng.random(length) < 0.01):
            s[j] = alphabet[int(rng.integers(0, len(alphabet)))]
        out.append("".join(s))
        origin.append((k, start))
    return out, origin


def test_trie_suffix_lce(capsys):
    t0 = time.time()
    rng = np.random.default_rng(7)
    strings, origin = random_strings(rng, 10_000)
    total_len = sum(map(len, strings))
    tree, _, leaf = build_trie(strings)
    idx = PpIndex(tree)
    la = idx.naming.prims.la
    by_base = {}
    for i, (k, _) in enumerate(origin):
        by_base.setdefault(k, []).append(i)
    bad = 0
    long_hits = 0
    for t in range(10_000):
        i = int(rng.integers(0, len(strings)))
        if t % 2:
            j = int(rng.integers(0, len(strings)))
            a = int(rng.integers(0, len(strings[i]) + 1))
            b = int(rng.integers(0, len(strings[j]) + 1))
        else:
            # a suffix pair that starts at the same base position when the ranges overlap
            k, si = origin[i]
            ei = si + len(strings[i])
            near = [j for j in by_base[k] if origin[j][1] < ei and si < origin[j][1] + len(strings[j])]
            j = near[int(rng.integers(0, len(near)))]
            sj = origin[j][1]
            p = int(rng.integers(max(si, sj), min(ei, sj + len(strings[j]))))
            a, b = p - si, p - sj
        want = string_lce(strings[i][a:], strings[j][b:])
        got = idx.query(la(leaf[i], a), leaf[i], la(leaf[j], b), leaf[j]).length
        bad += got != want
        long_hits += want >= 20
    elapsed = time.time() - t0
    ok = bad == 0 and total_len <= 10 ** 6 and elapsed < 120
    report(capsys, 7, "trie suffix LCE", ok,
           f"{len(strings)} strings, total length {total_len}, trie {tree.n} nodes, "
           f"10000 pairs ({long_hits} with LCE >= 20), mismatches {bad}, {elapsed:.0f}s < 120s")


# -- 8 ----------------------------------------------------------------


def tree_a_fixtures(tmp_path):
    tree, symbols, remap = parse_tree(TREE_A_TEXT)
    sym = symbols.symbol
    prims = PrimitivesIndex(tree)
    naming = NamingIndex(tree)
    tok = lambda top, bottom: "".join(symbols.token(s) for s in path_string(tree, top, bottom))
    rank_a = naming.rank(0, 1)
    cases = [
        ("n", tree.n, 10),
        ("depth(7)", tree.depth[7], 4),
        ("children(4)", tree.children[4], [(sym("b"), 6), (sym("c"), 9)]),
        ("normalize remap", normalize(tree)[1], list(range(10))),
        ("parse remap", remap, list(range(10))),
        ("is_ancestor(4,9)", tree.is_ancestor(4, 9), True),
        ("is_ancestor(1,8)", tree.is_ancestor(1, 8), False),
        ("path 1~>7", tok(1, 7), "abc"),
        ("path 2~>9", tok(2, 9), "ac"),
        ("depth table", prims.depth, [0, 1, 1, 2, 2, 3, 3, 4, 4, 3]),
        ("LA(7,2)", prims.level_ancestor(7, 2), 3),
        ("NCA(8,9)", prims.nca(8, 9), 4),
        ("NCA(7,8)", prims.nca(7, 8), 0),
        ("child(4,b)", prims.child_by_label(4, sym("b")), 6),
        ("child(4,z)", prims.child_by_label(4, len(symbols)), None),
        ("rank_1(5)=rank_1(6)", naming.rank(1, 5) == naming.rank(1, 6), True),
        ("rank_0 class of a", {v for v in range(1, 10) if naming.rank(0, v) == rank_a}, {1, 3, 4}),
        ("name(5,2)=name(6,2)", naming.name_fixed(5, 2) == naming.name_fixed(6, 2), True),
        ("name(7,2)=name(8,2)", naming.name_fixed(7, 2) == naming.name_fixed(8, 2), False),
        ("paths_equal(5,6,2)", naming.paths_equal(5, 6, 2), True),
        ("paths_equal(7,8,3)", naming.paths_equal(7, 8, 3), False),
        ("upward_lce(5,6)", naming.upward_lce(5, 6), 2),
        ("upward_lce(7,8)", naming.upward_lce(7, 8), 0),
        ("lce_pp_simple(1,7,2,8)", naming.lce_pp_simple(1, 7, 2, 8), LceResult(2, 5, 6)),
        ("lce_pp_simple(0,7,0,8)", naming.lce_pp_simple(0, 7, 0, 8).length, 0),
        ("oracle_pp(1,7,2,8)", oracle_pp(tree, 1, 7, 2, 8), LceResult(2, 5, 6)),
        ("oracle_pt(1,7,2)", oracle_pt(tree, 1, 7, 2).length, 2),
        ("oracle_tt(1,2)", oracle_tt(tree, 1, 2).length, 2),
    ]
    for mode in ("simple", "compact"):
        pp = PpIndex(tree, PpConfig(mode), naming)
        pt = PtIndex(tree, PtConfig(mode), naming)
        cases += [
            (f"{mode} PP(1,7,2,8)", pp.query(1, 7, 2, 8), LceResult(2, 5, 6)),
            (f"{mode} PP(1,7,1,7)", pp.query(1, 7, 1, 7), LceResult(3, 7, 7)),
            (f"{mode} PP(0,7,0,8)", pp.query(0, 7, 0, 8).length, 0),
            (f"{mode} PT(1,7,2)", pt.query(1, 7, 2), LcePtResult(2, 5, 6)),
            (f"{mode} PT(1,3,2)", pt.query(1, 3, 2), LcePtResult(1, 3, 4)),
        ]
    for tau in range(1, 11):
        tt = TtIndex(tree, tau)
        cases += [
            (f"TT tau={tau} (1,2)", tt.query(1, 2), LceTtResult(2, 5, 6)),
            (f"TT tau={tau} (0,0)", tt.query(0, 0), LceTtResult(4, 7, 7)),
        ]
    f = tmp_path / "tree_a.txt"
    f.write_text(TREE_A_TEXT)
    out = io.StringIO()
    run_cli(["query", "--tree", str(f)], io.StringIO("PP 1 7 2 8\n"), out, io.StringIO())
    cases.append(("cli PP 1 7 2 8", out.getvalue(), "2 5 6\n"))
    return [(name, got, want) for name, got, want in cases if got != want], len(cases)


def identity_violations(tree):
    bad = 0
    n = tree.n
    leaves = [leaves_below(tree, v) for v in range(n)]
    for v1 in range(n):
        for v2 in range(n):
            best = max(oracle_pp(tree, v1, a, v2, b).length for a in leaves[v1] for b in leaves[v2])
            bad += oracle_tt(tree, v1, v2).length != best
    for v1 in range(n):
        for w1 in descendants(tree, v1):
            for v2 in range(n):
                best = max(oracle_pp(tree, v1, w1, v2, u).length for u in leaves[v2])
                bad += oracle_pt(tree, v1, w1, v2).length != best
    return bad


def test_exhaustive_micro(capsys, tmp_path):
    failed, count = tree_a_fixtures(tmp_path)
    trees = 0
    bad = 0
    for shape in SHAPES:
        for sigma in (1, 2, 3):
            for n in (12, 30, 60):
                bad += identity_violations(gen_random_tree(GenSpec(n, sigma, shape, seed=n + sigma)))
                trees += 1
    ok = not failed and bad == 0
    report(capsys, 8, "exhaustive micro", ok,
           f"{count - len(failed)}/{count} fixture answers exact"
           + (f" (first failure {failed[0]})" if failed else "")
           + f", {bad} identity violations over {trees} trees with n <= 60")


# -- 9 ----------------------------------------------------------------


def test_build_budget(capsys):
    # a large alphabet keeps normalization from collapsing the random tree
    tree = gen_random_tree(GenSpec(10 ** 6, 1 << 16, "random", seed=9))
    t0 = time.time()
    naming = NamingIndex(tree)
    pp = PpIndex(tree, naming=naming)
    build = time.time() - t0
    rng = np.random.default_rng(9)
    qs = [random_pp_query(tree, rng) for _ in range(200)]
    wrong = sum(pp.query(*q).length != oracle_pp(tree, *q).length for q in qs)
    n_big = tree.n
    del pp, naming, tree
    gc.collect()

    tt_times = []
    for shape, sigma in (("random", 16), ("path", 1)):
        small = gen_random_tree(GenSpec(5000, sigma, shape, seed=9))
        t1 = time.time()
        tt = TtIndex(small, default_tau(small.n))
        tt_times.append((shape, small.n, time.time() - t1))
        for _ in range(200):
            v1, v2 = (int(v) for v in rng.integers(0, small.n, size=2))
            wrong += tt.query(v1, v2).length != oracle_tt(small, v1, v2).length
    ok = build < 120 and wrong == 0
    tt_text = ", ".join(f"{s} n={m} {t:.1f}s" for s, m, t in tt_times)
    report(capsys, 9, "build budget", ok,
           f"naming+PP on n={n_big} in {build:.1f}s < 120s; TT builds {tt_text}; "
           f"{wrong} wrong sample answers")
