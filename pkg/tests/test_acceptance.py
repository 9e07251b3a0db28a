"""End-to-end acceptance suite: corpus fidelity, oracle agreement,
transformation soundness, gadget pipelines, algebra laws, and fuzzing."""

import itertools
import random
import time

import pytest

from toposat import formula as F
from toposat import transform as T
from toposat.cli import _corpus_entry_ok, main
from toposat.formula import Not, parse, print_formula
from toposat.frames import Model, QuasiSawFrame, broom, make_fence
from toposat.gadgets import (MBox, atm_rejecter, brute_force_tiling,
                             computation_tree, corpus, gen_atm_formula,
                             gen_tiling_formula, gen_tiling_witness,
                             gen_tm_formula, gen_tm_witness, gen_tree_witness,
                             run_of, tiles_matched_quad, tiles_mismatched,
                             tiles_uniform, tm_accepter, tm_rejecter)
from toposat.semantics import count_components, eval_term, holds
from toposat.solver import (check_certificate, fork_bound, sat_bounded,
                            sat_forks, solve)

from conftest import (rand_b_term, rand_bc_formula, rand_c_conjunction,
                      rand_quasi_order, rand_rc_model, rand_rc_valuation)

SEED = 20260824


def test_corpus_fidelity(tmp_path):
    start = time.monotonic()
    entries = {e.name: e for e in corpus()}
    assert len(entries) >= 15
    for entry in entries.values():
        assert _corpus_entry_ok(entry), entry.name

    # validity of contact distribution over sums, through the CLI
    path = tmp_path / "dist.txt"
    path.write_text(print_formula(entries["ec-distribution"].formula) + "\n",
                    encoding="utf-8")
    assert main(["valid", str(path)]) == 20

    # three validities re-checked on 500 random models each
    rng = random.Random(SEED)
    overlap = entries["overlap-joins-components"].formula
    counts = entries["component-count-sum"].formula
    for _ in range(500):
        model = rand_rc_model(rng, ["r1", "r2"])
        assert holds(model, overlap).truth
        assert holds(model, counts).truth
    sandwich = entries["sandwich-connected"].formula
    for _ in range(500):
        saw = rand_rc_model(rng, []).frame
        points = sorted(saw.points)
        val = {v: frozenset(p for p in points if rng.random() < 0.5)
               for v in ("x", "y")}
        assert holds(Model(saw, val, "all"), sandwich).truth

    # the smallest connected model with a disconnected region has 5 points
    fork = entries["two-fork"]
    result = solve(fork.formula, "conregc", 5)
    assert result.status == "SAT" and result.bound_used == 5
    assert time.monotonic() - start <= 300


def test_fork_oracle_agreement(rng):
    start = time.monotonic()
    total = 0
    for _ in range(10000):
        f = rand_c_conjunction(rng, ["a", "b", "c"], max_atoms=3)
        quick = sat_forks(f)
        slow = sat_bounded(f, "regc", fork_bound(f))
        assert (quick.status == "SAT") == (slow.status == "SAT"), \
            print_formula(f)
        assert slow.status in ("SAT", "UNSAT")
        total += 1
    assert total >= 10000
    assert time.monotonic() - start <= 600


def test_broom_preservation(rng):
    for _ in range(500):
        frame = rand_quasi_order(rng, 6)
        names = ["r1", "r2"]
        val = {}
        for v in names:
            raw = frozenset(p for p in frame.points if rng.random() < 0.5)
            val[v] = frame.closure(frame.interior(frame.closure(raw)))
        model = Model(frame, val, "regc")
        flat = broom(model)
        for _ in range(3):
            t = rand_b_term(rng, names, 3)
            ext = eval_term(model, t)
            assert eval_term(flat, t) == ext
            assert (count_components(flat, t) ==
                    len(frame.components(ext)) if ext else True)
            assert count_components(flat, t) == count_components(model, t)


CC_CORPUS = [
    "C(a, b) & conn(a)",
    "C(a, b) & conn(a) & conn(b)",
    "C(a, b) & conn(a + b)",
    "C(a, -a) & conn(1)",
    "C(a, b) & conn(a) & a * b = 0",
    "C(a, b) & conn(a * b) & a * b != 0",
    "C(a + b, c) & conn(c)",
    "C(a, b) & C(b, c) & conn(b)",
    "conn(a) & a != 0 & C(a, a)",
    "C(a, b) & conn(a) & b <= a",
    "C(a, -b) & conn(b) & b != 1",
    "C(a, b) & conn(a + b) & a != 0 & b != 0",
    "C(a, b) & C(a, c) & conn(a) & b * c = 0",
    "conn(a) & conn(-a) & C(a, -a)",
    "C(a * b, c) & conn(c) & a * b != 0",
    "C(a, b) & conn(a) & conn(b) & conn(a + b)",
    "C(a, b + c) & conn(a) & b != 0",
    "C(a, b) & conn(-a) & a != 1",
    "conn(a) & conn(b) & C(a, b) & a != b",
    "C(a, b) & C(b, c) & C(a, c) & conn(a + b + c)",
]


def _node_count(f) -> int:
    count = 0
    stack = [f]
    while stack:
        node = stack.pop()
        count += 1
        for attr in ("left", "right", "arg", "term"):
            if hasattr(node, attr):
                stack.append(getattr(node, attr))
        if hasattr(node, "terms"):
            stack.extend(node.terms)
    return count


def test_contact_elimination_equisat():
    assert len(CC_CORPUS) == 20
    for text in CC_CORPUS:
        f = parse(text)
        assert F.classify(f) == "Cc", text
        plain = T.eliminate_contacts(f)
        joined = T.eliminate_contacts(f, connected=True)
        for g in (plain, joined):
            assert not any(isinstance(a, F.Contact) for a in F.atoms(g))
            assert _node_count(g) <= 3 * _node_count(f) + 40, text
        r1 = sat_bounded(f, "regc", 10)
        r2 = solve(plain, "regc", 10)
        assert (r1.status == "SAT") == (r2.status == "SAT"), text
        r3 = sat_bounded(f, "conregc", 10)
        r4 = solve(joined, "conregc", 10)
        assert (r3.status == "SAT") == (r4.status == "SAT"), text


def test_dagger_lift(rng):
    for _ in range(300):
        model = rand_rc_model(rng, ["a", "b"])
        saw = model.frame
        lifted = {}
        for v, region in model.valuation.items():
            # decorating the support with extra limit points keeps the
            # regular part: cl(int(Y)) recovers the original region
            extra = frozenset(z for z in saw.depth1 if rng.random() < 0.5)
            Y = saw.support(region) | extra
            assert saw.closure(saw.interior(Y)) == region
            lifted[v] = Y
        lift = Model(saw, lifted, "all")
        f = rand_c_conjunction(rng, ["a", "b"], max_atoms=3)
        assert holds(model, f).truth == holds(lift, T.dagger(f)).truth


def test_fp_translation(rng):
    for _ in range(300):
        n = rng.randint(1, 6)
        fence = make_fence(n)
        val = rand_rc_valuation(rng, fence, ["a", "b"])
        model = Model(fence, val, "fence")
        f = rand_bc_formula(rng, ["a", "b"], max_atoms=5)
        g = T.fp_translate(f)
        truth = holds(model, f).truth
        for cell in range(2 * n - 1):
            assert T.fp_modelcheck(model, g, cell) == truth


def test_machine_end_to_end():
    acc = tm_accepter()
    f = gen_tm_formula(acc, ())
    witness = gen_tm_witness(acc, (), run_of(acc, ()))
    assert holds(witness, f).truth
    start = time.monotonic()
    found = sat_bounded(f, "conregc", 5)
    assert found.status == "SAT"
    assert time.monotonic() - start <= 30

    rejected = sat_bounded(gen_tm_formula(tm_rejecter(), ()), "conregc", 4)
    assert rejected.status == "UNSAT_WITHIN_BOUND"


def test_tiling_end_to_end():
    for tiles, d in ((tiles_uniform(), 1), (tiles_matched_quad(), 2)):
        tiling = brute_force_tiling(tiles, 0, d)
        assert tiling is not None
        witness = gen_tiling_witness(tiles, tiling, d)
        start = time.monotonic()
        assert holds(witness, gen_tiling_formula(tiles, 0, d)).truth
        assert time.monotonic() - start <= 10

    assert brute_force_tiling(tiles_mismatched(), 0, 1) is None
    bad = gen_tiling_formula(tiles_mismatched(), 0, 1)
    result = sat_bounded(bad, "regc", 14, time_budget=90)
    assert result.status == "UNSAT_WITHIN_BOUND"
    assert not result.stats.get("aborted"), \
        "refutation did not exhaust all frames up to 14 points in time"
    assert result.bound_used == 14


def test_tree_end_to_end():
    m = atm_rejecter()
    tree = computation_tree(m, ())
    boxes = [g for g in tree.subformulas if isinstance(g, MBox)]
    witness = gen_tree_witness(tree, boxes)
    start = time.monotonic()
    assert holds(witness, gen_atm_formula(m, ())).truth
    assert time.monotonic() - start <= 10


def _all_small_saws():
    for p in range(1, 5):
        teeth = [f"t{i}" for i in range(p)]
        subsets = [frozenset(c) for size in range(1, p + 1)
                   for c in itertools.combinations(teeth, size)]
        for q in range(4):
            for combo in itertools.combinations_with_replacement(subsets, q):
                succ1 = {f"z{j}": set(s) for j, s in enumerate(combo)}
                yield QuasiSawFrame(teeth, succ1.keys(), succ1)


def test_rc_algebra_laws():
    start = time.monotonic()
    checked = 0
    for saw in _all_small_saws():
        checked += 1
        teeth = sorted(saw.depth0)
        supports = [frozenset(c) for size in range(len(teeth) + 1)
                    for c in itertools.combinations(teeth, size)]
        regions = [saw.rc_from_support(U) for U in supports]
        # support is a bijection onto the regular closed sets
        assert len(set(regions)) == len(supports)
        assert set(regions) == set(saw.regular_closed_sets())
        for U, X in zip(supports, regions):
            assert saw.support(X) == U
            assert saw.closure(saw.interior(X)) == X

        # closure and interior are dual on every subset of points
        points = sorted(saw.points)
        for size in range(len(points) + 1):
            for c in itertools.combinations(points, size):
                Y = frozenset(c)
                assert saw.interior(Y) == saw.complement(
                    saw.closure(saw.complement(Y)))

        def meet(X, Y):
            return saw.closure(saw.interior(X & Y))

        def compl(X):
            return saw.closure(saw.complement(X))

        top = saw.rc_from_support(frozenset(teeth))
        bot = frozenset()
        # the topological operations mirror the support sets, so the
        # Boolean laws reduce to set algebra over the teeth
        for X, Y in itertools.product(regions, repeat=2):
            assert X | Y == saw.rc_from_support(saw.support(X) | saw.support(Y))
            assert meet(X, Y) == saw.rc_from_support(
                saw.support(X) & saw.support(Y))
            assert meet(X, Y) == meet(Y, X)
            assert X | (X | Y) == X | Y
        for X in regions:
            assert compl(X) == saw.rc_from_support(
                frozenset(teeth) - saw.support(X))
            assert X | compl(X) == top
            assert meet(X, compl(X)) == bot
            assert compl(compl(X)) == X
            assert X | bot == X and meet(X, top) == X
        # distributivity, through the support isomorphism just verified
        for a, b, c in itertools.product(supports, repeat=3):
            assert a & (b | c) == (a & b) | (a & c)
            assert a | (b & c) == (a | b) & (a | c)
    assert checked == 4 + 20 + 120 + 816
    assert time.monotonic() - start <= 120


def test_certificate_soundness(rng):
    for i in range(10000):
        if rng.random() < 0.7:
            f = rand_c_conjunction(rng, ["a", "b", "c"], max_atoms=3)
            result = solve(f, "regc")
        else:
            f = rand_bc_formula(rng, ["a", "b"], max_atoms=3)
            result = solve(f, "regc", 3, time_budget=0.05)
        if result.status == "SAT":
            assert check_certificate(result.certificate, f), print_formula(f)
