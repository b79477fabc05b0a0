"""Certificates: good arcs, constructions for k=2/3/general, validation."""

import random
from fractions import Fraction

import pytest

import flipbench as fb
from flipbench.certificates import Arc, CertificateGraph, witness_entry
from flipbench.thresholds import Beta

from conftest import random_tau0, run_random, smoothed_instance, synth_traces


def _k2_trace(moves, n=3):
    inst = smoothed_instance(n, 2, 123)
    return fb.replay(inst, tuple([1] * n), moves)


def test_good_arc_odd_parity():
    # v moves at 1 and 3, u once in between: arc v->u is good
    trace = _k2_trace([fb.Move(0, 1, 2), fb.Move(1, 1, 2), fb.Move(0, 2, 1)])
    good, wit = fb.is_good_arc(trace, 0, 1)
    assert good and wit == (1, 3)
    arc = Arc(v=0, u=1, witness=wit)
    assert witness_entry(trace, arc) != 0


def test_good_arc_even_parity_fails():
    # u moves twice between the pair: entry cancels, arc not good
    trace = _k2_trace([fb.Move(0, 1, 2), fb.Move(1, 1, 2),
                       fb.Move(1, 2, 1), fb.Move(0, 2, 1)])
    good, wit = fb.is_good_arc(trace, 0, 1)
    assert not good and wit is None
    assert witness_entry(trace, Arc(v=0, u=1, witness=(1, 4))) == 0


def test_good_arc_requires_edge_and_sane_endpoints():
    inst = fb.Instance(n=3, k=2, edges=((0, 1),), weight_nums=(5,))
    trace = fb.replay(inst, (1, 1, 1),
                      [fb.Move(0, 1, 2), fb.Move(2, 1, 2), fb.Move(0, 2, 1)])
    good, _ = fb.is_good_arc(trace, 0, 2)  # odd parity but edge {0,2} missing
    assert not good
    with pytest.raises(fb.CertificateError):
        fb.is_good_arc(trace, 1, 0)  # vertex 1 does not move
    with pytest.raises(fb.CertificateError):
        fb.is_good_arc(trace, 0, 0)


def test_good_arc_general_k_matches_cycle_scan():
    traces = synth_traces(8, 3, 4, 12, want=2, seed0=500)
    assert traces
    for trace in traces:
        inst = trace.instance
        cyc_set = fb.cycles(trace.moves, 3)
        stats = fb.occurrence_stats(trace.moves)
        for v in sorted(stats.moving)[:3]:
            for u in range(inst.n):
                if u == v:
                    continue
                good, wit = fb.is_good_arc(trace, v, u)
                e = inst.edge_index(u, v)
                want = any(fb.columns_for(trace, [c.times]).entry(e, 0) != 0
                           for c in cyc_set.over(v))
                assert good == want
                if good:
                    assert witness_entry(trace, Arc(v, u, wit)) != 0


def _collect_k2_blocks(want, seed0=0, with_singletons=True):
    beta = Beta.sqrt_half()
    out = []
    seed = seed0
    while len(out) < want and seed < seed0 + 400:
        n = (16, 24, 32)[seed % 3]
        trace = run_random(n, 2, seed)
        seed += 1
        try:
            block = fb.find_critical_block(trace.moves, beta)
        except fb.BlockNotFoundError:
            continue
        sub = fb.slice_trace(trace, block.t1, block.t2)
        if with_singletons and not fb.occurrence_stats(sub.moves).singletons:
            continue
        out.append(sub)
    return out


def test_singleton_path_yields_good_arcs():
    blocks = _collect_k2_blocks(5)
    assert len(blocks) == 5
    checked = 0
    for sub in blocks:
        stats = fb.occurrence_stats(sub.moves)
        for v in sorted(stats.repeating)[:2]:
            path = fb.singleton_path(sub.moves, v)
            assert path and path[0].v == v
            assert path[-1].u in stats.singletons
            for a, b in zip(path, path[1:]):
                assert a.u == b.v
            for arc in path:
                assert witness_entry(sub, arc) != 0
            checked += 1
    assert checked >= 3


def test_singleton_path_argument_errors():
    trace = _k2_trace([fb.Move(0, 1, 2), fb.Move(1, 1, 2), fb.Move(0, 2, 1)])
    with pytest.raises(fb.CertificateError):
        fb.singleton_path(trace.moves, 1)  # singleton
    with pytest.raises(fb.CertificateError):
        fb.singleton_path(trace.moves, 2)  # does not move


def test_k2_certificate_on_natural_blocks():
    beta = Beta.sqrt_half()
    blocks = _collect_k2_blocks(8, seed0=100)
    assert len(blocks) == 8
    for sub in blocks:
        graph, bound = fb.build_k2_certificate(sub, beta)
        stats = fb.occurrence_stats(sub.moves)
        assert bound == max(stats.s2, beta.ceil_singleton_bound(stats.s1))
        assert bound >= beta.ceil_rank_bound(stats.s)
        verdict = fb.validate_certificate(graph, sub)
        assert verdict.valid, verdict.reason
        rank = fb.exact_rank(fb.build_P(sub, "pairs"))
        assert rank >= graph.n_arcs
        assert rank >= bound


def test_k2_certificate_refuses_non_critical_blocks():
    beta = Beta.sqrt_half()
    trace = _k2_trace([fb.Move(0, 1, 2), fb.Move(1, 1, 2), fb.Move(2, 1, 2)])
    with pytest.raises(fb.CertificateError):
        fb.build_k2_certificate(trace, beta)  # s=3, ell=3 < (1+beta)*3
    wrong_k = run_random(8, 3, 1)
    with pytest.raises(fb.CertificateError):
        fb.build_k2_certificate(wrong_k, beta)


def test_leaping_cycle_and_3cut_on_synthesized_blocks():
    traces = synth_traces(12, 3, 5, 15, want=4, seed0=0)
    assert len(traces) == 4
    for trace in traces:
        block = fb.two_critical_block(trace.moves)
        sub = fb.slice_trace(trace, block.t1, block.t2)
        assert all(d > 0 for d in sub.delta_nums)
        graph, bound = fb.build_3cut_certificate(sub, check_rank=True)
        stats = fb.occurrence_stats(sub.moves)
        assert bound >= -(-stats.s // 32)
        verdict = fb.validate_certificate(graph, sub)
        assert verdict.valid, verdict.reason


def test_leaping_cycle_argument_errors():
    traces = synth_traces(12, 3, 5, 15, want=1, seed0=40)
    trace = traces[0]
    with pytest.raises(fb.CertificateError):
        fb.leaping_cycle(trace, 0, 3, 2, 1)  # not increasing
    k2 = run_random(8, 2, 2)
    with pytest.raises(fb.CertificateError):
        fb.leaping_cycle(k2, 0, 1, 2, 3)
    with pytest.raises(fb.CertificateError):
        fb.is_tricky(trace, fb.Cycle(v=0, times=(1, 2), parts=(1, 2)))


def test_3cut_requires_complete_improving_k3():
    k4 = run_random(8, 4, 3)
    with pytest.raises(fb.CertificateError):
        fb.build_3cut_certificate(k4)
    inst = fb.Instance(n=2, k=3, edges=((0, 1),), weight_nums=(7,))
    bad = fb.replay(inst, (1, 1), [fb.Move(0, 1, 2), fb.Move(0, 2, 1)])
    with pytest.raises(fb.CertificateError):
        fb.build_3cut_certificate(bad)  # non-improving (and not complete)


def test_half_certificate_on_natural_k4_traces():
    done = 0
    for seed in range(20):
        trace = run_random(14, 4, 600 + seed)
        cyc, _ = fb.classify_cyclic(trace.moves, 4)
        graph, bound = fb.build_half_certificate(trace, check_rank=True)
        assert 2 * bound >= len(cyc)
        verdict = fb.validate_certificate(graph, trace)
        assert verdict.valid, verdict.reason
        if cyc:
            done += 1
    assert done >= 5


def test_half_certificate_refuses_non_improving():
    inst = fb.Instance(n=2, k=2, edges=((0, 1),), weight_nums=(7,))
    bad = fb.replay(inst, (1, 1), [fb.Move(0, 1, 2), fb.Move(0, 2, 1)])
    with pytest.raises(fb.CertificateError):
        fb.build_half_certificate(bad)


def test_validate_rejects_fabricated_arcs():
    trace = _k2_trace([fb.Move(0, 1, 2), fb.Move(1, 1, 2),
                       fb.Move(1, 2, 1), fb.Move(0, 2, 1)])
    # witness entry on {0,1} is zero (even parity)
    bogus = CertificateGraph(arcs_by_tail={0: (Arc(0, 1, (1, 4)),)})
    verdict = fb.validate_certificate(bogus, trace)
    assert not verdict.valid and "zero" in verdict.reason


def test_validate_rejects_directed_cycles_and_duplicate_rows():
    trace = _k2_trace([fb.Move(0, 1, 2), fb.Move(1, 1, 2), fb.Move(0, 2, 1),
                       fb.Move(1, 2, 1)])
    looped = CertificateGraph(arcs_by_tail={0: (Arc(0, 1, (1, 3)),),
                                            1: (Arc(1, 0, (2, 4)),)})
    verdict = fb.validate_certificate(looped, trace)
    assert not verdict.valid and "cycle" in verdict.reason
    doubled = CertificateGraph(arcs_by_tail={0: (Arc(0, 1, (1, 3)),
                                                 Arc(0, 1, (1, 3)))})
    verdict = fb.validate_certificate(doubled, trace)
    assert not verdict.valid


def test_validate_rejects_broken_staircase():
    # find a pair of v with two adjacent odd-parity vertices; listing both
    # arcs with the same witness breaks the staircase zero pattern
    for seed in range(200):
        trace = run_random(16, 2, 700 + seed)
        stats = fb.occurrence_stats(trace.moves)
        for v in sorted(stats.repeating):
            ts = stats.times[v]
            for a, b in zip(ts, ts[1:]):
                inside = {}
                for t in range(a + 1, b):
                    w = trace.moves[t - 1].v
                    inside[w] = inside.get(w, 0) + 1
                odd = sorted(u for u, c in inside.items()
                             if c % 2 == 1 and u != v)
                if len(odd) >= 2:
                    graph = CertificateGraph(arcs_by_tail={
                        v: (Arc(v, odd[0], (a, b)), Arc(v, odd[1], (a, b)))})
                    verdict = fb.validate_certificate(graph, trace)
                    assert not verdict.valid
                    assert "staircase" in verdict.reason
                    return
    pytest.fail("no two-headed odd pair found in the search budget")


def test_empty_certificate_is_trivially_valid():
    trace = run_random(8, 2, 4)
    verdict = fb.validate_certificate(CertificateGraph(arcs_by_tail={}), trace)
    assert verdict.valid and verdict.rank_bound == 0


def test_bound_tradeoff_identity():
    # max{(1-l)/2, l/18 - (1-l)/3} >= 1/32 for every l in [0,1]
    for i in range(0, 1001):
        lam = Fraction(i, 1000)
        a = (1 - lam) / 2
        b = lam / 18 - (1 - lam) / 3
        assert max(a, b) >= Fraction(1, 32)
