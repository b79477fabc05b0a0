"""Rank certificates: arc graphs whose edge rows of P are provably independent.

A certificate is a directed acyclic graph over the moving vertices.  Each
arc v->u carries a witness column (a pair or cycle over the tail v) whose
entry on edge {u,v} is nonzero, and the per-tail arc ordering satisfies a
staircase zero pattern, which forces the corresponding rows of the
combined matrix P to be linearly independent.  Hence rank(P) >= #arcs.

Three constructions are provided:
  * k=2 blocks: functional reverse-BFS graph from the singleton vertices,
    augmented with one arc per gap between adjacent transition blocks;
  * k=3 complete graphs: leaping-cycle windows over the cyclic blocks of
    every cyclic vertex;
  * general k: one arc per cyclic vertex, then break functional cycles.

Every construction is re-validated against the actual matrix rather than
trusted; validate_certificate uses its own rational elimination so the
check does not share code with exact_rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .analysis import (Cycle, Segment, classify_cyclic, cycles,
                       occurrence_stats, transition_singleton_blocks)
from .engine import Trace
from .matrices import SignMatrix, build_P, columns_for, exact_rank
from .model import Instance, ModelError, Move
from .thresholds import Beta


class CertificateError(ModelError):
    pass


@dataclass(frozen=True)
class Arc:
    v: int          # tail
    u: int          # head
    witness: tuple  # 1-based time-steps of the witness pair/cycle over v


@dataclass(frozen=True)
class CertificateGraph:
    """Arcs grouped by tail; per-tail tuples are in independence order."""

    arcs_by_tail: dict

    @property
    def arcs(self) -> tuple:
        out = []
        for v in sorted(self.arcs_by_tail):
            out.extend(self.arcs_by_tail[v])
        return tuple(out)

    @property
    def n_arcs(self) -> int:
        return sum(len(a) for a in self.arcs_by_tail.values())

    def to_text(self) -> str:
        lines = []
        for arc in self.arcs:
            ts = ",".join(str(t) for t in arc.witness)
            lines.append(f"{arc.v} {arc.u} {ts}")
        return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class Verdict:
    valid: bool
    rank_bound: int
    reason: str = ""


# --- good arcs ---------------------------------------------------------------

def _occurrences_between(times, t1: int, t2: int) -> int:
    return sum(1 for t in times if t1 < t < t2)


def is_good_arc(trace: Trace, v: int, u: int):
    """(verdict, witness times): some pair/cycle over v hits edge {u,v}.

    For k=2 a pair of v works iff u appears an odd number of times
    strictly between the two time-steps; for general k the combined
    columns of v's cycles are scanned directly.
    """
    inst = trace.instance
    stats = occurrence_stats(trace.moves)
    if v not in stats.moving:
        raise CertificateError(f"vertex {v} does not move")
    if u == v:
        raise CertificateError("arc endpoints must differ")
    if inst.k == 2:
        if inst.edge_index(u, v) is None:
            return False, None
        ts_v = stats.times[v]
        ts_u = stats.times.get(u, ())
        for t1, t2 in zip(ts_v, ts_v[1:]):
            if _occurrences_between(ts_u, t1, t2) % 2 == 1:
                return True, (t1, t2)
        return False, None
    e = inst.edge_index(u, v)
    if e is None:
        return False, None
    for cyc in cycles(trace.moves, inst.k).over(v):
        mat = columns_for(trace, [cyc.times])
        if mat.entry(e, 0) != 0:
            return True, cyc.times
    return False, None


def witness_entry(trace: Trace, arc: Arc) -> int:
    """Entry of the arc's witness column on row {u,v}."""
    e = trace.instance.edge_index(arc.u, arc.v)
    if e is None:
        return 0
    mat = columns_for(trace, [arc.witness])
    return mat.entry(e, 0)


# --- k=2: singleton paths and the functional certificate ---------------------

def _sub_stats(moves, t1, t2):
    return occurrence_stats(moves[t1 - 1:t2])


def singleton_path(moves: Sequence[Move], v: int):
    """Chain of good arcs from a repeating vertex to a singleton (k=2).

    Grows a nested chain of blocks: start with a pair of v, repeatedly
    take a singleton u of the current block, and if u repeats in the
    whole block, extend the chain to u's paired occurrence outside.
    Termination is guaranteed for critical blocks (every proper
    sub-block has a singleton).  Arbitrary choices resolve to smallest
    vertex index.
    """
    stats = occurrence_stats(moves)
    if v in stats.singletons:
        raise CertificateError(f"vertex {v} is a singleton; no path needed")
    if v not in stats.moving:
        raise CertificateError(f"vertex {v} does not move")
    if not stats.singletons:
        raise CertificateError("block has no singleton vertices")

    ts_v = stats.times[v]
    t1, t2 = ts_v[0], ts_v[1]
    chain_blocks = [(t1, t2)]  # B_0, B_1, ... as index ranges
    chain_vertices = [v]       # u_0, u_1, ...

    def pick_singleton(a, b):
        sub = _sub_stats(moves, a, b)
        if not sub.singletons:
            raise CertificateError(
                f"sub-block [{a},{b}] has no singleton; block is not critical")
        return min(sub.singletons)

    u = pick_singleton(t1, t2)
    guard = 0
    while u not in stats.singletons:
        guard += 1
        if guard > len(moves):
            raise CertificateError("singleton-path procedure failed to terminate")
        chain_vertices.append(u)
        a, b = chain_blocks[-1]
        r_u = next(t for t in stats.times[u] if a <= t <= b)
        ts_u = stats.times[u]
        idx = ts_u.index(r_u)
        # paired occurrence outside the current block; prefer the later one
        if idx + 1 < len(ts_u) and ts_u[idx + 1] > b:
            q_u = ts_u[idx + 1]
        elif idx > 0 and ts_u[idx - 1] < a:
            q_u = ts_u[idx - 1]
        else:
            raise CertificateError(
                f"vertex {u} repeats inside block [{a},{b}]; procedure contract broken")
        a2, b2 = min(a, q_u), max(b, q_u)
        chain_blocks.append((a2, b2))
        u = pick_singleton(a2, b2)
    chain_vertices.append(u)

    # condition (v): u_i gets an in-arc from u_h, h = smallest index with
    # u_i a singleton of B_h; follow those in-arcs back from the end
    def smallest_holder(i):
        ui = chain_vertices[i]
        for h, (a, b) in enumerate(chain_blocks):
            if h >= i:
                break
            sub = _sub_stats(moves, a, b)
            if ui in sub.singletons:
                return h
        raise CertificateError("no holder block found; procedure contract broken")

    path = []
    i = len(chain_vertices) - 1
    while i > 0:
        h = smallest_holder(i)
        tail, head = chain_vertices[h], chain_vertices[i]
        good, wit = _good_pair_k2(stats, tail, head)
        if not good:
            raise CertificateError(f"arc {tail}->{head} failed the parity check")
        path.append(Arc(v=tail, u=head, witness=wit))
        i = h
    path.reverse()
    return path


def _good_pair_k2(stats, v, u):
    ts_u = stats.times.get(u, ())
    ts_v = stats.times[v]
    for a, b in zip(ts_v, ts_v[1:]):
        if _occurrences_between(ts_u, a, b) % 2 == 1:
            return True, (a, b)
    return False, None


def build_k2_certificate(trace: Trace, beta: Beta):
    """Functional reverse-BFS certificate plus gap arcs, for a critical block.

    Returns (graph, bound) with bound = max{s2, ceil(beta/(1+beta)*s1)};
    the graph has at least s2 + sum over repeating-in-many-blocks vertices
    of (b(v) - 2) arcs.  The trace must be the block itself, replayed from
    its own starting configuration.
    """
    inst = trace.instance
    if inst.k != 2:
        raise CertificateError("k=2 certificate requires a 2-cut trace")
    moves = trace.moves
    stats = occurrence_stats(moves)
    if not stats.singletons:
        raise CertificateError("block has no singleton vertices")
    if not beta.qualifies(len(moves), stats.s):
        raise CertificateError("block does not meet the criticality threshold")

    # all good arcs out of repeating vertices, with one witness each
    witness: dict = {}
    heads: dict = {v: set() for v in stats.repeating}
    for v in sorted(stats.repeating):
        ts_v = stats.times[v]
        for a, b in zip(ts_v, ts_v[1:]):
            inside: dict = {}
            for t in range(a + 1, b):
                w = moves[t - 1].v
                inside[w] = inside.get(w, 0) + 1
            for u, cnt in inside.items():
                if cnt % 2 == 1 and u != v and inst.edge_index(u, v) is not None:
                    heads[v].add(u)
                    witness.setdefault((v, u), (a, b))

    # reverse BFS from the singletons along good arcs
    tails_of: dict = {}
    for v, hs in heads.items():
        for u in hs:
            tails_of.setdefault(u, []).append(v)
    tree: dict = {}
    queue = sorted(stats.singletons)
    seen = set(queue)
    qi = 0
    while qi < len(queue):
        u = queue[qi]
        qi += 1
        for v in sorted(tails_of.get(u, ())):
            if v not in seen:
                seen.add(v)
                tree[v] = Arc(v=v, u=u, witness=witness[(v, u)])
                queue.append(v)
    missing = stats.repeating - set(tree)
    if missing:
        raise CertificateError(
            f"reverse BFS did not reach vertices {sorted(missing)}; block is not critical")

    # augmentation: one straddling-pair arc per gap between adjacent
    # transition blocks of each vertex, head = a singleton in the gap
    segments = transition_singleton_blocks(moves)
    trans_of: dict = {}
    for seg in segments:
        if not seg.special:
            continue
        for t in range(seg.t1, seg.t2 + 1):
            w = moves[t - 1].v
            trans_of.setdefault(w, [])
            if not trans_of[w] or trans_of[w][-1] != (seg.t1, seg.t2):
                if (seg.t1, seg.t2) not in trans_of[w]:
                    trans_of[w].append((seg.t1, seg.t2))

    arcs_by_tail: dict = {}
    for v in sorted(stats.repeating):
        tree_arc = tree[v]
        gap_arcs = []
        blocks_v = trans_of.get(v, [])
        for (a1, b1), (a2, b2) in zip(blocks_v, blocks_v[1:]):
            t_a = max(t for t in stats.times[v] if t <= b1)
            t_b = min(t for t in stats.times[v] if t >= a2)
            cands = sorted(u for u in {moves[t - 1].v for t in range(t_a + 1, t_b)}
                           & stats.singletons
                           if inst.edge_index(u, v) is not None)
            if not cands:
                continue
            u = cands[0]
            gap_arcs.append(Arc(v=v, u=u, witness=(t_a, t_b)))
        # at most one gap head can sit inside the tree witness pair and
        # break the staircase; discard that arc (and any duplicate head)
        x1, x2 = tree_arc.witness
        kept = []
        for arc in gap_arcs:
            if arc.u == tree_arc.u:
                continue
            t_u = stats.times[arc.u][0]
            if x1 < t_u < x2:
                continue
            kept.append(arc)
        arcs_by_tail[v] = (tree_arc, *kept)

    graph = CertificateGraph(arcs_by_tail=arcs_by_tail)
    bound = max(stats.s2, beta.ceil_singleton_bound(stats.s1))
    return graph, bound


# --- k=3 complete graphs: leaping cycles -------------------------------------

def _cyclic_segments(moves, k):
    cyc, _ = classify_cyclic(moves, k)
    from .analysis import _alternating
    return [s for s in _alternating(moves, cyc) if s.special], cyc


def _segment_of(segments, t):
    for i, seg in enumerate(segments):
        if seg.t1 <= t <= seg.t2:
            return i
    return None


def leaping_cycle(trace: Trace, v: int, t1: int, t2: int, t3: int) -> Cycle:
    """A leaping cycle over v spanning its three given cyclic blocks (k=3).

    Case analysis over the part trajectory after the last occurrence t1'
    of v in the first block: a direct reverse move gives a 2-cycle; a
    move back into the starting part via the third part forces an
    intermediate move and gives a 3-cycle; otherwise the last occurrence
    in the second block and the first in the third form a 2-cycle.
    """
    if trace.instance.k != 3:
        raise CertificateError("leaping cycles are defined for k=3")
    moves = trace.moves
    if not t1 < t2 < t3:
        raise CertificateError("time-steps must be increasing")
    segments, cyc = _cyclic_segments(moves, 3)
    if v not in cyc:
        raise CertificateError(f"vertex {v} is not cyclic")
    blocks = [_segment_of(segments, t) for t in (t1, t2, t3)]
    if None in blocks or len(set(blocks)) != 3:
        raise CertificateError("time-steps must lie in three distinct cyclic blocks")
    for t in (t1, t2, t3):
        if moves[t - 1].v != v:
            raise CertificateError(f"step {t} does not move vertex {v}")

    stats = occurrence_stats(moves)
    ts_v = stats.times[v]

    def last_in(seg_idx):
        seg = segments[seg_idx]
        return max(t for t in ts_v if seg.t1 <= t <= seg.t2)

    def first_in(seg_idx):
        seg = segments[seg_idx]
        return min(t for t in ts_v if seg.t1 <= t <= seg.t2)

    tp1, tp2, tp3 = last_in(blocks[0]), last_in(blocks[1]), last_in(blocks[2])
    a, b = moves[tp1 - 1].p, moves[tp1 - 1].q
    c = ({1, 2, 3} - {a, b}).pop()

    span = [t for t in ts_v if tp1 <= t <= tp3]
    # Case 1: v moves b -> a somewhere in the span
    for t in span:
        if moves[t - 1].p == b and moves[t - 1].q == a:
            return Cycle(v=v, times=(tp1, t), parts=(a, b))
    # Case 2: v moves c -> a; a b -> c move is forced in between
    for t in span:
        if moves[t - 1].p == c and moves[t - 1].q == a:
            for tm in span:
                if tp1 < tm < t and moves[tm - 1].p == b and moves[tm - 1].q == c:
                    return Cycle(v=v, times=(tp1, tm, t), parts=(a, b, c))
            raise CertificateError("missing forced intermediate move; trace invalid")
    # Case 3: last occurrence in block 2 and first in block 3 reverse each other
    t_first3 = first_in(blocks[2])
    m2, m3 = moves[tp2 - 1], moves[t_first3 - 1]
    if m2.q == m3.p and m3.q == m2.p:
        return Cycle(v=v, times=(tp2, t_first3), parts=(m2.p, m3.p))
    raise CertificateError("case analysis failed; trace violates the move chaining")


def is_tricky(trace: Trace, cyc: Cycle) -> bool:
    """A leaping 3-cycle is tricky iff its steps sit in three distinct
    cyclic blocks and the acyclic vertices appearing in [t1,t2] and in
    [t2,t3] coincide."""
    if len(cyc.times) != 3:
        raise CertificateError("trickiness is defined for 3-cycles")
    moves = trace.moves
    segments, cyclic_set = _cyclic_segments(moves, trace.instance.k)
    blocks = [_segment_of(segments, t) for t in cyc.times]
    if None in blocks:
        raise CertificateError("cycle steps must lie in cyclic blocks")
    if len(set(blocks)) < 2:
        raise CertificateError("cycle is not leaping")
    if len(set(blocks)) != 3:
        return False
    t1, t2, t3 = cyc.times
    acyc = {m.v for m in moves} - cyclic_set

    def middle(lo, hi):
        return {moves[t - 1].v for t in range(lo, hi + 1)} & acyc

    return middle(t1, t2) == middle(t2, t3)


def neighborwise_arcs_3cut(trace: Trace, v: int):
    """Ordered good arcs out of a cyclic vertex, one per surviving window.

    Groups v's cyclic blocks into overlapping windows of four, takes a
    non-tricky leaping cycle per window (of the two candidates at most
    one can be tricky), finds an acyclic witness vertex in the window's
    gaps, then filters to a neighbor-wise independent subsequence of at
    least ceil(floor((b-1)/3)/2) arcs.  Complete graphs only: the
    witness argument needs every edge {u,v} to exist.
    """
    inst = trace.instance
    if inst.k != 3:
        raise CertificateError("three-part certificate requires k=3")
    if not inst.complete:
        raise CertificateError("witness argument requires a complete graph")
    moves = trace.moves
    segments, cyclic_set = _cyclic_segments(moves, 3)
    if v not in cyclic_set:
        raise CertificateError(f"vertex {v} is not cyclic")
    stats = occurrence_stats(moves)
    acyc = stats.moving - cyclic_set
    v_blocks = []
    for i, seg in enumerate(segments):
        if any(seg.t1 <= t <= seg.t2 for t in stats.times[v]):
            v_blocks.append(i)
    b = len(v_blocks)
    big_r = (b - 1) // 3
    if big_r == 0:
        return []

    window_cycles = []
    window_gap_sets = []
    for r in range(1, big_r + 1):
        win = v_blocks[3 * (r - 1):3 * (r - 1) + 4]
        occ = lambda i: [t for t in stats.times[v]
                         if segments[i].t1 <= t <= segments[i].t2]
        cand1 = leaping_cycle(trace, v, occ(win[0])[-1], occ(win[1])[-1],
                              occ(win[2])[-1])
        cand2 = leaping_cycle(trace, v, occ(win[1])[-1], occ(win[2])[-1],
                              occ(win[3])[-1])
        tricky1 = len(cand1.times) == 3 and is_tricky(trace, cand1)
        chosen = cand2 if tricky1 else cand1
        if tricky1 and len(chosen.times) == 3 and is_tricky(trace, chosen):
            raise CertificateError("both window cycles tricky; contract broken")
        # gap vertex set: acyclic vertices strictly between consecutive
        # window blocks of v
        gap_vertices = set()
        for i, j in zip(win, win[1:]):
            for t in range(segments[i].t2 + 1, segments[j].t1):
                if moves[t - 1].v in acyc:
                    gap_vertices.add(moves[t - 1].v)
        window_cycles.append(chosen)
        window_gap_sets.append(gap_vertices)

    witnesses = []
    for r in range(big_r):
        cyc = window_cycles[r]
        mat = columns_for(trace, [cyc.times])
        found = None
        for u in sorted(window_gap_sets[r]):
            e = inst.edge_index(u, v)
            if e is not None and mat.entry(e, 0) != 0:
                found = u
                break
        if found is None:
            raise CertificateError(
                f"no gap witness with nonzero entry for window {r + 1}")
        witnesses.append(found)

    # selection: repeatedly take the smallest live window index, emit its
    # witness, and kill every window whose gaps contain that witness
    live = list(range(big_r))
    picked = []
    while live:
        r = live[0]
        w = witnesses[r]
        picked.append(w)
        live = [i for i in live if w not in window_gap_sets[i]]
    # reverse, attaching each vertex's least-index window cycle
    arcs = []
    for w in reversed(picked):
        r = next(i for i in range(big_r) if witnesses[i] == w)
        arcs.append(Arc(v=v, u=w, witness=window_cycles[r].times))
    return arcs


def build_3cut_certificate(trace: Trace, check_rank: bool = True):
    """Certificate for a 2-critical block on a complete graph, k=3.

    Returns (graph, bound) with bound = max{ceil(c/2), #window arcs} and
    asserts bound >= ceil(s/32) plus, when check_rank is set, that the
    exact rank of the cycle matrix meets the bound.
    """
    inst = trace.instance
    if inst.k != 3 or not inst.complete:
        raise CertificateError("construction requires k=3 on a complete graph")
    if any(d <= 0 for d in trace.delta_nums):
        raise CertificateError("trace is not improving")
    moves = trace.moves
    cyclic_set, _ = classify_cyclic(moves, 3)
    arcs_by_tail = {}
    for v in sorted(cyclic_set):
        arcs = neighborwise_arcs_3cut(trace, v)
        if arcs:
            arcs_by_tail[v] = tuple(arcs)
    graph = CertificateGraph(arcs_by_tail=arcs_by_tail)
    half_graph, half_bound = build_half_certificate(trace, check_rank=False)
    stats = occurrence_stats(moves)
    bound = max(half_bound, graph.n_arcs)
    need = -(-stats.s // 32)  # ceil(s/32)
    if bound < need:
        raise CertificateError(
            f"certificate bound {bound} below ceil(s/32)={need}; block not 2-critical?")
    if check_rank:
        rank = exact_rank(build_P(trace, "cycles"))
        if rank < bound:
            raise CertificateError(f"exact rank {rank} below certified bound {bound}")
    return graph, bound


# --- general k: half certificate ---------------------------------------------

def build_half_certificate(trace: Trace, check_rank: bool = True):
    """One arc per cyclic vertex, functional cycles broken: >= ceil(c/2) arcs.

    An improving trace guarantees each cycle column has a nonzero entry
    on some edge at its vertex; failure of that search means the trace
    was not improving and is reported as a contract violation.
    """
    inst = trace.instance
    if any(d <= 0 for d in trace.delta_nums):
        raise CertificateError("trace is not improving")
    moves = trace.moves
    cyclic_set, _ = classify_cyclic(moves, inst.k)
    cyc_set = cycles(moves, inst.k)
    arcs: dict = {}
    for v in sorted(cyclic_set):
        v_cycles = cyc_set.over(v)
        if not v_cycles:
            raise CertificateError(f"cyclic vertex {v} has no enumerated cycle")
        chosen = v_cycles[0]
        mat = columns_for(trace, [chosen.times])
        head = None
        for r, val in mat.column(0):
            u, w = inst.edges[r]
            other = u if w == v else w
            if val != 0 and v in (u, w):
                head = other if head is None else min(head, other)
        if head is None:
            raise CertificateError(
                f"cycle column of vertex {v} is all-zero: trace was not improving")
        arcs[v] = Arc(v=v, u=head, witness=chosen.times)

    # break the node-disjoint directed cycles of the functional graph
    removed = set()
    color: dict = {}
    for start in sorted(arcs):
        if color.get(start):
            continue
        path = []
        node = start
        while node in arcs and node not in removed and color.get(node) is None:
            color[node] = "active"
            path.append(node)
            node = arcs[node].u
        if node in path and color.get(node) == "active":
            # walk closed on itself: drop the arc leaving the smallest node
            loop = path[path.index(node):]
            removed.add(min(loop))
        for p in path:
            color[p] = "done"

    arcs_by_tail = {v: (arc,) for v, arc in arcs.items() if v not in removed}
    graph = CertificateGraph(arcs_by_tail=arcs_by_tail)
    c = len(cyclic_set)
    if 2 * graph.n_arcs < c:
        raise CertificateError("cycle breaking removed too many arcs")
    if check_rank:
        rank = exact_rank(build_P(trace, "cycles", cycle_set=cyc_set))
        if rank < graph.n_arcs:
            raise CertificateError(
                f"exact rank {rank} below certified bound {graph.n_arcs}")
    return graph, graph.n_arcs


# --- validation --------------------------------------------------------------

def _arc_column(trace: Trace, arc: Arc):
    return columns_for(trace, [arc.witness]).cols[0]


def validate_certificate(graph: CertificateGraph, trace: Trace) -> Verdict:
    """Adversarial re-check of a certificate against the real matrix.

    Verifies acyclicity, nonzero witness entries, the per-tail staircase
    zero pattern, distinct edge rows, and full row rank of the witness-row
    submatrix by plain rational elimination (a code path independent of
    exact_rank).
    """
    inst = trace.instance
    arcs = graph.arcs
    if not arcs:
        return Verdict(valid=True, rank_bound=0)

    # acyclicity
    out_heads: dict = {}
    for arc in arcs:
        out_heads.setdefault(arc.v, []).append(arc.u)
    state: dict = {}

    def dfs(node):
        state[node] = 1
        for nxt in out_heads.get(node, ()):
            if state.get(nxt) == 1:
                return False
            if state.get(nxt) is None and not dfs(nxt):
                return False
        state[node] = 2
        return True

    for node in sorted(out_heads):
        if state.get(node) is None and not dfs(node):
            return Verdict(valid=False, rank_bound=0, reason="graph has a directed cycle")

    # witness entries and staircase pattern
    col_cache: dict = {}

    def entry(arc_tail, witness, u):
        key = (arc_tail, witness)
        if key not in col_cache:
            col_cache[key] = dict(columns_for(trace, [witness]).cols[0])
        e = inst.edge_index(u, arc_tail)
        if e is None:
            return 0
        return col_cache[key].get(e, 0)

    seen_edges = set()
    for arc in arcs:
        e = inst.edge_index(arc.u, arc.v)
        if e is None:
            return Verdict(valid=False, rank_bound=0,
                           reason=f"arc {arc.v}->{arc.u}: edge missing")
        if e in seen_edges:
            return Verdict(valid=False, rank_bound=0,
                           reason=f"arc {arc.v}->{arc.u}: duplicate edge row")
        seen_edges.add(e)
        if entry(arc.v, arc.witness, arc.u) == 0:
            return Verdict(valid=False, rank_bound=0,
                           reason=f"arc {arc.v}->{arc.u}: witness entry is zero")
    for v, ordered in graph.arcs_by_tail.items():
        for i, arc_i in enumerate(ordered):
            for arc_j in ordered[i + 1:]:
                if entry(v, arc_i.witness, arc_j.u) != 0:
                    return Verdict(
                        valid=False, rank_bound=0,
                        reason=f"staircase broken at {v}->{arc_j.u} on witness of {v}->{arc_i.u}")

    # full row rank of the witness-row submatrix, by rational elimination
    p_cols = []
    labels = []
    full_p = None
    for arc in arcs:
        labels.append(inst.edge_index(arc.u, arc.v))
    # rows over all pair/cycle columns of the trace
    mode = "pairs" if inst.k == 2 else "cycles"
    full_p = build_P(trace, mode)
    rows = []
    for e in labels:
        rows.append([Fraction(full_p.entry(e, j)) for j in range(full_p.n_cols)])
    rank = _rational_row_rank(rows)
    if rank != len(arcs):
        return Verdict(valid=False, rank_bound=rank,
                       reason=f"witness rows have rank {rank}, expected {len(arcs)}")
    return Verdict(valid=True, rank_bound=len(arcs))


def _rational_row_rank(rows) -> int:
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    n_cols = len(rows[0])
    rank = 0
    r = 0
    for c in range(n_cols):
        pivot = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c]
        for i in range(r + 1, len(rows)):
            if rows[i][c] != 0:
                f = rows[i][c] / inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        rank += 1
        r += 1
        if r == len(rows):
            break
    return rank
