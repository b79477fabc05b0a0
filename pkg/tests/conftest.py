"""Shared helpers for the test suite.

Instances come in two flavors: smoothed random ones (the generator's
native output) and synthesized ones, where a dense valid move sequence
is chosen first and edge weights making every step improving are found
by linear programming.  The latter is the only practical way to obtain
blocks with high repeat density (e.g. length >= 3 * #vertices) at desk
scale, and is legitimate because the structural lemmas quantify over
arbitrary improving sequences.
"""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

import flipbench as fb

GRID = 2 ** 20


def smoothed_instance(n: int, k: int, seed: int, phi=1, kind: str = "complete",
                      p: float = 0.5):
    profile = fb.SmoothingProfile(phi=Fraction(phi), seed=seed)
    return fb.make_instance(kind, n, k, profile, p=p)


def random_tau0(n: int, k: int, seed) -> tuple:
    rng = random.Random(f"tau0:{seed}")
    return tuple(rng.randint(1, k) for _ in range(n))


def run_random(n: int, k: int, seed: int, phi=1, rule: str = "first"):
    inst = smoothed_instance(n, k, seed, phi=phi)
    tau0 = random_tau0(n, k, seed)
    return fb.run_flip(inst, tau0, fb.PivotRule(variant=rule, seed=seed))


def random_moves(n: int, k: int, length: int, seed) -> tuple:
    """Valid (but not necessarily improving) random move sequence."""
    rng = random.Random(f"moves:{seed}")
    tau = [rng.randint(1, k) for _ in range(n)]
    out = []
    for _ in range(length):
        v = rng.randrange(n)
        q = rng.choice([x for x in range(1, k + 1) if x != tau[v]])
        out.append(fb.Move(v, tau[v], q))
        tau[v] = q
    return tuple(out)


def synth_trace(n: int, k: int, s: int, length: int, seed: int,
                min_margin: float = 1e-3):
    """Improving trace with a dense move sequence, or None if infeasible.

    Samples a valid random walk over the first s vertices, then solves
    max t s.t. M^T x >= t, |x| <= 1 and rounds the weights to the exact
    grid; the replayed trace is verified to be strictly improving.
    """
    from scipy.optimize import linprog

    rng = random.Random(f"synth:{seed}")
    tau = [rng.randint(1, k) for _ in range(n)]
    tau0 = tuple(tau)
    moves = []
    for _ in range(length):
        v = rng.randrange(s)
        pp = tau[v]
        q = rng.choice([x for x in range(1, k + 1) if x != pp])
        moves.append(fb.Move(v, pp, q))
        tau[v] = q
    edges = fb.complete_edges(n)
    eidx = {e: i for i, e in enumerate(edges)}
    m = len(edges)
    tau = list(tau0)
    A = np.zeros((length, m))
    for t, (v, pp, q) in enumerate(moves):
        for u in range(n):
            if u == v:
                continue
            e = eidx[(min(u, v), max(u, v))]
            if tau[u] == pp:
                A[t, e] = 1
            elif tau[u] == q:
                A[t, e] = -1
        tau[v] = q
    c = np.zeros(m + 1)
    c[-1] = -1
    a_ub = np.hstack([-A, np.ones((length, 1))])
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(length),
                  bounds=[(-1, 1)] * m + [(0, 2)], method="highs")
    if not res.success or res.x[-1] < min_margin:
        return None
    nums = tuple(int(round(x * GRID)) for x in res.x[:m])
    inst = fb.Instance(n=n, k=k, edges=edges, weight_nums=nums, denom=GRID,
                       phi=Fraction(1), complete=True)
    trace = fb.replay(inst, tau0, moves)
    if len(trace) != length or any(d <= 0 for d in trace.delta_nums):
        return None
    return trace


def synth_traces(n: int, k: int, s: int, length: int, want: int,
                 seed0: int = 0, max_tries: int = 10_000):
    out = []
    seed = seed0
    while len(out) < want and seed < seed0 + max_tries:
        tr = synth_trace(n, k, s, length, seed)
        if tr is not None:
            out.append(tr)
        seed += 1
    return out
