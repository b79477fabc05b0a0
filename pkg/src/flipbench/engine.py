"""FLIP execution engine: pivot rules, validated traces, replay, windows.

A run maintains, for every vertex, the total weight numerator towards
each part, so a move costs O(deg(v)) to score and to apply.  All deltas
are recorded as exact integer numerators over the instance denominator.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .model import (Instance, InvalidMoveError, ModelError, Move,
                    check_configuration, format_configuration, hamiltonian,
                    parse_configuration)

DEFAULT_CAP = 10 ** 8


class ReplayError(ModelError):
    """A supplied move sequence is invalid from its starting configuration."""

    def __init__(self, step: int, move: Move, reason: str):
        self.step = step
        self.move = move
        super().__init__(f"invalid at step {step}: move {move} ({reason})")


@dataclass(frozen=True)
class PivotRule:
    """Which improving move a FLIP implementation picks.

    Ties under best-improving break by (vertex index, destination part)
    ascending; random-improving draws uniformly from the improving set
    with its own seeded stream.  fixed-replay is handled by replay().
    """

    variant: str = "best"  # first | best | random
    seed: int = 0

    def __post_init__(self):
        if self.variant not in ("first", "best", "random"):
            raise ModelError(f"unknown pivot rule {self.variant!r}")


@dataclass(frozen=True)
class Trace:
    """A validated move sequence with exact per-step improvements."""

    instance: Instance
    tau0: tuple
    steps: tuple          # ((Move, delta_num), ...) in time order
    step_cap_hit: bool = False
    rule: str = ""
    seed: int = 0

    def __len__(self):
        return len(self.steps)

    @property
    def moves(self):
        return tuple(m for m, _ in self.steps)

    @property
    def delta_nums(self):
        return tuple(d for _, d in self.steps)

    def delta(self, t: int) -> Fraction:
        """Improvement of step t (1-based)."""
        return Fraction(self.steps[t - 1][1], self.instance.denom)

    def total_improvement(self) -> Fraction:
        return Fraction(sum(self.delta_nums), self.instance.denom)

    def configurations(self):
        """tau_0, tau_1, ..., tau_ell."""
        tau = list(self.tau0)
        yield tuple(tau)
        for move, _ in self.steps:
            tau[move.v] = move.q
            yield tuple(tau)

    def configuration_at(self, t: int) -> tuple:
        """tau_t, the configuration after step t (t=0 gives tau0)."""
        tau = list(self.tau0)
        for move, _ in self.steps[:t]:
            tau[move.v] = move.q
        return tuple(tau)

    def final_configuration(self) -> tuple:
        return self.configuration_at(len(self.steps))


class _State:
    """Mutable FLIP state: configuration plus per-vertex per-part sums."""

    def __init__(self, inst: Instance, tau0):
        check_configuration(inst, tau0)
        self.inst = inst
        self.tau = list(tau0)
        self.sums = [[0] * (inst.k + 1) for _ in range(inst.n)]
        for v in range(inst.n):
            row = self.sums[v]
            for u, _, num in inst.neighbors(v):
                row[tau0[u]] += num

    def delta_num(self, v: int, q: int) -> int:
        row = self.sums[v]
        return row[self.tau[v]] - row[q]

    def apply(self, move: Move) -> None:
        inst = self.inst
        self.tau[move.v] = move.q
        for u, _, num in inst.neighbors(move.v):
            row = self.sums[u]
            row[move.p] -= num
            row[move.q] += num

    def improving(self):
        out = []
        for v in range(self.inst.n):
            p = self.tau[v]
            row = self.sums[v]
            depart = row[p]
            for q in range(1, self.inst.k + 1):
                if q != p and depart - row[q] > 0:
                    out.append((Move(v, p, q), depart - row[q]))
        return out

    def first_improving(self):
        for v in range(self.inst.n):
            p = self.tau[v]
            row = self.sums[v]
            depart = row[p]
            for q in range(1, self.inst.k + 1):
                if q != p and depart - row[q] > 0:
                    return Move(v, p, q), depart - row[q]
        return None

    def best_improving(self):
        best = None
        for v in range(self.inst.n):
            p = self.tau[v]
            row = self.sums[v]
            depart = row[p]
            for q in range(1, self.inst.k + 1):
                if q != p:
                    d = depart - row[q]
                    if d > 0 and (best is None or d > best[1]):
                        best = (Move(v, p, q), d)
        return best


def run_flip(inst: Instance, tau0, rule: PivotRule = PivotRule(),
             cap: int = DEFAULT_CAP) -> Trace:
    """Run FLIP until local optimality or the step cap.

    Every recorded delta is strictly positive; hitting the cap marks the
    trace instead of raising.
    """
    if cap < 0:
        raise ModelError("cap must be non-negative")
    state = _State(inst, tau0)
    rng = random.Random(f"flip:{rule.seed}") if rule.variant == "random" else None
    steps = []
    cap_hit = False
    while True:
        if len(steps) >= cap:
            cap_hit = state.first_improving() is not None
            break
        if rule.variant == "first":
            pick = state.first_improving()
        elif rule.variant == "best":
            pick = state.best_improving()
        else:
            cands = state.improving()
            pick = cands[rng.randrange(len(cands))] if cands else None
        if pick is None:
            break
        move, dnum = pick
        steps.append((move, dnum))
        state.apply(move)
    return Trace(instance=inst, tau0=tuple(tau0), steps=tuple(steps),
                 step_cap_hit=cap_hit, rule=rule.variant, seed=rule.seed)


def replay(inst: Instance, tau0, moves: Iterable[Move], strict: bool = True) -> Trace:
    """Validate and score an externally supplied move sequence.

    With strict=True (default) the first invalid move raises ReplayError
    carrying its 1-based step index; with strict=False the trace is
    truncated there instead.  Replayed traces may contain non-improving
    steps; callers that need strict improvement must check deltas.
    """
    state = _State(inst, tau0)
    steps = []
    for t, move in enumerate(moves, start=1):
        move = Move(*move)
        ok = (0 <= move.v < inst.n and 1 <= move.p <= inst.k
              and 1 <= move.q <= inst.k and move.p != move.q
              and state.tau[move.v] == move.p)
        if not ok:
            if strict:
                reason = (f"vertex in part {state.tau[move.v]}"
                          if 0 <= move.v < inst.n else "vertex out of range")
                raise ReplayError(t, move, reason)
            break
        steps.append((move, state.delta_num(move.v, move.q)))
        state.apply(move)
    return Trace(instance=inst, tau0=tuple(tau0), steps=tuple(steps),
                 rule="replay")


def slice_trace(trace: Trace, t1: int, t2: int) -> Trace:
    """Sub-trace over steps t1..t2 (1-based, inclusive), re-validated from
    the configuration reached just before step t1."""
    if not 1 <= t1 <= t2 <= len(trace.steps):
        raise ModelError(f"slice [{t1},{t2}] out of range")
    tau = trace.configuration_at(t1 - 1)
    return replay(trace.instance, tau, trace.moves[t1 - 1:t2])


@dataclass(frozen=True)
class WindowRecord:
    start: int             # 1-based first step of the window
    length: int
    total_num: int         # cumulative improvement numerator (section-3 sense)
    max_step_num: int      # largest single-step improvement (section-4 sense)
    truncated: bool = False


def window_stats(trace: Trace, w: int):
    """Disjoint windows of length w with both slowness statistics.

    Each record carries the window's total improvement (gate for the
    cumulative slowness definition) and its maximum single-step
    improvement (gate for the per-step definition).  A trailing partial
    window, or a w longer than the trace, yields one truncated record.
    """
    if w < 1:
        raise ModelError("window length must be >= 1")
    nums = trace.delta_nums
    out = []
    for start in range(0, len(nums), w):
        chunk = nums[start:start + w]
        out.append(WindowRecord(start=start + 1, length=len(chunk),
                                total_num=sum(chunk),
                                max_step_num=max(chunk, default=0),
                                truncated=len(chunk) < w))
    return out


# --- trace files -------------------------------------------------------------

def trace_to_text(trace: Trace) -> str:
    lines = [
        f"# instance {trace.instance.content_hash()}",
        f"# rule {trace.rule or 'unknown'} seed {trace.seed}",
        f"# cap_hit {int(trace.step_cap_hit)}",
        "# tau0 " + " ".join(str(p) for p in trace.tau0),
    ]
    for t, (move, dnum) in enumerate(trace.steps, start=1):
        lines.append(f"{t} {move.v} {move.p} {move.q} {dnum}")
    return "\n".join(lines) + "\n"


def trace_from_text(inst: Instance, text: str) -> Trace:
    tau0 = None
    moves = []
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        if ln.startswith("#"):
            if ln.startswith("# tau0 "):
                tau0 = parse_configuration(ln[len("# tau0 "):])
            continue
        tok = ln.split()
        if len(tok) != 5:
            raise ModelError(f"malformed trace record: {ln!r}")
        moves.append(Move(int(tok[1]), int(tok[2]), int(tok[3])))
    if tau0 is None:
        raise ModelError("trace file missing tau0 header")
    return replay(inst, tau0, moves)


def verify_trace(trace: Trace) -> None:
    """Recompute every delta from scratch; raise on any mismatch."""
    inst = trace.instance
    h_prev = hamiltonian(inst, trace.tau0)
    tau = trace.tau0
    for t, (move, dnum) in enumerate(trace.steps, start=1):
        from .model import apply_move
        tau = apply_move(tau, move)
        h = hamiltonian(inst, tau)
        if h - h_prev != Fraction(dnum, inst.denom):
            raise ModelError(f"delta mismatch at step {t}")
        h_prev = h
