"""Edge-by-time sign matrices, combined columns, exact rank, slow events.

The step matrix M has one row per edge and one column per time-step;
column t is supported on the edges incident to the moving vertex, with
entry +1 towards neighbors sitting in the departed part and -1 towards
neighbors sitting in the destination part, so <column t, X> is exactly
the step's improvement.  Combined matrices P merge columns along
consecutive-occurrence pairs (k=2) or minimal cycles (general k); their
rows for vertices that do not move inside the combined span vanish, and
the surviving entries do not depend on the starting configuration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .analysis import (Cycle, CycleSet, Pair, TruncatedCycleSetError, cycles,
                       pairs)
from .engine import Trace
from .model import ModelError


@dataclass(frozen=True)
class SignMatrix:
    """Sparse integer matrix stored by column.

    cols[j] is a tuple of (row index, entry) with strictly increasing row
    indices and nonzero entries.  col_labels carries the object a column
    came from (a time-step, a Pair, or a Cycle).
    """

    n_rows: int
    cols: tuple
    col_labels: tuple = ()

    @property
    def n_cols(self) -> int:
        return len(self.cols)

    def entry(self, i: int, j: int) -> int:
        for r, val in self.cols[j]:
            if r == i:
                return val
        return 0

    def column(self, j: int):
        return self.cols[j]

    def dense(self):
        out = [[0] * self.n_cols for _ in range(self.n_rows)]
        for j, col in enumerate(self.cols):
            for r, val in col:
                out[r][j] = val
        return out

    def row_support(self):
        """Row indices with at least one nonzero entry."""
        rows = set()
        for col in self.cols:
            for r, _ in col:
                rows.add(r)
        return rows

    def to_text(self) -> str:
        lines = [f"{self.n_rows} {self.n_cols}"]
        for j, col in enumerate(self.cols):
            for r, val in col:
                lines.append(f"{r} {j} {val}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SignMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines:
            raise ModelError("empty matrix file")
        head = lines[0].split()
        if len(head) != 2:
            raise ModelError("malformed matrix header")
        n_rows, n_cols = int(head[0]), int(head[1])
        buckets: dict = {}
        for lineno, ln in enumerate(lines[1:], start=2):
            tok = ln.split()
            if len(tok) != 3:
                raise ModelError(f"malformed matrix entry on line {lineno}")
            r, j, val = int(tok[0]), int(tok[1]), int(tok[2])
            if not (0 <= r < n_rows and 0 <= j < n_cols):
                raise ModelError(f"matrix entry out of range on line {lineno}")
            buckets.setdefault(j, {})[r] = val
        cols = tuple(
            tuple(sorted((r, v) for r, v in buckets.get(j, {}).items() if v != 0))
            for j in range(n_cols))
        return cls(n_rows=n_rows, cols=cols)


def build_M(trace: Trace) -> SignMatrix:
    """Step matrix of a trace; <column t, X> equals the step-t improvement."""
    inst = trace.instance
    tau = list(trace.tau0)
    cols = []
    for move, _ in trace.steps:
        col = []
        for u, e_idx, _ in inst.neighbors(move.v):
            if tau[u] == move.p:
                col.append((e_idx, 1))
            elif tau[u] == move.q:
                col.append((e_idx, -1))
        col.sort()
        cols.append(tuple(col))
        tau[move.v] = move.q
    return SignMatrix(n_rows=inst.m, cols=tuple(cols),
                      col_labels=tuple(range(1, len(cols) + 1)))


def _combine(m_cols, time_lists, n_rows):
    cols = []
    for ts in time_lists:
        acc: dict = {}
        for t in ts:
            for r, val in m_cols[t - 1]:
                acc[r] = acc.get(r, 0) + val
        cols.append(tuple(sorted((r, v) for r, v in acc.items() if v != 0)))
    return tuple(cols)


def build_P(trace: Trace, mode: str, cycle_set: CycleSet | None = None) -> SignMatrix:
    """Combined matrix: one column per pair (k=2) or per minimal cycle.

    Entries can reach +/-k in magnitude.  In cycle mode a truncated cycle
    set is refused, since a partial column family would silently weaken
    every rank statement made about the result.
    """
    m = build_M(trace)
    if mode == "pairs":
        labels = tuple(pairs(trace.moves))
        time_lists = [(p.t1, p.t2) for p in labels]
    elif mode == "cycles":
        if cycle_set is None:
            cycle_set = cycles(trace.moves, trace.instance.k)
        if cycle_set.truncated:
            raise TruncatedCycleSetError(
                "cycle enumeration was truncated; combined matrix would be partial")
        labels = cycle_set.cycles
        time_lists = [c.times for c in labels]
    else:
        raise ModelError(f"unknown combine mode {mode!r}")
    return SignMatrix(n_rows=m.n_rows, cols=_combine(m.cols, time_lists, m.n_rows),
                      col_labels=labels)


def columns_for(trace: Trace, time_lists) -> SignMatrix:
    """Combined columns for explicit 1-based time-step groups."""
    m = build_M(trace)
    return SignMatrix(n_rows=m.n_rows,
                      cols=_combine(m.cols, [tuple(ts) for ts in time_lists], m.n_rows),
                      col_labels=tuple(tuple(ts) for ts in time_lists))


# --- exact rank --------------------------------------------------------------

def exact_rank(mat) -> int:
    """Rank over the rationals, by fraction-free (Bareiss) elimination.

    Accepts a SignMatrix or a dense list of integer rows.  Works on the
    transpose when that is smaller; zero rows are dropped first.
    """
    if isinstance(mat, SignMatrix):
        rows = mat.dense()
    else:
        rows = [list(r) for r in mat]
    rows = [r for r in rows if any(r)]
    if not rows:
        return 0
    n_cols = len(rows[0])
    if n_cols < len(rows):
        rows = [[rows[i][j] for i in range(len(rows))] for j in range(n_cols)]
        rows = [r for r in rows if any(r)]
        if not rows:
            return 0
        n_cols = len(rows[0])
    rank = 0
    prev = 1
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
        piv = rows[r][c]
        for i in range(r + 1, len(rows)):
            fi = rows[i][c]
            if fi == 0 and prev == 1:
                continue
            row_i = rows[i]
            row_r = rows[r]
            for j in range(c + 1, n_cols):
                row_i[j] = (row_i[j] * piv - fi * row_r[j]) // prev
            row_i[c] = 0
        prev = piv
        rank += 1
        r += 1
        if r == len(rows):
            break
    return rank


# --- slowness events ---------------------------------------------------------

def weighted_column_sums(mat: SignMatrix, weight_nums) -> tuple:
    """Numerators of <column, X> for every column."""
    out = []
    for col in mat.cols:
        out.append(sum(val * weight_nums[r] for r, val in col))
    return tuple(out)


def cumulative_event(col_sums, denom: int, eps: Fraction) -> bool:
    """Every combined improvement positive and their total at most 2*eps."""
    if not col_sums:
        return False
    if any(s <= 0 for s in col_sums):
        return False
    return Fraction(sum(col_sums), denom) <= 2 * Fraction(eps)


def per_step_event(col_sums, denom: int, eps: Fraction, k: int) -> bool:
    """Every combined improvement in the interval (0, k*eps]."""
    if not col_sums:
        return False
    bound = k * Fraction(eps)
    return all(s > 0 and Fraction(s, denom) <= bound for s in col_sums)
