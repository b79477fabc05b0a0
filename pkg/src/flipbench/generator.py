"""Graph construction and smoothed edge-weight sampling.

The smoothing density is uniform on an interval of length 1/phi centered
at c_e, so the density equals phi on its support (the extremal case).
Weights are drawn on the fixed-point grid {.../D} so everything downstream
stays exact.  Each edge weight is a pure function of (seed, edge index):
sampling is reproducible and order-independent.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .model import DEFAULT_DENOM, Instance, ModelError, complete_edges


class GeneratorError(ModelError):
    pass


@dataclass(frozen=True)
class SmoothingProfile:
    """Per-edge uniform densities with max value exactly phi.

    Every support interval [c_e - 1/(2 phi), c_e + 1/(2 phi)] must fit in
    [-1, 1]; with phi >= 1/2 and centers defaulting to zero that always
    holds.
    """

    phi: Fraction
    seed: int
    centers: tuple = ()  # per-edge Fractions; empty means all zero

    def __post_init__(self):
        if self.phi < Fraction(1, 2):
            raise GeneratorError("phi < 1/2: support interval would exceed [-1,1]")
        half = Fraction(1, 2) / self.phi
        for c in self.centers:
            if abs(c) + half > 1:
                raise GeneratorError(f"center {c} pushes support outside [-1,1]")

    def center(self, i: int) -> Fraction:
        return self.centers[i] if self.centers else Fraction(0)

    def support(self, i: int):
        half = Fraction(1, 2) / self.phi
        c = self.center(i)
        return c - half, c + half


def parse_profile(text: str) -> SmoothingProfile:
    """Profile file: `phi <rational>`, `seed <u64>`, optional `centers <path>`."""
    phi = None
    seed = None
    centers = ()
    for lineno, ln in enumerate(text.splitlines(), start=1):
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        key, _, value = ln.partition(" ")
        value = value.strip()
        if key == "phi":
            phi = Fraction(value)
        elif key == "seed":
            seed = int(value)
        elif key == "centers":
            with open(value) as fh:
                centers = tuple(Fraction(tok) for tok in fh.read().split())
        else:
            raise GeneratorError(f"unknown profile key {key!r} on line {lineno}")
    if phi is None or seed is None:
        raise GeneratorError("profile requires both phi and seed")
    return SmoothingProfile(phi=phi, seed=seed, centers=centers)


def build_graph(kind: str, n: int, p: float | None = None,
                edges=None, seed: int = 0):
    """Edge set of a simple graph: complete, G(n,p), or an explicit list.

    gnp inclusion of each pair is a pure function of (seed, pair index),
    so the same seed always yields the same graph.
    """
    if n < 2:
        raise GeneratorError("need n >= 2")
    if kind == "complete":
        return complete_edges(n)
    if kind == "gnp":
        if p is None or not 0 <= p <= 1:
            raise GeneratorError("gnp requires p in [0,1]")
        out = []
        for idx, (u, v) in enumerate(complete_edges(n)):
            rng = random.Random(f"gnp:{seed}:{idx}")
            if rng.random() < p:
                out.append((u, v))
        return tuple(out)
    if kind == "edge-list":
        if edges is None:
            raise GeneratorError("edge-list mode requires edges")
        out = []
        seen = set()
        for lineno, e in enumerate(edges, start=1):
            try:
                u, v = int(e[0]), int(e[1])
            except (TypeError, ValueError, IndexError):
                raise GeneratorError(f"malformed edge on line {lineno}: {e!r}")
            if u > v:
                u, v = v, u
            if u == v or not 0 <= u < n or not v < n:
                raise GeneratorError(f"bad edge on line {lineno}: ({u},{v})")
            if (u, v) in seen:
                raise GeneratorError(f"duplicate edge on line {lineno}: ({u},{v})")
            seen.add((u, v))
            out.append((u, v))
        return tuple(out)
    raise GeneratorError(f"unknown graph kind {kind!r}")


def grid_bounds(profile: SmoothingProfile, i: int, denom: int):
    """Integer grid {lo..hi} such that lo/denom..hi/denom covers the support."""
    lo_f, hi_f = profile.support(i)
    lo = math.ceil(lo_f * denom)
    hi = math.floor(hi_f * denom)
    return lo, hi


def sample_weight_num(profile: SmoothingProfile, i: int, denom: int) -> int:
    """One weight numerator, uniform on the grid, keyed by (seed, edge index)."""
    lo, hi = grid_bounds(profile, i, denom)
    rng = random.Random(f"w:{profile.seed}:{i}")
    return rng.randint(lo, hi)


def sample_weights(edges, profile: SmoothingProfile, denom: int = DEFAULT_DENOM):
    return tuple(sample_weight_num(profile, i, denom) for i in range(len(edges)))


def make_instance(kind: str, n: int, k: int, profile: SmoothingProfile,
                  p: float | None = None, edges=None,
                  denom: int = DEFAULT_DENOM, graph_seed: int | None = None) -> Instance:
    """Build a graph and sample smoothed weights for it in one step."""
    es = build_graph(kind, n, p=p, edges=edges,
                     seed=profile.seed if graph_seed is None else graph_seed)
    nums = sample_weights(es, profile, denom=denom)
    return Instance(n=n, k=k, edges=es, weight_nums=nums, denom=denom,
                    phi=profile.phi, complete=(kind == "complete"))
