"""Batch experiment driver: scaling, rank campaigns, Monte Carlo, approximation.

Every experiment is a pure function of its ExperimentConfig: per-trial
seeds are derived from (master seed, cell, trial index), rationals are
emitted as num/den, and rows are assembled in deterministic cell/trial
order even when trials fan out across processes.  CSV is the only output
format.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .analysis import find_critical_block, classify_cyclic, occurrence_stats, \
    two_critical_block
from .certificates import (CertificateError, build_3cut_certificate,
                           build_half_certificate, build_k2_certificate,
                           validate_certificate)
from .engine import DEFAULT_CAP, PivotRule, run_flip, slice_trace
from .generator import SmoothingProfile, make_instance
from .matrices import build_P, exact_rank
from .model import Instance, ModelError, cut_value, hamiltonian
from .thresholds import Beta

DEFAULT_ETA = 0.1


class HarnessError(ModelError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str                      # scaling | rank | mc | approx
    n_grid: tuple = (8,)
    k: int = 2
    phi_grid: tuple = (Fraction(1),)
    beta: Beta = Beta.sqrt_half()
    trials: int = 10
    rule: str = "first"
    seed: int = 0
    cap: int = DEFAULT_CAP
    eta: float = DEFAULT_ETA
    graph: str = "complete"
    p: float = 0.5                 # gnp edge probability
    samples: int = 100_000         # mc mode
    eps: Fraction = Fraction(1, 20)  # mc mode
    jobs: int = 1

    def __post_init__(self):
        if self.mode not in ("scaling", "rank", "mc", "approx"):
            raise HarnessError(f"unknown experiment mode {self.mode!r}")
        if not self.n_grid or not self.phi_grid:
            raise HarnessError("n and phi grids must be non-empty")
        if self.trials < 1:
            raise HarnessError("need at least one trial")


def parse_config(text: str) -> ExperimentConfig:
    """Config file format: one `key value` pair per line, # comments."""
    kw: dict = {}
    for lineno, ln in enumerate(text.splitlines(), start=1):
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        key, _, value = ln.partition(" ")
        value = value.strip()
        try:
            if key == "mode":
                kw["mode"] = value
            elif key == "n_grid":
                kw["n_grid"] = tuple(int(x) for x in value.split(","))
            elif key == "k":
                kw["k"] = int(value)
            elif key == "phi_grid":
                kw["phi_grid"] = tuple(Fraction(x) for x in value.split(","))
            elif key == "beta":
                kw["beta"] = Beta.parse(value)
            elif key == "trials":
                kw["trials"] = int(value)
            elif key == "rule":
                kw["rule"] = value
            elif key == "seed":
                kw["seed"] = int(value)
            elif key == "cap":
                kw["cap"] = int(value)
            elif key == "eta":
                kw["eta"] = float(value)
            elif key == "graph":
                kw["graph"] = value
            elif key == "p":
                kw["p"] = float(value)
            elif key == "samples":
                kw["samples"] = int(value)
            elif key == "eps":
                kw["eps"] = Fraction(value)
            elif key == "jobs":
                kw["jobs"] = int(value)
            else:
                raise HarnessError(f"unknown config key {key!r} on line {lineno}")
        except (ValueError, ZeroDivisionError) as exc:
            raise HarnessError(f"bad value for {key!r} on line {lineno}: {exc}")
    if "mode" not in kw:
        raise HarnessError("config requires a mode")
    return ExperimentConfig(**kw)


# --- seeds, bounds, epsilon --------------------------------------------------

def derive_seed(master: int, *parts) -> int:
    tag = ":".join(str(p) for p in (master,) + parts)
    return int(hashlib.sha256(tag.encode()).hexdigest()[:12], 16)


def epsilon_bound(beta: Beta, phi, n: int, eta: float = DEFAULT_ETA) -> float:
    """Slowness threshold: e^(-2(1+2b)/b) / (phi * n^((1+2b+2b^2)/b + eta(1+2b)/b))."""
    b = float(beta)
    exp_const = math.exp(-2 * (1 + 2 * b) / b)
    exponent = (1 + 2 * b + 2 * b * b) / b + eta * (1 + 2 * b) / b
    return exp_const / (float(phi) * n ** exponent)


def theorem_bound(k: int, complete: bool, phi, n: int, eta: float = DEFAULT_ETA) -> float:
    """Reference step-count bound for the reporting column (sanity only).

    k=2 complete: 1580 * phi * n^((2+sqrt2)(sqrt2+eta));
    k=3 complete: phi * n^(99+eta) (constant suppressed);
    otherwise:    phi * n^(2(2k-1)k*lg(kn)+3+eta) (constant suppressed).
    """
    phi = float(phi)
    if k == 2 and complete:
        return 1580.0 * phi * n ** ((2 + math.sqrt(2)) * (math.sqrt(2) + eta))
    if k == 3 and complete:
        return phi * float(n) ** (99 + eta)
    exponent = 2 * (2 * k - 1) * k * math.log2(k * n) + 3 + eta
    return phi * float(n) ** exponent


def _fmt_frac(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _fmt_float(x: float) -> str:
    return format(x, ".10g")


def _trial_setup(cfg: ExperimentConfig, n: int, phi, trial: int):
    sstr = derive_seed(cfg.seed, cfg.mode, n, phi, trial)
    profile = SmoothingProfile(phi=Fraction(phi), seed=sstr)
    inst = make_instance(cfg.graph, n, cfg.k, profile, p=cfg.p)
    rng = random.Random(f"tau0:{sstr}")
    tau0 = tuple(rng.randint(1, cfg.k) for _ in range(n))
    return inst, tau0, sstr


# --- scaling -----------------------------------------------------------------

def _scaling_trial(args):
    cfg, n, phi, trial = args
    inst, tau0, sstr = _trial_setup(cfg, n, phi, trial)
    trace = run_flip(inst, tau0, PivotRule(variant=cfg.rule, seed=sstr), cap=cfg.cap)
    h = hamiltonian(inst, trace.final_configuration())
    return {
        "row_type": "trial", "n": n, "k": cfg.k, "phi": _fmt_frac(phi),
        "trial": trial, "steps": len(trace), "cap_hit": int(trace.step_cap_hit),
        "final_H": _fmt_frac(h), "trace_hash": inst.content_hash(),
    }


def exp_scaling(cfg: ExperimentConfig):
    """Step counts to termination per cell, with the theorem reference bound."""
    tasks = [(cfg, n, phi, t) for n in cfg.n_grid for phi in cfg.phi_grid
             for t in range(cfg.trials)]
    rows = _fan_out(_scaling_trial, tasks, cfg.jobs)
    out = []
    i = 0
    for n in cfg.n_grid:
        for phi in cfg.phi_grid:
            cell = rows[i:i + cfg.trials]
            i += cfg.trials
            out.extend(cell)
            steps = sorted(r["steps"] for r in cell)
            mid = steps[len(steps) // 2] if len(steps) % 2 else \
                (steps[len(steps) // 2 - 1] + steps[len(steps) // 2]) / 2
            out.append({
                "row_type": "summary", "n": n, "k": cfg.k, "phi": _fmt_frac(phi),
                "trial": "", "steps": max(steps), "cap_hit": "",
                "final_H": "", "trace_hash": "",
                "median_steps": _fmt_float(float(mid)),
                "bound": _fmt_float(theorem_bound(cfg.k, cfg.graph == "complete",
                                                  phi, n, cfg.eta)),
                "eta": _fmt_float(cfg.eta),
            })
    fields = ["row_type", "n", "k", "phi", "trial", "steps", "cap_hit",
              "final_H", "trace_hash", "median_steps", "bound", "eta"]
    return fields, out


# --- rank campaign -----------------------------------------------------------

def window_length(k: int, beta: Beta, n: int) -> int:
    """Lemma window: ceil((1+beta)n) for k=2, 3n for k=3, kn otherwise."""
    if k == 2:
        return beta.ceil_threshold(n)
    if k == 3:
        return 3 * n
    return k * n


def _rank_trial(args):
    cfg, n, phi, trial = args
    inst, tau0, sstr = _trial_setup(cfg, n, phi, trial)
    trace = run_flip(inst, tau0, PivotRule(variant=cfg.rule, seed=sstr), cap=cfg.cap)
    w = window_length(cfg.k, cfg.beta, n)
    base = {
        "n": n, "k": cfg.k, "phi": _fmt_frac(phi), "trial": trial, "window": w,
        "trace_hash": inst.content_hash(),
        "eps": _fmt_float(epsilon_bound(cfg.beta, phi, n, cfg.eta)),
    }
    if len(trace) < w:
        return {**base, "status": "skip", "ell": len(trace), "s": "", "c": "",
                "rank": "", "bound": "", "cert_arcs": "", "violation": ""}
    window_moves = trace.moves[:w]
    if cfg.k == 2:
        block = find_critical_block(window_moves, cfg.beta)
        sub = slice_trace(trace, block.t1, block.t2)
        stats = occurrence_stats(sub.moves)
        bound = cfg.beta.ceil_rank_bound(stats.s)
        graph, _ = build_k2_certificate(sub, cfg.beta)
        mode = "pairs"
    elif cfg.k == 3:
        block = two_critical_block(window_moves)
        sub = slice_trace(trace, block.t1, block.t2)
        stats = occurrence_stats(sub.moves)
        bound = -(-stats.s // 32)
        graph, _ = build_3cut_certificate(sub, check_rank=False)
        mode = "cycles"
    else:
        sub = slice_trace(trace, 1, w)
        stats = occurrence_stats(sub.moves)
        cyc, _ = classify_cyclic(sub.moves, cfg.k)
        bound = -(-len(cyc) // 2)
        graph, _ = build_half_certificate(sub, check_rank=False)
        mode = "cycles"
    cyc_sub, _ = classify_cyclic(sub.moves, cfg.k)
    rank = exact_rank(build_P(sub, mode))
    verdict = validate_certificate(graph, sub)
    violation = int(rank < bound or rank < graph.n_arcs or not verdict.valid)
    return {**base, "status": "ok", "ell": len(sub.moves), "s": stats.s,
            "c": len(cyc_sub), "rank": rank, "bound": bound,
            "cert_arcs": graph.n_arcs, "violation": violation}


def exp_rank_campaign(cfg: ExperimentConfig):
    tasks = [(cfg, n, phi, t) for n in cfg.n_grid for phi in cfg.phi_grid
             for t in range(cfg.trials)]
    rows = _fan_out(_rank_trial, tasks, cfg.jobs)
    fields = ["n", "k", "phi", "trial", "window", "status", "ell", "s", "c",
              "rank", "bound", "cert_arcs", "violation", "trace_hash", "eps"]
    return fields, rows


# --- Monte Carlo -------------------------------------------------------------

@dataclass(frozen=True)
class MCResult:
    k: int
    samples: int
    estimate_cumulative: float   # Pr[all > 0 and sum <= eps]
    estimate_interval: float     # Pr[all in (0, eps]]
    stderr_cumulative: float
    stderr_interval: float
    bound_cumulative: float      # (phi eps)^k / k!
    bound_interval: float        # (phi eps)^k


def mc_slow_bound(vectors, phi, eps, samples: int, seed: int) -> MCResult:
    """Monte-Carlo check of the slow-event tail bounds.

    vectors: k linearly independent integer rows of length m.  Weights
    are sampled from the extremal density (uniform on an interval of
    length 1/phi around zero).  Refuses dependent vectors, reporting the
    observed rank as the certificate of dependence.
    """
    A = np.array(vectors, dtype=np.int64)
    if A.ndim != 2:
        raise HarnessError("vectors must form a k x m array")
    k, m = A.shape
    r = exact_rank([list(map(int, row)) for row in A])
    if r < k:
        raise HarnessError(f"vectors are dependent: rank {r} < {k}")
    phi_f, eps_f = float(phi), float(eps)
    rng = np.random.default_rng(seed)
    half = 1.0 / (2.0 * phi_f)
    hits_cum = 0
    hits_int = 0
    batch = 200_000
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        X = rng.uniform(-half, half, size=(b, m))
        Y = X @ A.T
        pos = (Y > 0).all(axis=1)
        hits_cum += int(np.count_nonzero(pos & (Y.sum(axis=1) <= eps_f)))
        hits_int += int(np.count_nonzero(pos & (Y <= eps_f).all(axis=1)))
        done += b
    est_c = hits_cum / samples
    est_i = hits_int / samples
    se = lambda p: math.sqrt(max(p * (1 - p), 1.0 / samples) / samples)
    return MCResult(k=k, samples=samples,
                    estimate_cumulative=est_c, estimate_interval=est_i,
                    stderr_cumulative=se(est_c), stderr_interval=se(est_i),
                    bound_cumulative=(phi_f * eps_f) ** k / math.factorial(k),
                    bound_interval=(phi_f * eps_f) ** k)


def exp_mc(cfg: ExperimentConfig):
    """Coordinate-vector MC rows for k = 1..3 at each phi in the grid."""
    rows = []
    for phi in cfg.phi_grid:
        for k in (1, 2, 3):
            m = max(k, 2)
            vectors = [[1 if j == i else 0 for j in range(m)] for i in range(k)]
            res = mc_slow_bound(vectors, phi, cfg.eps, cfg.samples,
                                derive_seed(cfg.seed, "mc", str(phi), k))
            rows.append({
                "k": k, "phi": _fmt_frac(phi), "eps": _fmt_frac(cfg.eps),
                "samples": cfg.samples,
                "estimate_cum": _fmt_float(res.estimate_cumulative),
                "stderr_cum": _fmt_float(res.stderr_cumulative),
                "bound_cum": _fmt_float(res.bound_cumulative),
                "ok_cum": int(res.estimate_cumulative
                              <= res.bound_cumulative + 3 * res.stderr_cumulative),
                "estimate_step": _fmt_float(res.estimate_interval),
                "stderr_step": _fmt_float(res.stderr_interval),
                "bound_step": _fmt_float(res.bound_interval),
                "ok_step": int(res.estimate_interval
                               <= res.bound_interval + 3 * res.stderr_interval),
            })
    fields = ["k", "phi", "eps", "samples", "estimate_cum", "stderr_cum",
              "bound_cum", "ok_cum", "estimate_step", "stderr_step",
              "bound_step", "ok_step"]
    return fields, rows


# --- approximation -----------------------------------------------------------

def brute_force_opt_num(inst: Instance) -> int:
    """Exact maximum cut-value numerator over all k^n configurations.

    Vectorized enumeration; integer weight numerators keep this exact.
    Refused above n=12 (k^n explodes).
    """
    if inst.n > 12:
        raise HarnessError("brute force refused for n > 12")
    n, k = inst.n, inst.k
    total = k ** n
    codes = np.arange(total, dtype=np.int64)
    parts = np.empty((total, n), dtype=np.int8)
    for v in range(n):
        parts[:, v] = (codes // (k ** v)) % k
    cut = np.zeros(total, dtype=np.int64)
    for (u, v), num in zip(inst.edges, inst.weight_nums):
        cut += np.where(parts[:, u] != parts[:, v], num, 0)
    return int(cut.max())


def _approx_trial(args):
    cfg, n, phi, trial = args
    sstr = derive_seed(cfg.seed, "approx", n, phi, trial)
    # nonnegative weights: center every support interval at 1/2
    profile = SmoothingProfile(phi=Fraction(phi), seed=sstr,
                               centers=tuple([Fraction(1, 2)] * (n * (n - 1) // 2)))
    inst = make_instance("complete", n, cfg.k, profile)
    if any(num < 0 for num in inst.weight_nums):
        raise HarnessError("nonnegative-weight profile produced a negative weight")
    opt_num = brute_force_opt_num(inst)
    rng = random.Random(f"tau0:{sstr}")
    tau0 = tuple(rng.randint(1, cfg.k) for _ in range(n))
    trace = run_flip(inst, tau0, PivotRule(variant=cfg.rule, seed=sstr), cap=cfg.cap)
    local = cut_value(inst, trace.final_configuration())
    # (1 - 1/k) * OPT <= local, exactly
    ok = local * cfg.k * inst.denom >= (cfg.k - 1) * opt_num
    return {"n": n, "k": cfg.k, "phi": _fmt_frac(phi), "trial": trial,
            "opt": _fmt_frac(Fraction(opt_num, inst.denom)),
            "local": _fmt_frac(local), "steps": len(trace), "ok": int(ok)}


def approx_check(cfg: ExperimentConfig):
    for n in cfg.n_grid:
        if n > 12:
            raise HarnessError("approx mode requires n <= 12")
    if min(float(p) for p in cfg.phi_grid) < 1:
        raise HarnessError("nonnegative weights need phi >= 1 with centers at 1/2")
    tasks = [(cfg, n, phi, t) for n in cfg.n_grid for phi in cfg.phi_grid
             for t in range(cfg.trials)]
    rows = _fan_out(_approx_trial, tasks, cfg.jobs)
    fields = ["n", "k", "phi", "trial", "opt", "local", "steps", "ok"]
    return fields, rows


# --- orchestration -----------------------------------------------------------

def _fan_out(fn, tasks, jobs: int):
    """Run trials, possibly across processes; order follows the task list."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def run_experiment(cfg: ExperimentConfig):
    if cfg.mode == "scaling":
        return exp_scaling(cfg)
    if cfg.mode == "rank":
        return exp_rank_campaign(cfg)
    if cfg.mode == "mc":
        return exp_mc(cfg)
    return approx_check(cfg)


def rows_to_csv(fields, rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, restval="",
                            lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
