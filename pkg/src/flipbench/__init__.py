"""Laboratory for the FLIP local-search method on smoothed max-k-cut instances.

Exact fixed-point arithmetic end to end: instances, traces, sign
matrices, rank certificates, and batch experiments.
"""

from .model import (DEFAULT_DENOM, Instance, InvalidMoveError, ModelError,
                    Move, SimplexFrame, apply_move, complete_edges, cut_value,
                    hamiltonian, improving_moves, move_delta, simplex_vectors)
from .thresholds import Beta
from .generator import SmoothingProfile, build_graph, make_instance
from .engine import (PivotRule, ReplayError, Trace, replay, run_flip,
                     slice_trace, trace_from_text, trace_to_text, verify_trace,
                     window_stats)
from .analysis import (BlockNotFoundError, BlockView, Cycle, CycleSet, Pair,
                       classify_cyclic, cycles, cyclic_acyclic_blocks,
                       find_alpha_cyclic_block, find_critical_block,
                       max_surplus, occurrence_stats, pairs, surplus,
                       transition_singleton_blocks, two_critical_block)
from .matrices import (SignMatrix, build_M, build_P, columns_for,
                       cumulative_event, exact_rank, per_step_event,
                       weighted_column_sums)
from .certificates import (Arc, CertificateError, CertificateGraph,
                           build_3cut_certificate, build_half_certificate,
                           build_k2_certificate, is_good_arc, is_tricky,
                           leaping_cycle, neighborwise_arcs_3cut,
                           singleton_path, validate_certificate)
from .harness import (ExperimentConfig, HarnessError, approx_check,
                      brute_force_opt_num, epsilon_bound, exp_mc,
                      exp_rank_campaign, exp_scaling, mc_slow_bound,
                      parse_config, rows_to_csv, run_experiment,
                      theorem_bound, window_length)

__version__ = "0.1.0"
