"""Statistical model checking of Markov chains from a lower bound on
transition probabilities, with an exact oracle for white-box chains."""

from .chain import (MarkovChain, PathState, ValidationError, actual_pmin, gen_fig1, gen_fig3,
                    gen_fig4, gen_random, make_stream, next_state, parse_family)
from .exact import (bscc_inventory, bsccs, exact_ltl, exact_mp, exact_reachability,
                    sim_termination_sample)
from .hoa import RabinAutomaton, eval_label_expr, parse_hoa
from .io import ParseError, load_chain, parse_chain, serialize_chain, write_chain
from .ltl import ProductState, is_accepting_set, product_step, single_path_ltl, verify_ltl
from .meanpayoff import (estimate_mp, estimate_transitions, k_from_trerr, mp_of_bscc,
                         single_path_mp, trerr_from_mperr)
from .monitor import CandidateTracker, k_threshold, reached_bscc
from .reach import single_path_reach, verify_reach
from .sampling import DivergedError, VerificationReport
from .stats import (Decision, HypothesisSpec, SprtSession, hoeffding_ci, ltl_hypotheses,
                    reach_hypotheses, sim_bound, sprt_decision, sprt_feed)

__version__ = "0.1.0"
