"""Peak-limited Poisson channel with transmitter-side state knowledge.

Capacity numerics, a slot-level channel simulator with adversarial and
stochastic spurious counts, a lazy random-binning codec with a training
prefix, and a reproducible Monte Carlo harness.
"""

from .binning import (CodebookSpec, DecodeOutcome, EncodeOutcome,
                      codeword_bit, codeword_slots, decode,
                      decoder_threshold, encode, encoder_threshold, overlap)
from .causal import (StrategyChannel, build_strategy_channel,
                     causal_capacity, no_csi_capacity, strategy_marginalize)
from .channel import (ADVERSARY_STRATEGIES, ChannelParams, ConfigError,
                      RandomStateLaw, SlotSeq, StateBudget,
                      gen_adversarial_states, gen_random_states,
                      simulate_slots)
from .harness import (ExperimentConfig, ExperimentResult,
                      run_adversarial_experiment, run_experiment,
                      run_random_state_experiment, save_result_json, sweep,
                      sweep_to_csv, wilson_interval)
from .infomath import (CapacityResult, ConvergenceError, DmcLaw,
                       PrecisionError, SanovResult, achievable_rate,
                       binary_kl, binary_kl_bits, blahut_arimoto,
                       capacity_poisson, discrete_capacity, entropy_bits,
                       mutual_information_bits, sanov_binomial_exponent)
from .planning import BlockPlan, plan_block, predict_adversary_error
from .training import (TrainingConfig, auto_reps, block_training_config,
                       train_decode, train_encode)

__version__ = "0.1.0"

__all__ = [
    "ADVERSARY_STRATEGIES", "BlockPlan", "CapacityResult", "ChannelParams",
    "CodebookSpec", "ConfigError", "ConvergenceError", "DecodeOutcome",
    "DmcLaw", "EncodeOutcome", "ExperimentConfig", "ExperimentResult",
    "PrecisionError", "RandomStateLaw", "SanovResult", "SlotSeq",
    "StateBudget",
    "StrategyChannel", "TrainingConfig", "achievable_rate", "auto_reps",
    "binary_kl", "binary_kl_bits", "blahut_arimoto",
    "block_training_config", "build_strategy_channel", "capacity_poisson",
    "causal_capacity", "codeword_bit", "codeword_slots", "decode",
    "decoder_threshold", "discrete_capacity", "encode", "encoder_threshold",
    "entropy_bits", "gen_adversarial_states", "gen_random_states",
    "mutual_information_bits", "no_csi_capacity", "overlap", "plan_block",
    "predict_adversary_error", "run_adversarial_experiment",
    "run_experiment", "run_random_state_experiment", "sanov_binomial_exponent",
    "save_result_json", "simulate_slots", "strategy_marginalize", "sweep",
    "sweep_to_csv", "train_decode", "train_encode", "wilson_interval",
]
