"""Trellis-extended codebook quantization of CSI for large antenna arrays."""
from .errors import ConfigError
from .trellis import ConvCode, build_ungerboeck_code, code_for_rate, encode, viterbi
from .codebook import (BranchMapping, Codebook, design_ed_codebook, lte_dft_codebook,
                       map_codewords_to_branches, rvq_codebook)
from .quantizer import (FeedbackWord, QuantizerConfig, make_config, quantize, quantize_subspace,
                        reconstruct)
from .tespa import (TespaState, reconstruct_update, tespa_init, tespa_spatial, tespa_update,
                    tespa_update_fixed_first)
from .channel import (ChannelModel, dominant_eigenvectors, draw_exp_spatial, draw_iid,
                      evolve_gauss_markov, jakes_eta)
from .harness import (ExperimentSpec, ResultRow, emit_results, parse_results,
                      run_beamforming_experiment, run_rate_experiment, run_tespa_experiment)

__version__ = "0.1.0"
