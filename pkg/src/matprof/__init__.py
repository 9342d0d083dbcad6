"""matprof — matrix profile algorithms for time series data mining.

Exact and anytime all-pairs similarity joins (STAMP, STOMP, incremental
STOMPI), multidimensional k-of-d profiles, motif/discord discovery, MDL-based
selection of motif dimensionality and shape-dictionary learning from weakly
labelled series.
"""

from ._backend import BACKEND
from .discovery import (BitCost, DiscordResult, MdlEntry, MdlReport, MotifResult,
                        constrained_mstamp, description_length, extract_discords,
                        extract_motifs, iterative_mdl_motifs, mdl_bits, select_natural_k)
from .errors import *  # noqa: F401,F403
from .io import ProfileDocument, dna_to_ts, downsample, load_series, save_series
from .multi import MultiProfile, SubspaceResult, mstamp, subspace
from .profile import (MatrixProfile, StompiState, anytime_rmse, brute_force_profile,
                      elementwise_min_merge, matrix_profile, predict_runtime, stamp,
                      stomp, stompi_append)
from .sdts import (ShapeDictionary, StreamingPredictor, apply_lag, f_beta,
                   golden_section_threshold, predict, shapelet_transform, train)
from .series import (ExclusionZone, exclusion_radius, rolling_stats, synth_planted,
                     synth_weakly_labeled, trace_like_pattern, znormalize)
from .simsearch import DistanceProfile, MassPlan, mass, sliding_dot_product

__version__ = "0.1.0"
