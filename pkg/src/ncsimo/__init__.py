"""Noncoherent multiuser massive SIMO: constellation design, detection, BER simulation."""
__version__ = "0.1.0"

from .udcg import (SubConstellationSet, build_sub_constellations, decompose, map_bits,
                   demap_bits, sub_energies)
from .linkdesign import (UserProfile, DesignSolution, sort_users, optimal_design,
                         grid_search_design, assignment_order_check, design_objective)
from .channel import (RadioParams, FixedDistance, UniformDisk, path_loss_db, noise_power,
                      draw_large_scale, draw_realization, apply_channel)
from .modem import (assemble_codeword, detect_ncml, detect_ncml_general, kl_distance,
                    min_kl_over_codebook, RxBlock)
from .baselines import med_design, med_detect, zf_train_detect, ZfBaselineConfig
