from .config import SimConfig, load_config, config_from_dict
from .engine import BerRecord, run_ber_sweep
from .outputs import emit_outputs, replay
from .report import design_report, kl_table, load_profiles, parse_profiles
