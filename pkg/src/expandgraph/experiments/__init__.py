from .coldstart import run_cold_start
from .config import ColdStartConfig, SyntheticConfig, ba_defaults, er_defaults, read_config
from .report import Report
from .synthetic import (cross_validate, generate_synthetic_training, make_instance,
                        run_convergence_study, run_synthetic)

__all__ = [
    "ColdStartConfig", "Report", "SyntheticConfig", "ba_defaults", "cross_validate",
    "er_defaults", "generate_synthetic_training", "make_instance", "read_config",
    "run_cold_start", "run_convergence_study", "run_synthetic",
]
