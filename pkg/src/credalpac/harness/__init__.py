from .campaign import (
    UNCALIBRATABLE,
    Campaign,
    TrialOutcome,
    calibrate_epsilon,
    estimate_violation_probability,
    gn_tail_campaign,
    hoeffding_campaign,
    run_classical_trial,
    run_credal_trial,
    select_training_distribution,
    uniform_convergence_check,
)
from .config import ExperimentConfig, config_digest, emit_config, from_dict, load_config, parse_config
from .report import Calibration, ViolationReport, ViolationRow, emit_report

__all__ = [
    "UNCALIBRATABLE",
    "Calibration",
    "Campaign",
    "ExperimentConfig",
    "TrialOutcome",
    "ViolationReport",
    "ViolationRow",
    "calibrate_epsilon",
    "config_digest",
    "emit_config",
    "emit_report",
    "estimate_violation_probability",
    "from_dict",
    "gn_tail_campaign",
    "hoeffding_campaign",
    "load_config",
    "parse_config",
    "run_classical_trial",
    "run_credal_trial",
    "select_training_distribution",
    "uniform_convergence_check",
]
