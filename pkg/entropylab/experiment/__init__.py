"""Declarative experiments: configuration, model building, execution and result files."""

from entropylab.experiment.builder import ModelBuilder, build_models
from entropylab.experiment.engine import ExperimentEngine, RunResult, run_experiment
from entropylab.experiment.spec import CheckSpec, ExperimentConfig, ModelNode
from entropylab.experiment.suites import SUITES, list_suites, suite_configs
from entropylab.experiment.task import CheckResult, CheckTask, TaskStatus
from entropylab.experiment.writers import write_results

__all__ = [
    "CheckResult",
    "CheckSpec",
    "CheckTask",
    "ExperimentConfig",
    "ExperimentEngine",
    "ModelBuilder",
    "ModelNode",
    "RunResult",
    "SUITES",
    "TaskStatus",
    "build_models",
    "list_suites",
    "run_experiment",
    "suite_configs",
    "write_results",
]
