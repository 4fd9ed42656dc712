"""Experiment execution engine."""

from __future__ import annotations

import asyncio
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

from entropylab.core.config import get_settings
from entropylab.core.errors import ConfigError
from entropylab.core.streams import RandomStream
from entropylab.experiment.builder import ModelBuilder, build_models
from entropylab.experiment.runners import RunContext, default_registry
from entropylab.experiment.spec import ExperimentConfig
from entropylab.experiment.task import CheckTask, TaskStatus
from entropylab.lab.registry import CheckRegistry
from entropylab.lab.reports import ConcentrationProfile, InequalityReport, failed_report
from entropylab.observability.logger import get_logger

logger = get_logger(__name__)


@dataclass
class RunResult:
    """Finished tasks of one experiment, in configuration order."""

    config: ExperimentConfig
    tasks: List[CheckTask] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def reports(self) -> List[InequalityReport]:
        return [r for task in self.tasks for r in task.result.reports]

    @property
    def profiles(self) -> List[ConcentrationProfile]:
        return [p for task in self.tasks for p in task.result.profiles]

    @property
    def failed(self) -> List[CheckTask]:
        return [t for t in self.tasks if t.status == TaskStatus.FAILED]

    @property
    def all_satisfied(self) -> bool:
        return bool(self.tasks) and all(t.satisfied for t in self.tasks)


class ExperimentEngine:
    """Builds an experiment's models and runs its checks concurrently.

    Each check gets the stream ``RandomStream(seed).child("check", index)``,
    so its numbers do not depend on ``jobs`` or on which checks ran beside it.
    A check that raises becomes a single failed report; configuration errors
    propagate.
    """

    def __init__(
        self,
        config: ExperimentConfig,
        registry: Optional[CheckRegistry] = None,
        jobs: Optional[int] = None,
    ) -> None:
        self.config = config
        self.registry = registry or default_registry()
        self.jobs = max(1, jobs or get_settings().jobs)
        self._built: Optional[ModelBuilder] = None

    def validate(self) -> ModelBuilder:
        """Resolve every checker name and build every model and body."""
        for i, spec in enumerate(self.config.checks):
            self.registry.get(spec.check, location=f"checks[{i}].check")
        if self._built is None:
            self._built = build_models(self.config)
        return self._built

    async def execute(self) -> RunResult:
        built = self.validate()
        root = RandomStream(self.config.seed)
        tasks = [CheckTask(index=i, spec=spec) for i, spec in enumerate(self.config.checks)]
        logger.info(
            "experiment_started",
            experiment=self.config.name,
            seed=self.config.seed,
            checks=len(tasks),
            jobs=self.jobs,
        )
        started = time.perf_counter()
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.jobs) as pool:
            outcomes = await asyncio.gather(
                *[loop.run_in_executor(pool, self._run_task, task, built, root) for task in tasks],
                return_exceptions=True,
            )
        for outcome in outcomes:
            if isinstance(outcome, ConfigError):
                raise outcome

        result = RunResult(config=self.config, tasks=tasks, seconds=time.perf_counter() - started)
        log = logger.info if result.all_satisfied else logger.warning
        log(
            "experiment_finished",
            experiment=self.config.name,
            reports=len(result.reports),
            failed=len(result.failed),
            satisfied=result.all_satisfied,
            seconds=round(result.seconds, 3),
        )
        return result

    def run_sync(self) -> RunResult:
        return asyncio.run(self.execute())

    def _run_task(self, task: CheckTask, built: ModelBuilder, root: RandomStream) -> CheckTask:
        spec = task.spec
        ctx = RunContext(
            models=built.models,
            bodies=built.bodies,
            stream=root.child("check", task.index),
            index=task.index,
        )
        task.mark_running()
        started = time.perf_counter()
        try:
            result = self.registry.invoke(spec.check, spec, ctx)
            task.mark_completed(result)
            logger.info(
                "check_completed",
                check=task.name,
                reports=len(result.reports),
                satisfied=task.satisfied,
            )
        except ConfigError:
            raise
        except Exception as exc:
            message = f"{type(exc).__name__}: {exc}"
            task.mark_failed(
                message,
                failed_report(spec.check, message, {"seed": self.config.seed, "models": spec.models}),
            )
            logger.error("check_failed", check=task.name, error=message)
        finally:
            task.seconds = time.perf_counter() - started
        return task


def run_experiment(
    config: ExperimentConfig,
    jobs: Optional[int] = None,
    registry: Optional[CheckRegistry] = None,
) -> RunResult:
    return ExperimentEngine(config, registry=registry, jobs=jobs).run_sync()
