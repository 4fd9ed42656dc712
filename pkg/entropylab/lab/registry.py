"""Registry of named check runners."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional

from entropylab.core.errors import ConfigError
from entropylab.observability.logger import get_logger

logger = get_logger(__name__)

Runner = Callable[..., Any]


@dataclass(frozen=True)
class RegisteredCheck:
    name: str
    runner: Runner
    description: str = ""


class CheckRegistry:
    """Central registry for discovering and invoking check runners."""

    def __init__(self) -> None:
        self._checks: Dict[str, RegisteredCheck] = {}

    def register(self, runner: Runner, name: Optional[str] = None, description: str = "") -> None:
        check_name = name or getattr(runner, "__name__", None)
        if not check_name:
            raise ValueError("A name must be provided for runners without __name__")
        if not callable(runner):
            raise TypeError(f"Cannot register object of type {type(runner)}; runners must be callable")
        self._checks[check_name] = RegisteredCheck(check_name, runner, description)
        logger.debug("check_registered", check=check_name)

    def check(self, name: str, description: str = "") -> Callable[[Runner], Runner]:
        """Decorator form of :meth:`register`."""

        def decorator(runner: Runner) -> Runner:
            self.register(runner, name=name, description=description)
            return runner

        return decorator

    def get(self, name: str, location: Optional[str] = None) -> RegisteredCheck:
        if name not in self._checks:
            raise ConfigError(
                f"unknown checker {name!r} (known: {', '.join(sorted(self._checks))})", location
            )
        return self._checks[name]

    def invoke(self, name: str, *args: Any, **kwargs: Any) -> Any:
        entry = self.get(name)
        logger.debug("check_invoked", check=name)
        return entry.runner(*args, **kwargs)

    def list_checks(self) -> List[str]:
        return list(self._checks.keys())

    def describe(self) -> Dict[str, str]:
        return {name: entry.description for name, entry in self._checks.items()}

    def __contains__(self, name: str) -> bool:
        return name in self._checks

    def __len__(self) -> int:
        return len(self._checks)

    def __repr__(self) -> str:
        return f"CheckRegistry(checks={self.list_checks()})"


_registry: Optional[CheckRegistry] = None


def get_registry() -> CheckRegistry:
    global _registry
    if _registry is None:
        _registry = CheckRegistry()
    return _registry
