import functools
import logging
from datetime import datetime
from typing import Any, Dict, Optional

from .check_result import CheckReport
from .config import RunConfig

logger = logging.getLogger(__name__)


def suite(name: str, max_n: int = 2, description: str = ""):
    """Decorator for verification suite classes."""

    def decorator(cls):
        cls.suite_name = name
        cls.max_n = max_n
        cls.metadata = {"name": name, "max_n": max_n, "description": description}

        original_run = cls.run

        @functools.wraps(original_run)
        def wrapped_run(self, config: RunConfig) -> CheckReport:
            try:
                logger.info(f"Starting suite: {name}")
                start_time = datetime.now()
                result = original_run(self, config)
                duration = (datetime.now() - start_time).total_seconds()
                logger.info(f"Completed suite: {name} in {duration:.2f} seconds")
                result.metadata.setdefault("suite", name)
                self.result = result
                return result
            except Exception as e:
                logger.error(f"Error in suite {name}: {e}")
                self.result = CheckReport.error_result(f"{type(e).__name__}: {e}", metadata={"suite": name})
                return self.result

        cls.run = wrapped_run
        return cls

    return decorator


class SuiteBase:
    """Base class for all verification suites."""

    def __init__(self):
        self.result: Optional[CheckReport] = None

    def get_result(self) -> Dict[str, Any]:
        if isinstance(self.result, CheckReport):
            return self.result.to_dict()
        return {"passed": False, "data": None, "error": "suite has not run", "timestamp": datetime.now().isoformat()}

    def run(self, config: RunConfig) -> CheckReport:
        raise NotImplementedError("Suites must implement run method")
