import json
import logging
from datetime import datetime
from typing import Any, Dict, Optional

from ..errors import VerificationError

logger = logging.getLogger(__name__)


class CheckReport:
    """Outcome of one verification: pass/fail, payload and the first failing witness."""

    def __init__(
        self,
        passed: bool,
        data: Optional[Any] = None,
        error: Optional[str] = None,
        metadata: Optional[Dict[str, Any]] = None,
        witness: Optional[Dict[str, Any]] = None,
    ):
        self.passed = passed
        self.data = data
        self.error = error
        self.metadata = metadata or {}
        self.witness = witness
        self.timestamp = datetime.now()

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> Dict[str, Any]:
        """Convert report to dictionary format."""
        data_dict: Any = {}
        if self.data:
            if hasattr(self.data, "to_dict"):
                data_dict = self.data.to_dict()
            elif isinstance(self.data, (dict, list)):
                data_dict = self.data
            else:
                try:
                    data_dict = json.loads(json.dumps(self.data))
                except (TypeError, ValueError):
                    data_dict = str(self.data)

        return {
            "passed": self.passed,
            "data": data_dict,
            "error": self.error,
            "witness": self.witness,
            "metadata": self.metadata,
            "timestamp": self.timestamp.isoformat(),
        }

    def raise_for_failure(self) -> "CheckReport":
        if not self.passed:
            raise VerificationError(self.error or "check failed", self.witness)
        return self

    @classmethod
    def success_result(cls, data: Optional[Any] = None, metadata: Optional[Dict[str, Any]] = None):
        """Create a passing report."""
        return cls(passed=True, data=data, metadata=metadata)

    @classmethod
    def failure_result(
        cls,
        error: str,
        witness: Optional[Dict[str, Any]] = None,
        metadata: Optional[Dict[str, Any]] = None,
    ):
        """Create a failing report."""
        return cls(passed=False, error=error, witness=witness, metadata=metadata)

    @classmethod
    def error_result(cls, error: str, metadata: Optional[Dict[str, Any]] = None):
        """Create a report for a check that raised instead of finishing."""
        return cls(passed=False, error=error, metadata=metadata)

    @classmethod
    def from_witness(cls, name: str, witness: Optional[Dict[str, Any]], data: Optional[Any] = None):
        """Passing report when witness is None, failing report naming `name` otherwise."""
        if witness is None:
            return cls.success_result(data=data, metadata={"check": name})
        logger.warning(f"Check {name} failed: {witness}")
        return cls.failure_result(f"{name} failed", witness=witness, metadata={"check": name})

    @classmethod
    def combine(cls, name: str, reports: Dict[str, "CheckReport"]) -> "CheckReport":
        """One report for several named sub-checks; fails on the first failing one."""
        data = {key: report.to_dict() for key, report in reports.items()}
        for key, report in reports.items():
            if not report.passed:
                return cls(
                    passed=False,
                    data=data,
                    error=f"{name}: {key}: {report.error}",
                    witness=report.witness,
                    metadata={"check": name},
                )
        return cls.success_result(data=data, metadata={"check": name})
