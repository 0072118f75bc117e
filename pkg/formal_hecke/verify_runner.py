#!/usr/bin/env python3
"""
Verification runner for formal_hecke
Runs named checks on a joblib worker pool and keeps their input order
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from joblib import Parallel, delayed

from .config import get_settings

CheckOutcome = Union[bool, Tuple[bool, str]]


@dataclass
class CheckResult:
    """Outcome of one named check"""

    name: str
    passed: bool
    detail: str = ""
    elapsed: float = 0.0

    def to_dict(self) -> Dict[str, object]:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class Check:
    """A named callable returning a bool or (bool, detail)"""

    name: str
    func: Callable[[], CheckOutcome]
    tags: Tuple[str, ...] = field(default_factory=tuple)


def _run_one(check: Check) -> CheckResult:
    start_time = time.time()
    try:
        outcome = check.func()
        if isinstance(outcome, tuple):
            passed, detail = outcome
        else:
            passed, detail = bool(outcome), ""
    except Exception as e:
        passed, detail = False, f"{type(e).__name__}: {e}"
    return CheckResult(check.name, bool(passed), detail, time.time() - start_time)


class VerificationRunner:
    """Runs checks with joblib threads, one result per check in input order"""

    def __init__(self, workers: Optional[int] = None):
        self.workers = workers or get_settings().workers
        self.logger = logging.getLogger(__name__)
        self.run_count = 0
        self.failure_count = 0

    def run(self, checks: Sequence[Check]) -> List[CheckResult]:
        if not checks:
            return []
        start_time = time.time()
        if self.workers == 1:
            results = [_run_one(c) for c in checks]
        else:
            results = Parallel(n_jobs=self.workers, prefer="threads")(delayed(_run_one)(c) for c in checks)
        failed = [r for r in results if not r.passed]
        self.run_count += len(results)
        self.failure_count += len(failed)
        for r in failed:
            self.logger.warning(f"Check {r.name} failed: {r.detail}")
        self.logger.info(
            f"Ran {len(results)} checks in {time.time() - start_time:.2f}s "
            f"({len(failed)} failed, workers={self.workers})"
        )
        return list(results)

    def get_stats(self) -> Dict[str, int]:
        return {"checks_run": self.run_count, "checks_failed": self.failure_count, "workers": self.workers}


def all_passed(results: Sequence[CheckResult]) -> bool:
    return all(r.passed for r in results)
