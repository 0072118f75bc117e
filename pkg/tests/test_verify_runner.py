#!/usr/bin/env python3
"""Tests for the verification runner"""

import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from formal_hecke.verify_runner import Check, CheckResult, VerificationRunner, all_passed


def _boom():
    raise ValueError("bad input")


def _checks():
    return [
        Check("plain_true", lambda: True),
        Check("with_detail", lambda: (False, "lhs != rhs")),
        Check("raises", _boom),
        Check("truthy", lambda: 1),
    ]


class TestVerificationRunner:
    """Serial and threaded execution"""

    @pytest.mark.parametrize("workers", [1, 2])
    def test_results_keep_input_order(self, workers):
        """One result per check, in order"""
        results = VerificationRunner(workers=workers).run(_checks())
        assert [r.name for r in results] == ["plain_true", "with_detail", "raises", "truthy"]
        assert [r.passed for r in results] == [True, False, False, True]

    def test_exceptions_become_failures(self):
        """A raising check fails with the exception in its detail"""
        results = VerificationRunner(workers=1).run(_checks())
        assert results[1].detail == "lhs != rhs"
        assert results[2].detail == "ValueError: bad input"

    def test_empty(self):
        """No checks, no results"""
        assert VerificationRunner(workers=2).run([]) == []

    def test_stats(self):
        """Counts accumulate across runs"""
        runner = VerificationRunner(workers=1)
        runner.run(_checks())
        runner.run(_checks()[:1])
        assert runner.get_stats() == {"checks_run": 5, "checks_failed": 2, "workers": 1}

    def test_all_passed(self):
        """all_passed needs every result to pass"""
        assert all_passed([])
        assert all_passed([CheckResult("a", True)])
        assert not all_passed([CheckResult("a", True), CheckResult("b", False)])

    def test_to_dict(self):
        """Timing is not part of the serialized result"""
        assert CheckResult("a", False, "why", 1.5).to_dict() == {"name": "a", "passed": False, "detail": "why"}


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
