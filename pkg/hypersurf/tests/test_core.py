"""
Unit tests for configuration, logging and error reporting.

Tests:
- Settings validation
- Run id propagation into log records
- Exit codes and problem reports
- Ordered parallel map
"""

import io
import logging

import pytest
from pydantic import ValidationError

from hypersurf.core.concurrency import ordered_map, worker_count
from hypersurf.core.config import Settings
from hypersurf.core.error_handling import (
    EXIT_INTERNAL_CONSISTENCY,
    EXIT_SPEC_VALIDATION,
    EXIT_UNEXPECTED,
    DuplicateCurveError,
    InternalConsistencyError,
    ProblemDetail,
    create_problem_detail,
    exit_code_for,
    sanitize_error_message,
)
from hypersurf.core.logging import (
    RunIdFilter,
    configure_logging,
    get_run_id,
    new_run_id,
)


class TestSettings:
    """Tests for environment-driven settings."""

    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("HYPERSURF_OUTPUT_FORMAT", raising=False)
        s = Settings(_env_file=None)
        assert s.OUTPUT_FORMAT == "json"
        assert s.THREADS is None

    def test_log_level_is_normalized(self):
        assert Settings(_env_file=None, LOG_LEVEL="debug").LOG_LEVEL == "DEBUG"
        assert Settings(_env_file=None, LOG_LEVEL="chatty").LOG_LEVEL == "WARNING"

    def test_environment_prefix(self, monkeypatch):
        monkeypatch.setenv("HYPERSURF_SWEEP_SEED", "17")
        assert Settings(_env_file=None).SWEEP_SEED == 17

    def test_invalid_threads(self):
        with pytest.raises(ValidationError):
            Settings(_env_file=None, THREADS=0)

    def test_invalid_output_format(self):
        with pytest.raises(ValidationError):
            Settings(_env_file=None, OUTPUT_FORMAT="yaml")

    def test_development_flag(self):
        assert Settings(_env_file=None, ENVIRONMENT="Development").is_development


class TestRunIdLogging:
    """Tests for the run id filter."""

    @pytest.fixture
    def log_record(self):
        return logging.LogRecord(
            name="hypersurf.test",
            level=logging.INFO,
            pathname=__file__,
            lineno=10,
            msg="Built tower",
            args=(),
            exc_info=None,
        )

    def test_filter_adds_current_run_id(self, log_record):
        run_id = new_run_id()
        assert RunIdFilter().filter(log_record) is True
        assert log_record.run_id == run_id
        assert get_run_id() == run_id

    def test_handler_writes_run_id(self):
        stream = io.StringIO()
        configure_logging("INFO", stream)
        run_id = new_run_id()
        logging.getLogger("hypersurf.test").info("levels built")
        assert f"[{run_id}]" in stream.getvalue()
        assert "levels built" in stream.getvalue()

    def test_level_filters_records(self):
        stream = io.StringIO()
        configure_logging("ERROR", stream)
        logging.getLogger("hypersurf.test").warning("hidden")
        assert stream.getvalue() == ""


class TestErrorHandling:
    """Tests for exit codes and problem reports."""

    def test_exit_codes(self):
        assert exit_code_for(DuplicateCurveError("x")) == EXIT_SPEC_VALIDATION
        assert exit_code_for(InternalConsistencyError("x")) == EXIT_INTERNAL_CONSISTENCY
        assert exit_code_for(KeyError("x")) == EXIT_UNEXPECTED

    def test_problem_detail(self):
        new_run_id()
        problem = create_problem_detail(DuplicateCurveError("FIBER_H(1) twice"))
        assert problem.type == "hypersurf:errors/duplicate-curve"
        assert problem.title == "Duplicate Curve"
        assert problem.detail == "FIBER_H(1) twice"
        assert problem.run_id == get_run_id()

    def test_problem_schema_example_validates(self):
        example = ProblemDetail.model_json_schema()["example"]
        assert ProblemDetail.model_validate(example).exit_code == EXIT_SPEC_VALIDATION

    def test_unexpected_errors_are_hidden_in_production(self):
        message = sanitize_error_message(RuntimeError("secret path"), False)
        assert "secret path" not in message
        assert sanitize_error_message(RuntimeError("secret path"), True) == (
            "secret path"
        )


class TestOrderedMap:
    """Tests for the worker pool helper."""

    def test_serial_and_parallel_agree(self):
        items = list(range(20))
        assert ordered_map(lambda x: x * x, items) == [x * x for x in items]
        assert ordered_map(lambda x: x * x, items, 4) == [x * x for x in items]

    def test_worker_count(self):
        assert worker_count(4) == 4
        assert worker_count(1) == 1
