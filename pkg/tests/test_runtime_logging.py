"""Unit tests for runtime_logging.py: run tags on log records."""

import logging
import threading

from runtime_logging import (
    RunContextFilter,
    current_run_context,
    install_run_context_filter,
    set_run_context,
)


def _stamp(run_filter):
    record = logging.makeLogRecord({"msg": "x"})
    run_filter.filter(record)
    return record.run


# ── tags ─────────────────────────────────────────────────────────

class TestRunContext:
    def test_tag_with_seed(self):
        set_run_context("simulate", 20040101)
        assert current_run_context() == "simulate:20040101"
        assert _stamp(RunContextFilter()) == "simulate:20040101"

    def test_tag_without_seed(self):
        set_run_context("scan")
        assert _stamp(RunContextFilter()) == "scan"

    def test_existing_tag_kept(self):
        set_run_context("scan")
        record = logging.makeLogRecord({"msg": "x", "run": "replay:1"})
        RunContextFilter().filter(record)
        assert record.run == "replay:1"

    def test_filter_installed_once(self):
        assert install_run_context_filter() is install_run_context_filter()


class TestThreadIsolation:
    def test_thread_tag_does_not_leak(self):
        set_run_context("optimize")
        worker = threading.Thread(target=set_run_context, args=("api-report",))
        worker.start()
        worker.join()
        assert current_run_context() == "optimize"

    def test_concurrent_requests_keep_their_own_tags(self):
        run_filter = RunContextFilter()
        barrier = threading.Barrier(2)
        stamped = {}

        def handle(name, seed):
            set_run_context(name, seed)
            barrier.wait()
            stamped[name] = _stamp(run_filter)

        threads = [threading.Thread(target=handle, args=("api-simulate", 1)),
                   threading.Thread(target=handle, args=("api-analyze", None))]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert stamped == {"api-simulate": "api-simulate:1", "api-analyze": "api-analyze"}
