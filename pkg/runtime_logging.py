"""
Logging setup shared by the command line and the HTTP front end.

Records go to stderr (stdout carries JSON/CSV payloads) and carry the tag of
the current run, e.g. `simulate:20040101`, so interleaved logs of several
runs can be told apart. The tag lives in a context variable: each thread
(and each request of the threaded Flask server) sees only the tag it set.
"""

from __future__ import annotations

import contextvars
import logging

LOG_FORMAT = '%(name)s %(levelname)s [%(run)s]: %(message)s'

_run_tag = contextvars.ContextVar("run_tag", default="-")

_installed = False


class RunContextFilter(logging.Filter):
    """Stamp every record with the run tag of the logging thread."""

    @property
    def run(self) -> str:
        return _run_tag.get()

    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, "run"):
            record.run = _run_tag.get()
        return True


_run_filter = RunContextFilter()


def install_run_context_filter() -> RunContextFilter:
    global _installed
    if not _installed:
        for handler in logging.getLogger().handlers:
            handler.addFilter(_run_filter)
        _installed = True
    return _run_filter


def set_run_context(command: str, seed=None) -> None:
    _run_tag.set(command if seed is None else f"{command}:{seed}")


def current_run_context() -> str:
    return _run_tag.get()


def configure_logging(verbose: int = 0) -> None:
    """WARNING by default, INFO with -v, DEBUG with -vv."""
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose >= 2:
        level = logging.DEBUG

    root = logging.getLogger()
    if not root.handlers:
        logging.basicConfig(level=level, format=LOG_FORMAT)
    else:
        root.setLevel(level)
    install_run_context_filter()
