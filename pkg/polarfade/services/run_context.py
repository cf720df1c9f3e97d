"""Per-run correlation ID carried through logs and manifests."""

from __future__ import annotations

import uuid
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar

run_id_var: ContextVar[str] = ContextVar("run_id", default="")


def generate_run_id() -> str:
    """Return a new 32-character hex run ID."""
    return uuid.uuid4().hex


def get_run_id() -> str:
    return run_id_var.get()


@contextmanager
def run_scope(run_id: str | None = None) -> Iterator[str]:
    """Bind a run ID for the duration of a CLI command.

    Worker threads started inside the scope do not inherit the contextvar;
    the harness copies the context explicitly when it submits work.
    """
    rid = run_id or generate_run_id()
    token = run_id_var.set(rid)
    try:
        yield rid
    finally:
        run_id_var.reset(token)
