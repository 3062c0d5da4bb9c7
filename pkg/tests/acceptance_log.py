"""Per-criterion results, filled in by ``test_acceptance`` and printed by the
terminal summary hook in ``conftest``."""

from __future__ import annotations

import time
from contextlib import contextmanager

RESULTS: dict[int, tuple[bool, str, str]] = {}


@contextmanager
def criterion(n: int, title: str):
    t0 = time.perf_counter()
    note: dict[str, str] = {}
    try:
        yield note
    except BaseException:
        RESULTS[n] = (False, title, note.get("detail", ""))
        print(f"criterion {n}: FAIL {title}")
        raise
    dt = time.perf_counter() - t0
    detail = note.get("detail", "")
    detail = f"{detail}; {dt:.2f}s" if detail else f"{dt:.2f}s"
    RESULTS[n] = (True, title, detail)
    print(f"criterion {n}: PASS {title} ({detail})")
