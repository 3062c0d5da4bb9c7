from __future__ import annotations

import pytest

from corpus_util import cases, execute, mismatches

CASES = cases()


def test_corpus_size():
    assert len(CASES) >= 60


@pytest.mark.parametrize("case", CASES, ids=[c.name for c in CASES])
def test_case(case):
    assert mismatches(case, execute(case, coverage=None)) == []
