"""Acceptance criteria at full size; set FREEDL_ACCEPTANCE=quick for small counts."""
import os

import pytest

from conftest import ACCEPTANCE_LINES
from freedl import acceptance
from freedl.semantics import Kn, ModelBounds, oracle_sat

QUICK = os.environ.get("FREEDL_ACCEPTANCE") == "quick"
SIZES = {1: 20, 3: 30, 4: 20, 6: 20, 7: 100} if QUICK else {}


def run(k):
    fn = acceptance.CRITERIA[k - 1]
    r = fn(SIZES[k]) if k in SIZES else fn()
    ACCEPTANCE_LINES[k] = r.line()
    print(r.line())
    return r


@pytest.mark.parametrize("k", [1, 3, 4, 5, 6, 7])
def test_criterion(k):
    r = run(k)
    assert r.ok, r.line() + "\n" + "\n".join(
        f"{c.name}: {c.failures}" for c in r.checks if not c.ok)


def test_criterion_2_checkable_parts():
    r = run(2)
    parts = {c.name: c for c in r.checks}
    assert parts["C' sat (partial)"].ok
    assert parts["refuses partial mode"].ok


@pytest.mark.xfail(strict=True, reason="C has a one-world RDA model: 'a' never designates "
                   "and the box is vacuous without successors")
def test_criterion_2_claimed_unsat():
    c, _ = acceptance.rda_counterexample()
    assert not oracle_sat(c, None, ModelBounds(4, 2, Kn(1), rda=True)).sat
