"""Seeded random generators of small concepts and ontologies for testing."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .syntax import (
    CI, And, Concept, Dia, Exists, ExistsDiff, ExistsOne, ExistsU, Ind, Iota,
    Name, Nom, Not, Ontology, closure, modal_depth,
)


@dataclass
class Profile:
    """What a random instance may contain."""
    names: tuple = ("A", "B")
    roles: tuple = ("r",)
    inds: tuple = ("a",)
    modalities: tuple = (1,)
    max_closure: int = 8          # size of the negation closure
    max_depth: int = 2            # modal depth
    u: bool = True
    iota: bool = False
    counting: bool = False
    weights: dict | None = None

    def kinds(self) -> dict:
        w = {"name": 4, "nom": 2 if self.inds else 0, "not": 4, "and": 4,
             "exists": 2 if self.roles else 0, "u": 2 if self.u else 0,
             "dia": 3 if self.modalities else 0, "iota": 1 if self.iota else 0,
             "diff": 2 if self.counting else 0, "one": 1 if self.counting else 0}
        if self.weights:
            w.update(self.weights)
        return {k: v for k, v in w.items() if v > 0}


class Sampler:
    def __init__(self, seed: int = 0, profile: Profile | None = None):
        self.rng = random.Random(seed)
        self.p = profile or Profile()

    def _concept(self, budget: int) -> Concept:
        p, rng = self.p, self.rng
        kinds = p.kinds() if budget > 1 else {"name": 5, "nom": p.kinds().get("nom", 0)}
        kinds = {k: v for k, v in kinds.items() if v}
        k = rng.choices(list(kinds), weights=list(kinds.values()))[0]
        sub = budget - 1
        if k == "name":
            return Name(rng.choice(p.names))
        if k == "nom":
            return Nom(Ind(rng.choice(p.inds)))
        if k == "not":
            return Not(self._concept(sub))
        if k == "and":
            left = rng.randint(1, max(1, sub - 1))
            return And(self._concept(left), self._concept(max(1, sub - left)))
        if k == "exists":
            return Exists(rng.choice(p.roles), self._concept(sub))
        if k == "u":
            return ExistsU(self._concept(sub))
        if k == "dia":
            return Dia(rng.choice(p.modalities), self._concept(sub))
        if k == "iota":
            return Nom(Iota(self._concept(sub)))
        if k == "diff":
            return ExistsDiff(self._concept(sub))
        return ExistsOne(self._concept(sub))

    def _ok(self, x) -> bool:
        return (len(closure(x)) <= self.p.max_closure
                and modal_depth(x) <= self.p.max_depth)

    def concept(self, budget: int | None = None) -> Concept:
        while True:
            c = self._concept(budget or self.rng.randint(3, 8))
            if self._ok(c):
                return c

    def ontology(self, cis: int | None = None, goal_name: str | None = "A"):
        """A random ontology; returns ``(goal, ontology)``."""
        n = cis if cis is not None else self.rng.randint(1, 2)
        mc = max(self.p.modalities, default=1)
        while True:
            o = Ontology(tuple(CI(self.concept(self.rng.randint(1, 4)),
                                  self.concept(self.rng.randint(2, 5))) for _ in range(n)), mc)
            goal = Name(goal_name) if goal_name else self.concept()
            if self._ok([o, goal]):
                return goal, o

    def concepts(self, count: int, **kw) -> list:
        return [self.concept(**kw) for _ in range(count)]


def balanced(draw, label, n: int, frac: float = 0.5, max_draws: int | None = None) -> list:
    """Pick ``n`` items from ``draw(i)`` so that about ``frac`` have a true label.

    Items are taken in draw order; if one class runs dry within
    ``max_draws`` the remainder is filled from the other class."""
    want_true = round(n * frac)
    want_false = n - want_true
    got_t, got_f = [], []
    spare_t, spare_f = [], []
    limit = max_draws if max_draws is not None else 100 * n
    i = 0
    while (len(got_t) < want_true or len(got_f) < want_false) and i < limit:
        x = draw(i)
        i += 1
        if label(x):
            (got_t if len(got_t) < want_true else spare_t).append(x)
        else:
            (got_f if len(got_f) < want_false else spare_f).append(x)
    out = got_t + got_f
    out += (spare_t + spare_f)[: n - len(out)]
    return out


def elo_ontology(seed: int, names=("A", "B", "C"), roles=("r",), inds=("a",),
                 future: int = 2, cis: int = 3) -> Ontology:
    """Random normal-form temporal ontology with negation only in the
    shapes ``B1 [= not B2`` and ``not B1 [= B2`` (and bottom on the right)."""
    from .syntax import bot
    rng = random.Random(seed)
    n = lambda: Name(rng.choice(names))
    shapes = [
        lambda: CI(n(), n()),
        lambda: CI(And(n(), n()), n()),
        lambda: CI(n(), Exists(rng.choice(roles), n())),
        lambda: CI(Exists(rng.choice(roles), n()), n()),
        lambda: CI(n(), Dia(future, n())),
        lambda: CI(Dia(future, n()), n()),
        lambda: CI(n(), Nom(Ind(rng.choice(inds)))),
        lambda: CI(n(), Not(n())),
        lambda: CI(Not(n()), n()),
        lambda: CI(And(n(), n()), bot()),
    ]
    return Ontology(tuple(rng.choice(shapes)() for _ in range(cis)), future)
