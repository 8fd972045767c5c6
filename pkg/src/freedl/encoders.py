"""Two-counter Minsky machines and their encoding as a temporal ontology.

Each state q_i becomes a concept ``Q<i>`` that is empty or everything at
each instant; register k is the cardinality of ``R<k>``.  Non-rigid
nominals ``a<k>``/``b<k>`` pick the element added or removed.
"""
from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    CI, And, Concept, Dia, ExistsU, Name, Not, Ontology, bot, nominal, or_, top,
)

NEXT = 1


@dataclass(frozen=True)
class Inc:
    register: int
    target: int


@dataclass(frozen=True)
class Dec:
    register: int
    target_nonzero: int
    target_zero: int


@dataclass(frozen=True)
class MinskyMachine:
    """States ``q_0..q_L``; instruction i runs in state i; q_L halts."""
    states: tuple
    instructions: tuple

    def __post_init__(self):
        if not self.states:
            raise ValueError("a machine needs at least the halting state")
        if len(self.instructions) != len(self.states) - 1:
            raise ValueError("need exactly one instruction per non-halting state")
        L = len(self.states) - 1
        for ins in self.instructions:
            targets = (ins.target,) if isinstance(ins, Inc) else (ins.target_nonzero, ins.target_zero)
            if ins.register not in (1, 2) or any(not 0 <= t <= L for t in targets):
                raise ValueError(f"bad instruction {ins}")

    @property
    def halting(self) -> int:
        return len(self.states) - 1


@dataclass(frozen=True)
class Configuration:
    state: int
    v1: int = 0
    v2: int = 0

    def value(self, k: int) -> int:
        return self.v1 if k == 1 else self.v2

    def with_value(self, k: int, v: int) -> "Configuration":
        return Configuration(self.state, v, self.v2) if k == 1 else Configuration(self.state, self.v1, v)


HALTED = "HALTED"


def minsky_step(m: MinskyMachine, cfg: Configuration):
    if cfg.state == m.halting:
        return HALTED
    ins = m.instructions[cfg.state]
    k = ins.register
    if isinstance(ins, Inc):
        nxt = cfg.with_value(k, cfg.value(k) + 1)
        return Configuration(ins.target, nxt.v1, nxt.v2)
    if cfg.value(k) > 0:
        nxt = cfg.with_value(k, cfg.value(k) - 1)
        return Configuration(ins.target_nonzero, nxt.v1, nxt.v2)
    return Configuration(ins.target_zero, cfg.v1, cfg.v2)


@dataclass
class RunOutcome:
    halts: bool
    steps: int
    trace: list

    def __str__(self):
        return f"HALTS_AT({self.steps})" if self.halts else f"RUNNING_AT_CAP({self.steps})"


def minsky_run(m: MinskyMachine, max_steps: int) -> RunOutcome:
    """Run from (q_0, 0, 0) for at most ``max_steps`` steps."""
    cfg = Configuration(0)
    trace = [cfg]
    for step in range(max_steps + 1):
        if cfg.state == m.halting:
            return RunOutcome(True, step, trace)
        if step == max_steps:
            break
        cfg = minsky_step(m, cfg)
        trace.append(cfg)
    return RunOutcome(False, max_steps, trace)


# ----------------------------------------------------------------- encoding

def state_concept(i: int) -> Name:
    return Name(f"Q{i}")


def register_concept(k: int) -> Name:
    return Name(f"R{k}")


def _iff_cis(lhs: Concept, a: Concept, b: Concept) -> list:
    """``lhs [= (a <=> b)`` as two CIs."""
    return [CI(And(lhs, a), b), CI(And(lhs, b), a)]


def encode_minsky(m: MinskyMachine, mode: str = "finite"):
    """Return ``(ontology, goal)``.  In finite mode the goal ``Q0`` is
    satisfiable over finite flows iff the machine halts; in infinite mode
    it is satisfiable over the naturals iff the machine never halts."""
    if mode in ("finite", "finite_halts"):
        finite = True
    elif mode in ("infinite", "infinite_nonhalt"):
        finite = False
    else:
        raise ValueError(f"unknown mode {mode!r}")
    L = m.halting
    Q = state_concept
    R = register_concept
    nxt = lambda c: Dia(NEXT, c)
    cis = [CI(ExistsU(Q(i)), Q(i)) for i in range(L + 1)]
    cis += [CI(And(Q(i), Q(j)), bot()) for i in range(L + 1) for j in range(i + 1, L + 1)]
    for i, ins in enumerate(m.instructions):
        k = ins.register
        other = 3 - k
        if isinstance(ins, Inc):
            a = nominal(f"a{k}")
            cis.append(CI(Q(i), ExistsU(And(a, Not(R(k))))))
            cis += _iff_cis(Q(i), nxt(R(k)), or_(R(k), a))
            cis += _iff_cis(Q(i), nxt(R(other)), R(other))
            cis.append(CI(Q(i), nxt(Q(ins.target))))
        else:
            b = nominal(f"b{k}")
            cis.append(CI(And(Q(i), ExistsU(R(k))), ExistsU(And(b, R(k)))))
            cis += _iff_cis(Q(i), nxt(R(k)), And(R(k), Not(b)))
            cis += _iff_cis(Q(i), nxt(R(other)), R(other))
            cis.append(CI(And(Q(i), ExistsU(R(k))), nxt(Q(ins.target_nonzero))))
            cis.append(CI(And(Q(i), Not(ExistsU(R(k)))), nxt(Q(ins.target_zero))))
    cis += [CI(And(Q(0), R(k)), bot()) for k in (1, 2)]
    if finite:
        cis.append(CI(Not(nxt(top())), Q(L)))
    else:
        cis.append(CI(Q(L), bot()))
    return Ontology(tuple(cis), 2), Q(0)


def eliminate_u_for_encoding(o: Ontology) -> Ontology:
    """Normal form followed by universal-role elimination."""
    from .reductions import eliminate_universal_role, normalize_ontology
    from .syntax import has_u
    if not has_u(o):
        return o
    return eliminate_universal_role(normalize_ontology(o).output).output


def encoded_configuration(model, w: int, m: MinskyMachine):
    """The configuration encoded at instant ``w``, or None if no state
    concept covers the whole domain."""
    from .semantics import extension
    dom = model.domains[w]
    full = [i for i in range(m.halting + 1) if extension(model, w, state_concept(i)) == dom]
    if len(full) != 1:
        return None
    v = [len(extension(model, w, register_concept(k))) for k in (1, 2)]
    return Configuration(full[0], v[0], v[1])


def check_step_property(model, m: MinskyMachine) -> bool:
    """If instant t encodes a configuration with a successor, t+1 encodes
    that successor."""
    for w in model.worlds:
        succ = model.frame.successors(NEXT, w)
        cfg = encoded_configuration(model, w, m)
        if cfg is None or not succ:
            continue
        nxt = minsky_step(m, cfg)
        if nxt == HALTED:
            continue
        if encoded_configuration(model, succ[0], m) != nxt:
            return False
    return True
