"""Real-time nondeterministic transducers with write-once output tapes.

A transducer consumes |c x $ left to right, one transition per symbol, and
may emit at most one output symbol per consumed symbol (None = emit nothing).
Outputs count only along runs that end in the designated accepting state on
the $-transition, so the multiset of outputs has one entry per accepting run.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

from .machines import LEND, REND, MachineError

State = Hashable
Symbol = Hashable


@dataclass(frozen=True)
class RtTransducer:
    states: frozenset
    input_symbols: frozenset
    output_symbols: frozenset
    delta: Mapping  # (q, sym) -> tuple of (p, emit | None)
    initial: State
    accept_state: State

    def __init__(self, states, input_symbols, output_symbols, delta, initial, accept_state):
        states = frozenset(states)
        input_symbols = frozenset(input_symbols)
        output_symbols = frozenset(output_symbols)
        if initial not in states or accept_state not in states:
            raise MachineError("initial/accepting state not in state set")
        if LEND in input_symbols or REND in input_symbols:
            raise MachineError("endmarkers are implicit, not input symbols")
        frozen = {}
        for (q, sym), opts in delta.items():
            if q not in states:
                raise MachineError(f"unknown source state {q!r}")
            if q == accept_state:
                raise MachineError("the accepting state is terminal")
            clean = []
            for p, emit in opts:
                if p not in states:
                    raise MachineError(f"unknown target state {p!r}")
                if emit is not None and emit not in output_symbols:
                    raise MachineError(f"unknown output symbol {emit!r}")
                clean.append((p, emit))
            clean.sort(key=repr)
            if clean:
                frozen[(q, sym)] = tuple(clean)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "input_symbols", input_symbols)
        object.__setattr__(self, "output_symbols", output_symbols)
        object.__setattr__(self, "delta", frozen)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "accept_state", accept_state)

    def moves(self, q, sym):
        return self.delta.get((q, sym), ())

    def __hash__(self):
        return hash((self.initial, self.accept_state, len(self.states)))


class OutputMultiset(Counter):
    """Multiset of output strings; total multiplicity = accepting-run count."""

    @property
    def total_multiplicity(self) -> int:
        return sum(self.values())


def evaluate_transducer(t: RtTransducer, x: Iterable) -> OutputMultiset:
    """Exhaustively enumerate runs of t on |c x $ and collect valid outputs."""
    x = tuple(x)
    for s in x:
        if s not in t.input_symbols:
            raise MachineError(f"input symbol {s!r} not in the transducer alphabet")
    tape = (LEND,) + x + (REND,)
    out = OutputMultiset()
    # real-time: depth equals len(tape), so plain DFS terminates
    stack = [(t.initial, 0, ())]
    while stack:
        q, i, emitted = stack.pop()
        if i == len(tape):
            if q == t.accept_state:
                out[emitted] += 1
            continue
        for p, emit in t.moves(q, tape[i]):
            stack.append((p, i + 1, emitted if emit is None else emitted + (emit,)))
    return out


def compose_transducers(m1: RtTransducer, m2: RtTransducer) -> RtTransducer:
    """One-pass composition of m2 (forward) with m1 run on reversed output.

    The result C simulates, per input x: a run of m2 producing y, and a run
    of m1 on y^R guessed backwards (final state first, initial state checked
    at $).  Each accepting run of C corresponds to exactly one such pair, so
    multiplicities are preserved.  Because m1's run is reconstructed from its
    far end, C's write-once tape necessarily holds m1's output mirrored:

        outputs(C, x) = { f(y^R)^R : y in g(x) }   (as a multiset)

    where f, g are the functions of m1, m2.  A real-time machine cannot emit
    f(y^R) unmirrored: its first symbol depends on y's last symbol, which is
    not yet readable.
    """
    if m2.output_symbols != m1.input_symbols:
        raise MachineError("ALPHABET_MISMATCH: m2 output alphabet must equal m1 input alphabet")

    # m1-backward bookkeeping: predecessors of the accepting $-step,
    # and of each (state, symbol) step.
    final_pred = sorted({q for (q, sym), opts in m1.delta.items()
                         if sym == REND and any(p == m1.accept_state for p, _e in opts)},
                        key=repr)
    init_succ = {p for (q, sym), opts in m1.delta.items() if sym == LEND and q == m1.initial
                 for p, _e in opts}
    # m1 steps indexed by (consumed symbol, target state) for backward guessing
    back: dict = {}
    for (r, ysym), opts in m1.delta.items():
        if ysym in (LEND, REND):
            continue
        for tgt, z in opts:
            back.setdefault((ysym, tgt), []).append((r, z))

    states: set = {"C0", "Cacc"}
    delta: dict = {}

    def add(q, sym, p, emit):
        delta.setdefault((q, sym), []).append((p, emit))

    # at |c: step m2 on |c (emitting nothing by the standard class), and seed
    # the m1-backward component with a state that can finish on $
    pairs: set = set()
    todo = []
    for p2, e2 in m2.moves(m2.initial, LEND):
        if e2 is not None:
            raise MachineError("composition requires λ-emissions on endmarkers")
        for r1 in final_pred:
            st = ("C", p2, r1)
            add("C0", LEND, st, None)
            if st not in pairs:
                pairs.add(st)
                todo.append(st)

    syms = sorted(m2.input_symbols, key=repr)
    while todo:
        st = todo.pop()
        _tag, q2, s1 = st
        for sym in syms:
            for p2, y in m2.moves(q2, sym):
                if y is None:
                    raise MachineError("composition requires an emission on every input symbol")
                # guess the m1 transition that consumed y and led to s1
                for r, z in back.get((y, s1), ()):
                    nxt = ("C", p2, r)
                    add(st, sym, nxt, z)
                    if nxt not in pairs:
                        pairs.add(nxt)
                        todo.append(nxt)
        # at $: m2 must accept and the m1-backward thread must close on |c
        for p2, e2 in m2.moves(q2, REND):
            if e2 is not None:
                raise MachineError("composition requires λ-emissions on endmarkers")
            if p2 == m2.accept_state and s1 in init_succ:
                add(st, REND, "Cacc", None)

    states |= pairs
    out_syms = set(m1.output_symbols) or {"_"}
    return RtTransducer(states, m2.input_symbols, out_syms, delta, "C0", "Cacc")
