"""Machine kinds, their data model, and structural validators.

Three machine families live here: k-limited automata (rewritable tape with a
leveled alphabet), one-way pushdown automata with endmarkers, and plain DFAs
used for regular-product constructions.  All probabilities are exact
`fractions.Fraction` values; no floats appear anywhere in the data model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Hashable, Iterable, Mapping

# Reserved token names.  User alphabets may not redeclare them.
LEND = "|c"
REND = "$"
LAMBDA = "λ"
BLANK = "B"

State = Hashable
Symbol = Hashable

ZERO = Fraction(0)
ONE = Fraction(1)


class MachineError(ValueError):
    """Malformed machine container (bad references, reserved-name abuse)."""


# ---------------------------------------------------------------------------
# alphabets


@dataclass(frozen=True)
class LeveledAlphabet:
    """Tape alphabet split into levels Γ0..Γk.

    Γ0 is the input alphabet; Γk always contains the endmarkers, and `blank`
    names the designated level-k blank used by the blank-skipping normal form.
    """

    input_symbols: frozenset
    levels: tuple  # levels[i] = frozenset for Γ_{i+1}
    blank: Symbol = BLANK

    def __init__(self, input_symbols: Iterable, levels: Iterable[Iterable], blank: Symbol = BLANK):
        object.__setattr__(self, "input_symbols", frozenset(input_symbols))
        lv = tuple(frozenset(l) for l in levels)
        if not lv:
            raise MachineError("need at least one writable level (k >= 1)")
        # endmarkers implicitly live in the top level
        top = lv[-1] | {LEND, REND}
        lv = lv[:-1] + (top,)
        object.__setattr__(self, "levels", lv)
        object.__setattr__(self, "blank", blank)
        seen: set = set()
        for part in (self.input_symbols, *lv):
            if part & seen:
                raise MachineError(f"alphabet levels not disjoint: {part & seen}")
            seen |= part
        if LEND in self.input_symbols or REND in self.input_symbols:
            raise MachineError("endmarkers are reserved and cannot be input symbols")

    @property
    def k(self) -> int:
        return len(self.levels)

    def level(self, sym: Symbol) -> int:
        """Total level function; raises MachineError off-alphabet."""
        if sym in self.input_symbols:
            return 0
        for i, part in enumerate(self.levels):
            if sym in part:
                return i + 1
        raise MachineError(f"symbol {sym!r} not in alphabet")

    def __contains__(self, sym: Symbol) -> bool:
        if sym in self.input_symbols:
            return True
        return any(sym in part for part in self.levels)

    def all_symbols(self) -> list:
        out = sorted(self.input_symbols, key=repr)
        for part in self.levels:
            out.extend(sorted(part, key=repr))
        return out


# ---------------------------------------------------------------------------
# machine containers


def _freeze_dist(dist) -> tuple:
    """Normalize a {target: weight} mapping or iterable of pairs to a sorted tuple."""
    if isinstance(dist, Mapping):
        items = dist.items()
    else:
        items = dist
    out = []
    for target, w in items:
        w = Fraction(w)
        if w < 0:
            raise MachineError(f"negative weight {w} on {target}")
        if w != 0:
            out.append((tuple(target), w))
    out.sort(key=lambda tw: repr(tw[0]))
    return tuple(out)


@dataclass(frozen=True)
class LimitedAutomaton:
    """A k-limited automaton with exact rational transition weights.

    `delta` maps (state, tape symbol) to a finite distribution over
    (next state, written symbol, direction) triples with direction in {-1,+1}.
    Halting states carry no outgoing transitions.
    """

    k: int
    states: frozenset
    alphabet: LeveledAlphabet
    delta: Mapping  # (q, sym) -> tuple of ((p, tau, d), Fraction)
    initial: State
    accept: frozenset
    reject: frozenset
    name: str = ""

    def __init__(self, k, states, alphabet, delta, initial, accept, reject, name=""):
        states = frozenset(states)
        accept = frozenset(accept)
        reject = frozenset(reject)
        if k != alphabet.k:
            raise MachineError(f"k={k} but alphabet has {alphabet.k} writable levels")
        if initial not in states:
            raise MachineError("initial state not in state set")
        if not accept <= states or not reject <= states:
            raise MachineError("halting sets must be subsets of the state set")
        if accept & reject:
            raise MachineError("accepting and rejecting sets overlap")
        frozen = {}
        for (q, sym), dist in delta.items():
            if q not in states:
                raise MachineError(f"unknown source state {q!r}")
            if q in accept or q in reject:
                raise MachineError(f"halting state {q!r} has outgoing transitions")
            d = _freeze_dist(dist)
            for (p, tau, dr), _w in d:
                if p not in states:
                    raise MachineError(f"unknown target state {p!r}")
                if dr not in (-1, 1):
                    raise MachineError(f"direction must be ±1, got {dr!r}")
            if d:
                frozen[(q, sym)] = d
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "delta", frozen)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "accept", accept)
        object.__setattr__(self, "reject", reject)
        object.__setattr__(self, "name", name)

    @property
    def halting(self) -> frozenset:
        return self.accept | self.reject

    def moves(self, q: State, sym: Symbol) -> tuple:
        return self.delta.get((q, sym), ())

    def __hash__(self):
        return hash((self.k, self.initial, len(self.states), len(self.delta)))


@dataclass(frozen=True)
class PushdownAutomaton:
    """One-way PDA with endmarkers, bottom marker and rational weights.

    `delta` maps (state, input symbol or λ, stack top) to a distribution over
    (next state, pushed string) pairs; the pushed string replaces the top.
    """

    states: frozenset
    input_symbols: frozenset
    stack_symbols: frozenset
    push_size: int
    delta: Mapping  # (q, sym|λ, a) -> tuple of ((p, u), Fraction) with u a tuple
    initial: State
    bottom: Symbol
    accept: frozenset
    reject: frozenset
    name: str = ""

    def __init__(self, states, input_symbols, stack_symbols, push_size, delta,
                 initial, bottom, accept, reject, name=""):
        states = frozenset(states)
        input_symbols = frozenset(input_symbols)
        stack_symbols = frozenset(stack_symbols)
        accept = frozenset(accept)
        reject = frozenset(reject)
        if bottom not in stack_symbols:
            raise MachineError("bottom marker must be a stack symbol")
        if initial not in states:
            raise MachineError("initial state not in state set")
        if not accept <= states or not reject <= states:
            raise MachineError("halting sets must be subsets of the state set")
        if accept & reject:
            raise MachineError("accepting and rejecting sets overlap")
        if LEND in input_symbols or REND in input_symbols or LAMBDA in input_symbols:
            raise MachineError("reserved tokens cannot be input symbols")
        frozen = {}
        for (q, sym, a), dist in delta.items():
            if q not in states:
                raise MachineError(f"unknown source state {q!r}")
            if q in accept or q in reject:
                raise MachineError(f"halting state {q!r} has outgoing transitions")
            if a not in stack_symbols:
                raise MachineError(f"unknown stack symbol {a!r}")
            items = []
            for target, w in (dist.items() if isinstance(dist, Mapping) else dist):
                p, u = target
                u = tuple(u)
                for b in u:
                    if b not in stack_symbols:
                        raise MachineError(f"push string uses unknown symbol {b!r}")
                items.append(((p, u), Fraction(w)))
            d = _freeze_dist(items)
            for (p, _u), _w in d:
                if p not in states:
                    raise MachineError(f"unknown target state {p!r}")
            if d:
                frozen[(q, sym, a)] = d
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "input_symbols", input_symbols)
        object.__setattr__(self, "stack_symbols", stack_symbols)
        object.__setattr__(self, "push_size", int(push_size))
        object.__setattr__(self, "delta", frozen)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "bottom", bottom)
        object.__setattr__(self, "accept", accept)
        object.__setattr__(self, "reject", reject)
        object.__setattr__(self, "name", name)

    @property
    def halting(self) -> frozenset:
        return self.accept | self.reject

    def moves(self, q: State, sym: Symbol, a: Symbol) -> tuple:
        return self.delta.get((q, sym, a), ())

    def lambda_mass(self, q: State, a: Symbol) -> Fraction:
        return sum((w for _t, w in self.moves(q, LAMBDA, a)), ZERO)

    def __hash__(self):
        return hash((self.initial, len(self.states), len(self.delta)))


@dataclass(frozen=True)
class Dfa:
    """Total deterministic finite automaton."""

    states: frozenset
    input_symbols: frozenset
    transitions: Mapping  # (q, sym) -> p
    start: State
    accepting: frozenset

    def __init__(self, states, input_symbols, transitions, start, accepting):
        states = frozenset(states)
        input_symbols = frozenset(input_symbols)
        accepting = frozenset(accepting)
        if start not in states:
            raise MachineError("start state not in state set")
        if not accepting <= states:
            raise MachineError("accepting set must be a subset of the state set")
        trans = dict(transitions)
        for q in states:
            for s in input_symbols:
                if (q, s) not in trans:
                    raise MachineError(f"transition map not total: missing ({q!r},{s!r})")
                if trans[(q, s)] not in states:
                    raise MachineError(f"transition to unknown state {trans[(q, s)]!r}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "input_symbols", input_symbols)
        object.__setattr__(self, "transitions", trans)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "accepting", accepting)

    def run(self, x: Iterable) -> State:
        q = self.start
        for s in x:
            q = self.transitions[(q, s)]
        return q

    def accepts(self, x: Iterable) -> bool:
        return self.run(x) in self.accepting

    def __hash__(self):
        return hash((self.start, len(self.states)))


@dataclass(frozen=True)
class MachineClass:
    deterministic: bool
    nondeterministic: bool
    blank_skipping: bool | None = None
    ideal_shape: bool | None = None
    unambiguous_claimed: bool = False


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    condition: str
    detail: str
    transition: Any = None

    def __str__(self):
        return f"[{self.condition}] {self.detail}"


def expected_write_level(i: int, d: int, k: int) -> int | None:
    """Level forced on the written symbol when reading level i and moving d.

    Implements the visit-parity conditions with the overshoot clamped at k:
    a turn that would exceed the budget freezes the cell instead.  Returns
    None for frozen reads (i == k), where the symbol must be preserved.
    """
    if i == k:
        return None
    if i % 2 == 0:
        j = i + (1 if d == 1 else 2)
    else:
        j = i + (2 if d == 1 else 1)
    return min(j, k)


def validate_limited(m: LimitedAutomaton) -> list[Violation]:
    """Check stochasticity, k-limitedness and endmarker discipline.

    Violations are data, not exceptions; an empty list means the machine is
    well-formed.  Condition ids: STOCH, LIM1, LIM2, LIM3, ENDMARK, LEVELS.
    """
    out: list[Violation] = []
    alpha = m.alphabet
    k = m.k
    # boolean-weighted machines are read nondeterministically: no sum rule
    nondet = _weights_boolean(m)
    for (q, sym), dist in sorted(m.delta.items(), key=lambda kv: repr(kv[0])):
        try:
            i = alpha.level(sym)
        except MachineError:
            out.append(Violation("LEVELS", f"read symbol {sym!r} not in the alphabet", (q, sym)))
            continue
        total = ZERO
        for (p, tau, d), w in dist:
            total += w
            tr = (q, sym, p, tau, d)
            try:
                j = alpha.level(tau)
            except MachineError:
                out.append(Violation("LEVELS", f"written symbol {tau!r} not in the alphabet", tr))
                continue
            if sym in (LEND, REND) and tau != sym:
                out.append(Violation("ENDMARK", f"endmarker {sym!r} rewritten to {tau!r}", tr))
            if tau in (LEND, REND) and sym not in (LEND, REND):
                out.append(Violation("ENDMARK", f"endmarker {tau!r} written onto a tape cell", tr))
            if sym == LEND and d == -1:
                out.append(Violation("ENDMARK", "move off the left end of the tape", tr))
            if sym == REND and d == 1:
                out.append(Violation("ENDMARK", "move off the right end of the tape", tr))
            if sym in (LEND, REND):
                continue
            if i == k:
                if tau != sym or j != k:
                    out.append(Violation(
                        "LIM1", f"frozen symbol {sym!r} rewritten to {tau!r}", tr))
                continue
            want = expected_write_level(i, d, k)
            if j != want:
                cond = "LIM2" if i % 2 == 0 else "LIM3"
                out.append(Violation(
                    cond,
                    f"level {i} read moving {d:+d} must write level {want}, wrote level {j}",
                    tr))
        if not nondet and total != ONE:
            out.append(Violation(
                "STOCH", f"weights at ({q!r},{sym!r}) sum to {total}, not 1", (q, sym)))
    return out


def validate_pda(m: PushdownAutomaton) -> list[Violation]:
    """Check PDA stochasticity, push-size and bottom-marker discipline.

    Condition ids: STOCH, PUSHSIZE, BOTTOM.
    """
    out: list[Violation] = []
    nondet = _pda_weights_boolean(m)
    for (q, sym, a), dist in sorted(m.delta.items(), key=lambda kv: repr(kv[0])):
        for (p, u), w in dist:
            tr = (q, sym, a, p, u)
            if len(u) > m.push_size:
                out.append(Violation(
                    "PUSHSIZE", f"push string {u!r} longer than push size {m.push_size}", tr))
            if m.bottom in u[:-1] or (u and u[-1] == m.bottom and a != m.bottom):
                out.append(Violation("BOTTOM", f"bottom marker pushed above the bottom in {u!r}", tr))
            if a == m.bottom and u and u[-1] != m.bottom:
                out.append(Violation("BOTTOM", f"bottom marker replaced by {u!r}", tr))
    # exact λ/σ split: δ[q,σ,a] + δ[q,λ,a] = 1 for every live (q,σ,a)
    if not nondet:
        syms = sorted(m.input_symbols | {LEND, REND}, key=repr)
        tops = sorted(m.stack_symbols, key=repr)
        live = m.states - m.halting
        for q in sorted(live, key=repr):
            for a in tops:
                lam = m.lambda_mass(q, a)
                for s in syms:
                    tot = sum((w for _t, w in m.moves(q, s, a)), ZERO) + lam
                    if tot != ONE:
                        out.append(Violation(
                            "STOCH",
                            f"δ[{q!r},{s!r},{a!r}] + δ[{q!r},λ,{a!r}] = {tot}, not 1",
                            (q, s, a)))
    return out


def _weights_boolean(m: LimitedAutomaton) -> bool:
    return all(w == ONE for dist in m.delta.values() for _t, w in dist)


def _pda_weights_boolean(m: PushdownAutomaton) -> bool:
    return all(w == ONE for dist in m.delta.values() for _t, w in dist)


# ---------------------------------------------------------------------------
# normal-form checks


def is_blank_skipping(m: LimitedAutomaton):
    """Blank-skipping test: (Γk = {|c,$,B}) and blanks are crossed inertly.

    Returns (flag, witness): on success the witness is the (Q+1, Q-1)
    partition of blank-reading states, on failure the first offending
    transition or a description of the broken condition.
    """
    top = m.alphabet.levels[-1]
    want = {LEND, REND, m.alphabet.blank}
    if top != frozenset(want):
        return False, f"level-{m.k} alphabet is {sorted(map(repr, top))}, not {sorted(map(repr, want))}"
    blank = m.alphabet.blank
    plus, minus = set(), set()
    for (q, sym), dist in sorted(m.delta.items(), key=lambda kv: repr(kv[0])):
        if sym != blank:
            continue
        if len(dist) != 1:
            return False, (q, sym, dist)
        (p, tau, d), w = dist[0]
        if p != q or tau != blank or w != ONE:
            return False, (q, sym, p, tau, d)
        (plus if d == 1 else minus).add(q)
    if plus & minus:
        return False, f"states {plus & minus} skip blanks in both directions"
    return True, (frozenset(plus), frozenset(minus))


def is_ideal_shape(m: PushdownAutomaton):
    """Ideal-shape test for a PDA: pop-controlled push/pop/stationary moves.

    (i) λ-moves only pop; (ii) non-λ moves push one, pop one or stay;
    (iii) no λ-move is enabled on a freshly pushed symbol; (iv) nor after a
    stationary move.  Returns (flag, witness).
    """
    for (q, sym, a), dist in sorted(m.delta.items(), key=lambda kv: repr(kv[0])):
        for (p, u), _w in dist:
            tr = (q, sym, a, p, u)
            if sym == LAMBDA:
                if u != ():
                    return False, tr
                continue
            if u == () or u == (a,):
                pass
            elif len(u) == 2 and u[1] == a and u[0] != m.bottom:
                pass
            else:
                return False, tr
            if p in m.halting:
                continue
            if len(u) == 2 and m.lambda_mass(p, u[0]) != ZERO:
                return False, ("λ-move enabled after push", tr)
            if u == (a,) and m.lambda_mass(p, a) != ZERO:
                return False, ("λ-move enabled after stationary move", tr)
    return True, None


def classify(m) -> MachineClass:
    """Report determinism/nondeterminism flags plus normal-form checks."""
    if isinstance(m, LimitedAutomaton):
        nondet = _weights_boolean(m)
        det = nondet and all(len(d) == 1 for d in m.delta.values())
        bs, _ = is_blank_skipping(m)
        return MachineClass(det, nondet, blank_skipping=bs)
    if isinstance(m, PushdownAutomaton):
        nondet = _pda_weights_boolean(m)
        det = nondet and all(len(d) == 1 for d in m.delta.values())
        if det:
            # a λ-choice next to an input choice is still a coin flip
            for (q, sym, a) in m.delta:
                if sym != LAMBDA and m.lambda_mass(q, a) != ZERO:
                    det = False
                    break
        ideal, _ = is_ideal_shape(m)
        return MachineClass(det, nondet, ideal_shape=ideal)
    raise TypeError(f"cannot classify {type(m).__name__}")
