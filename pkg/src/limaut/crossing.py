"""Crossing matrices: how a head that enters a frozen region leaves it.

Rows and columns are direction-annotated states (the annotation records the
last head move, so the row's direction says which side the region is entered
from).  Besides the boolean exit relation the matrices track halting inside
the region, which the blank-skipping construction needs to stay faithful.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .machines import (LAMBDA, LEND, REND, LimitedAutomaton, MachineError)

ONE = Fraction(1)

# outcome tags
EXIT = "exit"  # ("exit", annotated_state): leaves the region moving dir(state)
ACC_IN = ("acc",)  # halts accepting inside the region
REJ_IN = ("rej",)  # halts rejecting inside the region


def dir_of(annotated_state) -> int:
    return annotated_state[1]


@dataclass(frozen=True)
class CrossingMatrix:
    """Traversal relation of one frozen region.

    `rows` maps each annotated state to the frozenset of outcomes of a head
    entering the region in that state (entry side implied by the state's
    direction: +1 enters at the left edge moving right).  An empty outcome
    set means the head never leaves (trapped).
    """

    universe: tuple  # sorted tuple of annotated states
    rows: tuple  # tuple of (state, frozenset of outcomes), sorted

    def __init__(self, universe, rows):
        universe = tuple(sorted(universe, key=repr))
        if isinstance(rows, dict):
            rows = tuple(sorted(((s, frozenset(o)) for s, o in rows.items()),
                                key=lambda so: repr(so[0])))
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "rows", rows)

    @property
    def dimension(self) -> int:
        return len(self.universe)

    def outcomes(self, state) -> frozenset:
        for s, o in self.rows:
            if s == state:
                return o
        return frozenset()

    def as_dict(self) -> dict:
        return {s: o for s, o in self.rows}

    @property
    def bits(self):
        """The spec's ℓ×ℓ boolean exit relation, halting columns dropped."""
        idx = {s: i for i, s in enumerate(self.universe)}
        mat = [[False] * self.dimension for _ in range(self.dimension)]
        for s, outs in self.rows:
            for o in outs:
                if o[0] == EXIT:
                    mat[idx[s]][idx[o[1]]] = True
        return tuple(tuple(r) for r in mat)

    def __hash__(self):
        return hash((self.universe, self.rows))


# ---------------------------------------------------------------------------
# direction annotation


def annotate_directions(m: LimitedAutomaton) -> LimitedAutomaton:
    """Lift a limited automaton so each state remembers the last direction.

    States become (q, d) pairs; transitions carry the new direction into the
    target state.  Computation paths are in bijection with the source's, so
    language and per-input probabilities are untouched.
    """
    states = [(q, d) for q in sorted(m.states, key=repr) for d in (1, -1)]
    delta: dict = {}
    for (q, sym), dist in m.delta.items():
        for d in (1, -1):
            row = {}
            for (p, tau, dr), w in dist:
                row[((p, dr), tau, dr)] = w
            delta[((q, d), sym)] = row
    return LimitedAutomaton(
        m.k, states, m.alphabet, delta, (m.initial, 1),
        [(q, d) for q in m.accept for d in (1, -1)],
        [(q, d) for q in m.reject for d in (1, -1)],
        name=f"{m.name}+dir" if m.name else "dirannotated")


def annotated_universe(m: LimitedAutomaton) -> tuple:
    """The (state, direction) index set of an annotated machine."""
    return tuple(sorted(m.states, key=repr))


# ---------------------------------------------------------------------------
# building and composing matrices


def crossing_matrix(m: LimitedAutomaton, f) -> CrossingMatrix:
    """Matrix of the single-cell region holding frozen symbol f.

    A head entering the cell applies one move of the annotated machine; the
    entry side is irrelevant because the region is one cell wide.
    """
    try:
        lvl = m.alphabet.level(f)
    except MachineError:
        raise MachineError(f"NOT_FROZEN: {f!r} is not a tape symbol")
    if lvl != m.k or f in (LEND, REND):
        raise MachineError(f"NOT_FROZEN: {f!r} is not a frozen working symbol")
    universe = annotated_universe(m)
    rows = {}
    for s in universe:
        outs = set()
        if s in m.halting:
            rows[s] = frozenset()
            continue
        for (p, tau, dr), w in m.moves(s, f):
            if w == 0:
                continue
            if p in m.accept:
                outs.add(ACC_IN)
            elif p in m.reject:
                outs.add(REJ_IN)
            else:
                outs.add((EXIT, p))
        rows[s] = frozenset(outs)
    return CrossingMatrix(universe, rows)


def endmarker_matrix(m: LimitedAutomaton, which) -> CrossingMatrix:
    """Single-cell matrix for |c or $ so closures can fold in the bounce."""
    universe = annotated_universe(m)
    rows = {}
    for s in universe:
        outs = set()
        if s not in m.halting:
            for (p, tau, dr), w in m.moves(s, which):
                if w == 0:
                    continue
                if p in m.accept:
                    outs.add(ACC_IN)
                elif p in m.reject:
                    outs.add(REJ_IN)
                else:
                    outs.add((EXIT, p))
        rows[s] = frozenset(outs)
    return CrossingMatrix(universe, rows)


def bounce_closure(blocks: list[CrossingMatrix], start_block: int, state):
    """Outcome set of a head dropped into `blocks[start_block]` in `state`.

    Blocks sit side by side left to right; an exit moving right from block i
    enters block i+1, and an exit moving right from the last block leaves the
    whole region.  Cycles mean trapped mass and add no outcomes.
    """
    n = len(blocks)
    seen = set()
    finals: set = set()
    work = [(start_block, state)]
    while work:
        i, s = work.pop()
        if (i, s) in seen:
            continue
        seen.add((i, s))
        for o in blocks[i].outcomes(s):
            if o == ACC_IN or o == REJ_IN:
                finals.add(o)
                continue
            _tag, t = o
            d = dir_of(t)
            j = i + (1 if d == 1 else -1)
            if 0 <= j < n:
                work.append((j, t))
            else:
                finals.add((EXIT, t))
    return frozenset(finals)


def compose_crossing(tu: CrossingMatrix, tv: CrossingMatrix) -> CrossingMatrix:
    """Matrix of the concatenated region uv via bounce reachability."""
    if tu.universe != tv.universe:
        raise MachineError("DIM_MISMATCH: matrices over different state sets")
    rows = {}
    for s in tu.universe:
        if dir_of(s) == 1:
            rows[s] = bounce_closure([tu, tv], 0, s)
        else:
            rows[s] = bounce_closure([tu, tv], 1, s)
    return CrossingMatrix(tu.universe, rows)


def identity_matrix(universe) -> CrossingMatrix:
    """Empty-region matrix: the head immediately reappears on the far side."""
    rows = {s: frozenset({(EXIT, s)}) for s in universe}
    return CrossingMatrix(universe, rows)


def d_delta(tu: CrossingMatrix, q, d: int, tv: CrossingMatrix) -> frozenset:
    """Exit pairs of a head at the u|v boundary travelling in direction d.

    With d = +1 the head proceeds into the v-region (entering at its left
    edge), with d = -1 into the u-region; it then bounces inside the combined
    uv-region until it leaves.  Returns the set of (state, direction) pairs,
    empty when the head is trapped; halting-inside outcomes are dropped here
    (the full outcome set is available through bounce_closure).
    """
    if tu.universe != tv.universe:
        raise MachineError("DIM_MISMATCH: matrices over different state sets")
    state = (q, d)
    if state not in tu.universe:
        raise MachineError(f"({q!r},{d:+d}) is not an annotated state of the matrices")
    outs = bounce_closure([tu, tv], 1 if d == 1 else 0, state)
    return frozenset(o[1] for o in outs if o[0] == EXIT)


# ---------------------------------------------------------------------------
# brute-force region oracle (used by the test suite)


def region_outcomes_bruteforce(m: LimitedAutomaton, w, state) -> frozenset:
    """Simulate a head entering the explicit frozen string w in `state`.

    Entry side comes from the state's direction.  The walk is over the finite
    set (cell, state); everything reachable is explored so nondeterministic
    traversals yield their full outcome set.
    """
    w = tuple(w)
    for f in w:
        if m.alphabet.level(f) != m.k:
            raise MachineError(f"region symbol {f!r} is not frozen")
    n = len(w)
    start = 0 if dir_of(state) == 1 else n - 1
    finals: set = set()
    seen = set()
    work = [(start, state)]
    while work:
        pos, s = work.pop()
        if (pos, s) in seen or s in m.halting:
            continue
        seen.add((pos, s))
        for (p, tau, dr), wt in m.moves(s, w[pos]):
            if wt == 0:
                continue
            if p in m.accept:
                finals.add(ACC_IN)
                continue
            if p in m.reject:
                finals.add(REJ_IN)
                continue
            npos = pos + dr
            if 0 <= npos < n:
                work.append((npos, p))
            else:
                finals.add((EXIT, p))
    return frozenset(finals)
