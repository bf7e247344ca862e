"""First-traverse decomposition: transducer, residual machine, membership.

The transducer emits one cell state per tape cell of the source machine's
first left-to-right traverse, guessing the return data at left turns.  The
residual machine reads the reversed trace and replays the source from its
second traverse on, cancelling traces whose guesses turn out wrong by
entering accepting and rejecting states with equal probability, so that
every invalid trace contributes exactly 1/2 to the averaged acceptance.

Supported source shapes: every tape cell's first visit either passes through
rightwards or makes a depth-one left turn (one step left, immediately back),
and after the first traverse the machine runs full sweeps between the
endmarkers, halting at an endmarker.  The sweep-shaped zoo machines and the
depth-one wander machine live in this class; traces of other machines are
cancelled rather than misjudged.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .machines import (LAMBDA, LEND, REND, LeveledAlphabet, LimitedAutomaton,
                       MachineError, _weights_boolean, expected_write_level)
from .semantics import acceptance_probability, build_config_graph
from .transducers import OutputMultiset, RtTransducer

ONE = Fraction(1)
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class CellState:
    """One cell's first-visit record: (d, q, σ|τ, p, e | h)."""

    enter_dir: str  # 'L', 'R' or 'N' (start cell)
    enter_state: object
    read: object
    written: object
    exit_state: object
    exit_dir: str  # 'L' or 'R'
    extra: object = None  # (t, r, a) return guess, only for (L,L) turns

    def __post_init__(self):
        if self.extra is not None and (self.enter_dir, self.exit_dir) != ("L", "L"):
            raise MachineError("return data only accompanies left turns")

    def key(self):
        return ("cs", self.enter_dir, self.enter_state, self.read,
                self.written, self.exit_state, self.exit_dir, self.extra)

    def __str__(self):
        h = "λ" if self.extra is None else ",".join(map(str, self.extra))
        return (f"({self.enter_dir},{self.enter_state},{self.read}|"
                f"{self.written},{self.exit_state},{self.exit_dir}|{h})")


def _cs(*args):
    return CellState(*args).key()


def first_traverse_transducer(m: LimitedAutomaton) -> RtTransducer:
    """Real-time transducer emitting the cell states of m's first traverse.

    Requires boolean weights.  At a first-visit left turn the transducer
    guesses the triple (t, r, a) with (r, a, +1) a move of δ(t, written) and
    resumes the traverse in r; the residual machine later verifies the guess.
    Output strings have length |x| + 2, one cell state per cell.
    """
    if not _weights_boolean(m):
        raise MachineError("NOT_SUPPORTED: the decomposition needs weights in {0,1}")
    k = m.k
    alpha = m.alphabet
    outputs: set = set()
    delta: dict = {}
    states: set = {"g0", "GACC"}

    def add(q, sym, p, emit):
        outputs.add(emit)
        delta.setdefault((q, sym), []).append((p, emit))

    # return guesses available per written symbol
    guesses: dict = {}
    for (t, sym), dist in m.delta.items():
        for (r, a, d), w in dist:
            if w != 0 and d == 1:
                guesses.setdefault(sym, []).append((t, r, a))
    for v in guesses.values():
        v.sort(key=repr)

    # the |c cell: M's first move is forced rightwards
    for (p, tau, d), w in m.moves(m.initial, LEND):
        if w == 0 or d != 1:
            continue
        if p in m.halting:
            continue  # halting on |c means no traverse at all; trace invalid
        add("g0", LEND, ("g", p), _cs("N", m.initial, LEND, LEND, p, "R", None))

    seen = {p for (_q, _s), opts in delta.items() for (p, _e) in opts
            if isinstance(p, tuple)}
    work = sorted(seen, key=repr)
    syms = sorted(alpha.input_symbols, key=repr)
    while work:
        st = work.pop()
        _g, q = st

        def enqueue(p):
            nst = ("g", p)
            if nst not in seen:
                seen.add(nst)
                work.append(nst)
            return nst

        for sym in syms:
            for (p, tau, d), w in m.moves(q, sym):
                if w == 0:
                    continue
                if p in m.halting:
                    continue  # the shape assumption defers halting to $
                if d == 1:
                    add(st, sym, enqueue(p), _cs("L", q, sym, tau, p, "R", None))
                else:
                    for (t, r, a) in guesses.get(tau, ()):
                        add(st, sym, enqueue(r), _cs("L", q, sym, tau, p, "L", (t, r, a)))
        for (p, tau, d), w in m.moves(q, REND):
            if w == 0:
                continue
            if p in m.halting:
                add(st, REND, "GACC", _cs("L", q, REND, REND, p, "R", None))
            else:
                add(st, REND, "GACC", _cs("L", q, REND, REND, p, "L", None))

    states |= seen
    return RtTransducer(states, alpha.input_symbols, outputs, delta, "g0", "GACC")


# ---------------------------------------------------------------------------
# the residual machine


JUNK1 = ("tjunk", 1)
JUNK2 = ("tjunk", 2)


def residual_machine(m: LimitedAutomaton) -> LimitedAutomaton:
    """k-limited machine replaying m (a (k+1)-limited machine) on reversed traces.

    The tape holds the reversed first-traverse trace; sweep j of the result
    simulates sweep j+1 of the source on the mirrored geometry, verifying the
    guessed left-turn data on the way.  Wrong guesses and off-shape traces
    cancel: the machine enters accepting and rejecting states with equal
    probability, contributing exactly 1/2 to the trace average.
    """
    if not _weights_boolean(m):
        raise MachineError("NOT_SUPPORTED: the decomposition needs weights in {0,1}")
    if m.k < 2:
        raise MachineError("NOT_SUPPORTED: the source must have k >= 2")
    kn = m.k - 1

    tr = first_traverse_transducer(m)
    raw = sorted(tr.output_symbols, key=repr)
    contents = sorted(set(m.alphabet.all_symbols()) | {LEND, REND}, key=repr)
    track1 = [("t", 1, w, c) for w in raw for c in contents] + [JUNK1]
    if kn >= 2:
        track_top = [("t", kn, w, c) for w in raw for c in contents] + [JUNK2]
    else:
        track_top = [JUNK2]

    levels: list[list] = []
    levels.append(track1)
    for j in range(2, kn):
        levels.append([("t", j, w, c) for w in raw for c in contents] + [("tjunk", j)])
    if kn >= 2:
        levels.append(track_top + [])
    alpha = LeveledAlphabet(raw, levels)

    # collect the pending wander checks the transducer can emit
    pendings = {None}
    for w in raw:
        extra = w[7]
        if extra is not None:
            pendings.add((w[5], extra))  # (state after the turn, (t, r, a))

    NACC, NREJ = ("res", "acc"), ("res", "rej")
    states: set = {("boot",), NACC, NREJ}
    mstates = sorted(m.states, key=repr)
    for s in mstates:
        if s in m.halting:
            continue
        for pend in pendings:
            states.add(("r", s, pend))

    delta: dict = {}

    def _legal_write(sym, lvl):
        if lvl is None or lvl == kn:
            return sym  # frozen cells are preserved
        j = expected_write_level(lvl, -1, kn)
        if j == 1:
            return JUNK1
        return JUNK2 if j == kn else ("tjunk", j)

    def cancel_move(sym, lvl):
        wsym = _legal_write(sym, lvl)
        return {(NACC, wsym, -1): HALF, (NREJ, wsym, -1): HALF}

    def halting_move(p, sym, lvl):
        wsym = _legal_write(sym, lvl)
        return {((NACC if p in m.accept else NREJ), wsym, -1): ONE}

    # boot: step off |c, then absorb the $-cell state
    delta[(("boot",), LEND)] = {(("boot",), LEND, 1): ONE}
    for w in raw:
        _t, dd, q, rd, wr, p, e, h = w
        key = (("boot",), w)
        if rd != REND:
            delta[key] = cancel_move(w, 0)
        elif e == "R":
            # the source halted on its first visit to $
            delta[key] = halting_move(p, w, 0)
        else:
            delta[key] = {((("r", p, None)), ("t", 1, w, REND), 1): ONE}
    # also boot over tracks (impossible inputs): cancel
    # -- filled by the catch-all below

    def mirror(d):
        return -d

    def track_write(j, w, c):
        if j == 1:
            return ("t", 1, w, c)
        return ("t", kn, w, c) if j >= kn else ("t", j, w, c)

    def sim_move(state_pend, sym, lvl):
        """One visit of the simulated source head, mirrored onto our tape."""
        _r, s, pend = state_pend
        if not (isinstance(sym, tuple) and sym[0] in ("cs", "t")):
            return cancel_move(sym, lvl)
        w = sym if lvl == 0 else sym[2]
        if not (isinstance(w, tuple) and w[0] == "cs"):
            return cancel_move(sym, lvl)
        _t, dd, q, rd, wr, p, e, h = w
        # current source-cell content per the trace and earlier sweeps
        if lvl == 0:
            if rd == LEND:
                content = LEND
            elif rd == REND:
                content = REND
            elif e == "L" and h is not None:
                content = h[2]  # the guessed return wrote a
            else:
                content = wr
        else:
            content = sym[3]
        # a pending wander check fires before the sweep visit
        if pend is not None:
            pstate, (t, r, a) = pend
            moves = [mv for mv, wt in m.moves(pstate, content) if wt != 0]
            moves = [mv for mv in moves if mv[2] == 1]
            if len(moves) != 1 or moves[0][0] != t:
                return cancel_move(sym, lvl)
            content = moves[0][1]
        # now the sweep visit proper
        out: dict = {}
        j = None
        for (p2, c2, d2), wt in m.moves(s, content):
            if wt == 0:
                continue
            nd = mirror(d2)
            jlvl = expected_write_level(lvl, nd, kn)
            if content in (LEND, REND):
                c2v = content
            else:
                c2v = c2
            wsym = track_write(jlvl, w, c2v) if jlvl is not None else sym
            if p2 in m.halting:
                tgt = NACC if p2 in m.accept else NREJ
                out[(tgt, wsym, nd)] = ONE
                continue
            # does the next cell carry a pending wander check?
            npend = None
            if lvl == 0 and e == "L" and h is not None and nd == 1:
                # moving on (mirrored) to the cell left of the turn
                npend = (p, h)
            out[(("r", p2, npend), wsym, nd)] = ONE
        if not out:
            return cancel_move(sym, lvl)
        return out

    all_syms = [s for s in alpha.all_symbols()] + [LEND, REND]
    for st in sorted(states, key=repr):
        if st in (NACC, NREJ) or st[0] == "boot":
            continue
        for sym in all_syms:
            if sym in (LEND, REND):
                continue
            lvl = alpha.level(sym)
            delta[(st, sym)] = sim_move(st, sym, lvl)
        # our |c and $ mirror the source's $ and |c bounce respectively
        _r, s, pend = st
        for sym, srcmark in ((LEND, REND), (REND, LEND)):
            out: dict = {}
            if pend is not None:
                delta[(st, sym)] = {(NACC, sym, 1 if sym == LEND else -1): HALF,
                                    (NREJ, sym, 1 if sym == LEND else -1): HALF}
                continue
            for (p2, c2, d2), wt in m.moves(s, srcmark):
                if wt == 0:
                    continue
                nd = mirror(d2)
                if p2 in m.halting:
                    tgt = NACC if p2 in m.accept else NREJ
                    out[(tgt, sym, nd)] = ONE
                elif (sym == LEND and nd == 1) or (sym == REND and nd == -1):
                    out[(("r", p2, None), sym, nd)] = ONE
                # a move off our tape is an off-shape trace; drop to cancel
            if not out:
                out = {(NACC, sym, 1 if sym == LEND else -1): HALF,
                       (NREJ, sym, 1 if sym == LEND else -1): HALF}
            delta[(st, sym)] = out

    delta = {k2: v for k2, v in delta.items() if v}
    return LimitedAutomaton(kn, states, alpha, delta, ("boot",), [NACC], [NREJ],
                            name=f"res({m.name})" if m.name else "res")


# ---------------------------------------------------------------------------
# membership


def lfm_membership(outputs: OutputMultiset, m, threshold) -> bool:
    """Averaged membership: Σ mult(y)·p_acc(m, y) > threshold · Σ mult."""
    threshold = Fraction(threshold)
    if not (0 < threshold < 1):
        raise MachineError("threshold must lie in (0,1)")
    total = outputs.total_multiplicity
    if total == 0:
        raise MachineError("EMPTY_OUTPUT: the transducer computed no value")
    acc = Fraction(0)
    for y, mult in sorted(outputs.items(), key=repr):
        rep = acceptance_probability(build_config_graph(m, y))
        acc += mult * rep.p_acc
    return acc > threshold * total


def decompose_pipeline(m: LimitedAutomaton, x, threshold=HALF) -> bool:
    """x ∈ L(m) decided through the transducer/residual pipeline."""
    tr = first_traverse_transducer(m)
    res = residual_machine(m)
    from .transducers import evaluate_transducer
    outs = evaluate_transducer(tr, x)
    reversed_outs = OutputMultiset()
    for y, mult in outs.items():
        reversed_outs[tuple(reversed(y))] += mult
    return lfm_membership(reversed_outs, res, threshold)
