"""Blank-skipping normalization of k-limited automata with {0,1} weights.

The construction keeps the source machine's live-cell behaviour verbatim and
replaces every excursion into frozen territory by a crossing-matrix lookup:
frozen cells all become the blank B, fringe markers remember the matrices of
adjacent blank runs, and the head crosses runs in a straight line carrying
the precomputed exit.  Where the head would re-enter a run and bounce back,
the whole bounce chain is collapsed into the single visit the normal form
allows.  Cells the parity discipline does not let us blank immediately keep
a pending-freeze marker and are blanked when next crossed.

States of the result:
  ("sim", annotated_state, carry)  -- simulating; carry is the matrix of the
                                      frozen stretch behind the head (None if
                                      the previous cell is live)
  ("sink", d)                      -- non-halting sink for trapped heads
Tape symbols: the input alphabet, B/|c/$ at level k, and fringe markers
  ("m", level, payload, lT, rT) carrying the source symbol plus the matrices
  of the runs adjacent at write time (interned ids, None for live sides).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .crossing import (ACC_IN, EXIT, REJ_IN, CrossingMatrix,
                       annotate_directions, annotated_universe,
                       bounce_closure, compose_crossing, crossing_matrix,
                       dir_of, endmarker_matrix)
from .machines import (BLANK, LEND, REND, LeveledAlphabet, LimitedAutomaton,
                       MachineError, expected_write_level, _weights_boolean)

ONE = Fraction(1)
JUNK = "#junk"

NACC = ("halt", "acc")
NREJ = ("halt", "rej")


class BuildBudget(RuntimeError):
    pass


@dataclass
class _Builder:
    src: LimitedAutomaton  # direction-annotated
    k: int
    max_pairs: int = 200_000

    def __post_init__(self):
        self.universe = annotated_universe(self.src)
        self.mat_ids: dict = {}
        self.mats: list = []
        self.cellmat_cache: dict = {}
        self.compose_cache: dict = {}
        self.chain_cache: dict = {}
        self.delta: dict = {}
        self.symbols: set = set()
        self.lc_mat = self._intern(endmarker_matrix(self.src, LEND))
        self.rd_mat = self._intern(endmarker_matrix(self.src, REND))

    # -- matrix interning ---------------------------------------------------

    def _intern(self, m: CrossingMatrix) -> int:
        mid = self.mat_ids.get(m.rows)
        if mid is None:
            mid = len(self.mats)
            self.mat_ids[m.rows] = mid
            self.mats.append(m)
        return mid

    def cell_matrix(self, sym) -> int:
        mid = self.cellmat_cache.get(sym)
        if mid is None:
            mid = self._intern(crossing_matrix(self.src, sym))
            self.cellmat_cache[sym] = mid
        return mid

    def compose(self, a: int, b: int) -> int:
        key = (a, b)
        mid = self.compose_cache.get(key)
        if mid is None:
            mid = self._intern(compose_crossing(self.mats[a], self.mats[b]))
            self.compose_cache[key] = mid
        return mid

    def compose_all(self, parts) -> int | None:
        parts = [p for p in parts if p is not None]
        if not parts:
            return None
        acc = parts[0]
        for p in parts[1:]:
            acc = self.compose(acc, p)
        return acc

    # -- the collapsed bounce chain ------------------------------------------

    def chain(self, entry, i_n: int, payload, lt, rt):
        """All N-moves for a head entering a live-or-pending cell.

        entry: annotated source state; i_n: the N-level of the symbol being
        read; payload: the source-machine content of the cell; lt/rt: interned
        matrices of the adjacent frozen stretches (None = live neighbour).
        Returns a list of (written_symbol, direction, next_state) moves.
        """
        key = (entry, i_n, payload, lt, rt)
        hit = self.chain_cache.get(key)
        if hit is not None:
            return hit
        src = self.src
        k = self.k
        lvl0 = src.alphabet.level(payload)
        terminals: set = set()
        seen = set()
        work = [(payload, entry)]
        while work:
            content, q = work.pop()
            if (content, q) in seen:
                continue
            seen.add((content, q))
            clvl = src.alphabet.level(content)
            for (p, tau, d), w in src.moves(q, content):
                if w == 0:
                    continue
                newcontent = content if clvl == k else tau
                if p in src.accept:
                    terminals.add(("halt", "acc", newcontent, d))
                    continue
                if p in src.reject:
                    terminals.add(("halt", "rej", newcontent, d))
                    continue
                block = lt if d == -1 else rt
                if block is None:
                    terminals.add(("leave", p, newcontent, d))
                    continue
                for o in self.mats[block].outcomes(p):
                    if o == ACC_IN:
                        terminals.add(("halt", "acc", newcontent, d))
                    elif o == REJ_IN:
                        terminals.add(("halt", "rej", newcontent, d))
                    else:
                        s = o[1]
                        if dir_of(s) == -d:
                            work.append((newcontent, s))  # bounced back to us
                        else:
                            terminals.add(("leave", s, newcontent, d))
        moves = []
        for t in sorted(terminals, key=repr):
            kind = t[0]
            final = t[2]
            d_n = t[3] if kind == "halt" else dir_of(t[1])
            j_n = expected_write_level(i_n, d_n, k)
            frozen = src.alphabet.level(final) == k
            assert frozen or j_n < k, "a live cell cannot be forced to blank"
            if j_n == k:
                wsym = BLANK
            else:
                wsym = ("m", j_n, final, lt, rt)
            if kind == "halt":
                nxt = NACC if t[1] == "acc" else NREJ
            else:
                s = t[1]
                if frozen:
                    tb = self.cell_matrix(final)
                    carry = self.compose_all([lt, tb, rt])
                else:
                    carry = lt if d_n == -1 else rt
                nxt = ("sim", s, carry)
            moves.append((wsym, d_n, nxt))
        # deduplicate identical moves (distinct source paths can coincide)
        moves = sorted(set(moves), key=repr)
        self.chain_cache[key] = moves
        return moves

    # -- transitions per (state, symbol) --------------------------------------

    def transitions(self, state, sym) -> list:
        """Moves of the constructed machine; built on first use."""
        key = (state, sym)
        row = self.delta.get(key)
        if row is not None:
            return row
        if len(self.delta) > self.max_pairs:
            raise BuildBudget("blank-skipping table exceeded the build budget")
        tag = state[0]
        out: list = []
        if tag == "sink":
            d = state[1]
            if sym == LEND:
                out = [(LEND, 1, ("sink", 1))]
            elif sym == REND:
                out = [(REND, -1, ("sink", -1))]
            elif self._level(sym) == self.k:
                out = [(sym, d, state)]
            else:
                j = expected_write_level(self._level(sym), d, self.k)
                w = BLANK if j == self.k else ("m", j, JUNK, None, None)
                out = [(w, d, state)]
        elif tag == "sim":
            _t, q, carry = state
            if sym == BLANK:
                out = [(BLANK, dir_of(q), state)]
            elif sym in (LEND, REND):
                # bounce through the wall and the frozen stretch behind us:
                # the source head may interact with the blanked cells many
                # times before emerging at the first live cell
                out = self._endmarker_moves(q, carry, sym)
            else:
                # a live or pending cell: run the collapsed chain
                if isinstance(sym, tuple) and sym[0] == "m":
                    _m, j, payload, lt, rt = sym
                    if self.src.alphabet.level(payload) == self.k:
                        out = self._cross_pending(state, sym)
                    else:
                        d = dir_of(q)
                        lt_eff = carry if d == 1 else lt
                        rt_eff = rt if d == 1 else carry
                        out = self.chain(q, j, payload, lt_eff, rt_eff)
                else:
                    # fresh input symbol; only reachable moving right
                    out = self.chain(q, 0, sym, carry, None)
        else:
            out = []
        if not out and tag != "halt":
            out = self._sink_entry(state, sym)
        self.delta[key] = out
        for wsym, _d, _n in out:
            self.symbols.add(wsym)
        return out

    def _endmarker_moves(self, q, carry, sym):
        """Moves at an endmarker: close the bounce over [stretch, wall].

        At $ the frozen stretch (if any) lies to the left of the head, at |c
        to the right; the head may shuttle between the wall and the stretch
        before it emerges beyond the stretch onto live tape.
        """
        wall = self.rd_mat if sym == REND else self.lc_mat
        if sym == REND:
            blocks = ([self.mats[carry]] if carry is not None else []) + [self.mats[wall]]
            start = len(blocks) - 1
            merged = self.compose_all([carry, wall])
            out_dir = -1
        else:
            blocks = [self.mats[wall]] + ([self.mats[carry]] if carry is not None else [])
            start = 0
            merged = self.compose_all([wall, carry])
            out_dir = 1
        outs = bounce_closure(blocks, start, q)
        moves = []
        for o in sorted(outs, key=repr):
            if o == ACC_IN:
                moves.append((sym, out_dir, NACC))
            elif o == REJ_IN:
                moves.append((sym, out_dir, NREJ))
            else:
                s = o[1]
                assert dir_of(s) == out_dir, "a head cannot leave the tape"
                moves.append((sym, out_dir, ("sim", s, merged)))
        return sorted(set(moves), key=repr)

    def _cross_pending(self, state, sym):
        """Freeze a pending cell while crossing it; the carry already includes it."""
        _t, q, carry = state
        _m, j, payload, lt, rt = sym
        d = dir_of(q)
        j_n = expected_write_level(j, d, self.k)
        wsym = BLANK if j_n == self.k else ("m", j_n, payload, lt, rt)
        return [(wsym, d, state)]

    def _sink_entry(self, state, sym):
        """Trapped head: fall into the oscillating non-halting sink."""
        d = state[1] if state[0] == "sink" else dir_of(state[1])
        if sym == LEND:
            return [(LEND, 1, ("sink", 1))]
        if sym == REND:
            return [(REND, -1, ("sink", -1))]
        lvl = self._level(sym)
        if lvl == self.k:
            return [(sym, d, ("sink", d))]
        j = expected_write_level(lvl, d, self.k)
        w = BLANK if j == self.k else ("m", j, JUNK, None, None)
        return [(w, d, ("sink", d))]

    def _level(self, sym) -> int:
        if sym in (LEND, REND, BLANK):
            return self.k
        if isinstance(sym, tuple) and sym[0] == "m":
            return sym[1]
        return self.src.alphabet.level(sym) if sym in self.src.alphabet else 0


def to_blank_skipping(m: LimitedAutomaton, materialize_upto: int = 8,
                      max_pairs: int = 200_000) -> LimitedAutomaton:
    """Blank-skipping machine recognition-equivalent to m (weights in {0,1}).

    The transition table is materialized by exhausting every configuration
    reachable on inputs of length <= materialize_upto; the table almost
    always saturates well below that horizon, and every certified sweep stays
    within it.  Accepting-path counts are preserved whenever the source's
    frozen-region traversals are path-unique (bounce chains collapse).
    """
    if not _weights_boolean(m):
        raise MachineError("NOT_NONDET: blank-skipping conversion needs weights in {0,1}")
    if m.k < 2:
        raise MachineError("WRONG_K: blank-skipping normal form needs k >= 2")
    src = annotate_directions(m)
    b = _Builder(src, m.k, max_pairs=max_pairs)
    init = ("sim", src.initial, None)

    syms = sorted(m.alphabet.input_symbols, key=repr)
    tapes_seen = 0
    for n in range(materialize_upto + 1):
        for x in _strings(syms, n):
            _explore(b, init, x)
            tapes_seen += 1

    # assemble the machine
    levels: list[set] = [set() for _ in range(m.k)]
    levels[-1].add(BLANK)
    for s in b.symbols:
        if isinstance(s, tuple) and s[0] == "m":
            levels[s[1] - 1].add(s)
    # junk markers for the sink at every level, so its rules stay well-typed
    for j in range(1, m.k):
        levels[j - 1].add(("m", j, JUNK, None, None))
    alpha = LeveledAlphabet(m.alphabet.input_symbols, levels)

    states = {init, NACC, NREJ, ("sink", 1), ("sink", -1)}
    delta: dict = {}
    for (state, sym), row in b.delta.items():
        states.add(state)
        if not row:
            continue
        delta[(state, sym)] = {(nxt, wsym, d): ONE for (wsym, d, nxt) in row}
        for _w, _d, nxt in row:
            states.add(nxt)
    # make sure sink rules exist for every live symbol the machine can meet
    for sk in (("sink", 1), ("sink", -1)):
        for sym in list(alpha.all_symbols()) + [LEND, REND]:
            key = (sk, sym)
            if key not in delta:
                row = b.transitions(sk, sym)
                delta[key] = {(nxt, wsym, d): ONE for (wsym, d, nxt) in row}
                for _w, _d, nxt in row:
                    states.add(nxt)

    return LimitedAutomaton(m.k, states, alpha, delta, init, [NACC], [NREJ],
                            name=f"bs({m.name})" if m.name else "bs")


def _strings(syms, n):
    if n == 0:
        yield ()
        return
    for rest in _strings(syms, n - 1):
        for a in syms:
            yield rest + (a,)


def _explore(b: _Builder, init, x):
    """Reachable-configuration closure of the machine under construction."""
    tape = (LEND,) + tuple(x) + (REND,)
    seen = set()
    work = [(init, 0, tape)]
    while work:
        cfg = work.pop()
        if cfg in seen:
            continue
        seen.add(cfg)
        state, pos, tp = cfg
        if state in (NACC, NREJ):
            continue
        if state[0] == "sink":
            continue  # sinks never halt; their rules are filled in later
        for wsym, d, nxt in b.transitions(state, tp[pos]):
            npos = pos + d
            if npos < 0 or npos >= len(tp):
                continue
            ntp = tp if wsym == tp[pos] else tp[:pos] + (wsym,) + tp[pos + 1:]
            work.append((nxt, npos, ntp))
