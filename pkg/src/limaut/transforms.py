"""Machine-to-machine transformations.

The two §3.3-style conversions keep the stack/tape correspondence: a
blank-skipping 2-limited automaton stores the stack as its live level-1
cells (topmost in the inner state), and a pushdown automaton replays the
leftward freeze-walks as pop chains.  The probabilistic closure transforms
(amplification, union, bounded OR/AND, regular products) are straight
state-surgery with exact rational weights.
"""

from __future__ import annotations

from fractions import Fraction

from .blankskip import to_blank_skipping  # noqa: F401  (re-exported surface)
from .crossing import annotate_directions  # noqa: F401
from .machines import (BLANK, LAMBDA, LEND, REND, Dfa, LeveledAlphabet,
                       LimitedAutomaton, MachineError, PushdownAutomaton,
                       is_blank_skipping, is_ideal_shape)

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)

B1 = ("b1",)  # the level-1 blank written by stationary moves


def _img(a):
    return ("s", a)


# ---------------------------------------------------------------------------
# blank-skipping 2-lpa -> 1ppda  (2n states)


def lpa2_to_1ppda(m: LimitedAutomaton) -> PushdownAutomaton:
    """Convert a blank-skipping 2-lpa into an error-equivalent 1ppda.

    States come in two flavours per source state: q+ consumes input at the
    frontier, q- replays a leftward freeze-walk as a chain of λ-pops.  The
    stack mirrors the live level-1 cells right to left, topmost held by the
    inner state on the tape side, so the machine has exactly 2n states.
    """
    bs, _wit = is_blank_skipping(m)
    if not bs:
        raise MachineError("NOT_BLANK_SKIPPING: the conversion needs the normal form")
    if m.k != 2:
        raise MachineError("WRONG_K: the conversion is defined for k = 2")
    blank = m.alphabet.blank
    markers = sorted(m.alphabet.levels[0], key=repr)
    BOT = ("bot",)
    stack = [("w", t) for t in markers] + [BOT]
    wrap = {t: ("w", t) for t in markers}

    states = [(q, sgn) for q in sorted(m.states, key=repr) for sgn in ("+", "-")]
    accept = [(q, sgn) for q in m.accept for sgn in ("+", "-")]
    reject = [(q, sgn) for q in m.reject for sgn in ("+", "-")]
    halting = m.accept | m.reject
    delta: dict = {}

    def put(key, target, w):
        row = delta.setdefault(key, {})
        row[target] = row.get(target, ZERO) + w

    def sign_of(d):
        return "+" if d == 1 else "-"

    for (q, sym), dist in m.delta.items():
        if sym == blank:
            continue  # blank skipping is free travel: zero stack steps
        lvl = None
        if sym not in (LEND, REND):
            lvl = m.alphabet.level(sym)
        for (p, tau, d), w in dist:
            if w == 0:
                continue
            tgt = (p, sign_of(d))
            if sym == LEND:
                # initial consumption in +, mid-run bounce as a λ-move in -
                for a in stack:
                    put(((q, "+"), LEND, a), (tgt, (a,)), w)
                put(((q, "-"), LAMBDA, BOT), (tgt, (BOT,)), w)
            elif sym == REND:
                for a in stack:
                    put(((q, "+"), REND, a), (tgt, (a,)), w)
            elif lvl == 0:
                if d == 1:
                    # fresh symbol rewritten rightwards: push its image
                    for a in stack:
                        put(((q, "+"), sym, a), (tgt, (wrap[tau], a)), w)
                else:
                    # fresh symbol blanked with a turn: stack untouched
                    for a in stack:
                        put(((q, "+"), sym, a), (tgt, (a,)), w)
            elif lvl == 1:
                # freeze-walk step: pop the image of the erased cell
                put(((q, "-"), LAMBDA, wrap[sym]), (tgt, ()), w)
            # level-2 symbols other than the blank cannot occur (bs shape)

    return PushdownAutomaton(states, m.alphabet.input_symbols, stack, 2,
                             delta, (m.initial, "+"), BOT, accept, reject,
                             name=f"pda({m.name})" if m.name else "pda")


# ---------------------------------------------------------------------------
# ideal-shape 1ppda -> blank-skipping 2-lpa  (n·l + n states)


def ppda_to_lpa2(m: PushdownAutomaton) -> LimitedAutomaton:
    """Convert an ideal-shape 1ppda into a blank-skipping 2-lpa.

    Pair states [q,a] keep the stack top in the inner state while the tape's
    live level-1 cells hold the rest of the stack; bare states replay pop
    chains walking left.  The state set is the full (Q×Γ) ∪ Q, which makes
    exactly n·l + n states.
    """
    ideal, wit = is_ideal_shape(m)
    if not ideal:
        raise MachineError(f"NOT_IDEAL_SHAPE: {wit!r}")
    for (q, sym, a), dist in m.delta.items():
        for (p, u), w in dist:
            if w != 0 and a == m.bottom and u == ():
                raise MachineError(
                    "NOT_SUPPORTED: popping the bottom marker leaves the "
                    "simulation without a stack to mirror")

    tops = sorted(m.stack_symbols, key=repr)
    pair = {(q, a): ("P", q, a) for q in m.states for a in tops}
    bare = {q: ("Q", q) for q in m.states}
    states = list(pair.values()) + list(bare.values())
    accept = [pair[(q, a)] for q in m.accept for a in tops] + [bare[q] for q in m.accept]
    reject = [pair[(q, a)] for q in m.reject for a in tops] + [bare[q] for q in m.reject]

    images = [_img(a) for a in tops]
    alpha = LeveledAlphabet(m.input_symbols, [images + [B1], [BLANK]])
    delta: dict = {}

    def put(key, target, w):
        row = delta.setdefault(key, {})
        row[target] = row.get(target, ZERO) + w

    def nu(q, a) -> Fraction:
        return ONE - m.lambda_mass(q, a)

    live = m.states - m.halting
    syms = sorted(m.input_symbols, key=repr)
    for q in live:
        for a in tops:
            n_mass = nu(q, a)
            # frontier moves, conditioned on the λ-option being declined
            for sym in syms + [LEND, REND]:
                for (p, u), w in m.moves(q, sym, a):
                    if w == 0:
                        continue
                    share = w / n_mass if n_mass != 0 else ZERO
                    if share == 0:
                        continue
                    key = (pair[(q, a)], sym)
                    if sym == LEND:
                        if a != m.bottom:
                            continue  # only the initial configuration sits on |c
                        if p in m.halting:
                            put(key, (bare[p], LEND, 1), share)
                        elif u == (a,):
                            put(key, (pair[(p, a)], LEND, 1), share)
                        elif len(u) == 2:
                            put(key, (pair[(p, u[0])], LEND, 1), share)
                        # pop at |c would empty the stack: dead branch
                    elif sym == REND:
                        if p in m.halting or u == ():
                            put(key, (bare[p], REND, -1), share)
                        # push/stationary at $ with a live target wedges the
                        # source off-tape; the mass stays as an oscillation
                    else:
                        if p in m.halting:
                            # halt while consuming: record and stop
                            if u == (a,):
                                put(key, (pair[(p, a)], B1, 1), share)
                            elif len(u) == 2:
                                put(key, (pair[(p, u[0])], _img(a), 1), share)
                            else:
                                put(key, (bare[p], BLANK, -1), share)
                        elif u == (a,):
                            put(key, (pair[(p, a)], B1, 1), share)
                        elif len(u) == 2:
                            put(key, (pair[(p, u[0])], _img(a), 1), share)
                        else:
                            put(key, (bare[p], BLANK, -1), share)
        # pop chains: bare q walking left over images
        for a in tops:
            key = (bare[q], _img(a))
            for (p, u), w in m.moves(q, LAMBDA, a):
                if w == 0:
                    continue
                put(key, (bare[p], BLANK, -1), w)
            n_mass = nu(q, a)
            if n_mass != 0:
                # chain end: absorb the image as the new top and turn back
                put(key, (pair[(q, a)], BLANK, 1), n_mass)
        # pop walks cross stationary blanks by freezing them in place
        put((bare[q], B1), (bare[q], BLANK, -1), ONE)
        # the bottom marker's image is implicit in the |c cell
        n_mass = nu(q, m.bottom)
        if n_mass != 0:
            put((bare[q], LEND), (pair[(q, m.bottom)], LEND, 1), n_mass)

    # blank skipping and oscillation fills for wedged mass
    all_syms = alpha.all_symbols()
    for q in m.states:
        if q in m.halting:
            continue
        for a in tops:
            st = pair[(q, a)]
            put((st, BLANK), (st, BLANK, 1), ONE)
            for sym in all_syms + [LEND, REND]:
                if sym == BLANK:
                    continue
                row = delta.get((st, sym), {})
                mass = sum(row.values(), ZERO)
                if mass < ONE:
                    lvl = 2 if sym in (LEND, REND) else alpha.level(sym)
                    if sym == LEND:
                        fill = (st, LEND, 1)
                    elif sym == REND:
                        fill = (st, REND, -1)
                    elif lvl == 0:
                        fill = (st, B1, 1)
                    elif lvl == 1:
                        fill = (st, BLANK, 1)
                    else:
                        fill = (st, sym, 1)
                    put((st, sym), fill, ONE - mass)
        st = bare[q]
        put((st, BLANK), (st, BLANK, -1), ONE)
        for sym in all_syms + [LEND, REND]:
            if sym == BLANK:
                continue
            row = delta.get((st, sym), {})
            mass = sum(row.values(), ZERO)
            if mass < ONE:
                lvl = 2 if sym in (LEND, REND) else alpha.level(sym)
                if sym == LEND:
                    fill = (st, LEND, 1)
                elif sym == REND:
                    fill = (st, REND, -1)
                elif lvl == 0:
                    fill = (st, BLANK, -1)
                elif lvl == 1:
                    fill = (st, BLANK, -1)
                else:
                    fill = (st, sym, -1)
                put((st, sym), fill, ONE - mass)

    return LimitedAutomaton(2, states, alpha, delta, pair[(m.initial, m.bottom)],
                            accept, reject,
                            name=f"lpa({m.name})" if m.name else "lpa")


# ---------------------------------------------------------------------------
# probabilistic closure transforms


def _limited_union_shell(ms: list[LimitedAutomaton], weights: list[Fraction],
                         name: str) -> tuple:
    """Disjoint union of limited automata plus an initial |c coin.

    Returns (states, alphabet, delta, initial, accepts, rejects) with states
    tagged (i, q) and working symbols tagged (i, τ); the fresh initial state
    distributes the given weights over the components' first moves.
    """
    base = ms[0]
    sigma = base.alphabet.input_symbols
    k = base.k
    for m in ms[1:]:
        if (m.alphabet.input_symbols != sigma) or (m.k != k):
            raise MachineError("ALPHABET_MISMATCH: union needs one Σ and one k")
    levels: list[set] = [set() for _ in range(k)]
    for i, m in enumerate(ms):
        for j, part in enumerate(m.alphabet.levels):
            for s in part:
                if s in (LEND, REND):
                    continue
                levels[j].add((i, s))
    blank = ("u", BLANK)
    levels[-1] = {blank} | {x for x in levels[-1]}
    # all component blanks collapse onto the shared blank
    def wrap_sym(i, s, m):
        if s in (LEND, REND):
            return s
        if s in sigma:
            return s
        if s == m.alphabet.blank and m.alphabet.level(s) == k:
            return blank
        return (i, s)

    states = [("init",)]
    delta: dict = {}
    accepts, rejects = [], []
    for i, m in enumerate(ms):
        for q in m.states:
            states.append((i, q))
        accepts += [(i, q) for q in m.accept]
        rejects += [(i, q) for q in m.reject]
        for (q, s), dist in m.delta.items():
            row = {}
            for (p, tau, d), w in dist:
                row[((i, p), wrap_sym(i, tau, m), d)] = w
            delta[((i, q), wrap_sym(i, s, m))] = row
    init_row: dict = {}
    for i, (m, wgt) in enumerate(zip(ms, weights)):
        for (p, tau, d), w in m.delta.get((m.initial, LEND), ()):
            tgt = ((i, p), LEND, d)
            init_row[tgt] = init_row.get(tgt, ZERO) + wgt * w
    delta[(("init",), LEND)] = init_row
    alpha = LeveledAlphabet(sigma, levels, blank)
    return states, alpha, delta, ("init",), accepts, rejects


def union_one_sided(ms: list[LimitedAutomaton]) -> LimitedAutomaton:
    """Union of one-sided machines by an equiprobable initial choice.

    Members of any component language are accepted with at least 1/h of the
    component's acceptance probability; non-members of all components are
    rejected with probability 1.
    """
    h = len(ms)
    if h < 2:
        raise MachineError("union needs at least two machines")
    share = Fraction(1, h)
    parts = _limited_union_shell(ms, [share] * h, "union")
    states, alpha, delta, init, accepts, rejects = parts
    return LimitedAutomaton(ms[0].k, states, alpha, delta, init, accepts,
                            rejects, name="union")


def complement_swap(m: LimitedAutomaton) -> LimitedAutomaton:
    """Swap accepting and rejecting states: p_acc and p_rej trade places."""
    return LimitedAutomaton(m.k, m.states, m.alphabet, m.delta, m.initial,
                            m.reject, m.accept,
                            name=f"co({m.name})" if m.name else "co")


def _reroute_reject_entries(states, delta, rejects, alpha, accept_share,
                            acc_name, rej_name):
    """Split every transition into a rejecting state: w·α accept, w·(1-α) reject."""
    rejects = set(rejects)
    out: dict = {}
    for key, dist in delta.items():
        row = {}
        for (p, tau, d), w in (dist.items() if isinstance(dist, dict) else dist):
            if p in rejects:
                row[(acc_name, tau, d)] = row.get((acc_name, tau, d), ZERO) + w * accept_share
                row[(rej_name, tau, d)] = row.get((rej_name, tau, d), ZERO) + w * (ONE - accept_share)
            else:
                row[(p, tau, d)] = row.get((p, tau, d), ZERO) + w
        out[key] = row
    return out


def amplify_one_sided(m: LimitedAutomaton, epsilon, gap) -> LimitedAutomaton:
    """One-sided to bounded error: accept on rejection with probability α.

    With α = 1 - (1-2δ)/(2ε), members end with p_acc >= 1/2 + δ and
    non-members with p_rej = 1 - α >= 1/2 + δ.  Requires
    0 < δ < (1-ε)/(2(1+ε)).
    """
    eps = Fraction(epsilon)
    delta_gap = Fraction(gap)
    if not (HALF <= eps < ONE):
        raise MachineError("GAP_OUT_OF_RANGE: ε must lie in [1/2, 1)")
    if not (ZERO < delta_gap < (ONE - eps) / (2 * (ONE + eps))):
        raise MachineError("GAP_OUT_OF_RANGE: need 0 < δ < (1-ε)/(2(1+ε))")
    alpha = ONE - (ONE - 2 * delta_gap) / (2 * eps)
    acc_new, rej_new = ("amp", "acc"), ("amp", "rej")
    delta = _reroute_reject_entries(m.states, m.delta, m.reject, m.alphabet,
                                    alpha, acc_new, rej_new)
    states = set(m.states) | {acc_new, rej_new}
    # old rejecting states become unreachable but stay for bookkeeping
    return LimitedAutomaton(m.k, states, m.alphabet, delta, m.initial,
                            set(m.accept) | {acc_new},
                            set(m.reject) | {rej_new},
                            name=f"amp({m.name})" if m.name else "amp")


def bounded_or(m1: LimitedAutomaton, m2: LimitedAutomaton, epsilon) -> LimitedAutomaton:
    """OR of two bounded-error machines: coin, then rejections accept with 1/3.

    p_acc = (p_acc1+p_acc2)/2 + (p_rej1+p_rej2)/6 and
    p_rej = (p_rej1+p_rej2)/3; with component error <= ε < 1/6 the result
    has error at most ε + 1/3 < 1/2.
    """
    eps = Fraction(epsilon)
    if not (ZERO <= eps < Fraction(1, 6)):
        raise MachineError("EPSILON_TOO_LARGE: need ε < 1/6")
    parts = _limited_union_shell([m1, m2], [HALF, HALF], "or")
    states, alpha, delta, init, accepts, rejects = parts
    acc_new, rej_new = ("or", "acc"), ("or", "rej")
    delta = _reroute_reject_entries(states, delta, rejects, alpha, THIRD,
                                    acc_new, rej_new)
    states = set(states) | {acc_new, rej_new}
    return LimitedAutomaton(m1.k, states, alpha, delta, init,
                            set(accepts) | {acc_new},
                            set(rejects) | {rej_new}, name="bounded_or")


def bounded_and(m1: LimitedAutomaton, m2: LimitedAutomaton, epsilon) -> LimitedAutomaton:
    """AND via De Morgan: complement the OR of the complements."""
    return complement_swap(bounded_or(complement_swap(m1), complement_swap(m2),
                                      epsilon))


# ---------------------------------------------------------------------------
# products with regular languages


def _product_limited(m: LimitedAutomaton, d: Dfa, accept_pred) -> LimitedAutomaton:
    """Product machine driving the DFA on first visits to input cells.

    When m halts before consuming the whole input, the product walks to $
    first (stepping the DFA over the remaining fresh symbols) so the DFA's
    verdict covers all of x; accept_pred(m_accepts, dfa_accepts) decides.
    """
    if d.input_symbols != m.alphabet.input_symbols:
        raise MachineError("ALPHABET_MISMATCH: the DFA must share Σ")
    k = m.k
    alpha = m.alphabet
    states: set = set()
    delta: dict = {}
    accepts: set = set()
    rejects: set = set()

    junk = ("x", 1)
    levels = [set(part) for part in alpha.levels]
    levels[0].add(junk)
    alpha2 = LeveledAlphabet(alpha.input_symbols, levels, alpha.blank)

    def sweep_state(verdict_m, s):
        return ("sweep", verdict_m, s)

    for q in m.states:
        for s in d.states:
            states.add((q, s))
    for verdict in (True, False):
        for s in d.states:
            states.add(sweep_state(verdict, s))
    states.add(("done", True))
    states.add(("done", False))

    for (q, sym), dist in m.delta.items():
        lvl = None if sym in (LEND, REND) else alpha.level(sym)
        for s in d.states:
            row = {}
            s2 = d.transitions[(s, sym)] if lvl == 0 else s
            for (p, tau, dr), w in dist:
                if p in m.halting:
                    verdict = p in m.accept
                    row[(sweep_state(verdict, s2), tau, dr)] = w
                else:
                    row[((p, s2), tau, dr)] = w
            delta[((q, s), sym)] = row

    # sweep to $ consuming the remaining fresh input into the DFA
    for verdict in (True, False):
        for s in d.states:
            st = sweep_state(verdict, s)
            for sym in sorted(alpha.input_symbols, key=repr):
                delta[(st, sym)] = {(sweep_state(verdict, d.transitions[(s, sym)]),
                                     junk, 1): ONE}
            for part_i, part in enumerate(levels):
                lv = part_i + 1
                for sym in sorted(part, key=repr):
                    if sym in (LEND, REND):
                        continue
                    if lv < k:
                        # bump over already-visited cells
                        delta[(st, sym)] = {(st, _bump(alpha2, sym, lv, k), 1): ONE}
                    else:
                        delta[(st, sym)] = {(st, sym, 1): ONE}
            delta[(st, LEND)] = {(st, LEND, 1): ONE}
            final = ("done", accept_pred(verdict, s in d.accepting))
            delta[(st, REND)] = {(final, REND, -1): ONE}

    accepts.add(("done", True))
    rejects.add(("done", False))
    return LimitedAutomaton(k, states, alpha2, delta,
                            (m.initial, d.start), accepts, rejects,
                            name=f"product({m.name})" if m.name else "product")


def _bump(alpha: LeveledAlphabet, sym, lvl, k):
    """Any legal overwrite for a rightward pass over a visited cell."""
    from .machines import expected_write_level
    j = expected_write_level(lvl, 1, k)
    if j == k:
        return alpha.blank
    part = sorted(alpha.levels[j - 1], key=repr)
    return part[0] if part else alpha.blank


def intersect_regular(m: LimitedAutomaton, d: Dfa) -> LimitedAutomaton:
    """L(result) = L(m) ∩ L(d); determinism is preserved."""
    return _product_limited(m, d, lambda a, b: a and b)


def union_regular(m: LimitedAutomaton, d: Dfa) -> LimitedAutomaton:
    """L(result) = L(m) ∪ L(d); m must halt on the swept inputs."""
    return _product_limited(m, d, lambda a, b: a or b)
