"""Reference machines and independent membership oracles.

The oracles are direct string-pattern checks with no automaton machinery, so
they serve as ground truth for every equivalence test in the suite.  Builders
regenerate machines deterministically; checked-in digests must reproduce.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .machines import (BLANK, LAMBDA, LEND, REND, LeveledAlphabet,
                       LimitedAutomaton, MachineError, PushdownAutomaton,
                       expected_write_level)

ONE = Fraction(1)
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class LanguageOracle:
    name: str
    alphabet: frozenset
    member: Callable[[tuple], bool]

    def __call__(self, x) -> bool:
        return self.member(tuple(x))


# ---------------------------------------------------------------------------
# oracles


def oracle_L2(x) -> bool:
    """x in {a^n b^n c, a^n b^{2n} d : n >= 0}."""
    s = "".join(x)
    m = re.fullmatch(r"(a*)(b*)([cd])", s)
    if not m:
        return False
    n, b, z = len(m.group(1)), len(m.group(2)), m.group(3)
    return b == n if z == "c" else b == 2 * n


def oracle_L1prime(x) -> bool:
    """x in {a^n b^n c^m : n, m >= 0}."""
    m = re.fullmatch(r"(a*)(b*)(c*)", "".join(x))
    return bool(m) and len(m.group(1)) == len(m.group(2))


def oracle_L2prime(x) -> bool:
    """x in {a^n b^m c^m : n, m >= 0}."""
    m = re.fullmatch(r"(a*)(b*)(c*)", "".join(x))
    return bool(m) and len(m.group(2)) == len(m.group(3))


def oracle_abc_equal(x) -> bool:
    """x in {a^n b^n c^n : n >= 0} (the bounded-AND target)."""
    m = re.fullmatch(r"(a*)(b*)(c*)", "".join(x))
    return bool(m) and len(m.group(1)) == len(m.group(2)) == len(m.group(3))


def _parse_abc_block(s: str):
    m = re.fullmatch(r"(a*)(b*)(c*)", s)
    if not m:
        return None
    return len(m.group(1)), len(m.group(2)), len(m.group(3))


def oracle_Lk(k: int, x) -> bool:
    """Membership in the k-indexed block language, conditions evaluated verbatim.

    Blocks appear in the order w2 w4 ... (up the even chain), then wk, then
    back down the odd chain ... w5 w3, then w1.  When several guards of a
    condition fire at once, all of their consequents are required.
    """
    if k < 3:
        raise MachineError("the block language is defined for k >= 3")
    s = "".join(x)
    parts = s.split("#")
    if len(parts) != k:
        return False
    if k % 2 == 0:
        order = list(range(2, k - 1, 2)) + [k] + list(range(k - 1, 0, -2))
    else:
        order = list(range(2, k, 2)) + [k] + list(range(k - 2, 0, -2))
    assert order[-1] == 1 and len(order) == k
    w1 = parts[order.index(1)]
    if w1 not in ("a", "b"):
        return False
    nmp = {}
    for idx, part in zip(order, parts):
        if idx == 1:
            continue
        parsed = _parse_abc_block(part)
        if parsed is None:
            return False
        nmp[idx] = parsed
    n = {i: t[0] for i, t in nmp.items()}
    mm = {i: t[1] for i, t in nmp.items()}
    p = {i: t[2] for i, t in nmp.items()}
    # (i)
    if w1 == "a":
        if not n[2] <= p[2]:
            return False
    else:
        if not mm[2] <= p[2]:
            return False
    # (ii) conjunct all fired guards
    for j in range(3, k):
        if n[j - 1] == p[j - 1] or n[j - 1] < mm[j - 1]:
            if not n[j] <= mm[j]:
                return False
        if n[j - 1] < p[j - 1] or n[j - 1] == mm[j - 1]:
            if not n[j] <= p[j]:
                return False
    # (iii)
    if n[k - 1] == p[k - 1] and not n[k] == mm[k]:
        return False
    if n[k - 1] < p[k - 1] and not n[k] < p[k]:
        return False
    if n[k - 1] == mm[k - 1] and not n[k] == p[k]:
        return False
    if n[k - 1] < mm[k - 1] and not n[k] < mm[k]:
        return False
    return True


ORACLES = {
    "L2": LanguageOracle("L2", frozenset("abcd"), oracle_L2),
    "L1prime": LanguageOracle("L1prime", frozenset("abc"), oracle_L1prime),
    "L2prime": LanguageOracle("L2prime", frozenset("abc"), oracle_L2prime),
    "abc_equal": LanguageOracle("abc_equal", frozenset("abc"), oracle_abc_equal),
}


# ---------------------------------------------------------------------------
# PDA builders


def totalize_pda(states, input_symbols, stack_symbols, delta, reject, halting):
    """Fill every live (q, σ, a) up to total mass 1 with reject moves.

    The λ/σ split rule demands δ[q,σ,a] + δ[q,λ,a] = 1 for every triple, so
    hand-written machines list their interesting moves and the rest rejects.
    """
    delta = {k: dict(v) for k, v in delta.items()}
    syms = sorted(set(input_symbols) | {LEND, REND}, key=repr)
    for q in states:
        if q in halting:
            continue
        for a in stack_symbols:
            lam = sum(delta.get((q, LAMBDA, a), {}).values(), Fraction(0))
            for s in syms:
                cur = sum(delta.get((q, s, a), {}).values(), Fraction(0)) + lam
                if cur > ONE:
                    raise MachineError(f"overfull distribution at ({q!r},{s!r},{a!r})")
                if cur < ONE:
                    tgt = delta.setdefault((q, s, a), {})
                    tgt[(reject, (a,))] = tgt.get((reject, (a,)), Fraction(0)) + (ONE - cur)
    return delta


def build_L2_rppda() -> PushdownAutomaton:
    """One-sided-error 1ppda for L2: a fair coin picks the c- or d-check.

    Members are accepted with probability exactly 1/2, non-members rejected
    with probability 1.  The machine is deterministic after the coin and has
    no λ-moves, so it is in ideal shape.
    """
    A, BOT = "A", "Z"
    states = ["q0", "ca", "cb", "cz", "da", "db1", "db0", "dz", "ACC", "REJ"]
    d: dict = {}

    def put(q, s, a, p, u, w=ONE):
        d.setdefault((q, s, a), {})[(p, tuple(u))] = Fraction(w)

    # coin flip on the left endmarker
    put("q0", LEND, BOT, "ca", (BOT,), HALF)
    put("q0", LEND, BOT, "da", (BOT,), HALF)
    # c-branch: a^n b^n c
    put("ca", "a", BOT, "ca", (A, BOT))
    put("ca", "a", A, "ca", (A, A))
    put("ca", "b", A, "cb", ())
    put("ca", "c", BOT, "cz", (BOT,))
    put("cb", "b", A, "cb", ())
    put("cb", "c", BOT, "cz", (BOT,))
    put("cz", REND, BOT, "ACC", (BOT,))
    # d-branch: a^n b^{2n} d -- pop one A per two b's
    put("da", "a", BOT, "da", (A, BOT))
    put("da", "a", A, "da", (A, A))
    put("da", "b", A, "db1", (A,))
    put("da", "d", BOT, "dz", (BOT,))
    put("db1", "b", A, "db0", ())
    put("db0", "b", A, "db1", (A,))
    put("db0", "d", BOT, "dz", (BOT,))
    put("dz", REND, BOT, "ACC", (BOT,))

    delta = totalize_pda(states, "abcd", [A, BOT], d, "REJ", {"ACC", "REJ"})
    return PushdownAutomaton(states, "abcd", [A, BOT], 2, delta, "q0", BOT,
                             ["ACC"], ["REJ"], name="Z_L2PPDA")


def build_dcfl2_witnesses():
    """Deterministic ideal-shape DPDAs for L1' = {a^n b^n c^m} and L2' = {a^n b^m c^m}."""
    A, BOT = "A", "Z"

    def l1():
        states = ["q0", "qa", "qb", "qc", "ACC", "REJ"]
        d: dict = {}

        def put(q, s, a, p, u, w=ONE):
            d.setdefault((q, s, a), {})[(p, tuple(u))] = Fraction(w)

        put("q0", LEND, BOT, "qa", (BOT,))
        put("qa", "a", BOT, "qa", (A, BOT))
        put("qa", "a", A, "qa", (A, A))
        put("qa", "b", A, "qb", ())
        put("qa", "c", BOT, "qc", (BOT,))
        put("qa", REND, BOT, "ACC", (BOT,))
        put("qb", "b", A, "qb", ())
        put("qb", "c", BOT, "qc", (BOT,))
        put("qb", REND, BOT, "ACC", (BOT,))
        put("qc", "c", BOT, "qc", (BOT,))
        put("qc", REND, BOT, "ACC", (BOT,))
        delta = totalize_pda(states, "abc", [A, BOT], d, "REJ", {"ACC", "REJ"})
        return PushdownAutomaton(states, "abc", [A, BOT], 2, delta, "q0", BOT,
                                 ["ACC"], ["REJ"], name="Z_L1P_DPDA")

    def l2():
        states = ["q0", "qa", "qb", "qc", "ACC", "REJ"]
        d: dict = {}

        def put(q, s, a, p, u, w=ONE):
            d.setdefault((q, s, a), {})[(p, tuple(u))] = Fraction(w)

        B = "K"
        put("q0", LEND, BOT, "qa", (BOT,))
        put("qa", "a", BOT, "qa", (BOT,))
        put("qa", "b", BOT, "qb", (B, BOT))
        put("qa", REND, BOT, "ACC", (BOT,))
        put("qb", "b", B, "qb", (B, B))
        put("qb", "c", B, "qc", ())
        put("qb", REND, BOT, "ACC", (BOT,))  # unreachable guard; keeps symmetry
        put("qc", "c", B, "qc", ())
        put("qc", REND, BOT, "ACC", (BOT,))
        delta = totalize_pda(states, "abc", [B, BOT], d, "REJ", {"ACC", "REJ"})
        return PushdownAutomaton(states, "abc", [B, BOT], 2, delta, "q0", BOT,
                                 ["ACC"], ["REJ"], name="Z_L2P_DPDA")

    return l1(), l2()


def build_geometric_loop_pda() -> PushdownAutomaton:
    """After |c, a fair λ-coin either accepts or repeats: p_acc = 1 exactly.

    The loop sub-chain satisfies t = 1 + t/2, so its expected step count is 2
    and the whole machine on the empty input halts in 3 expected steps.
    """
    BOT = "Z"
    states = ["q0", "loop", "ACC", "REJ"]
    d = {
        ("q0", LEND, BOT): {("loop", (BOT,)): ONE},
        ("loop", LAMBDA, BOT): {("ACC", (BOT,)): HALF, ("loop", (BOT,)): HALF},
    }
    return PushdownAutomaton(states, "a", [BOT], 1, d, "q0", BOT,
                             ["ACC"], ["REJ"], name="Z_GEOLOOP")


def build_fair_coin_pda() -> PushdownAutomaton:
    """First move splits 1/2 accept / 1/2 reject."""
    BOT = "Z"
    states = ["q0", "ACC", "REJ"]
    d = {("q0", LEND, BOT): {("ACC", (BOT,)): HALF, ("REJ", (BOT,)): HALF}}
    return PushdownAutomaton(states, "a", [BOT], 1, d, "q0", BOT,
                             ["ACC"], ["REJ"], name="Z_COIN")


# ---------------------------------------------------------------------------
# limited-automata builders


def totalize_limited(k, states, alpha: LeveledAlphabet, delta, reject, halting,
                     junk_by_level=None):
    """Give every live (state, symbol) pair total mass 1 via reject moves.

    The filler writes the parity-forced level using `junk_by_level[j]` (or the
    blank when j = k) and moves left, except on |c where it must move right.
    """
    delta = {key: dict(v) for key, v in delta.items()}
    for q in states:
        if q in halting:
            continue
        for sym in alpha.all_symbols():
            cur = sum(delta.get((q, sym), {}).values(), Fraction(0))
            if cur > ONE:
                raise MachineError(f"overfull distribution at ({q!r},{sym!r})")
            if cur == ONE:
                continue
            lvl = alpha.level(sym)
            if sym == LEND:
                move = (reject, LEND, 1)
            elif sym == REND:
                move = (reject, REND, -1)
            elif lvl == k:
                move = (reject, sym, -1)
            else:
                j = expected_write_level(lvl, -1, k)
                if junk_by_level and j in junk_by_level:
                    tau = junk_by_level[j]
                elif j == k:
                    tau = alpha.blank
                else:
                    raise MachineError(f"no junk symbol for level {j}")
                move = (reject, tau, -1)
            tgt = delta.setdefault((q, sym), {})
            tgt[move] = tgt.get(move, Fraction(0)) + (ONE - cur)
    return delta


def build_parity_2lda() -> LimitedAutomaton:
    """Deterministic 2-lda: accept iff the number of a's is even.

    Not blank-skipping: the second sweep freezes cells with named marks, so
    the top level is bigger than {|c,$,B}.
    """
    alpha = LeveledAlphabet("ab", [["a1", "b1"], ["X", "Y", BLANK]])
    d: dict = {}

    def put(q, s, p, t, dr, w=ONE):
        d.setdefault((q, s), {})[(p, t, dr)] = Fraction(w)

    # sweep right flipping parity, then sweep left re-marking, accept at |c
    put("e", LEND, "e", LEND, 1)
    put("e", "a", "o", "a1", 1)
    put("o", "a", "e", "a1", 1)
    put("e", "b", "e", "b1", 1)
    put("o", "b", "o", "b1", 1)
    put("e", REND, "Le", REND, -1)
    put("o", REND, "Lo", REND, -1)
    for st, mark in (("Le", "X"), ("Lo", "Y")):
        put(st, "a1", st, mark, -1)
        put(st, "b1", st, mark, -1)
    put("Le", LEND, "ACC", LEND, 1)
    put("Lo", LEND, "REJ", LEND, 1)
    states = ["e", "o", "Le", "Lo", "ACC", "REJ"]
    delta = totalize_limited(2, states, alpha, d, "REJ", {"ACC", "REJ"},
                             junk_by_level={1: "a1", 2: "X"})
    return LimitedAutomaton(2, states, alpha, delta, "e", ["ACC"], ["REJ"],
                            name="Z_PARITY2LDA")


def build_zigzag_2lda() -> LimitedAutomaton:
    """Deterministic 2-lda that re-crosses frozen territory.

    Accepts strings over {a,b} whose first and last symbols are both 'a'.
    First sweep records each symbol in a level-1 mark; at $ it turns, freezes
    the marks into level-2 letters while walking back to |c, then re-crosses
    the frozen region to have another look at the last cell's mark.
    """
    alpha = LeveledAlphabet("ab", [["a1", "b1"], ["A2", "B2", BLANK]])
    d: dict = {}

    def put(q, s, p, t, dr, w=ONE):
        d.setdefault((q, s), {})[(p, t, dr)] = Fraction(w)

    put("s", LEND, "s", LEND, 1)
    put("s", "a", "r", "a1", 1)  # first symbol a: promising
    put("s", "b", "dead", "b1", 1)
    put("s", REND, "REJ", REND, -1)  # empty input
    put("r", "a", "r", "a1", 1)
    put("r", "b", "r", "b1", 1)
    put("r", REND, "back", REND, -1)
    put("dead", "a", "dead", "a1", 1)
    put("dead", "b", "dead", "b1", 1)
    put("dead", REND, "REJ", REND, -1)
    # leftward freeze: keep the letter in the frozen alphabet
    put("back", "a1", "back", "A2", -1)
    put("back", "b1", "back", "B2", -1)
    put("back", LEND, "fwd", LEND, 1)
    # frozen re-scan: remember the last letter seen, decide at $
    put("fwd", "A2", "fwd", "A2", 1)
    put("fwd", "B2", "fwdB", "B2", 1)
    put("fwdB", "A2", "fwd", "A2", 1)
    put("fwdB", "B2", "fwdB", "B2", 1)
    put("fwd", REND, "ACC", REND, -1)
    put("fwdB", REND, "REJ", REND, -1)
    states = ["s", "r", "dead", "back", "fwd", "fwdB", "ACC", "REJ"]
    delta = totalize_limited(2, states, alpha, d, "REJ", {"ACC", "REJ"},
                             junk_by_level={1: "a1", 2: "A2"})
    return LimitedAutomaton(2, states, alpha, delta, "s", ["ACC"], ["REJ"],
                            name="Z_ZIGZAG2LDA")


def build_contains_aa_2lna() -> LimitedAutomaton:
    """Nondeterministic 2-lna: accept iff the input contains "aa".

    The guess happens at a live cell whose neighbourhood is live, so the
    blank-skipping construction preserves the accepting-path count, which
    equals the number of aa-starting positions.
    """
    alpha = LeveledAlphabet("ab", [["a1", "b1"], [BLANK]])
    d: dict = {}

    def put(q, s, p, t, dr, w=ONE):
        d.setdefault((q, s), {})[(p, t, dr)] = Fraction(w)

    put("scan", LEND, "scan", LEND, 1)
    put("scan", "b", "scan", "b1", 1)
    put("scan", "a", "scan", "a1", 1)   # keep scanning, or ...
    put("scan", "a", "hit", "a1", 1)    # ... guess that "aa" starts here
    put("hit", "a", "tail", "a1", 1)
    put("hit", "b", "REJ0", "b1", 1)
    put("tail", "a", "tail", "a1", 1)
    put("tail", "b", "tail", "b1", 1)
    put("tail", REND, "ACC", REND, -1)
    put("scan", REND, "REJ1", REND, -1)
    put("hit", REND, "REJ2", REND, -1)
    states = ["scan", "hit", "tail", "ACC", "REJ0", "REJ1", "REJ2"]
    return LimitedAutomaton(2, states, alpha, d, "scan",
                            ["ACC"], ["REJ0", "REJ1", "REJ2"],
                            name="Z_AA2LNA")


def oracle_contains_aa(x) -> bool:
    return "aa" in "".join(x)


def count_aa_guesses(x) -> int:
    s = "".join(x)
    return sum(1 for i in range(len(s) - 1) if s[i] == "a" and s[i + 1] == "a")


# ---------------------------------------------------------------------------
# sweep-shaped 3-lda's for the decomposition pipeline


def build_sweep_3lda_parity() -> LimitedAutomaton:
    """Deterministic sweeping 3-lda: accept iff #a and #b are both even.

    Three full sweeps: mark, check marks right-to-left, then walk out to $
    and halt.  All turns happen at the endmarkers, which is the shape the
    first-traverse decomposition handles end to end.
    """
    alpha = LeveledAlphabet("ab", [["a1", "b1"], ["a2", "b2"], [BLANK]])
    d: dict = {}

    def put(q, s, p, t, dr, w=ONE):
        d.setdefault((q, s), {})[(p, t, dr)] = Fraction(w)

    # sweep 1: carry a-parity, mark letters
    put("s00", LEND, "s00", LEND, 1)
    for (pa, pb) in ((0, 0), (0, 1), (1, 0), (1, 1)):
        q = f"s{pa}{pb}"
        put(q, "a", f"s{1 - pa}{pb}", "a1", 1)
        put(q, "b", f"s{pa}{1 - pb}", "b1", 1)
        put(q, REND, f"t{pa}{pb}", REND, -1)
    # sweep 2: walk back over the marks, freeze them one level up
    for (pa, pb) in ((0, 0), (0, 1), (1, 0), (1, 1)):
        q = f"t{pa}{pb}"
        put(q, "a1", q, "a2", -1)
        put(q, "b1", q, "b2", -1)
        put(q, LEND, f"u{pa}{pb}", LEND, 1)
    # sweep 3: stroll to $ over frozen marks and report
    for (pa, pb) in ((0, 0), (0, 1), (1, 0), (1, 1)):
        q = f"u{pa}{pb}"
        put(q, "a2", q, BLANK, 1)
        put(q, "b2", q, BLANK, 1)
        put(q, REND, "ACC" if (pa, pb) == (0, 0) else "REJ", REND, -1)
    states = [f"{c}{pa}{pb}" for c in "stu" for pa in (0, 1) for pb in (0, 1)]
    states += ["ACC", "REJ"]
    return LimitedAutomaton(3, states, alpha, d, "s00", ["ACC"], ["REJ"],
                            name="Z_SWEEP3LDA_PARITY")


def oracle_even_ab(x) -> bool:
    s = "".join(x)
    return s.count("a") % 2 == 0 and s.count("b") % 2 == 0


def build_sweep_3lda_firstlast() -> LimitedAutomaton:
    """Deterministic sweeping 3-lda: accept iff first symbol equals last.

    Empty inputs are accepted (vacuously equal).
    """
    alpha = LeveledAlphabet("ab", [["a1", "b1", "A1", "B1"], ["x2"], [BLANK]])
    d: dict = {}

    def put(q, s, p, t, dr, w=ONE):
        d.setdefault((q, s), {})[(p, t, dr)] = Fraction(w)

    put("s", LEND, "s", LEND, 1)
    put("s", "a", "fa", "A1", 1)   # capital mark: the first cell
    put("s", "b", "fb", "B1", 1)
    put("s", REND, "ACC", REND, -1)
    for f in ("fa", "fb"):
        put(f, "a", f, "a1", 1)
        put(f, "b", f, "b1", 1)
        put(f, REND, f"L{f}", REND, -1)
    # sweep 2 leftwards: the first mark seen is the last input symbol
    for f in ("fa", "fb"):
        want = f[1]  # 'a' or 'b'
        q = f"L{f}"
        for sym, letter in (("a1", "a"), ("b1", "b")):
            put(q, sym, f"M{f}" if letter == want else f"N{f}", "x2", -1)
        # single-letter input: the capital mark is also the last symbol
        for sym, letter in (("A1", "a"), ("B1", "b")):
            put(q, sym, f"M{f}" if letter == want else f"N{f}", "x2", -1)
    for f in ("fa", "fb"):
        for verdictstate in (f"M{f}", f"N{f}"):
            put(verdictstate, "a1", verdictstate, "x2", -1)
            put(verdictstate, "b1", verdictstate, "x2", -1)
            put(verdictstate, "A1", verdictstate, "x2", -1)
            put(verdictstate, "B1", verdictstate, "x2", -1)
        put(f"M{f}", LEND, f"W{f}", LEND, 1)
        put(f"N{f}", LEND, f"V{f}", LEND, 1)
    # sweep 3: walk out and report
    for f in ("fa", "fb"):
        for w3, verdict in ((f"W{f}", "ACC"), (f"V{f}", "REJ")):
            put(w3, "x2", w3, BLANK, 1)
            put(w3, REND, verdict, REND, -1)
    states = ["s", "fa", "fb", "Lfa", "Lfb", "Mfa", "Mfb", "Nfa", "Nfb",
              "Wfa", "Wfb", "Vfa", "Vfb", "ACC", "REJ"]
    return LimitedAutomaton(3, states, alpha, d, "s", ["ACC"], ["REJ"],
                            name="Z_SWEEP3LDA_FIRSTLAST")


def oracle_firstlast(x) -> bool:
    s = "".join(x)
    return len(s) == 0 or s[0] == s[-1]


# ---------------------------------------------------------------------------
# random machine generation


def random_machine(kind: str, seed: int, k: int = 2, n_states: int = 4,
                   n_input: int = 2, n_work: int = 2, determinism: str = "det"):
    """Seed-deterministic generator of valid machines for fuzzing.

    kinds: "limited" (plain k-lda/k-lna/k-lpa), "bs2lpa" (blank-skipping
    2-lpa with separated reader classes), "idealpda" (ideal-shape PDA),
    "transducer".  Weights: {1} for det, {0,1} for nondet, dyadic for prob.
    """
    # string seeds hash stably across processes; tuples would not
    rng = random.Random(f"{kind}:{seed}:{k}:{n_states}:{n_input}:{n_work}:{determinism}")
    if kind == "limited":
        return _random_limited(rng, k, n_states, n_input, n_work, determinism)
    if kind == "bs2lpa":
        return _random_bs2lpa(rng, n_states, n_input, n_work, determinism)
    if kind == "idealpda":
        return _random_ideal_pda(rng, n_states, n_input, n_work, determinism)
    if kind == "transducer":
        return _random_transducer(rng, n_states, n_input, n_work)
    raise MachineError(f"INCONSISTENT_SPEC: unknown kind {kind!r}")


def _weights(rng, n, determinism):
    if determinism == "det":
        return [ONE]
    if determinism == "nondet":
        return [ONE] * n
    # dyadic split summing to 1
    cuts = sorted(rng.randrange(1, 8) for _ in range(n - 1))
    vals = []
    prev = 0
    for c in cuts + [8]:
        vals.append(Fraction(max(c - prev, 0), 8))
        prev = c
    vals = [v for v in vals if v > 0]
    while len(vals) < n:
        vals.append(Fraction(0))
    return vals


def _random_limited(rng, k, n_states, n_input, n_work, determinism):
    if k < 1 or n_states < 2 or n_input < 1:
        raise MachineError("INCONSISTENT_SPEC: need k>=1, >=2 states, >=1 input symbol")
    inputs = [chr(ord("a") + i) for i in range(n_input)]
    levels = []
    for lv in range(1, k):
        levels.append([f"w{lv}_{j}" for j in range(n_work)])
    levels.append([BLANK] + ([f"f_{j}" for j in range(max(n_work - 1, 0))] if k >= 2 else []))
    alpha = LeveledAlphabet(inputs, levels)
    live = [f"q{i}" for i in range(n_states)]
    states = live + ["ACC", "REJ"]
    halt = {"ACC", "REJ"}
    d: dict = {}
    for q in live:
        for sym in alpha.all_symbols():
            lvl = alpha.level(sym)
            branches = 1
            if determinism != "det" and rng.random() < 0.4:
                branches = 2
            ws = _weights(rng, branches, determinism)
            tgt: dict = {}
            for w in ws:
                if w == 0:
                    continue
                # halting targets kept rare so machines usually run a while
                p = rng.choice(states) if rng.random() < 0.25 else rng.choice(live)
                if sym == LEND:
                    move = (p, LEND, 1)
                elif sym == REND:
                    move = (p, REND, -1)
                elif lvl == k:
                    move = (p, sym, rng.choice((-1, 1)))
                else:
                    dr = rng.choice((-1, 1))
                    j = expected_write_level(lvl, dr, k)
                    pool = alpha.input_symbols if j == 0 else alpha.levels[j - 1]
                    pool = [s for s in sorted(pool, key=repr) if s not in (LEND, REND)]
                    move = (p, rng.choice(pool), dr)
                if determinism == "nondet":
                    tgt[move] = ONE  # duplicate guesses collapse, not add
                else:
                    tgt[move] = tgt.get(move, Fraction(0)) + w
            d[(q, sym)] = tgt
    return LimitedAutomaton(k, states, alpha, d, "q0", ["ACC"], ["REJ"],
                            name=f"RND_{determinism}_{k}l")


def _random_bs2lpa(rng, n_states, n_input, n_work, determinism):
    """Blank-skipping 2-lpa shaped like the PDA conversion table expects.

    F-states (rightward) read fresh input and visit $ once; Mpre-states pop
    leftwards mid-input and turn back; Mpost-states pop after $ and halt.
    The machine is valid, total, blank-skipping, and never resumes reading
    input after the endmarker.
    """
    inputs = [chr(ord("a") + i) for i in range(n_input)]
    marks = [f"m{j}" for j in range(n_work)]
    alpha = LeveledAlphabet(inputs, [marks, [BLANK]])
    nf = max(2, n_states // 2)
    nm = max(1, n_states - nf)
    F = [f"F{i}" for i in range(nf)]
    Mpre = [f"M{i}" for i in range(nm)]
    Mpost = [f"N{i}" for i in range(nm)]
    states = F + Mpre + Mpost + ["ACC", "REJ"]
    d: dict = {}

    def dist(keys):
        tgt: dict = {}
        ws = _weights(rng, len(keys), determinism)
        for mv, w in zip(keys, ws):
            if w > 0:
                if determinism == "nondet":
                    tgt[mv] = ONE
                else:
                    tgt[mv] = tgt.get(mv, Fraction(0)) + w
        return tgt

    for q in F:
        # |c: the initial cell, move right
        d[(q, LEND)] = dist([(rng.choice(F), LEND, 1)])
        for s in inputs:
            branches = 1 if determinism == "det" else rng.choice((1, 2))
            moves = []
            for _ in range(branches):
                if rng.random() < 0.7:
                    moves.append((rng.choice(F), rng.choice(marks), 1))
                else:
                    moves.append((rng.choice(Mpre), BLANK, -1))
            d[(q, s)] = dist(moves)
        # the endmarker is visited once; afterwards only pops and halting
        d[(q, REND)] = dist([(rng.choice(Mpost + ["ACC", "REJ"]), REND, -1)])
        d[(q, BLANK)] = {(q, BLANK, 1): ONE}
    for q in Mpre:
        # a mid-input pop chain may empty the tape and bounce off |c
        d[(q, LEND)] = dist([(rng.choice(F), LEND, 1)])
        for s in marks:
            branches = 1 if determinism == "det" else rng.choice((1, 2))
            moves = []
            for _ in range(branches):
                if rng.random() < 0.5:
                    moves.append((rng.choice(Mpre), BLANK, -1))
                else:
                    moves.append((rng.choice(F), BLANK, 1))
            d[(q, s)] = dist(moves)
        d[(q, BLANK)] = {(q, BLANK, -1): ONE}
        for s in inputs:
            d[(q, s)] = {("REJ", rng.choice(marks), 1): ONE}
        d[(q, REND)] = {("REJ", REND, -1): ONE}
    for q in Mpost:
        # after $ the walk only pops and eventually halts
        d[(q, LEND)] = dist([(rng.choice(["ACC", "REJ"]), LEND, 1)])
        for s in marks:
            moves = [(rng.choice(Mpost + ["ACC", "REJ"]), BLANK, -1)]
            d[(q, s)] = dist(moves)
        d[(q, BLANK)] = {(q, BLANK, -1): ONE}
        for s in inputs:
            d[(q, s)] = {("REJ", rng.choice(marks), 1): ONE}
        d[(q, REND)] = {("REJ", REND, -1): ONE}
    for q in F:
        for s in marks:
            d[(q, s)] = {("REJ", BLANK, -1): ONE}
    return LimitedAutomaton(2, states, alpha, d, "F0", ["ACC"], ["REJ"],
                            name=f"RND_BS2LPA_{determinism}")


def _random_ideal_pda(rng, n_states, n_input, n_work, determinism):
    """Random ideal-shape PDA: no λ-moves at all, push-one/pop-one/stay."""
    inputs = [chr(ord("a") + i) for i in range(n_input)]
    BOT = "Z"
    stack = [f"s{j}" for j in range(max(1, n_work))] + [BOT]
    live = [f"q{i}" for i in range(n_states)]
    states = live + ["ACC", "REJ"]
    d: dict = {}
    for q in live:
        for a in stack:
            for s in inputs + [LEND, REND]:
                branches = 1 if determinism == "det" else rng.choice((1, 2))
                tgt: dict = {}
                ws = _weights(rng, branches, determinism)
                for w in ws:
                    if w == 0:
                        continue
                    if s == REND:
                        # decide at the endmarker: λ-free machines would
                        # otherwise wedge off-tape in a live state
                        p = rng.choice(("ACC", "REJ"))
                        u = (a,)
                    else:
                        p = rng.choice(states) if rng.random() < 0.2 else rng.choice(live)
                        r = rng.random()
                        if r < 0.4:
                            u = (rng.choice(stack[:-1]), a)  # push one
                        elif r < 0.7 or a == BOT:
                            u = (a,)  # stationary
                        else:
                            u = ()  # pop
                    if determinism == "nondet":
                        tgt[(p, u)] = ONE
                    else:
                        tgt[(p, u)] = tgt.get((p, u), Fraction(0)) + w
                d[(q, s, a)] = tgt
    return PushdownAutomaton(states, inputs, stack, 2, d, "q0", BOT,
                             ["ACC"], ["REJ"], name=f"RND_IDEALPDA_{determinism}")


def _random_transducer(rng, n_states, n_input, n_out):
    from .transducers import RtTransducer
    inputs = [chr(ord("a") + i) for i in range(n_input)]
    outs = [chr(ord("x") + i) for i in range(max(1, n_out))]
    live = [f"t{i}" for i in range(n_states)]
    states = live + ["TACC"]
    delta: dict = {}
    for q in live:
        opts = [(rng.choice(live), None)]
        if rng.random() < 0.8:
            delta[(q, LEND)] = tuple(opts)
        for s in inputs:
            n_opts = rng.choice((1, 1, 2))
            delta[(q, s)] = tuple((rng.choice(live), rng.choice(outs))
                                  for _ in range(n_opts))
        if rng.random() < 0.8:
            delta[(q, REND)] = (("TACC", None),)
    # ensure the initial state can start
    delta[("t0", LEND)] = ((rng.choice(live), None),)
    return RtTransducer(states, inputs, outs, delta, "t0", "TACC")
