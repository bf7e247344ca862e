"""Exact evaluation of machines on concrete inputs.

The central object is the configuration graph: nodes are interned surface
configurations, edges carry exact rational weights, and absorption
probabilities come from a sparse rational solve over the transient part.
A separate brute-force path enumerator acts as the independent oracle; it
deliberately re-implements the stepping logic and shares nothing with the
solver path beyond the machine types themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable

from .linsolve import solve_identity_minus, strongly_connected_components
from .machines import (LAMBDA, LEND, REND, LimitedAutomaton, MachineError,
                       PushdownAutomaton, _pda_weights_boolean,
                       _weights_boolean)


def boolean_weighted(m) -> bool:
    if isinstance(m, LimitedAutomaton):
        return _weights_boolean(m)
    return _pda_weights_boolean(m)

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)
INF = "inf"

ACCEPT = "accept"
REJECT = "reject"
UNRESOLVED = "unresolved"

DEFAULT_MAX_NODES = 2_000_000
DEFAULT_STEP_CAP = 10_000


class CapError(RuntimeError):
    """A limited automaton exhausted max_nodes: finiteness was expected."""


class UnresolvedMass(ValueError):
    """Operation needs a fully resolved graph but unresolved mass remains."""


@dataclass
class ConfigurationGraph:
    """Interned configuration graph of one machine on one input."""

    configs: list  # node id -> configuration tuple
    edges: list  # node id -> list of (target id, weight)
    initial: int
    accepting: set
    rejecting: set
    unresolved: set  # cap-exceeded frontier nodes, treated as absorbing
    dead: set  # stuck non-halting nodes (no legal move), absorbing
    uniform: bool  # weights renormalized uniformly over support (nondet read)

    @property
    def node_count(self) -> int:
        return len(self.configs)

    @property
    def edge_count(self) -> int:
        return sum(len(e) for e in self.edges)

    def absorbing(self) -> set:
        return self.accepting | self.rejecting | self.unresolved | self.dead


@dataclass
class ProbabilityReport:
    p_acc: Fraction
    p_rej: Fraction
    p_nonhalt: Fraction
    p_unresolved: Fraction
    expected_steps: object  # Fraction | "inf" | None when unresolved
    nodes: int
    edges: int

    @property
    def p_acc_interval(self):
        return (self.p_acc, self.p_acc + self.p_unresolved)

    @property
    def p_rej_interval(self):
        return (self.p_rej, self.p_rej + self.p_unresolved)

    def check_mass(self):
        total = self.p_acc + self.p_rej + self.p_nonhalt + self.p_unresolved
        assert total == ONE, f"probability mass {total} != 1"

    def to_doc(self) -> dict:
        from .serialize import format_ratio
        return {
            "p_acc": format_ratio(self.p_acc),
            "p_rej": format_ratio(self.p_rej),
            "p_nonhalt": format_ratio(self.p_nonhalt),
            "p_unresolved": format_ratio(self.p_unresolved),
            "expected_steps": (None if self.expected_steps is None
                               else format_ratio(self.expected_steps)),
            "nodes": self.nodes,
            "edges": self.edges,
        }


# ---------------------------------------------------------------------------
# stepping


def limited_initial(m: LimitedAutomaton, x) -> tuple:
    tape = (LEND,) + tuple(x) + (REND,)
    return (m.initial, 0, tape)


def limited_successors(m: LimitedAutomaton, cfg) -> list:
    """Weighted successors of a limited-automaton configuration."""
    q, pos, tape = cfg
    if q in m.halting:
        return []
    out = []
    for (p, tau, d), w in m.moves(q, tape[pos]):
        npos = pos + d
        if npos < 0 or npos >= len(tape):
            continue  # would fall off the tape; validators flag such rules
        ntape = tape if tau == tape[pos] else tape[:pos] + (tau,) + tape[pos + 1:]
        out.append(((p, npos, ntape), w))
    return out


def pda_initial(m: PushdownAutomaton, x) -> tuple:
    return (m.initial, 0, (m.bottom,))


def pda_successors(m: PushdownAutomaton, cfg, x, max_stack: int) -> tuple:
    """Successors of a PDA configuration; None marks a cap-exceeded branch.

    The tape is |c x $ with cells 0..n+1; position n+2 is off-tape where only
    λ-moves remain.  Stack tuples are top-first.
    """
    q, pos, stack = cfg
    if q in m.halting:
        return [], False
    tape = (LEND,) + tuple(x) + (REND,)
    out = []
    capped = False
    if not stack:
        return [], False  # emptied stack: stuck
    top = stack[0]
    for (p, u), w in m.moves(q, LAMBDA, top):
        nstack = u + stack[1:]
        if len(nstack) > max_stack:
            capped = True
            continue
        out.append(((p, pos, nstack), w))
    if pos < len(tape):
        sym = tape[pos]
        for (p, u), w in m.moves(q, sym, top):
            nstack = u + stack[1:]
            if len(nstack) > max_stack:
                capped = True
                continue
            out.append(((p, pos + 1, nstack), w))
    return out, capped


def successors(m, cfg, x, max_stack=0):
    if isinstance(m, LimitedAutomaton):
        return limited_successors(m, cfg), False
    return pda_successors(m, cfg, x, max_stack)


# ---------------------------------------------------------------------------
# graph construction


def default_stack_cap(m: PushdownAutomaton, x) -> int:
    return m.push_size * (len(tuple(x)) + 2) + 16


def build_config_graph(m, x, max_nodes: int = DEFAULT_MAX_NODES,
                       max_stack_height: int | None = None) -> ConfigurationGraph:
    """Breadth-first closure of the reachable configurations.

    For limited automata the graph is provably finite (cell levels only grow),
    so hitting max_nodes is reported as a hard CapError.  For PDAs, branches
    that exceed the stack cap become unresolved absorbing nodes.
    """
    x = tuple(x)
    is_lim = isinstance(m, LimitedAutomaton)
    if is_lim:
        for s in x:
            if s not in m.alphabet.input_symbols:
                raise MachineError(f"input symbol {s!r} not in Σ")
        init = limited_initial(m, x)
        cap = 0
    else:
        for s in x:
            if s not in m.input_symbols:
                raise MachineError(f"input symbol {s!r} not in Σ")
        init = pda_initial(m, x)
        cap = max_stack_height if max_stack_height is not None else default_stack_cap(m, x)

    # nondeterministic (boolean-weight) machines get a uniform split so the
    # graph is a stochastic chain; membership uses support reachability only
    renorm = boolean_weighted(m)

    ids = {init: 0}
    configs = [init]
    edges: list = []
    accepting, rejecting, unresolved, dead = set(), set(), set(), set()
    frontier = [0]
    while frontier:
        nid = frontier.pop()
        cfg = configs[nid]
        q = cfg[0]
        while len(edges) <= nid:
            edges.append([])
        if q in m.accept:
            accepting.add(nid)
            continue
        if q in m.reject:
            rejecting.add(nid)
            continue
        succ, capped = successors(m, cfg, x, cap)
        if capped:
            unresolved.add(nid)
            edges[nid] = []
            continue
        if not succ:
            dead.add(nid)
            continue
        if renorm:
            share = Fraction(1, len(succ))
            succ = [(c, share) for c, _w in succ]
        row = []
        for c, w in succ:
            cid = ids.get(c)
            if cid is None:
                if len(configs) >= max_nodes:
                    if is_lim:
                        raise CapError(f"limited automaton exceeded max_nodes={max_nodes}")
                    unresolved.add(nid)
                    row = []
                    break
                cid = len(configs)
                ids[c] = cid
                configs.append(c)
                frontier.append(cid)
            row.append((cid, w))
        edges[nid] = row
    while len(edges) < len(configs):
        edges.append([])
    return ConfigurationGraph(configs, edges, 0, accepting, rejecting,
                              unresolved, dead, uniform=renorm)


# ---------------------------------------------------------------------------
# absorption analysis


def _absorption(g: ConfigurationGraph):
    """Classify nodes and solve the absorption system.

    Returns (p_acc, p_rej, p_unresolved, p_dead, p_nonhalt, transient_info)
    where transient_info carries what expected_steps needs.
    """
    n = g.node_count
    absorbing = g.absorbing()
    # recurrent non-absorbing classes have no escape; their mass never halts
    comps = strongly_connected_components(
        n, lambda v: (t for t, _w in g.edges[v]))
    escape = [False] * n  # can reach an absorbing node
    comp_of = [0] * n
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    # comps are emitted sinks-first, so propagate escape along that order
    for comp in comps:
        for v in comp:
            if v in absorbing:
                escape[v] = True
            for t, _w in g.edges[v]:
                if escape[t]:
                    escape[v] = True
        if any(escape[v] for v in comp):
            # within an SCC, escape spreads to every member
            changed = True
            while changed:
                changed = False
                for v in comp:
                    if escape[v]:
                        continue
                    if any(escape[t] for t, _w in g.edges[v]):
                        escape[v] = True
                        changed = True

    transient = [v for v in range(n) if v not in absorbing and escape[v]]
    index = {v: i for i, v in enumerate(transient)}

    def absorb_into(targets: set) -> list[Fraction]:
        if g.initial in targets:
            return None  # handled by caller
        rows = []
        rhs = []
        for v in transient:
            row = {}
            b = ZERO
            for t, w in g.edges[v]:
                if t in targets:
                    b += w
                elif t in index:
                    row[index[t]] = row.get(index[t], ZERO) + w
                # edges into non-escaping or other-absorbing nodes drop out
            rows.append(row)
            rhs.append(b)
        return solve_identity_minus(rows, rhs)

    def mass(targets: set) -> Fraction:
        if g.initial in targets:
            return ONE
        if g.initial not in index:
            return ZERO
        sol = absorb_into(targets)
        return sol[index[g.initial]]

    p_acc = mass(g.accepting)
    p_rej = mass(g.rejecting)
    p_unr = mass(g.unresolved)
    p_dead = mass(g.dead)
    p_nonhalt = ONE - p_acc - p_rej - p_unr - p_dead
    return p_acc, p_rej, p_unr, p_dead, p_nonhalt, (transient, index)


def acceptance_probability(g: ConfigurationGraph) -> ProbabilityReport:
    """Exact absorption probabilities plus expected steps where defined."""
    p_acc, p_rej, p_unr, p_dead, p_nonhalt, (transient, index) = _absorption(g)
    halting_mass = p_acc + p_rej
    expected: object
    if p_unr > 0:
        expected = None
    elif halting_mass != ONE:
        expected = INF
    else:
        expected = _expected_steps(g, transient, index)
    rep = ProbabilityReport(p_acc, p_rej, p_nonhalt + p_dead, p_unr, expected,
                            g.node_count, g.edge_count)
    rep.check_mass()
    return rep


def _expected_steps(g: ConfigurationGraph, transient, index) -> Fraction:
    if g.initial not in index:
        return ZERO  # initial configuration is already absorbing
    rows = []
    rhs = []
    for v in transient:
        row = {}
        for t, w in g.edges[v]:
            if t in index:
                row[index[t]] = row.get(index[t], ZERO) + w
        rows.append(row)
        rhs.append(ONE)
    sol = solve_identity_minus(rows, rhs)
    return sol[index[g.initial]]


def expected_steps(g: ConfigurationGraph):
    """Expected halting time; "inf" if halting mass < 1.

    Raises UnresolvedMass when cap-exceeded mass makes the value undefined.
    """
    rep = acceptance_probability(g)
    if rep.p_unresolved > 0:
        raise UnresolvedMass("UNRESOLVED_MASS: expected steps undefined under caps")
    return rep.expected_steps


# ---------------------------------------------------------------------------
# independent oracle (must not share stepping code with the solver path)


def enumerate_paths_oracle(m, x, step_cap: int = DEFAULT_STEP_CAP,
                           max_stack_height: int | None = None) -> ProbabilityReport:
    """Depth-first enumeration of all computation paths up to step_cap.

    Sums exact path probabilities into acceptance/rejection mass; whatever
    has not halted by the cap is unresolved.  The stepping logic below is a
    deliberate re-implementation: it shares only the machine types with
    build_config_graph so the two can certify each other.
    """
    x = tuple(x)
    is_lim = isinstance(m, LimitedAutomaton)
    tape = (LEND,) + x + (REND,)
    nondet = boolean_weighted(m)
    if is_lim:
        start = (m.initial, 0, tape)
    else:
        cap = max_stack_height if max_stack_height is not None else default_stack_cap(m, x)
        start = (m.initial, 0, (m.bottom,))

    p_acc = p_rej = p_unr = ZERO
    exp_steps = ZERO
    # stack of (config, pathweight, steps)
    work = [(start, ONE, 0)]
    while work:
        cfg, wgt, steps = work.pop()
        q = cfg[0]
        if q in m.accept:
            p_acc += wgt
            exp_steps += wgt * steps
            continue
        if q in m.reject:
            p_rej += wgt
            exp_steps += wgt * steps
            continue
        if steps >= step_cap:
            p_unr += wgt
            continue
        moves = []
        hit_cap = False
        if is_lim:
            _q, pos, tp = cfg
            for (p, tau, d), w in m.moves(q, tp[pos]):
                npos = pos + d
                if 0 <= npos < len(tp):
                    ntp = tp[:pos] + (tau,) + tp[pos + 1:]
                    moves.append(((p, npos, ntp), w))
        else:
            _q, pos, stack = cfg
            if stack:
                top = stack[0]
                for (p, u), w in m.moves(q, LAMBDA, top):
                    ns = u + stack[1:]
                    if len(ns) <= cap:
                        moves.append(((p, pos, ns), w))
                    else:
                        hit_cap = True
                if pos < len(tape):
                    for (p, u), w in m.moves(q, tape[pos], top):
                        ns = u + stack[1:]
                        if len(ns) <= cap:
                            moves.append(((p, pos + 1, ns), w))
                        else:
                            hit_cap = True
        if hit_cap:
            p_unr += wgt  # the whole branch is unknowable past a cap
            continue
        if not moves:
            continue  # stuck: the branch never halts, mass goes to p_nonhalt
        if nondet:
            share = Fraction(1, len(moves))
            moves = [(c, share) for c, _w in moves]
        for c, w in moves:
            work.append((c, wgt * w, steps + 1))
    p_rest = ONE - p_acc - p_rej - p_unr
    if p_unr > 0:
        expected: object = None
    elif p_rest > 0:
        expected = INF
    else:
        expected = exp_steps
    rep = ProbabilityReport(p_acc, p_rej, p_rest, p_unr, expected, 0, 0)
    rep.check_mass()
    return rep


# ---------------------------------------------------------------------------
# path counting and existential membership


def count_accepting_paths(m, x, step_cap: int = DEFAULT_STEP_CAP):
    """Count distinct halting accepting paths of length <= step_cap.

    Requires boolean weights (NOT_NONDET otherwise).  Deterministic in the
    transition order: successors are explored lexicographically.  Returns
    (count, truncated).
    """
    if not boolean_weighted(m):
        raise MachineError("NOT_NONDET: path counting needs weights in {0,1}")
    x = tuple(x)
    count = 0
    truncated = False
    stack_cap = default_stack_cap(m, x) if isinstance(m, PushdownAutomaton) else 0
    init = limited_initial(m, x) if isinstance(m, LimitedAutomaton) else pda_initial(m, x)
    work = [(init, 0)]
    while work:
        cfg, steps = work.pop()
        q = cfg[0]
        if q in m.accept:
            count += 1
            continue
        if q in m.reject:
            continue
        if steps >= step_cap:
            truncated = True
            continue
        succ, capped = successors(m, cfg, x, stack_cap)
        if capped:
            truncated = True
        for c, _w in sorted(succ, key=repr, reverse=True):
            work.append((c, steps + 1))
    return count, truncated


def accepting_reachable(m, x, max_nodes: int = DEFAULT_MAX_NODES) -> bool:
    """Existential membership: is some accepting configuration reachable?"""
    g = build_config_graph(m, x, max_nodes=max_nodes)
    return bool(g.accepting)


# ---------------------------------------------------------------------------
# language-level verdicts


@dataclass
class Mode:
    """Threshold semantics for turning probabilities into verdicts."""

    kind: str  # exact | one_sided | bounded | existential
    threshold: Fraction = HALF  # acceptance threshold for one_sided
    epsilon: Fraction = ZERO  # error bound for bounded

    @staticmethod
    def exact():
        return Mode("exact")

    @staticmethod
    def one_sided(threshold=HALF):
        return Mode("one_sided", threshold=Fraction(threshold))

    @staticmethod
    def bounded(epsilon):
        return Mode("bounded", epsilon=Fraction(epsilon))

    @staticmethod
    def existential():
        return Mode("existential")


def verdict_of(report: ProbabilityReport, mode: Mode) -> str:
    if mode.kind == "one_sided":
        if report.p_acc >= mode.threshold:
            return ACCEPT
        if report.p_rej == ONE:
            return REJECT
        return UNRESOLVED
    # paper thresholds: accept iff p_acc > 1/2, reject iff p_rej >= 1/2
    if report.p_acc > HALF:
        return ACCEPT
    if report.p_rej >= HALF:
        return REJECT
    return UNRESOLVED


@dataclass
class LanguageMap:
    verdicts: dict  # string tuple -> verdict
    margin_violations: list = field(default_factory=list)
    reports: dict = field(default_factory=dict)

    def language(self) -> set:
        return {x for x, v in self.verdicts.items() if v == ACCEPT}


def all_strings(alphabet, upto: int):
    syms = sorted(alphabet, key=repr)
    layer = [()]
    for n in range(upto + 1):
        if n > 0:
            layer = [s + (a,) for s in layer for a in syms]
        yield from layer


def decide_language_upto(m, upto: int, mode: Mode | None = None,
                         keep_reports: bool = False,
                         step_cap: int = DEFAULT_STEP_CAP,
                         max_nodes: int = DEFAULT_MAX_NODES) -> LanguageMap:
    """Verdict for every string of length <= upto under the given mode."""
    if mode is None:
        mode = Mode.existential() if boolean_weighted(m) else Mode.exact()
    alpha = (m.alphabet.input_symbols if isinstance(m, LimitedAutomaton)
             else m.input_symbols)
    out = LanguageMap({})
    for x in all_strings(alpha, upto):
        if mode.kind == "existential":
            out.verdicts[x] = ACCEPT if accepting_reachable(m, x, max_nodes) else REJECT
            continue
        g = build_config_graph(m, x, max_nodes=max_nodes)
        rep = acceptance_probability(g)
        v = verdict_of(rep, mode)
        out.verdicts[x] = v
        if keep_reports:
            out.reports[x] = rep
        if mode.kind == "bounded":
            eps = mode.epsilon
            if not (rep.p_acc >= ONE - eps or rep.p_rej >= ONE - eps):
                out.margin_violations.append((x, rep.p_acc, rep.p_rej))
    return out


# ---------------------------------------------------------------------------
# dynamic corroboration helpers (used by tests)


def check_level_monotone(m: LimitedAutomaton, x) -> bool:
    """Every reachable rewrite keeps cell levels non-decreasing and <= k."""
    g = build_config_graph(m, x)
    lv = m.alphabet.level
    for nid, cfg in enumerate(g.configs):
        _q, pos, tape = cfg
        for t, _w in g.edges[nid]:
            ntape = g.configs[t][2]
            for a, b in zip(tape, ntape):
                if a != b:
                    if lv(b) < lv(a) or lv(b) > m.k:
                        return False
    return True


def check_blank_run_discipline(m: LimitedAutomaton, x) -> bool:
    """Within maximal blank runs the state and direction never change.

    Dynamic corroboration of is_blank_skipping: every reachable blank read
    must keep the state, keep the tape, and each state must cross blanks in
    one direction only.
    """
    blank = m.alphabet.blank
    g = build_config_graph(m, x)
    direction_of: dict = {}
    for nid, cfg in enumerate(g.configs):
        q, pos, tape = cfg
        if tape[pos] != blank or q in m.halting:
            continue
        for t, _w in g.edges[nid]:
            p, npos, ntape = g.configs[t]
            if p != q or ntape != tape:
                return False
            d = npos - pos
            if direction_of.setdefault(q, d) != d:
                return False
    return True
