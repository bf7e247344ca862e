"""Sparse exact linear algebra over rationals for absorption problems.

Everything here works on the transient part of a finite substochastic chain:
given row-major sparse Q (transient-to-transient) and a right-hand side, solve
(I - Q) x = b by sparse Gaussian elimination with exact Fractions.  Strongly
connected components are condensed first so unreachable or recurrent blocks
never enter the elimination.
"""

from __future__ import annotations

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def strongly_connected_components(n: int, succ) -> list[list[int]]:
    """Tarjan's algorithm, iterative; succ(v) yields successor vertices.

    Returns components in reverse topological order (sinks first).
    """
    index = [0] * n
    low = [0] * n
    state = [0] * n  # 0 unvisited, 1 on stack, 2 done
    comp_stack: list[int] = []
    comps: list[list[int]] = []
    counter = 1
    for root in range(n):
        if state[root]:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        state[root] = 1
        comp_stack.append(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if state[w] == 0:
                    index[w] = low[w] = counter
                    counter += 1
                    state[w] = 1
                    comp_stack.append(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if state[w] == 1:
                    if index[w] < low[v]:
                        low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = comp_stack.pop()
                    state[w] = 2
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def solve_identity_minus(q_rows: list[dict[int, Fraction]],
                         b: list[Fraction]) -> list[Fraction]:
    """Solve (I - Q) x = b exactly; Q given as sparse rows {col: weight}.

    The system must be nonsingular (true whenever every state can escape its
    strongly connected component with positive probability, which absorption
    systems restricted to escaping states guarantee).
    """
    n = len(q_rows)
    # rows of (I - Q)
    rows = []
    for i, r in enumerate(q_rows):
        row = {j: -w for j, w in r.items() if w != 0}
        row[i] = row.get(i, ZERO) + ONE
        if row[i] == 0:
            del row[i]
        rows.append(row)
    rhs = list(b)
    # order elimination by SCC condensation: eliminate sink components first
    comps = strongly_connected_components(n, lambda v: iter(q_rows[v].keys()))
    order = [v for comp in comps for v in comp]
    pos = {v: k for k, v in enumerate(order)}

    cols: dict[int, set[int]] = {j: set() for j in range(n)}
    for i, row in enumerate(rows):
        for j in row:
            cols[j].add(i)

    solved: dict[int, Fraction] = {}
    eliminated = [False] * n
    for v in sorted(range(n), key=lambda v: pos[v]):
        row = rows[v]
        piv = row.get(v, ZERO)
        # substochastic systems restricted to escaping states are nonsingular
        assert piv != 0, "singular absorption system"
        inv = ONE / piv
        if inv != ONE:
            for j in list(row):
                row[j] *= inv
            rhs[v] *= inv
        eliminated[v] = True
        for i in list(cols[v]):
            if i == v or eliminated[i]:
                continue
            other = rows[i]
            factor = other.get(v)
            if not factor:
                continue
            del other[v]
            cols[v].discard(i)
            for j, w in row.items():
                if j == v:
                    continue
                nv = other.get(j, ZERO) - factor * w
                if nv == 0:
                    other.pop(j, None)
                    cols[j].discard(i)
                else:
                    other[j] = nv
                    cols[j].add(i)
            rhs[i] -= factor * rhs[v]

    # back substitution in reverse elimination order
    x = [ZERO] * n
    for v in sorted(range(n), key=lambda v: pos[v], reverse=True):
        row = rows[v]
        val = rhs[v]
        for j, w in row.items():
            if j != v:
                val -= w * x[j]
        x[v] = val
    return x
