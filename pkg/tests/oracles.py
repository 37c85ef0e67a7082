"""Slow, obviously-correct reference implementations used as test oracles.

Vectors are handled as lists of 0/1 per wire so none of the packed-integer
machinery of the package is reused.
"""
import itertools


def bits(x, n):
    return [int(ch) for ch in format(x, f"0{n}b")]


def unbits(b):
    return int("".join(map(str, b)), 2) if b else 0


def gate_levels(n, gates):
    """Level of each gate: one past the deepest gate already on its wires."""
    wire_level = [0] * n
    out = []
    for controls, target in gates:
        lvl = 1 + max(wire_level[w] for w in (*controls, target))
        for w in (*controls, target):
            wire_level[w] = lvl
        out.append(lvl)
    return out


def run(n, gates, x):
    state = bits(x, n)
    for controls, target in gates:
        if all(state[c] for c in controls):
            state[target] ^= 1
    return unbits(state)


def level_states(n, gates, x):
    """State after every level 0..d (gates of a level fire in list order)."""
    lv = gate_levels(n, gates)
    d = max(lv, default=0)
    state = bits(x, n)
    out = [list(state)]
    for j in range(1, d + 1):
        for (controls, target), l in zip(gates, lv):
            if l == j and all(state[c] for c in controls):
                state[target] ^= 1
        out.append(list(state))
    return out


def gate_inputs(n, gates, x):
    lv = gate_levels(n, gates)
    states = level_states(n, gates, x)
    pats = []
    for (controls, target), l in zip(gates, lv):
        pats.append(tuple(states[l - 1][w] for w in (*controls, target)))
    return pats


def complete_sa(n, gates, tests):
    seen = None
    for t in tests:
        st = level_states(n, gates, t)
        if seen is None:
            seen = [[set() for _ in range(n)] for _ in st]
        for j, s in enumerate(st):
            for w in range(n):
                seen[j][w].add(s[w])
    if seen is None:
        return False
    return all(len(v) == 2 for row in seen for v in row)


def complete_cell(n, gates, tests):
    need = [set(itertools.product((0, 1), repeat=1 + len(c))) for c, _ in gates]
    for t in tests:
        for g, pat in enumerate(gate_inputs(n, gates, t)):
            need[g].discard(pat)
    return all(not s for s in need)


def min_size(n, gates, model="sa", limit=8):
    check = complete_sa if model == "sa" else complete_cell
    for k in range(0, limit + 1):
        for combo in itertools.combinations(range(1 << n), k):
            if check(n, gates, combo):
                return k
    return None


def min_cover(n_rows, columns, costs, groups=()):
    """Cheapest feasible column subset by exhaustive search (None if none)."""
    best = None
    for mask in range(1 << len(columns)):
        chosen = [i for i in range(len(columns)) if mask >> i & 1]
        if any(sum(1 for i in g if i in chosen) > 1 for g in groups):
            continue
        cov = 0
        for i in chosen:
            cov |= columns[i]
        if cov != (1 << n_rows) - 1:
            continue
        cost = sum(costs[i] for i in chosen)
        if best is None or cost < best:
            best = cost
    return best
