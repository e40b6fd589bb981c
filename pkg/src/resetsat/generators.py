"""Instance generators for tests and desk-scale experiments.

Two benchmark families pull the reset decision in opposite directions:

* :func:`parity_trap` hides a three-variable parity contradiction behind a
  large unsatisfiable Tseitin parity system.  Activity-keeping restarts
  stay inside the hard parity part; a reset that happens to float a core
  variable to the top finds the contradiction almost at once.
* :func:`adder_miter` is an equivalence check of two ripple-carry adder
  formulations next to a satisfiable random "environment" that plays no
  part in the proof.  Steady VSIDS focus stays on the miter; resets
  wander into the environment.
"""
from __future__ import annotations

import itertools

import networkx as nx
import numpy as np

from .formula import Formula


def random_kcnf(num_vars: int, num_clauses: int, k: int = 3, seed: int = 0) -> Formula:
    """Uniform random k-CNF: each clause has k distinct variables with
    random signs."""
    if k > num_vars:
        raise ValueError("k exceeds the number of variables")
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(num_clauses):
        vs = rng.choice(num_vars, size=k, replace=False) + 1
        signs = rng.integers(0, 2, size=k)
        clauses.append([int(v) if s else -int(v) for v, s in zip(vs, signs)])
    return Formula.from_lists(num_vars, clauses)


def xor_clauses(variables: list[int], parity: int) -> list[list[int]]:
    """CNF for ``sum(variables) % 2 == parity`` (2^(len-1) clauses)."""
    out = []
    for bits in itertools.product((0, 1), repeat=len(variables)):
        if sum(bits) % 2 != parity:
            # block this assignment
            out.append([-v if b else v for v, b in zip(variables, bits)])
    return out


def pigeonhole(pigeons: int, holes: int) -> Formula:
    """PHP(pigeons, holes); unsatisfiable when pigeons > holes."""
    def var(p, h):
        return p * holes + h + 1

    clauses = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p, q in itertools.combinations(range(pigeons), 2):
            clauses.append([-var(p, h), -var(q, h)])
    return Formula.from_lists(pigeons * holes, clauses)


def tseitin(num_nodes: int, degree: int = 3, seed: int = 0) -> tuple[int, list[list[int]]]:
    """Unsatisfiable Tseitin parity formula on a random regular graph.

    Returns ``(num_vars, clauses)``; edge variables are numbered in random
    order.
    """
    rng = np.random.default_rng(seed)
    graph = nx.random_regular_graph(degree, num_nodes, seed=int(rng.integers(2**31)))
    edges = [tuple(sorted(e)) for e in graph.edges()]
    order = rng.permutation(len(edges))
    var = {edges[i]: j + 1 for j, i in enumerate(order)}
    charges = rng.integers(0, 2, size=num_nodes)
    if charges.sum() % 2 == 0:
        charges[0] ^= 1
    clauses = []
    for u in sorted(graph.nodes()):
        incident = [var[tuple(sorted((u, w)))] for w in sorted(graph.neighbors(u))]
        clauses.extend(xor_clauses(incident, int(charges[u])))
    return len(edges), clauses


def parity_trap(num_nodes: int = 70, degree: int = 3, core_size: int = 3, seed: int = 0) -> Formula:
    """Tseitin parity distractor plus a small contradictory parity core.

    The core asks ``x1 ^ ... ^ xk`` to be both 0 and 1 over the
    ``core_size`` highest-numbered variables.
    """
    rng = np.random.default_rng(seed)
    n, clauses = tseitin(num_nodes, degree, seed)
    core = list(range(n + 1, n + core_size + 1))
    clauses = clauses + xor_clauses(core, 0) + xor_clauses(core, 1)
    order = rng.permutation(len(clauses))
    return Formula.from_lists(n + core_size, [clauses[i] for i in order])


class _Circuit:
    def __init__(self):
        self.num_vars = 0
        self.clauses: list[list[int]] = []

    def new(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def and_(self, a: int, b: int) -> int:
        o = self.new()
        self.clauses += [[-o, a], [-o, b], [o, -a, -b]]
        return o

    def or_(self, a: int, b: int) -> int:
        o = self.new()
        self.clauses += [[o, -a], [o, -b], [-o, a, b]]
        return o

    def xor(self, a: int, b: int) -> int:
        o = self.new()
        self.clauses += [[-o, a, b], [-o, -a, -b], [o, -a, b], [o, a, -b]]
        return o

    def ripple_adder(self, xs: list[int], ys: list[int], majority: bool) -> list[int]:
        """Sum bits (LSB first, carry-out last).  ``majority`` selects the
        three-product carry formulation instead of generate/propagate."""
        out = [self.xor(xs[0], ys[0])]
        carry = self.and_(xs[0], ys[0])
        for a, b in zip(xs[1:], ys[1:]):
            if majority:
                out.append(self.xor(a, self.xor(b, carry)))
                carry = self.or_(self.or_(self.and_(a, b), self.and_(a, carry)), self.and_(b, carry))
            else:
                t = self.xor(a, b)
                out.append(self.xor(t, carry))
                carry = self.or_(self.and_(a, b), self.and_(t, carry))
        out.append(carry)
        return out


def adder_miter(width: int = 32, env_vars: int = 200, env_ratio: float = 4.2,
                seed: int = 0) -> Formula:
    """UNSAT equivalence check of ``a + b`` against ``b + a`` built two
    ways, plus an independent satisfiable 3-CNF environment.

    Miter variables take indices 1..M (shuffled among themselves); the
    environment, a planted-solution random 3-CNF with ``env_ratio`` clauses
    per variable, takes the indices above M.
    """
    rng = np.random.default_rng(seed)
    c = _Circuit()
    xs = [c.new() for _ in range(width)]
    ys = [c.new() for _ in range(width)]
    s1 = c.ripple_adder(xs, ys, majority=False)
    s2 = c.ripple_adder(ys, xs, majority=True)
    c.clauses.append([c.xor(p, q) for p, q in zip(s1, s2)])

    m = c.num_vars
    perm = rng.permutation(m) + 1
    clauses = [[int(perm[abs(l) - 1]) * (1 if l > 0 else -1) for l in cl] for cl in c.clauses]

    hidden = rng.integers(0, 2, size=env_vars)
    target = int(env_ratio * env_vars)
    env: list[list[int]] = []
    while len(env) < target:
        vs = rng.choice(env_vars, size=3, replace=False)
        signs = rng.integers(0, 2, size=3)
        if any(signs[i] == hidden[vs[i]] for i in range(3)):
            env.append([int(m + 1 + vs[i]) * (1 if signs[i] else -1) for i in range(3)])

    allc = clauses + env
    order = rng.permutation(len(allc))
    return Formula.from_lists(m + env_vars, [allc[i] for i in order])


FAMILIES = {
    "parity-trap": parity_trap,
    "adder-miter": adder_miter,
}


def generate_family(name: str, count: int, seed: int = 0, **kwargs) -> list[Formula]:
    try:
        gen = FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    return [gen(seed=seed + i, **kwargs) for i in range(count)]
