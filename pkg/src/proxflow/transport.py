"""Exact discrete 2-Wasserstein distance by the transportation simplex.

The solver works on the bipartite transportation polytope. A basis is a
spanning tree on ``m`` source and ``n`` target nodes with ``m + n - 1``
cells. Dual potentials come from a tree traversal, the entering cell from
the reduced costs, and the leaving cell from the unique cycle the entering
cell closes. Pricing is Dantzig's most-negative rule; after a degenerate
pivot the solver switches to Bland's smallest-index rule until the objective
strictly decreases again, which rules out cycling.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveValue, SolverStall
from .measures import ParticleMeasure, energy
from .potentials import Potential

MARGINAL_TOL = 1e-9
CERT_TOL = 1e-8


@dataclass(frozen=True)
class TransportPlan:
    rows: np.ndarray
    cols: np.ndarray
    mass: np.ndarray
    source_n: int
    target_n: int

    def dense(self) -> np.ndarray:
        G = np.zeros((self.source_n, self.target_n))
        np.add.at(G, (self.rows, self.cols), self.mass)
        return G

    def entries(self):
        return list(zip(self.rows.tolist(), self.cols.tolist(), self.mass.tolist()))

    def __len__(self) -> int:
        return len(self.mass)


@dataclass
class SolveStats:
    pivots: int = 0
    degenerate: int = 0


def squared_distances(X, Y) -> np.ndarray:
    X = np.atleast_2d(X)
    Y = np.atleast_2d(Y)
    return np.sum((X[:, None, :] - Y[None, :, :]) ** 2, axis=2)


def _northwest_corner(a, b):
    """Initial basic feasible solution; always returns exactly ``m + n - 1`` cells."""
    m, n = len(a), len(b)
    a = a.astype(float).copy()
    b = b.astype(float).copy()
    cells, flows = [], []
    i = j = 0
    while i < m and j < n:
        q = min(a[i], b[j])
        cells.append((i, j))
        flows.append(q)
        a[i] -= q
        b[j] -= q
        if i == m - 1 and j == n - 1:
            break
        # advance exactly one index so the basis stays a spanning tree
        if (a[i] <= b[j] and i < m - 1) or j == n - 1:
            i += 1
        else:
            j += 1
    return cells, flows


class _Basis:
    """Spanning-tree basis with incrementally maintained dual potentials."""

    def __init__(self, m, n, cells, flows, C):
        self.m, self.n = m, n
        self.C = C
        self.flow = np.zeros((m, n))
        self.basic = np.zeros((m, n), dtype=bool)
        self.adj = [set() for _ in range(m + n)]
        for (i, j), q in zip(cells, flows):
            self.flow[i, j] = q
            self.basic[i, j] = True
            self.adj[i].add(m + j)
            self.adj[m + j].add(i)
        self.u = np.zeros(m)
        self.v = np.zeros(n)
        self._solve_potentials()

    def _solve_potentials(self):
        """Solve ``u_i + v_j = C_ij`` on basic cells with ``u_0 = 0``."""
        m, C = self.m, self.C
        seen = np.zeros(m + self.n, dtype=bool)
        seen[0] = True
        self.u[0] = 0.0
        queue = deque([0])
        while queue:
            node = queue.popleft()
            for nb in self.adj[node]:
                if seen[nb]:
                    continue
                seen[nb] = True
                if node < m:
                    self.v[nb - m] = C[node, nb - m] - self.u[node]
                else:
                    self.u[nb] = C[nb, node - m] - self.v[node - m]
                queue.append(nb)
        if not seen.all():
            raise SolverStall("basis is not a spanning tree")

    def path(self, i, j):
        """Basic cells on the tree path from source ``i`` to target ``j``."""
        m = self.m
        start, goal = m + j, i
        parent = {start: None}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            if node == goal:
                break
            for nb in self.adj[node]:
                if nb not in parent:
                    parent[nb] = node
                    queue.append(nb)
        cells = []
        node = goal
        while parent[node] is not None:
            prev = parent[node]
            cells.append((node, prev - m) if node < m else (prev, node - m))
            node = prev
        return cells

    def _component(self, root, cut):
        """Nodes reachable from ``root`` without crossing the edge ``cut``."""
        a, b = cut
        seen = {root}
        stack = [root]
        while stack:
            node = stack.pop()
            for nb in self.adj[node]:
                if nb in seen or {node, nb} == {a, b}:
                    continue
                seen.add(nb)
                stack.append(nb)
        return seen

    def pivot(self, enter, leave, reduced_cost):
        m = self.m
        li, lj = leave
        ei, ej = enter
        # the target side of the cut shifts its potentials by the reduced cost
        side = self._component(m + ej, (li, m + lj))
        rows = [k for k in side if k < m]
        cols = [k - m for k in side if k >= m]
        self.u[rows] -= reduced_cost
        self.v[cols] += reduced_cost
        self.adj[li].discard(m + lj)
        self.adj[m + lj].discard(li)
        self.adj[ei].add(m + ej)
        self.adj[m + ej].add(ei)
        self.basic[leave] = False
        self.basic[enter] = True


def transport_simplex(a, b, C, max_pivots: int | None = None, stats: SolveStats | None = None,
                      basis_cells=None):
    """Minimise ``<C, G>`` over couplings of ``a`` and ``b``; returns ``(G, u, v, cells)``.

    ``basis_cells`` optionally supplies a starting basis (for instance the
    optimal basis of a nearby problem with the same marginals); by default the
    north-west corner rule seeds the simplex.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    C = np.asarray(C, dtype=float)
    m, n = C.shape
    if basis_cells is None:
        cells, flows = _northwest_corner(a, b)
    else:
        cells = [tuple(c) for c in basis_cells]
        flows = _tree_flows(a, b, cells)
    basis = _Basis(m, n, cells, flows, C)
    scale = max(1.0, float(np.max(np.abs(C))))
    rtol = 1e-12 * scale
    max_pivots = max_pivots or 50 * (m + n) * max(m, n) + 1000
    stats = stats if stats is not None else SolveStats()
    bland = False
    for _ in range(max_pivots):
        R = C - basis.u[:, None] - basis.v[None, :]
        R[basis.basic] = 0.0
        neg = R < -rtol
        if not neg.any():
            basis._solve_potentials()
            return basis.flow.copy(), basis.u.copy(), basis.v.copy(), list(zip(*np.nonzero(basis.basic)))
        if bland:
            flat = int(np.flatnonzero(neg.ravel())[0])
        else:
            flat = int(np.argmin(R))
        ei, ej = divmod(flat, n)
        path = basis.path(ei, ej)
        # the path alternates: cells at even positions lose flow, odd ones gain
        minus = path[0::2]
        plus = path[1::2]
        theta = min(basis.flow[c] for c in minus)
        leaving = min((c for c in minus if basis.flow[c] <= theta), key=lambda c: c[0] * n + c[1])
        for c in minus:
            basis.flow[c] -= theta
        for c in plus:
            basis.flow[c] += theta
        basis.flow[ei, ej] = theta
        basis.flow[leaving] = 0.0
        basis.pivot((ei, ej), leaving, R[ei, ej])
        stats.pivots += 1
        degenerate = theta <= 1e-15
        stats.degenerate += int(degenerate)
        bland = degenerate
        if stats.pivots % 500 == 0:
            # keep the incremental potentials from drifting
            basis._solve_potentials()
    raise SolverStall(f"no optimal basis after {max_pivots} pivots")


def _tree_flows(a, b, cells):
    """Flows on a spanning-tree basis, peeled leaf by leaf."""
    m, n = len(a), len(b)
    if len(cells) != m + n - 1:
        raise ValueError("a basis needs exactly m + n - 1 cells")
    a = a.astype(float).copy()
    b = b.astype(float).copy()
    adj = [set() for _ in range(m + n)]
    for i, j in cells:
        adj[i].add(m + j)
        adj[m + j].add(i)
    flow = {}
    leaves = [k for k in range(m + n) if len(adj[k]) == 1]
    while leaves:
        node = leaves.pop()
        if len(adj[node]) != 1:
            continue
        (other,) = adj[node]
        if node < m:
            cell, q = (node, other - m), a[node]
        else:
            cell, q = (other, node - m), b[node - m]
        q = max(q, 0.0)
        flow[cell] = q
        a[cell[0]] -= q
        b[cell[1]] -= q
        adj[node].discard(other)
        adj[other].discard(node)
        if len(adj[other]) == 1:
            leaves.append(other)
    if len(flow) != len(cells):
        raise ValueError("basis cells do not form a spanning tree")
    return [flow[c] for c in cells]


def _certify(G, u, v, a, b, C):
    if np.any(np.abs(G.sum(axis=1) - a) > MARGINAL_TOL) or np.any(np.abs(G.sum(axis=0) - b) > MARGINAL_TOL):
        raise SolverStall("plan violates the marginal constraints")
    primal = float(np.sum(G * C))
    dual = float(u @ a + v @ b)
    if abs(primal - dual) > CERT_TOL * max(1.0, abs(primal)):
        raise SolverStall(f"duality gap {primal - dual:.3e} after termination")
    reduced = C - u[:, None] - v[None, :]
    if np.min(reduced) < -CERT_TOL * max(1.0, float(np.max(np.abs(C)))):
        raise SolverStall("dual infeasible after termination")
    return primal


def wasserstein2(mu: ParticleMeasure, nu: ParticleMeasure, stats: SolveStats | None = None):
    """``(d_W(mu, nu), optimal plan)`` computed exactly."""
    C = squared_distances(mu.positions, nu.positions)
    if mu.n == 1 or nu.n == 1:
        G = np.outer(mu.masses, nu.masses)
        cost = float(np.sum(G * C))
    else:
        G, u, v, _ = transport_simplex(mu.masses, nu.masses, C, stats=stats)
        G[G < 0.0] = 0.0
        cost = _certify(G, u, v, mu.masses, nu.masses, C)
    rows, cols = np.nonzero(G > 0.0)
    plan = TransportPlan(rows, cols, G[rows, cols], mu.n, nu.n)
    return math.sqrt(max(cost, 0.0)), plan


def w2(mu: ParticleMeasure, nu: ParticleMeasure) -> float:
    return wasserstein2(mu, nu)[0]


def distance_to_singletons(mu: ParticleMeasure):
    """Distance to the set of Dirac masses and the minimising center (the barycenter)."""
    center = mu.center_of_mass()
    d2 = float(mu.masses @ np.sum((mu.positions - center) ** 2, axis=1))
    return math.sqrt(max(d2, 0.0)), center


def evi_residual(mu_t: ParticleMeasure, mu_th: ParticleMeasure, h: float, nu: ParticleMeasure,
                 kappa_evi: float, W: Potential, V: Potential, t: float = 0.0) -> float:
    """Finite-difference residual of the evolution variational inequality.

    ``(d^2(mu(t+h), nu) - d^2(mu(t), nu)) / (2h) + kappa d^2(mu(t), nu) - (E(nu) - E(mu(t)))``;
    nonpositive up to ``O(h)`` for a gradient-flow solution.
    """
    d0 = w2(mu_t, nu) ** 2
    d1 = w2(mu_th, nu) ** 2
    return 0.5 * (d1 - d0) / h + kappa_evi * d0 - (energy(nu, W, V, t) - energy(mu_t, W, V, t))


def fit_decay_rate(series) -> float:
    """Least-squares slope of ``log(value)`` against ``t``."""
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) < 3:
        raise ValueError("need at least three (t, value) samples")
    t, y = arr[:, 0], arr[:, 1]
    if np.any(y <= 0.0):
        raise NonPositiveValue("decay fit needs strictly positive values")
    slope, _ = np.polyfit(t, np.log(y), 1)
    return float(slope)
