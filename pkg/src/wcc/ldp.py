"""Pairs of independent walks: the product chain, the pair rate function, the
entropy maximization over close typical pairs, and the resulting asymptotic rates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog, minimize

from .bounds import collision_and_distance
from .graph import Edge, LabeledGraph
from .markov import GapReport, MarkovChain, entropy_rate, spectral_gaps

LN2 = math.log(2)
FEAS_TOL = 1e-10


class OptimizationError(RuntimeError):
    pass


class InfeasibleError(ValueError):
    pass


@dataclass(frozen=True)
class ProductChain:
    """Two independent copies of ``base`` run side by side.

    Product vertex ``(u, v)`` has index ``u |V| + v``; product edge ``(e, e')``
    has index ``e |E| + e'``.
    """

    base: MarkovChain

    @cached_property
    def graph(self) -> LabeledGraph:
        g = self.base.graph
        nv, ne = g.num_vertices, g.num_edges
        verts = tuple(f"{a}|{b}" for a in g.vertices for b in g.vertices)
        alpha = tuple(f"{a}|{b}" for a in g.alphabet for b in g.alphabet)
        na = len(g.alphabet)
        edges = []
        for e in g.edges:
            for f in g.edges:
                edges.append(
                    Edge(e.id * ne + f.id, e.src * nv + f.src, e.dst * nv + f.dst, e.label * na + f.label)
                )
        return LabeledGraph(alpha, verts, tuple(edges))

    @cached_property
    def chain(self) -> MarkovChain:
        p = self.base.edge_prob
        return MarkovChain(self.graph, tuple(a * b for a in p for b in p))

    @cached_property
    def mismatch(self) -> np.ndarray:
        g = self.base.graph
        return np.array([float(e.label != f.label) for e in g.edges for f in g.edges])

    @cached_property
    def gaps(self) -> GapReport:
        return spectral_gaps(self.chain)

    def vertex_index(self, u: int, v: int) -> int:
        return u * self.base.graph.num_vertices + v

    def expected_mismatch(self) -> Fraction:
        return sum((p for p, m in zip(self.chain.edge_prob, self.mismatch) if m), Fraction(0))

    def support_size(self) -> tuple[int, int]:
        """Product vertices and product edges carrying positive mass."""
        return (
            sum(1 for x in self.chain.pi if x > 0),
            sum(1 for x in self.chain.edge_prob if x > 0),
        )


def build_product_chain(chain: MarkovChain) -> ProductChain:
    return ProductChain(chain)


@dataclass(frozen=True)
class JointMeasure:
    pc: ProductChain
    q: np.ndarray

    def vertex_mass(self) -> np.ndarray:
        src = np.array([e.src for e in self.pc.graph.edges])
        return np.bincount(src, weights=self.q, minlength=self.pc.graph.num_vertices)

    def marginals(self) -> tuple[np.ndarray, np.ndarray]:
        ne = self.pc.base.graph.num_edges
        m = self.q.reshape(ne, ne)
        return m.sum(axis=1), m.sum(axis=0)

    def expected_mismatch(self) -> float:
        return float(self.q @ self.pc.mismatch)

    def entropy_bits(self) -> float:
        return _entropy_nats(self.q, _src_index(self.pc), self.pc.graph.num_vertices) / LN2

    def violations(self, delta: float, zeta: float) -> dict[str, float]:
        g = self.pc.graph
        src = np.array([e.src for e in g.edges])
        dst = np.array([e.dst for e in g.edges])
        nv = g.num_vertices
        flow = np.bincount(src, self.q, nv) - np.bincount(dst, self.q, nv)
        p = np.array([float(x) for x in self.pc.base.edge_prob])
        m1, m2 = self.marginals()
        band = max(np.max(np.abs(m1 - p)), np.max(np.abs(m2 - p))) - zeta
        return {
            "negativity": float(max(0.0, -self.q.min())),
            "simplex": abs(float(self.q.sum()) - 1.0),
            "shift": float(np.abs(flow).max()),
            "band": float(max(0.0, band)),
            "distance": float(max(0.0, self.expected_mismatch() - delta)),
        }


def _src_index(pc: ProductChain) -> np.ndarray:
    return np.array([e.src for e in pc.graph.edges])


def _entropy_nats(q: np.ndarray, src: np.ndarray, nv: int) -> float:
    qv = np.bincount(src, weights=q, minlength=nv)
    pos = q > 0
    return float(-(q[pos] * np.log(q[pos] / qv[src[pos]])).sum())


def ldp_rate_function(qm: JointMeasure, pc: ProductChain) -> float:
    """``sum_e q(e) log(q(e | sigma(e)) / p'(e | sigma(e)))`` in nats; ``inf`` off the support."""
    q = qm.q
    qv = qm.vertex_mass()
    total = 0.0
    for k, e in enumerate(pc.graph.edges):
        if q[k] <= 0:
            continue
        p = pc.chain.trans(k)
        if p == 0:
            return math.inf
        total += q[k] * math.log(q[k] / qv[e.src] / float(p))
    return total


@dataclass(frozen=True)
class MaxEntropyResult:
    sup_entropy_bits: float
    measure: JointMeasure
    iterations: int
    max_violation: float


def _constraints(pc: ProductChain, keep: np.ndarray, delta: float, zeta: float):
    """Linear equality ``A_eq q = b_eq`` and inequality ``A_ub q <= b_ub`` systems on kept edges."""
    g = pc.graph
    ne = pc.base.graph.num_edges
    nv = g.num_vertices
    idx = np.flatnonzero(keep)
    k = idx.size
    p = np.array([float(x) for x in pc.base.edge_prob])
    eq_rows, eq_rhs, ub_rows, ub_rhs = [], [], [], []
    eq_rows.append(np.ones(k))
    eq_rhs.append(1.0)
    flow = np.zeros((nv, k))
    for j, kk in enumerate(idx):
        e = g.edges[kk]
        flow[e.src, j] += 1
        flow[e.dst, j] -= 1
    # one balance row is implied by the others and the simplex row
    live = [v for v in range(nv) if np.any(flow[v])]
    for v in live[:-1]:
        eq_rows.append(flow[v])
        eq_rhs.append(0.0)
    first, second = idx // ne, idx % ne
    for e in range(ne):
        for which in (first, second):
            row = (which == e).astype(float)
            if zeta == 0:
                eq_rows.append(row)
                eq_rhs.append(p[e])
            else:
                ub_rows.append(row)
                ub_rhs.append(p[e] + zeta)
                ub_rows.append(-row)
                ub_rhs.append(zeta - p[e])
    mis = pc.mismatch[idx]
    if np.any(mis):
        ub_rows.append(mis)
        ub_rhs.append(delta)
    a_eq, b_eq = np.array(eq_rows), np.array(eq_rhs)
    a_ub = np.array(ub_rows) if ub_rows else np.zeros((0, k))
    b_ub = np.array(ub_rhs) if ub_rhs else np.zeros(0)
    return idx, a_eq, b_eq, a_ub, b_ub


def max_entropy_over_bad_set(
    pc: ProductChain, delta: float, zeta: float, tol: float = 1e-8, max_iter: int = 10**5
) -> MaxEntropyResult:
    """Largest entropy rate (bits) of a stationary pair measure with both marginals
    within ``zeta`` of ``P`` and expected mismatch at most ``delta``."""
    if not 0 <= delta <= 1 or zeta < 0:
        raise ValueError("need delta in [0, 1] and zeta >= 0")
    keep = np.array([float(x) > 0 for x in pc.chain.edge_prob])
    if delta == 0:
        keep &= pc.mismatch == 0
    if not keep.any():
        raise InfeasibleError("no product edge survives the support restrictions")
    idx, a_eq, b_eq, a_ub, b_ub = _constraints(pc, keep, delta, zeta)
    found = _relative_interior(a_eq, b_eq, a_ub, b_ub)
    if found is None:
        raise InfeasibleError(f"constraint set is empty (delta={delta}, zeta={zeta})")
    x0, live = found
    if not live.all():
        # edges that vanish on the whole feasible set are removed so the
        # start point has positive mass everywhere
        keep = np.zeros_like(keep)
        keep[idx[live]] = True
        idx, a_eq, b_eq, a_ub, b_ub = _constraints(pc, keep, delta, zeta)
        x0 = x0[live]
    src = np.array([pc.graph.edges[i].src for i in idx])
    nv = pc.graph.num_vertices
    floor = 1e-300
    # optimize over the affine hull of the equalities: x = base + basis @ y
    basis = null_space(a_eq)
    # LP tolerances are loose; snap the start back onto the equalities
    base = x0 - np.linalg.lstsq(a_eq, a_eq @ x0 - b_eq, rcond=None)[0]

    def neg_h(y):
        x = np.maximum(base + basis @ y, 0.0)
        qv = np.bincount(src, weights=x, minlength=nv)
        pos = x > floor
        return float((x[pos] * np.log(x[pos] / qv[src[pos]])).sum())

    def neg_h_grad(y):
        x = np.maximum(base + basis @ y, floor)
        qv = np.bincount(src, weights=x, minlength=nv)
        return basis.T @ np.log(x / qv[src])

    a_in = np.vstack([-basis] + ([a_ub @ basis] if a_ub.size else []))
    b_in = np.concatenate([base] + ([b_ub - a_ub @ base] if a_ub.size else []))
    iterations = 0
    if basis.shape[1]:
        res = minimize(
            neg_h, np.zeros(basis.shape[1]), jac=neg_h_grad, method="SLSQP",
            constraints=[{"type": "ineq", "fun": lambda y: b_in - a_in @ y,
                          "jac": lambda y: -a_in}],
            options={"ftol": min(tol * LN2, 1e-12), "maxiter": max_iter},
        )
        if not res.success and res.status != 8:
            # status 8 (positive directional derivative in line search) occurs at
            # the optimum when the entropy gradient is unbounded near zero mass
            raise OptimizationError(f"entropy maximization did not converge: {res.message}")
        x = base + basis @ res.x
        iterations = int(res.nit)
    else:
        x = base
    jm, viol = _measure(pc, idx, x, delta, zeta)
    if viol > FEAS_TOL:
        # SLSQP may stop slightly outside an inequality; slide toward the
        # feasible start point just far enough to restore feasibility
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = (lo + hi) / 2
            if _measure(pc, idx, (1 - mid) * x + mid * base, delta, zeta)[1] <= FEAS_TOL:
                hi = mid
            else:
                lo = mid
        jm, viol = _measure(pc, idx, (1 - hi) * x + hi * base, delta, zeta)
        if viol > FEAS_TOL:
            raise OptimizationError(f"entropy maximizer violates the constraints by {viol:.3g}")
    return MaxEntropyResult(jm.entropy_bits(), jm, iterations, viol)


def _measure(pc: ProductChain, idx: np.ndarray, x: np.ndarray, delta: float, zeta: float):
    q = np.zeros(pc.graph.num_edges)
    q[idx] = np.maximum(x, 0.0)
    jm = JointMeasure(pc, q)
    return jm, max(jm.violations(delta, zeta).values())


def _relative_interior(a_eq, b_eq, a_ub, b_ub, tiny: float = 1e-12):
    """A feasible point positive on every coordinate that some feasible point makes
    positive, with the mask of those coordinates; ``None`` if infeasible.

    One LP per coordinate maximizes that coordinate; the average of the
    maximizers lies in the relative interior of the face they span.
    """
    k = a_eq.shape[1]
    points, live = [], np.zeros(k, dtype=bool)
    for j in range(k):
        if live[j]:
            continue
        c = np.zeros(k)
        c[j] = -1.0
        lp = linprog(
            c, A_ub=a_ub if a_ub.size else None, b_ub=b_ub if a_ub.size else None,
            A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * k, method="highs",
        )
        if lp.status == 2:
            return None
        if lp.status != 0:
            raise OptimizationError(f"support LP failed: {lp.message}")
        x = np.maximum(lp.x, 0.0)
        live |= x > tiny
        points.append(x)
    return np.mean(points, axis=0), live


@dataclass(frozen=True)
class AsymptoticRates:
    r1: float
    r2: float
    r_ec: float
    delta_prefix: float
    delta_code: float
    sup_entropy: float
    entropy: float
    zeta_constant: float
    alpha: float
    zeta: float

    def lines(self) -> list[str]:
        return [
            f"alpha {self.alpha!r}",
            f"zeta {self.zeta!r}",
            f"entropy {self.entropy!r} bits/symbol",
            f"delta_prefix {self.delta_prefix!r} fraction",
            f"delta_code {self.delta_code!r} fraction",
            f"sup_entropy_bad_set {self.sup_entropy!r} bits/symbol",
            f"zeta_constant {self.zeta_constant!r} bits (proof-derived constant)",
            f"R1 {self.r1!r} bits/symbol",
            f"R2 {self.r2!r} bits/symbol",
            f"R_ec {self.r_ec!r} bits/symbol",
        ]


def rates_at_target(chain: MarkovChain, alpha: float, delta_prefix: float, zeta: float) -> AsymptoticRates:
    """Rates for a prefix-level distance target; ``alpha`` may be 1 here to read off limits."""
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    h = entropy_rate(chain)
    pc = build_product_chain(chain)
    sup = max_entropy_over_bad_set(pc, delta_prefix, zeta).sup_entropy_bits
    const = -sum(math.log2(float(p)) for p in chain.trans_probs if p > 0)
    r1 = max(0.0, alpha * (2 * h - sup - 2 * const * zeta))
    r2 = max(0.0, alpha * (h - 2 * const * zeta))
    return AsymptoticRates(
        r1=r1, r2=r2, r_ec=min(r1, r2), delta_prefix=delta_prefix,
        delta_code=alpha * delta_prefix, sup_entropy=sup, entropy=h,
        zeta_constant=const, alpha=alpha, zeta=zeta,
    )


def asymptotic_rates(spec, eps: float, zeta: float) -> AsymptoticRates:
    s, dist = collision_and_distance(spec.chain)
    if not 0 < eps < float(dist):
        raise ValueError(f"eps must lie in (0, 1 - S) = (0, {float(dist):.6g})")
    return rates_at_target(spec.chain, float(spec.alpha), float(dist) - eps, zeta)
