"""Finite-length probability bounds: Bernstein tails for Markov chains, pool
reliability, bad-pair failure probability and the expurgated-code size."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .markov import GapReport, MarkovChain


class BoundsError(ValueError):
    pass


def _clamp(x: float) -> tuple[float, bool]:
    if x > 1.0:
        return 1.0, True
    if x < 0.0:
        return 0.0, True
    return x, False


@dataclass(frozen=True)
class BernsteinParams:
    """Tail of ``|sum f(X_i) - n E f| >= t`` for a bounded function of a chain.

    ``n_q`` is the non-stationarity constant of a point-mass start; ``None``
    means the chain starts in stationarity.
    """

    n: int
    t: float
    c: float
    v_f: float
    gap: float
    reversible: bool
    n_q: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise BoundsError("length must be positive")
        if self.c <= 0 or self.v_f < 0 or self.gap <= 0:
            raise BoundsError("need C > 0, V_f >= 0 and a positive gap")
        if self.n_q is not None and self.n_q < 1:
            raise BoundsError("N_q must be at least 1")


def bernstein_exponent(p: BernsteinParams) -> float:
    """Exponent ``E`` (nats) of the stationary tail ``2 exp(-E)``."""
    t = p.t
    if p.reversible:
        return t * t * p.gap / (4 * p.n * p.v_f + 10 * t * p.c)
    return t * t * p.gap / (8 * (p.n + 1 / p.gap) * p.v_f + 20 * t * p.c)


def bernstein_tail_raw(p: BernsteinParams) -> float:
    if p.t <= 0:
        return 2.0 if p.n_q is None else math.sqrt(2 * p.n_q)
    e = bernstein_exponent(p)
    if p.n_q is None:
        return 2 * math.exp(-e)
    return math.sqrt(2 * p.n_q) * math.exp(-e / 2)


def bernstein_tail(p: BernsteinParams) -> float:
    return _clamp(bernstein_tail_raw(p))[0]


def collision_and_distance(chain: MarkovChain) -> tuple[Fraction, Fraction]:
    """Label collision probability ``S`` and the expected relative distance ``1 - S``."""
    mass = [Fraction(0)] * len(chain.graph.alphabet)
    for e, p in zip(chain.graph.edges, chain.edge_prob):
        mass[e.label] += p
    s = sum(m * m for m in mass)
    return s, 1 - s


@dataclass(frozen=True)
class Reliability:
    eta_typ: float
    mass_lower: float
    root: int
    root_mass: float
    optimal_root: int
    pi_max: float
    mass_lower_optimal_root: float
    reversible: bool
    gap: float
    v_f: float
    clamped: bool


def _eta(alpha: float, zeta: float, v_f: float, gap: float, reversible: bool) -> float:
    if reversible:
        return alpha * zeta**2 * gap / (8 * v_f + 20 * zeta)
    return alpha * zeta**2 * gap / (16 * v_f * (1 + 1 / gap) + 40 * zeta)


def reliability_exponent(spec, gaps: GapReport) -> Reliability:
    """Typicality exponent and the lower bound on the pool's probability mass.

    The bound is evaluated at the pool's own root; the value at a root of
    maximal stationary mass is reported alongside.
    """
    chain = spec.chain
    pmin = float(chain.p_min)
    v_f = pmin * (1 - pmin)
    gap = gaps.bernstein_gap
    eta = _eta(float(spec.alpha), float(spec.zeta), v_f, gap, gaps.reversible)
    ne = spec.graph.num_edges
    pis = [float(x) for x in chain.pi]
    best = max(range(len(pis)), key=lambda v: (pis[v], -v))

    def mass(pr: float) -> tuple[float, bool]:
        # 1 - |E| sqrt(2/pi) exp(-n eta), computed in the log domain
        log_term = math.log(ne) + 0.5 * math.log(2 / pr) - spec.n * eta
        return _clamp(1 - math.exp(log_term) if log_term < 700 else -math.inf)

    m_root, c1 = mass(pis[spec.root])
    m_best, _ = mass(pis[best])
    return Reliability(
        eta_typ=eta,
        mass_lower=m_root,
        root=spec.root,
        root_mass=pis[spec.root],
        optimal_root=best,
        pi_max=pis[best],
        mass_lower_optimal_root=m_best,
        reversible=gaps.reversible,
        gap=gap,
        v_f=v_f,
        clamped=c1,
    )


@dataclass(frozen=True)
class FailureBound:
    p_fail: float
    raw: float
    exponent: float
    n_q: float
    s: float
    eps: float
    reversible: bool
    gap: float
    clamped: bool

    @property
    def vacuous(self) -> bool:
        return self.raw >= 1.0


def p_fail_bound(spec, eps: float, product_gaps: GapReport, pi_prod_root: float) -> FailureBound:
    """Bound on the probability that two independent prefixes are closer than ``1 - S - eps``."""
    s = float(collision_and_distance(spec.chain)[0])
    if not 0 < eps < 1 - s:
        raise BoundsError(f"eps must lie in (0, 1 - S) = (0, {1 - s:.6g}), got {eps}")
    if not 0 < pi_prod_root <= 1:
        raise BoundsError("product-chain root mass must lie in (0, 1]")
    gap = product_gaps.bernstein_gap
    npr = spec.n_prime
    if product_gaps.reversible:
        expo = npr * eps**2 * gap / (8 * s * (1 - s) + 20 * eps * s)
    else:
        expo = npr * eps**2 * gap / (16 * s * (1 - s) * (1 + 1 / gap) + 40 * eps * s)
    n_q = 1 / pi_prod_root
    log_raw = 0.5 * math.log(2 * n_q) - expo
    raw = math.exp(min(log_raw, 700.0))
    val, clamped = _clamp(raw)
    return FailureBound(val, raw, expo, n_q, s, eps, product_gaps.reversible, gap, clamped)


def claim_log2_ratio(spec) -> float:
    """``log2`` of the largest possible ratio of two pool codewords' probabilities."""
    total = sum(math.log2(float(p)) for p in spec.chain.trans_probs if p > 0)
    return -2 * float(spec.alpha) * spec.n * float(spec.zeta) * total


@dataclass(frozen=True)
class SizeBound:
    log2_p_max: float
    p_max: float
    p_fail: float
    p_fail_eff: float
    active_branch: str  # "p_fail" or "p_max"
    pool_mass: float
    size_lower: float
    statement_size_lower: float
    pool_log2_size: float
    exact: bool


def ec_size_bound(
    spec,
    eps: float,
    pool_log2_size: float,
    *,
    pool_mass: float,
    p_fail: float,
    p_max: float | None = None,
) -> SizeBound:
    """Expected expurgated size ``P(C)^2 / (4 P'_fail)`` with ``P'_fail = max(P_fail, P_max P(C) / 2)``.

    Without ``p_max`` the maximum codeword probability is bounded through the
    probability-ratio exponent over ``2^pool_log2_size``; passing exact values
    from an enumerated pool makes the result exact (``exact=True``).
    """
    if not 0 < eps:
        raise BoundsError("eps must be positive")
    exact = p_max is not None
    if p_max is None:
        log2_pmax = min(0.0, claim_log2_ratio(spec) - pool_log2_size)
        p_max = 2.0**log2_pmax
    else:
        log2_pmax = math.log2(p_max) if p_max > 0 else -math.inf
    second = p_max * pool_mass / 2
    if p_fail >= second:
        eff, branch = p_fail, "p_fail"
    else:
        eff, branch = second, "p_max"
    if eff <= 0 or pool_mass <= 0:
        size = 0.0 if pool_mass <= 0 else math.inf
        stmt = math.inf if eff <= 0 else 1 / (4 * eff)
    else:
        size = pool_mass**2 / (4 * eff)
        stmt = 1 / (4 * eff)
    return SizeBound(
        log2_p_max=log2_pmax,
        p_max=p_max,
        p_fail=p_fail,
        p_fail_eff=eff,
        active_branch=branch,
        pool_mass=pool_mass,
        size_lower=max(0.0, size),
        statement_size_lower=stmt,
        pool_log2_size=pool_log2_size,
        exact=exact,
    )


@dataclass(frozen=True)
class BoundsReport:
    n: int
    alpha: Fraction
    zeta: Fraction
    eps: float
    s: float
    expected_rel_distance: float
    eta_typ: float
    pool_mass_lower: float
    p_fail: float
    p_max_upper: float
    p_fail_eff: float
    ec_size_lower: float
    ec_size_statement: float
    active_branch: str
    pool_log2_lower: float
    clamped: tuple[str, ...]

    def lines(self) -> list[str]:
        return [
            f"n {self.n}",
            f"alpha {self.alpha}",
            f"zeta {self.zeta}",
            f"eps {self.eps!r}",
            f"collision_S {self.s!r} probability",
            f"expected_rel_distance {self.expected_rel_distance!r} fraction",
            f"eta_typ {self.eta_typ!r} nats/symbol",
            f"pool_mass_lower {self.pool_mass_lower!r} probability",
            f"pool_log2_lower {self.pool_log2_lower!r} bits",
            f"p_fail {self.p_fail!r} probability",
            f"p_max_upper {self.p_max_upper!r} probability",
            f"p_fail_eff {self.p_fail_eff!r} probability",
            f"p_fail_eff_branch {self.active_branch}",
            f"ec_size_lower {self.ec_size_lower!r} codewords",
            f"ec_size_statement_form {self.ec_size_statement!r} codewords",
            f"clamped {','.join(self.clamped) or 'none'}",
        ]


def finite_bounds(spec, eps: float) -> BoundsReport:
    """Every finite-length bound for a pool spec, using closed-form pool-size and mass bounds."""
    from .counting import pool_size_bound
    from .ldp import build_product_chain
    from .markov import spectral_gaps

    s, dist = collision_and_distance(spec.chain)
    rel = reliability_exponent(spec, spectral_gaps(spec.chain))
    pc = build_product_chain(spec.chain)
    root_pair = pc.vertex_index(spec.root, spec.root)
    fail = p_fail_bound(spec, eps, pc.gaps, float(pc.chain.pi[root_pair]))
    psb = pool_size_bound(spec)
    size = ec_size_bound(spec, eps, psb.log2_lower, pool_mass=rel.mass_lower, p_fail=fail.p_fail)
    clamped = tuple(name for name, c in (("pool_mass", rel.clamped), ("p_fail", fail.clamped)) if c)
    return BoundsReport(
        n=spec.n,
        alpha=spec.alpha,
        zeta=spec.zeta,
        eps=eps,
        s=float(s),
        expected_rel_distance=float(dist),
        eta_typ=rel.eta_typ,
        pool_mass_lower=rel.mass_lower,
        p_fail=fail.p_fail,
        p_max_upper=size.p_max,
        p_fail_eff=size.p_fail_eff,
        ec_size_lower=size.size_lower,
        ec_size_statement=size.statement_size_lower,
        active_branch=size.active_branch,
        pool_log2_lower=psb.log2_lower,
        clamped=clamped,
    )
