"""Exhaustive desk-scale searches over twist-multiplier polynomials.

The central question: given an Eisenstein polynomial E, a p-adic precision
n, and a polynomial C whose constant term is nonzero mod p^n, how deep can
E * twist(C) sit inside the ideal (u^t, p^n)?  The scan enumerates every
candidate C up to the degree bound implied by the reduction p*deg(C) < t
(monomials of C with p*i >= t cannot affect coefficients below u^t) and
reports the maximal t together with all witnesses attaining it.

The scan runs on raw residue lists for speed and exits at the first
nonzero coefficient; every reported witness is then re-verified through
TruncatedSeries arithmetic, so the fast path never silently vouches for
itself.  Results are deterministic: candidates are enumerated in
lexicographic digit order and witness lists inherit that order.

Expected invariants of the surrounding theory are asserted on every run
(t <= n*e, t <= tau*e + iota when tau is finite, the p-power kill of the
twisted witness, the Weierstrass witness profile when p | e); any
violation raises OracleViolationError, which would falsify the
implementation rather than the theory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

from . import breuil
from .bounds import compute_s
from .eisenstein import EisensteinPolynomial, tau_v_search
from .series import Precision, TruncatedSeries, frobenius, int_valuation


class BudgetExceededError(RuntimeError):
    """The candidate space exceeds the configured evaluation budget."""


class OracleViolationError(AssertionError):
    """An asserted invariant failed during an exhaustive run."""


DEFAULT_BUDGET = 10**8


@dataclass(frozen=True)
class SearchConfig:
    """Scope of one exhaustive run over candidates C.

    degree_bound * p < t_max keeps the search space faithful to the degree
    reduction: any series achieving depth t < t_max has a truncation of
    degree <= floor((t-1)/p) achieving the same depth."""

    eis: EisensteinPolynomial
    n: int
    t_max: int
    degree_bound: int
    require_weierstrass: bool = False
    require_unit_constant: bool = False
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.eis.precision is not None:
            raise ValueError("searches need exact integer Eisenstein input")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if self.degree_bound < 0:
            raise ValueError("degree_bound must be >= 0")
        if self.degree_bound * self.eis.p >= self.t_max:
            raise ValueError("need degree_bound * p < t_max")

    @property
    def p(self) -> int:
        return self.eis.p

    @property
    def e(self) -> int:
        return self.eis.e


def default_config(eis: EisensteinPolynomial, n: int, t_max: int | None = None,
                   budget: int = DEFAULT_BUDGET, **flags) -> SearchConfig:
    """Config probing every depth up to (and exposing violations beyond) n*e."""
    if t_max is None:
        t_max = n * eis.e + 1
    return SearchConfig(
        eis=eis, n=n, t_max=t_max,
        degree_bound=(t_max - 1) // eis.p,
        budget=budget, **flags,
    )


@dataclass
class WitnessReport:
    """One candidate attaining the maximal depth, with named re-checks."""

    c: TruncatedSeries
    coeffs: tuple[int, ...]
    t_achieved: int
    checks: dict[str, bool] = field(default_factory=dict)


@dataclass
class Prop2Result:
    t_star: int
    witnesses: list[WitnessReport]
    candidates_visited: int
    space_size: int
    assertions: dict[str, bool]
    config: SearchConfig


def _is_weierstrass(c: tuple[int, ...], p: int) -> bool:
    deg = None
    for i in range(len(c) - 1, -1, -1):
        if c[i]:
            deg = i
            break
    if deg is None or c[deg] != 1:
        return False
    return all(c[i] % p == 0 for i in range(deg))


def _space_size(cfg: SearchConfig) -> int:
    q = cfg.p**cfg.n
    qp = q // cfg.p
    if cfg.require_weierstrass:
        total = 1  # the constant 1 (degree 0), which is also a unit
        if not cfg.require_unit_constant:
            for d in range(1, cfg.degree_bound + 1):
                total += (qp - 1) * qp ** (d - 1)
        return total
    if cfg.require_unit_constant:
        return (q - qp) * q**cfg.degree_bound
    return (q - 1) * q**cfg.degree_bound


def _candidates(cfg: SearchConfig):
    q = cfg.p**cfg.n
    first = range(1, q)
    rest = [range(q)] * cfg.degree_bound
    for c in product(first, *rest):
        if cfg.require_unit_constant and c[0] % cfg.p == 0:
            continue
        if cfg.require_weierstrass and not _is_weierstrass(c, cfg.p):
            continue
        yield c


def _depth(e_mod, c, p, q, t_cap):
    # first index j < t_cap with a nonzero coefficient of E(u)*C(u^p) mod q
    e_len = len(e_mod)
    d = len(c) - 1
    for j in range(t_cap):
        acc = 0
        lmax = j // p
        if lmax > d:
            lmax = d
        for l in range(lmax + 1):
            i = j - p * l
            if i < e_len and c[l]:
                acc += e_mod[i] * c[l]
        if acc % q:
            return j
    return t_cap


def _series_scope(cfg: SearchConfig) -> Precision:
    T = max(cfg.e + cfg.p * cfg.degree_bound, cfg.t_max) + 1
    return Precision(cfg.p, cfg.n, T)


def prop2_max_t(cfg: SearchConfig, strict: bool = True) -> Prop2Result:
    """Exhaustive maximal depth and all witnesses, with invariants asserted.

    strict=False returns the result with its assertion map instead of
    raising, so suite drivers can tally individual failures."""
    p, e, n = cfg.p, cfg.e, cfg.n
    q = p**n
    space = _space_size(cfg)
    if space > cfg.budget:
        raise BudgetExceededError(
            f"{space} candidates exceed the budget of {cfg.budget}"
        )
    e_mod = [a % q for a in cfg.eis.all_coeffs()]
    best_t = -1
    best: list[tuple[int, ...]] = []
    visited = 0
    for c in _candidates(cfg):
        visited += 1
        t = _depth(e_mod, c, p, q, cfg.t_max)
        if t > best_t:
            best_t, best = t, [c]
        elif t == best_t:
            best.append(c)
    if visited != space:
        raise OracleViolationError(
            f"enumeration incomplete: visited {visited} of {space}"
        )

    inv = cfg.eis.invariants()
    assertions = {"t-le-ne": best_t <= n * e, "no-cap-hit": best_t < cfg.t_max}
    if not math.isinf(inv.tau):
        assertions["t-le-taue-iota"] = best_t <= inv.tau * e + inv.iota

    # re-verify every witness through the series ring, independent of the scan
    prec = _series_scope(cfg)
    E_s = breuil.eisenstein_series(cfg.eis, prec)
    witnesses = []
    kill = p ** (1 if inv.m == 0 else (inv.tau + 1 if not math.isinf(inv.tau) else 0))
    all_ok = True
    for c in sorted(best):
        c_s = TruncatedSeries.from_coeffs(prec, c)
        twisted = frobenius(c_s)
        prod = E_s * twisted
        checks = {"depth-reverified": prod.in_ideal(best_t, n)}
        if best_t + 1 <= prec.T:
            checks["depth-maximal"] = not prod.in_ideal(best_t + 1, n)
        if kill > 1:
            checks["p-power-kill"] = twisted.scale(kill).in_ideal(best_t, n)
        all_ok = all_ok and all(checks.values())
        witnesses.append(
            WitnessReport(c=c_s, coeffs=c, t_achieved=best_t, checks=checks)
        )
    assertions["witnesses-reverified"] = all_ok

    result = Prop2Result(
        t_star=best_t, witnesses=witnesses, candidates_visited=visited,
        space_size=space, assertions=assertions, config=cfg,
    )
    if strict and not all(assertions.values()):
        bad = [k for k, v in assertions.items() if not v]
        raise OracleViolationError(f"violated: {bad} for E = {cfg.eis}, n = {n}")
    return result


def lemma4_check(cfg: SearchConfig, c: tuple[int, ...], t: int,
                 strict: bool = True) -> WitnessReport:
    """Profile checks for a Weierstrass witness when p divides e.

    Preconditions (error when unmet): p | e, C Weierstrass with constant
    term nonzero mod p^n, p*deg(C) < t, and E_0 * twist(C) in (u^t, p^n).
    Checked conclusions: deg(C) = (n-1)e/p, the valuation staircase
    ord_p(c_{ie/p}) = n-i-1 with ord_p(c_j) >= n-i below each step, and
    t <= n*e."""
    p, e, n = cfg.p, cfg.e, cfg.n
    q = p**n
    if e % p != 0:
        raise ValueError("the Weierstrass profile applies only when p divides e")
    c = tuple(x % q for x in c)
    if not _is_weierstrass(c, p):
        raise ValueError("witness is not a Weierstrass polynomial mod p^n")
    if c[0] % q == 0:
        raise ValueError("constant term vanishes mod p^n")
    d = max(i for i, x in enumerate(c) if x)
    if p * d >= t:
        raise ValueError(f"need p*deg(C) = {p * d} < t = {t}")

    prec = _series_scope(cfg)
    split = cfg.eis.split()
    e0_s = TruncatedSeries.from_coeffs(prec, split.e0)
    c_s = TruncatedSeries.from_coeffs(prec, c)
    if not (e0_s * frobenius(c_s)).in_ideal(t, n):
        raise ValueError("E_0 * twist(C) does not lie in (u^t, p^n)")

    ep = e // p

    def vals_ok():
        for i in range(n):
            step = i * ep
            if step > d:
                return False
            want = n - i - 1
            got = int_valuation(c[step], p) if c[step] else None
            if got != want:
                return False
            floor = n - i
            for j in range(step):
                cj = c[j]
                if cj and int_valuation(cj, p) < floor:
                    return False
        return True

    checks = {
        "lemma4-degree": d == (n - 1) * ep,
        "f3-valuations": vals_ok(),
        "t-le-ne": t <= n * e,
    }
    report = WitnessReport(c=c_s, coeffs=c, t_achieved=t, checks=checks)
    if strict and not all(checks.values()):
        bad = [k for k, v in checks.items() if not v]
        raise OracleViolationError(f"violated: {bad} for C = {c}, t = {t}")
    return report


def cor5_check(p: int, n: int, e2: tuple[int, ...], c: tuple[int, ...], t: int) -> bool:
    """One instance of: membership of E_2 * twist(C) in (u^t, p^n) forces
    deg(E_2) >= t, for Weierstrass E_2 of degree below e and C from the
    staircase family.  Returns the truth of the implication."""
    if not _is_weierstrass(e2, p):
        raise ValueError("E_2 must be a Weierstrass polynomial")
    l = max(i for i, x in enumerate(e2) if x)
    T = max(l + p * (len(c) - 1), t) + 1
    prec = Precision(p, n, T)
    e2_s = TruncatedSeries.from_coeffs(prec, e2)
    c_s = TruncatedSeries.from_coeffs(prec, c)
    member = (e2_s * frobenius(c_s)).in_ideal(t, n)
    return (not member) or l >= t


def weierstrass_polys(p: int, n: int, degree: int):
    """All Weierstrass polynomials of the exact degree mod p^n, ascending
    coefficient tuples (monic, lower coefficients divisible by p)."""
    q = p**n
    lower = [p * j for j in range(q // p)]
    for lows in product(lower, repeat=degree):
        yield lows + (1,)


def eisenstein_grid(p: int, e: int, n: int):
    """All Eisenstein polynomials of degree e whose coefficients lie in
    {p*j : 0 <= j < p^n}, in lexicographic coefficient order."""
    choices = [p * j for j in range(p**n)]
    a0s = [a for a in choices if a and int_valuation(a, p) == 1]
    for coeffs in product(a0s, *([choices] * (e - 1))):
        yield EisensteinPolynomial(p, coeffs)


@dataclass
class DescentRow:
    a: int
    j_max: int
    s_required: int


@dataclass
class DescentTable:
    """Rank-1, n = 1 stability analysis for phi(e_1) = u^a, all a <= e.

    j_max is the largest pole order j with u^-j M stable under the map
    (closed form: floor(a/(p-1)), re-derived here by direct application);
    s_required is the least s with p^s times the stable overmodule inside M."""

    p: int
    e: int
    tau: int
    iota: int
    t0: int
    s_v: int
    rows: list[DescentRow]


def descent_minimal_s(p: int, eis: EisensteinPolynomial, n: int = 1, rank: int = 1) -> DescentTable:
    """Build the stability table and assert it against the recursion bound."""
    if n != 1 or rank != 1:
        raise ValueError("the analysis covers rank 1 at n = 1 only")
    if eis.p != p:
        raise ValueError("prime mismatch")
    e = eis.e
    inv = eis.invariants()
    if math.isinf(inv.tau):
        found = tau_v_search(eis, digit_precision=2)
        tau, iota = found.tau, found.iota
    else:
        tau, iota = inv.tau, inv.iota
    t0 = (tau * e + iota) // (p - 1)
    s_v = compute_s(p, e, tau, iota).s

    prec = Precision(p, 1, breuil.required_u_precision(p, e + 1, e) + 1)
    one = TruncatedSeries.one(prec)
    rows = []
    for a in range(e + 1):
        phi = ((TruncatedSeries.monomial(prec, a),),)
        M = breuil.BreuilModule(prec=prec, h=1, eis=eis, phi=phi)
        j_max = 0
        while j_max <= e:
            x = breuil.FractionalElement(pole=j_max + 1, alphas=(one,))
            if breuil.apply_phi(M, x).pole <= j_max + 1:
                j_max += 1
            else:
                break
        gen = breuil.FractionalElement(pole=j_max, alphas=(one,))
        s_required = 0 if breuil.verify_inclusion_p_s(M, [gen], 0) else 1
        ok = (
            j_max == a // (p - 1)
            and (s_required == 0) == (j_max == 0)
            and breuil.verify_inclusion_p_s(M, [gen], s_required)
            and j_max <= t0
            and s_required <= s_v
        )
        if not ok:
            raise OracleViolationError(
                f"descent row a = {a}: j_max = {j_max}, s_required = {s_required}"
            )
        rows.append(DescentRow(a=a, j_max=j_max, s_required=s_required))
    return DescentTable(p=p, e=e, tau=tau, iota=iota, t0=t0, s_v=s_v, rows=rows)
