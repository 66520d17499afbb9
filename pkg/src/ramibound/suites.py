"""Verification suites behind `ramibound verify`.

Each suite walks a family of instances, tallies named assertions, and
returns a plain report dict; the CLI serializes the report and exits
nonzero when any tally shows a failure.  Suites are deterministic: every
random object is derived from a seed string containing the parameters.
"""

from __future__ import annotations

import math
import random
import time

from . import breuil, oracle
from .bounds import compute_s, prop3_height_bounds
from .eisenstein import EisensteinPolynomial
from .series import Precision, TruncatedSeries, frobenius, int_valuation


def _tally(assertions: dict, name: str, ok: bool):
    slot = assertions.setdefault(name, {"pass": 0, "fail": 0})
    slot["pass" if ok else "fail"] += 1


def _finish(suite: str, config: dict, assertions: dict, started: float) -> dict:
    ok = bool(assertions) and all(v["fail"] == 0 for v in assertions.values())
    return {
        "suite": suite,
        "config": config,
        "assertions": assertions,
        "ok": ok,
        "runtime_s": round(time.perf_counter() - started, 3),
    }


def _family(p: int, n: int, poly=None, e: int | None = None):
    if poly is not None:
        return [EisensteinPolynomial(p, tuple(poly))]
    if e is not None:
        return list(oracle.eisenstein_grid(p, e, n))
    raise ValueError("need either an explicit polynomial or a degree to sweep")


def suite_prop2(p: int, n: int, poly=None, e: int | None = None,
                budget: int = oracle.DEFAULT_BUDGET) -> dict:
    """Maximal-depth search over every candidate family member."""
    started = time.perf_counter()
    assertions: dict = {}
    polys = _family(p, n, poly, e)
    t_stars = []
    for eis in polys:
        res = oracle.prop2_max_t(oracle.default_config(eis, n, budget=budget),
                                 strict=False)
        t_stars.append(res.t_star)
        for name, ok in res.assertions.items():
            _tally(assertions, name, ok)
    config = {"p": p, "n": n, "polynomials": len(polys), "budget": budget}
    if len(polys) == 1:
        config["poly"] = str(polys[0])
        config["t_star"] = t_stars[0]
    return _finish("prop2", config, assertions, started)


def _eligible_witnesses(eis, n, budget):
    """Prop2 witnesses satisfying the Weierstrass staircase hypotheses."""
    res = oracle.prop2_max_t(oracle.default_config(eis, n, budget=budget),
                             strict=False)
    eligible = []
    for w in res.witnesses:
        try:
            report = oracle.lemma4_check(res.config, w.coeffs, res.t_star,
                                         strict=False)
        except ValueError:
            continue
        eligible.append((w.coeffs, report))
    return res, eligible


def suite_lemma4(p: int, n: int, poly=None, e: int | None = None,
                 budget: int = oracle.DEFAULT_BUDGET) -> dict:
    """Degree and valuation staircase of eligible witnesses (p | e only)."""
    started = time.perf_counter()
    assertions: dict = {}
    polys = [E for E in _family(p, n, poly, e) if E.e % p == 0]
    eligible_total = 0
    for eis in polys:
        res, eligible = _eligible_witnesses(eis, n, budget)
        for name, ok in res.assertions.items():
            _tally(assertions, name, ok)
        eligible_total += len(eligible)
        for _, report in eligible:
            for name, ok in report.checks.items():
                _tally(assertions, name, ok)
    config = {"p": p, "n": n, "polynomials": len(polys),
              "eligible_witnesses": eligible_total, "budget": budget}
    return _finish("lemma4", config, assertions, started)


def suite_cor5(p: int, n: int, poly=None, e: int | None = None,
               budget: int = oracle.DEFAULT_BUDGET) -> dict:
    """Low-degree Weierstrass multipliers against staircase witnesses."""
    started = time.perf_counter()
    assertions: dict = {}
    polys = [E for E in _family(p, n, poly, e) if E.e % p == 0]
    scanned = 0
    for eis in polys:
        res, eligible = _eligible_witnesses(eis, n, budget)
        for coeffs, report in eligible:
            if not all(report.checks.values()):
                continue
            for l in range(eis.e):
                for e2 in oracle.weierstrass_polys(p, n, l):
                    scanned += 1
                    ok = oracle.cor5_check(p, n, e2, coeffs, res.t_star)
                    _tally(assertions, "membership-forces-degree", ok)
    config = {"p": p, "n": n, "polynomials": len(polys),
              "instances": scanned, "budget": budget}
    return _finish("cor5", config, assertions, started)


def _random_eisenstein(rng: random.Random, p: int, n: int, e: int) -> EisensteinPolynomial:
    q = p**n
    while True:
        a0 = p * rng.randrange(1, max(q, 2))
        if int_valuation(a0, p) == 1:
            break
    coeffs = [a0] + [p * rng.randrange(q) for _ in range(e - 1)]
    return EisensteinPolynomial(p, tuple(coeffs))


def _seeded_module(rng: random.Random, p: int, n_max: int, T: int = 40):
    n_i = rng.randint(1, n_max)
    h = rng.randint(1, 3)
    d = rng.randint(0, h)
    e = rng.randint(2, 4)
    eis = _random_eisenstein(rng, p, n_i, e)
    prec = Precision(p, n_i, T)
    M = breuil.build_bt_module(prec, eis, d=d, h=h, seed=rng.randrange(2**30),
                               max_entry_degree=2)
    return M, d


def suite_lemma1(p: int, n: int, seeds: int = 200, tries: int = 8) -> dict:
    """Pole-growth membership: for x with pole t whose image keeps pole <= t,
    every coordinate numerator must satisfy E * twist(alpha) in (u^(t(p-1)), p^n).

    Samples mix a guaranteed-acceptance family (numerators divisible by a
    high enough power of u) with raw rejection sampling."""
    started = time.perf_counter()
    assertions: dict = {}
    for seed in range(seeds):
        rng = random.Random(f"lemma1-{p}-{n}-{seed}")
        M, _ = _seeded_module(rng, p, n)
        prec = M.prec
        E_s = breuil.eisenstein_series(M.eis, prec)
        phi_deg = max((entry.degree() or 0) for row in M.phi for entry in row)
        cap = (prec.T - 1 - phi_deg) // prec.p
        if cap < 2:
            raise AssertionError("u-precision budget left no sampling room")
        accepted_here = 0
        for k in range(tries):
            t = rng.randint(1, 2)
            lift = -(-t * (prec.p - 1) // prec.p) if k % 2 == 0 else 0
            alphas = []
            for _ in range(M.h):
                cs = [0] * prec.T
                for _ in range(rng.randint(1, 3)):
                    pos = rng.randint(lift, min(cap, lift + 3))
                    cs[pos] = rng.randrange(prec.modulus)
                alphas.append(TruncatedSeries.from_coeffs(prec, cs))
            x = breuil.FractionalElement(pole=t, alphas=tuple(alphas))
            if x.is_zero():
                continue
            if breuil.apply_phi(M, x).pole > t:
                continue  # hypothesis rejected
            accepted_here += 1
            ok = all(
                (E_s * frobenius(a)).in_ideal(t * (prec.p - 1), prec.n)
                for a in x.alphas
            )
            _tally(assertions, "twist-membership", ok)
        _tally(assertions, "module-sampled", accepted_here > 0)
    config = {"p": p, "n": n, "seeds": seeds, "tries": tries}
    return _finish("lemma1", config, assertions, started)


def suite_lemma2(p: int, n: int, e_max: int = 8) -> dict:
    """Inclusion exponents: the cascade family is tight (p^n in, p^(n-1) out)
    and the rank-1 stability table matches its closed form."""
    started = time.perf_counter()
    assertions: dict = {}
    for level in range(1, n + 1):
        M, gen = breuil.example3_module(p, level)
        _tally(assertions, "p-n-inclusion",
               breuil.verify_inclusion_p_s(M, [gen], level))
        _tally(assertions, "p-n-minus-1-excluded",
               not breuil.verify_inclusion_p_s(M, [gen], level - 1))
        image = breuil.apply_phi(M, gen)
        _tally(assertions, "map-lands-in-base-module", image.pole == 0)
    for e in range(1, e_max + 1):
        if e == 1:
            eis = EisensteinPolynomial(p, (p,))
        else:
            eis = EisensteinPolynomial(p, (p, p) + (0,) * (e - 2))
        try:
            table = oracle.descent_minimal_s(p, eis)
        except oracle.OracleViolationError:
            _tally(assertions, "stability-closed-form", False)
            continue
        _tally(assertions, "stability-closed-form", True)
        for row in table.rows:
            _tally(assertions, "stable-pole-inclusion",
                   row.s_required <= 1 and row.j_max == row.a // (p - 1))
    config = {"p": p, "n": n, "e_max": e_max}
    return _finish("lemma2", config, assertions, started)


def suite_example3(p: int, n: int) -> dict:
    """The telescoping identity at every level up to n."""
    started = time.perf_counter()
    assertions: dict = {}
    for level in range(1, n + 1):
        try:
            breuil.example3_identity(p, level)
            ok = True
        except AssertionError:
            ok = False
        _tally(assertions, "telescoping-identity", ok)
    return _finish("example3", {"p": p, "n": n}, assertions, started)


def suite_heights(seeds: int = 50) -> dict:
    """Height inequalities over seeded modules and block-triangular extensions."""
    started = time.perf_counter()
    assertions: dict = {}
    for seed in range(seeds // 2):
        rng = random.Random(f"heights-{seed}")
        p = rng.choice([2, 3])
        M, d = _seeded_module(rng, p, n_max=2)
        _tally(assertions, "h3-le-order", breuil.h3(M) <= breuil.order(M))
        if M.prec.n == 1 and M.prec.T > 2 * M.eis.e:
            value = breuil.h4(M)
            _tally(assertions, "h3-plus-h4-le-2h3", breuil.h3(M) + value <= 2 * breuil.h3(M))
            _tally(assertions, "h4-matches-decomposition", value == M.h - d)
    for seed in range(seeds):
        rng = random.Random(f"heights-ext-{seed}")
        p = rng.choice([2, 3])
        e = rng.randint(2, 3)
        eis = _random_eisenstein(rng, p, 1, e)
        prec = Precision(p, 1, 40)
        h1, h2 = rng.randint(1, 2), rng.randint(1, 2)
        M1 = breuil.build_bt_module(prec, eis, d=rng.randint(0, h1), h=h1,
                                    seed=rng.randrange(2**30), max_entry_degree=2)
        M2 = breuil.build_bt_module(prec, eis, d=rng.randint(0, h2), h=h2,
                                    seed=rng.randrange(2**30), max_entry_degree=2)
        M = breuil.extension_module(M1, M2, seed=rng.randrange(2**30))
        _tally(assertions, "h3-subadditive",
               breuil.h3(M) <= breuil.h3(M1) + breuil.h3(M2))
        _tally(assertions, "h3-le-order", breuil.h3(M) <= breuil.order(M))
    rng = random.Random("heights-prop3")
    for s, r in [(0, 4), (5, 2), (1, 1)] + [
        (rng.randrange(10), rng.randrange(10)) for _ in range(20)
    ]:
        _tally(assertions, "height-bound-arithmetic",
               prop3_height_bounds(s, r) == ((2 * s + 1) * r, (4 * s + 2) * r))
    return _finish("heights", {"seeds": seeds}, assertions, started)


SUITES = {
    "prop2": suite_prop2,
    "lemma4": suite_lemma4,
    "cor5": suite_cor5,
    "lemma1": suite_lemma1,
    "lemma2": suite_lemma2,
    "example3": suite_example3,
    "heights": suite_heights,
}
