"""Eisenstein polynomials and their uniformizer invariants.

A monic polynomial u^e + a_{e-1}u^{e-1} + ... + a_0 over Z_p is Eisenstein
when every a_i is divisible by p and a_0 is p times a unit.  Such a
polynomial pins down a uniformizer pi of a totally ramified degree-e
extension V of Z_p; this module computes the invariants attached to pi:

    m     = ord_p(e)
    E_0   = the part of E supported on exponents divisible by p (with a_e := 1)
    E_1   = E - E_0
    tau   = ord_p(E_1)  for m >= 1 (by fiat 1 when m = 0); infinity iff E_1 = 0
    iota  = smallest exponent attaining tau (by fiat 0 when m = 0)
    t_pi  = floor((tau*e + iota)/(p-1))

Changing the uniformizer to pi~ = c_0 p + c_1 pi + ... + c_{e-1} pi^{e-1}
(c_1 a unit) is realized exactly by the characteristic polynomial of the
multiplication-by-pi~ matrix on Z_p[u]/(E), computed mod p^N with a
division-free (Berkowitz) recurrence, since Z/p^N admits no safe division.
Exhaustive enumeration of digit-truncated changes gives a certified upper
bound for the minimal tau over all uniformizers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from .series import is_prime, int_valuation

INF = math.inf  # order sentinel only; never enters arithmetic


class EisensteinValidationError(ValueError):
    """Raised with the complete list of violated Eisenstein conditions."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class EisensteinPolynomial:
    """Monic degree-e Eisenstein polynomial u^e + a_{e-1}u^{e-1} + ... + a_0.

    coeffs holds (a_0, ..., a_{e-1}); the leading 1 is implicit.  With
    precision=None the coefficients are exact integers (so tau = infinity is
    decidable); with precision=N they are canonical residues mod p^N and
    every reported valuation is capped accordingly."""

    p: int
    coeffs: tuple[int, ...]
    precision: int | None = None

    def __post_init__(self):
        violations = _eisenstein_violations(self.p, self.coeffs, self.precision)
        if violations:
            raise EisensteinValidationError(violations)

    @classmethod
    def validate(cls, p: int, coeffs, precision: int | None = None) -> "EisensteinPolynomial":
        """Construct after normalizing residues; error lists every violation."""
        coeffs = tuple(coeffs)
        if precision is not None and is_prime(p) and precision >= 1:
            q = p**precision
            coeffs = tuple(c % q for c in coeffs)
        return cls(p, coeffs, precision)

    @property
    def e(self) -> int:
        return len(self.coeffs)

    @property
    def m(self) -> int:
        return int_valuation(self.e, self.p)

    def all_coeffs(self) -> tuple[int, ...]:
        """(a_0, ..., a_{e-1}, 1) including the leading coefficient."""
        return self.coeffs + (1,)

    def split(self) -> "E0E1Split":
        """Separate E into the p-power-exponent part E_0 and the rest E_1."""
        e0 = [0] * (self.e + 1)
        e1 = [0] * (self.e + 1)
        for i, a in enumerate(self.all_coeffs()):
            if i % self.p == 0:
                e0[i] = a
            else:
                e1[i] = a
        return E0E1Split(tuple(e0), tuple(e1))

    def invariants(self) -> "UniformizerInvariants":
        """The tuple (m, tau, iota, t_pi) attached to the uniformizer."""
        p, e, m = self.p, self.e, self.m
        if m == 0:
            return UniformizerInvariants(m=0, tau=1, iota=0, t_pi=e // (p - 1))
        best_v, best_i = None, None
        for i in range(1, e):
            if i % p == 0:
                continue
            a = self.coeffs[i]
            if a == 0:
                continue
            v = int_valuation(a, p)
            if best_v is None or v < best_v:
                best_v, best_i = v, i
        if best_v is None:
            if self.precision is None:
                return UniformizerInvariants(m=m, tau=INF, iota=None, t_pi=INF)
            # residues mod p^N all vanish: the content is at least N - 1
            return UniformizerInvariants(
                m=m, tau=self.precision - 1, iota=None, t_pi=None,
                tau_is_lower_bound=True,
            )
        return UniformizerInvariants(
            m=m, tau=best_v, iota=best_i,
            t_pi=(best_v * e + best_i) // (p - 1),
        )

    def __str__(self) -> str:
        terms = [f"u^{self.e}"]
        for i in range(self.e - 1, -1, -1):
            a = self.coeffs[i]
            if a == 0:
                continue
            sign = "-" if a < 0 else "+"
            mag = abs(a)
            if i == 0:
                terms.append(f"{sign}{mag}")
            elif i == 1:
                terms.append(f"{sign}{mag}*u" if mag != 1 else f"{sign}u")
            else:
                terms.append(f"{sign}{mag}*u^{i}" if mag != 1 else f"{sign}u^{i}")
        return "".join(terms)


def _eisenstein_violations(p, coeffs, precision) -> list[str]:
    violations = []
    if not is_prime(p):
        return [f"p = {p} is not prime"]
    e = len(coeffs)
    if e < 1:
        return ["degree must be >= 1"]
    if precision is not None:
        if precision < 2:
            return ["precision must be >= 2 to certify the Eisenstein conditions"]
        q = p**precision
        if any(not (0 <= c < q) for c in coeffs):
            return [f"residue coefficients must lie in [0, {q})"]
    for i, a in enumerate(coeffs):
        if a % p != 0:
            violations.append(f"a_{i} = {a} is not divisible by p = {p}")
    a0 = coeffs[0]
    v0 = int_valuation(a0, p)
    if a0 == 0:
        violations.append("ord_p(a_0) must be exactly 1, got a_0 = 0")
    elif v0 != 1:
        violations.append(f"ord_p(a_0) must be exactly 1, got {v0}")
    return violations


def validate(p: int, coeffs, precision: int | None = None) -> EisensteinPolynomial:
    """Module-level alias for EisensteinPolynomial.validate."""
    return EisensteinPolynomial.validate(p, coeffs, precision)


@dataclass(frozen=True)
class E0E1Split:
    """E = E0 + E1 with E0 supported on exponents in pN (a_e := 1 included)."""

    e0: tuple[int, ...]
    e1: tuple[int, ...]


@dataclass(frozen=True)
class UniformizerInvariants:
    """(m, tau, iota, t_pi) for one uniformizer.

    tau is math.inf when E_1 vanishes exactly; iota is None whenever tau is
    not a finite exact value (0 by fiat when m = 0).  For residue-precision
    polynomials whose E_1 vanishes mod p^N, tau carries the certified lower
    bound N - 1 and tau_is_lower_bound is set; t_pi is then undecidable."""

    m: int
    tau: int | float
    iota: int | None
    t_pi: int | float | None
    tau_is_lower_bound: bool = False


@dataclass(frozen=True)
class UniformizerChange:
    """A new uniformizer pi~ = c_0 p + c_1 pi + ... + c_{e-1} pi^{e-1},
    with digits c_i given as residues mod p^precision."""

    p: int
    precision: int
    cs: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.precision < 1:
            raise ValueError("digit precision must be >= 1")
        q = self.p**self.precision
        if any(not (0 <= c < q) for c in self.cs):
            raise ValueError(f"digits must be canonical residues in [0, {q})")
        if len(self.cs) == 0:
            raise ValueError("at least one digit required")
        if len(self.cs) >= 2:
            if self.cs[1] % self.p == 0:
                raise ValueError("c_1 must be a unit for pi~ to be a uniformizer")
        elif self.cs[0] % self.p == 0:
            raise ValueError("c_0 must be a unit when e = 1")

    @classmethod
    def identity(cls, p: int, e: int, precision: int = 1) -> "UniformizerChange":
        """pi~ = pi (only meaningful for e >= 2; pi~ = p for e = 1)."""
        if e >= 2:
            return cls(p, precision, (0, 1) + (0,) * (e - 2))
        return cls(p, precision, (1,))

    @classmethod
    def shift_by_p(cls, p: int, e: int, precision: int = 1) -> "UniformizerChange":
        """pi~ = pi + p."""
        if e < 2:
            raise ValueError("pi + p needs e >= 2")
        return cls(p, precision, (1, 1) + (0,) * (e - 2))


def _companion_matrix(E: EisensteinPolynomial, q: int) -> list[list[int]]:
    # multiplication by pi on the basis 1, pi, ..., pi^{e-1}; columns are images
    e = E.e
    comp = [[0] * e for _ in range(e)]
    for j in range(e - 1):
        comp[j + 1][j] = 1
    for i in range(e):
        comp[i][e - 1] = (-E.coeffs[i]) % q
    return comp


def berkowitz_charpoly(A: list[list[int]], q: int) -> list[int]:
    """det(x*I - A) over Z/q via the Samuelson-Berkowitz recurrence.

    Division-free on purpose: Z/q is not a domain, so elimination-style
    charpoly algorithms are unavailable.  Returns ascending coefficients
    [c_0, ..., c_{n-1}, 1]."""
    n = len(A)
    poly = [1]  # descending coefficients for the 0x0 leading block
    for r in range(1, n + 1):
        a = A[r - 1][r - 1]
        row = A[r - 1][: r - 1]
        col = [A[i][r - 1] for i in range(r - 1)]
        block = [A[i][: r - 1] for i in range(r - 1)]
        qs = [1, (-a) % q]
        v = col
        for _ in range(r - 1):
            qs.append((-sum(row[i] * v[i] for i in range(r - 1))) % q)
            v = [sum(block[i][j] * v[j] for j in range(r - 1)) % q for i in range(r - 1)]
        new = [0] * (r + 1)
        for i in range(r + 1):
            acc = 0
            for j in range(max(0, i - r), min(i, r - 1) + 1):
                acc += qs[i - j] * poly[j]
            new[i] = acc % q
        poly = new
    poly.reverse()
    return poly


def substitute(E: EisensteinPolynomial, change: UniformizerChange, N: int) -> EisensteinPolynomial:
    """The Eisenstein polynomial (mod p^N) of the uniformizer pi~ given by
    `change`: the characteristic polynomial of multiplication by pi~ on the
    basis 1, pi, ..., pi^{e-1} of Z_p[u]/(E)."""
    if N < 2:
        raise ValueError("N >= 2 required to certify the Eisenstein conditions")
    if change.p != E.p:
        raise ValueError("prime mismatch between polynomial and change")
    if len(change.cs) != E.e:
        raise ValueError(f"expected {E.e} digits, got {len(change.cs)}")
    if E.precision is not None and E.precision < N:
        raise ValueError(f"input known only mod p^{E.precision}, cannot output mod p^{N}")
    p, e = E.p, E.e
    q = p**N
    if e == 1:
        # pi~ = c_0 * p with c_0 a unit
        b = (change.cs[0] * p) % q
        return EisensteinPolynomial.validate(p, ((-b) % q,), precision=N)
    comp = _companion_matrix(E, q)
    # B = c_0*p*I + sum_{i>=1} c_i * comp^i, by Horner in comp
    acc = [[0] * e for _ in range(e)]
    for i in range(e - 1, 0, -1):
        acc = _mat_mul_mod(acc, comp, q)
        ci = change.cs[i] % q
        for k in range(e):
            acc[k][k] = (acc[k][k] + ci) % q
    acc = _mat_mul_mod(acc, comp, q)
    c0p = (change.cs[0] * p) % q
    for k in range(e):
        acc[k][k] = (acc[k][k] + c0p) % q
    char = berkowitz_charpoly(acc, q)
    return EisensteinPolynomial.validate(p, char[:e], precision=N)


def _mat_mul_mod(A, B, q):
    n = len(A)
    return [
        [sum(A[i][k] * B[k][j] for k in range(n)) % q for j in range(n)]
        for i in range(n)
    ]


@dataclass(frozen=True)
class TauSearchResult:
    """Enumerated minimum of tau over digit-truncated uniformizer changes.

    The value is always a certified upper bound for the true minimum over
    all uniformizers, and never exceeds ceiling = m + 1 (witnessed by the
    pair pi, pi + p).  certified_exact is set only when the minimum is
    attained at the unconditional floor (tau = 1, or the m = 0 fiat value)
    or matches a caller-supplied lower bound."""

    tau: int
    iota: int | None
    witness: UniformizerChange
    certified_exact: bool
    ceiling: int
    candidates: int


def tau_v_search(
    E: EisensteinPolynomial,
    digit_precision: int,
    N: int | None = None,
    lower_bound: int | None = None,
) -> TauSearchResult:
    """Minimize (tau, iota) over all changes with digits mod p^digit_precision.

    Enumeration is lexicographic over the digit vectors (c_0, ..., c_{e-1}),
    so the reported witness is deterministic.  N >= m + 3 guarantees every
    tau value up to the ceiling m + 1 is decided exactly."""
    if E.precision is not None:
        raise ValueError("tau search requires exact integer coefficients")
    if digit_precision < 1:
        raise ValueError("digit_precision must be >= 1")
    p, e, m = E.p, E.e, E.m
    if m == 0:
        return TauSearchResult(
            tau=1, iota=0,
            witness=UniformizerChange.identity(p, e, digit_precision),
            certified_exact=True, ceiling=m + 1, candidates=0,
        )
    if N is None:
        N = m + 3
    if N < m + 3:
        raise ValueError(f"N = {N} too small: need N >= m + 3 = {m + 3}")

    base = p**digit_precision
    best_key = None
    best = None
    visited = 0
    for cs in product(range(base), repeat=e):
        if cs[1] % p == 0:
            continue
        visited += 1
        change = UniformizerChange(p, digit_precision, cs)
        inv = substitute(E, change, N).invariants()
        if inv.tau_is_lower_bound or inv.tau == INF:
            continue
        key = (inv.tau, inv.iota)
        if best_key is None or key < best_key:
            best_key, best = key, (inv, change)
    if best is None or best_key[0] > m + 1:
        raise AssertionError("tau ceiling m + 1 violated; pi and pi + p were enumerated")
    inv, change = best
    certified = inv.tau == 1 or (lower_bound is not None and inv.tau == lower_bound)
    return TauSearchResult(
        tau=inv.tau, iota=inv.iota, witness=change,
        certified_exact=certified, ceiling=m + 1, candidates=visited,
    )
