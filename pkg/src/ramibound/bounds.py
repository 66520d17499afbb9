"""The recursive exponent s and its closed-form and global bounds.

Given (p, e) and a uniformizer invariant pair (tau, iota), set
epsilon = 0 if p does not divide e and 1 otherwise, and start from

    t_0 = floor((tau*e + iota)/(p-1)),   s_0 = 0.

While t - floor(t/p) exceeds tau + epsilon, replace (t, s) by
(floor(t/p), s + tau + epsilon); the exponent is s = t_z + s_z at the
final pair.  Each step performed changes t + s by floor(t/p) + tau +
epsilon - t, so the strictly-decreasing chain of sums holds exactly when
the stopping rule uses the difference t - floor(t/p); the sum-form of the
rule would contradict that chain, which is why the difference form is
implemented for both variants.

The modified variant keeps stepping while t - floor(t/p) equals
tau + epsilon; such steps leave t + s unchanged, so both variants agree
on the final s and differ only in trace length.  For p not dividing e it
lands exactly on (0, v+1) where v is the index of the leading p-adic
digit of t_0, which gives the closed form s = 1 + floor(log_p(e/(p-1))).

All arithmetic is exact; base-p logarithms are integer power comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .series import is_prime, int_valuation


@dataclass(frozen=True)
class BoundTrace:
    """Full transcript of the recursion: every pair (t_j, s_j) in order."""

    p: int
    e: int
    tau: int
    iota: int
    epsilon: int
    variant: str
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        _validate_bound_inputs(self.p, self.e, self.tau, self.iota)
        if self.variant not in ("standard", "modified"):
            raise ValueError(f"unknown variant {self.variant!r}")
        m = int_valuation(self.e, self.p)
        if self.epsilon != (0 if m == 0 else 1):
            raise ValueError("epsilon must be 0 exactly when p does not divide e")
        if not self.pairs:
            raise ValueError("trace must contain at least the starting pair")
        t0 = (self.tau * self.e + self.iota) // (self.p - 1)
        if self.pairs[0] != (t0, 0):
            raise ValueError(f"trace must start at ({t0}, 0)")
        step = self.tau + self.epsilon
        sums = [t + s for t, s in self.pairs]
        for j in range(1, len(self.pairs)):
            tp, sp = self.pairs[j - 1]
            t, s = self.pairs[j]
            if t != tp // self.p or s != sp + step:
                raise ValueError(f"pair {j} does not follow the recursion")
            if not (t < tp and s > sp):
                raise ValueError("t must strictly decrease and s strictly increase")
        # sums strictly decrease; the modified variant may end with a
        # constant block where t - floor(t/p) hits tau + epsilon exactly
        seen_equal = False
        for j in range(1, len(sums)):
            d = sums[j] - sums[j - 1]
            if d > 0:
                raise ValueError("t_j + s_j increased along the trace")
            if d == 0:
                if self.variant == "standard":
                    raise ValueError("t_j + s_j stalled in a standard trace")
                seen_equal = True
            elif seen_equal:
                raise ValueError("strict decrease after an equality step")

    @property
    def z(self) -> int:
        return len(self.pairs) - 1

    @property
    def s(self) -> int:
        t, s = self.pairs[-1]
        return t + s


def _validate_bound_inputs(p, e, tau, iota):
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if e < 1:
        raise ValueError(f"e = {e} must be >= 1")
    if not isinstance(tau, int):
        raise ValueError(
            "tau must be a finite integer; for tau = infinity switch to a "
            "uniformizer with finite tau (one with tau <= m + 1 always exists)"
        )
    if tau < 1:
        raise ValueError(f"tau = {tau} must be >= 1")
    m = int_valuation(e, p)
    if m == 0:
        if (tau, iota) != (1, 0):
            raise ValueError("for p not dividing e the only invariant pair is (1, 0)")
    else:
        if not (1 <= iota <= e - 1):
            raise ValueError(f"iota = {iota} must lie in [1, {e - 1}]")
        if iota % p == 0:
            raise ValueError(f"iota = {iota} must not be divisible by p")


def compute_s(p: int, e: int, tau: int, iota: int, variant: str = "standard") -> BoundTrace:
    """Run the recursion and return the full trace (s is trace.s)."""
    _validate_bound_inputs(p, e, tau, iota)
    if variant not in ("standard", "modified"):
        raise ValueError(f"unknown variant {variant!r}")
    m = int_valuation(e, p)
    eps = 0 if m == 0 else 1
    step = tau + eps
    pairs = [((tau * e + iota) // (p - 1), 0)]
    while True:
        t, s = pairs[-1]
        drop = t - t // p
        if (drop <= step) if variant == "standard" else (drop < step):
            break
        pairs.append((t // p, s + step))
    return BoundTrace(p=p, e=e, tau=tau, iota=iota, epsilon=eps,
                      variant=variant, pairs=tuple(pairs))


def s_closed_form_unramified(p: int, e: int) -> int:
    """s = 1 + floor(log_p(e/(p-1))) for p not dividing e and e >= p - 1."""
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if e % p == 0:
        raise ValueError("closed form requires p not dividing e")
    if e < p - 1:
        raise ValueError("for e <= p - 2 the exponent is 0, not covered by the closed form")
    t0 = e // (p - 1)
    v = 0
    while p ** (v + 1) <= t0:
        v += 1
    return v + 1


def reference_log_bound(p: int, e: int) -> int:
    """1 + floor(log_p(e/(p-1))), the sharper bound known from the
    literature; comparison display only, never asserted by this package."""
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if e < p - 1:
        return 0
    v = 0
    while p ** (v + 1) * (p - 1) <= e:
        v += 1
    return 1 + v


def bound_f11(p: int, e: int) -> Fraction:
    """Global bound (2e - 1 + e*ord_p(e)) / (p - 1) as an exact rational."""
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if e < 1:
        raise ValueError(f"e = {e} must be >= 1")
    m = int_valuation(e, p)
    return Fraction(2 * e - 1 + e * m, p - 1)


@dataclass(frozen=True)
class Example4Bound:
    """The ramified-case bound (log_p e + m + 2)(m + 2) - 1, compared to
    integers by exponentiating instead of taking logarithms."""

    p: int
    e: int
    m: int

    def exact_value(self) -> int | None:
        """Integer value when e is a power of p, else None."""
        k, x = 0, self.e
        while x % self.p == 0:
            x //= self.p
            k += 1
        if x != 1:
            return None
        return (k + self.m + 2) * (self.m + 2) - 1

    def approx(self) -> float:
        return (math.log(self.e, self.p) + self.m + 2) * (self.m + 2) - 1

    def exceeds(self, s: int) -> bool:
        """Exact test of s < (log_p e + m + 2)(m + 2) - 1."""
        B = self.m + 2
        A = s + 1 - B * B
        if A < 0:
            return True  # right side is positive: e >= p forces log_p e >= 1
        return self.p**A < self.e**B


def bound_example4(p: int, e: int) -> Example4Bound:
    """Bound object for the ramified case p | e."""
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    m = int_valuation(e, p)
    if m == 0:
        raise ValueError("this bound applies only when p divides e")
    return Example4Bound(p=p, e=e, m=m)


def prop3_height_bounds(s: int, r: int) -> tuple[int, int]:
    """((2s+1)*r, (4s+2)*r): generator-height bound and overall height bound."""
    if s < 0 or r < 0:
        raise ValueError("s and r must be >= 0")
    return ((2 * s + 1) * r, (4 * s + 2) * r)
