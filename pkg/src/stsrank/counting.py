"""Exact counts of Steiner triple systems of deficient 2-rank and 3-rank.

Notation follows the usual one for these formulas: ``gamma`` counts admissible
dual subspaces containing a fixed smaller one, ``phi`` counts systems
orthogonal to a fixed admissible subspace, ``upsilon`` counts systems whose
dual space is exactly that subspace (Moebius inversion of ``phi``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import DesignError, GuardExceeded, NonIntegralError
from .factored import FactoredValue, collapse_sum
from .gf_linalg import enumerate_subspaces
from .registry import CountRegistry, registry_default

MOBIUS_RECURSIVE_GUARD = 6


def q_factorial(n: int, q: int) -> int:
    """[n]_q! = prod_{s=1..n} (1 + q + ... + q^(s-1))."""
    if n < 0 or q < 2:
        raise DesignError("q_factorial needs n >= 0 and q >= 2")
    out = 1
    for s in range(1, n + 1):
        out *= (q**s - 1) // (q - 1)
    return out


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if not 0 <= k <= n:
        raise DesignError(f"gaussian_binomial needs 0 <= k <= n, got n={n}, k={k}")
    x = Fraction(q_factorial(n, q), q_factorial(k, q) * q_factorial(n - k, q))
    if x.denominator != 1:
        raise NonIntegralError(f"[{n} choose {k}]_{q} not integral")
    return x.numerator


def mobius_closed(q: int, i: int) -> int:
    if i < 0:
        raise DesignError("Moebius index must be >= 0")
    return (-1) ** i * q ** (i * (i - 1) // 2)


def mobius_recursive(q: int, i: int, *, by_enumeration: bool = True) -> int:
    """Solve ``sum over all subspaces C of GF(q)^i of mu_dim(C) = 0`` upward.

    With ``by_enumeration`` each proper subspace is actually listed (q must be
    prime); otherwise the subspaces of each dimension are weighted by the
    Gaussian binomial.
    """
    if i < 0:
        raise DesignError("Moebius index must be >= 0")
    if i > MOBIUS_RECURSIVE_GUARD:
        raise GuardExceeded(f"recursive Moebius guarded to i <= {MOBIUS_RECURSIVE_GUARD}")
    mu = [1]
    for n in range(1, i + 1):
        total = 0
        for d in range(n):
            if by_enumeration:
                mult = sum(1 for _ in enumerate_subspaces(q, n, d))
            else:
                mult = gaussian_binomial(n, d, q)
            total += mult * mu[d]
        mu.append(-total)
    return mu[i]


def max_power(n: int, p: int) -> int:
    if n < 1:
        raise DesignError(f"order must be positive, got {n}")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _integral(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise NonIntegralError(f"{what} = {x} is not an integer")
    return x.numerator


def gamma3(v: int, i: int, j: int) -> int:
    """Admissible ternary dual subspaces of dimension j+1 above a fixed one of dimension i+1."""
    if not 0 <= i <= j:
        raise DesignError(f"need 0 <= i <= j, got i={i}, j={j}")
    if v < 1 or v % 3**j:
        raise DesignError(f"3^{j} does not divide {v}")
    num = factorial(v // 3**i) ** (3**i)
    den = (
        3 ** ((j + i + 1) * (j - i) // 2)
        * factorial(v // 3**j) ** (3**j)
        * 2 ** (j - i)
        * q_factorial(j - i, 3)
    )
    return _integral(Fraction(num, den), f"Γ_{{{v},{i},{j}}}")


def gamma2(w: int, i: int, j: int) -> int:
    """Admissible binary dual subspaces of dimension j above a fixed one of dimension i."""
    if not 0 <= i <= j:
        raise DesignError(f"need 0 <= i <= j, got i={i}, j={j}")
    if w < 2 or w % 2**j:
        raise DesignError(f"2^{j} does not divide {w}")
    num = factorial(w // 2**i) ** (2**i)
    den = 2 ** ((j - i) * (j + i + 1) // 2) * factorial(w // 2**j) ** (2**j) * q_factorial(j - i, 2)
    return _integral(Fraction(num, den), f"Γ̇_{{{w},{i},{j}}}")


def _power(reg: CountRegistry, table: str, order: int, exponent: int) -> int:
    # zero exponents never touch the registry, so e.g. phi2(w, 0) needs no Lambda_w
    if exponent == 0:
        return 1
    return reg.lookup(table, order).value ** exponent


def phi3(v: int, j: int, reg: CountRegistry | None = None) -> int:
    """Psi_m^(3^j) * Lambda_m^(3^j (3^j - 1)/6) with m = v / 3^j."""
    reg = reg or registry_default()
    if j < 0 or v < 1 or v % 3**j:
        raise DesignError(f"3^{j} does not divide {v}")
    m, g = v // 3**j, 3**j
    psi = _power(reg, "psi", m, g)
    if psi == 0:
        return 0
    return psi * _power(reg, "lambda", m, g * (g - 1) // 6)


def phi2(w: int, j: int, reg: CountRegistry | None = None) -> int:
    """Psi_(m-1) * Pi_(m-1)^(2^j - 1) * Lambda_m^((2^j-1)(2^j-2)/6) with m = w / 2^j."""
    reg = reg or registry_default()
    if j < 0 or w < 2 or w % 2**j:
        raise DesignError(f"2^{j} does not divide {w}")
    m, g = w // 2**j, 2**j
    psi = _power(reg, "psi", m - 1, 1)
    if psi == 0:
        return 0
    return psi * _power(reg, "pi", m - 1, g - 1) * _power(reg, "lambda", m, (g - 1) * (g - 2) // 6)


@dataclass(frozen=True)
class Term:
    """One summand ``outer * gamma * mu * phi`` of a rank-stratum count."""

    j: int
    outer: int
    gamma: int
    mu: int
    phi: int

    @property
    def value(self) -> int:
        return self.outer * self.gamma * self.mu * self.phi


def _check_level(i: int, k: int) -> None:
    if not 0 <= i <= k:
        raise DesignError(f"level i={i} outside 0..{k}")


def upsilon3_terms(v: int, i: int, reg: CountRegistry | None = None, outer: int = 1) -> list[Term]:
    reg = reg or registry_default()
    k = max_power(v, 3)
    _check_level(i, k)
    return [
        Term(j, outer, gamma3(v, i, j), mobius_closed(3, j - i), phi3(v, j, reg))
        for j in range(i, k + 1)
    ]


def upsilon2_terms(w: int, i: int, reg: CountRegistry | None = None, outer: int = 1) -> list[Term]:
    reg = reg or registry_default()
    k = max_power(w, 2)
    _check_level(i, k)
    return [
        Term(j, outer, gamma2(w, i, j), mobius_closed(2, j - i), phi2(w, j, reg))
        for j in range(i, k + 1)
    ]


def upsilon3(v: int, i: int, reg: CountRegistry | None = None) -> int:
    total = sum(t.value for t in upsilon3_terms(v, i, reg))
    if total < 0:
        raise NonIntegralError(f"Υ_{{{v},{i}}} = {total} is negative")
    return total


def upsilon2(w: int, i: int, reg: CountRegistry | None = None) -> int:
    total = sum(t.value for t in upsilon2_terms(w, i, reg))
    if total < 0:
        raise NonIntegralError(f"Υ̇_{{{w - 1},{i}}} = {total} is negative")
    return total


def rank3_terms(v: int, r3: int, reg: CountRegistry | None = None) -> list[Term]:
    i = v - 1 - r3
    _check_level(i, max_power(v, 3))
    return upsilon3_terms(v, i, reg, outer=gamma3(v, 0, i))


def rank2_terms(v: int, r2: int, reg: CountRegistry | None = None) -> list[Term]:
    w = v + 1
    i = v - r2
    _check_level(i, max_power(w, 2))
    return upsilon2_terms(w, i, reg, outer=gamma2(w, 0, i))


def count_by_rank3(v: int, r3: int, reg: CountRegistry | None = None) -> int:
    """Labeled STS(v) of 3-rank exactly r3 (r3 = v - i - 1, 0 <= i <= k)."""
    total = sum(t.value for t in rank3_terms(v, r3, reg))
    if total < 0:
        raise NonIntegralError(f"negative count {total}")
    return total


def count_by_rank2(v: int, r2: int, reg: CountRegistry | None = None) -> int:
    """Labeled STS(v) of 2-rank exactly r2 (w = v + 1, r2 = w - i - 1, 0 <= i <= k)."""
    total = sum(t.value for t in rank2_terms(v, r2, reg))
    if total < 0:
        raise NonIntegralError(f"negative count {total}")
    return total


# -- closed forms for the explicit families ---------------------------------

FV = FactoredValue
_p = FactoredValue.prime_power

COROLLARY3_FORMS = ("rank_vk1", "rank_vk", "rank_vkp1", "seven_3k")
COROLLARY2_FORMS = ("rank_wk1", "rank_wk", "rank_wkp1", "rank_wkp2", "ten_2k")

_LAMBDA7 = FV.from_factors({2: 18, 3: 5, 5: 3, 7: 1, 1103: 1})
_LAMBDA8 = FV.from_factors({2: 28, 3: 5, 5: 2, 7: 2, 1361291: 1})
_LAMBDA9 = FV.from_factors({2: 35, 3: 8, 5: 2, 7: 2, 5231: 1, 3824477: 1})
_LAMBDA10 = FV.from_factors({2: 43, 3: 10, 5: 4, 7: 2, 31: 1, 37: 1, 547135293937: 1})


def _qfact(n: int, q: int) -> FactoredValue:
    return FV.from_int(q_factorial(n, q))


def _finish(prefactor: FactoredValue, bracket: Fraction | int = 1) -> int:
    x = prefactor.to_fraction() * Fraction(bracket)
    return _integral(x, "closed form")


def corollary3(form: str, k: int) -> int:
    """Closed-form ternary counts.

    rank_vk1, rank_vk, rank_vkp1: STS(3^k) of 3-rank v-k-1, v-k, v-k+1.
    seven_3k: STS(7*3^k) of 3-rank v-k-1.
    """
    F = Fraction
    if form == "seven_3k":
        if k < 0:
            raise DesignError("k must be >= 0")
        g = 3**k
        v = 7 * g
        pre = FV.factorial(v) * _LAMBDA7 ** (g * (g - 1) // 6)
        pre = pre / (_p(2, k) * _p(3, F(k * (k + 1), 2)) * FV.from_int(168) ** g * _qfact(k, 3))
        return _finish(pre)
    v = 3**k
    if form == "rank_vk1":
        if k < 0:
            raise DesignError("k must be >= 0")
        return _finish(FV.factorial(v) / (_p(3, F(k * (k + 1), 2)) * _p(2, k) * _qfact(k, 3)))
    if form == "rank_vk":
        if k < 1:
            raise DesignError("rank_vk needs k >= 1")
        t = _p(2, F(v * v, 27) - F(4 * v, 9) + 1) * _p(3, F(v * v, 54) - F(7 * v, 18) + k)
        bracket = collapse_sum([t]) - 1
        pre = FV.factorial(v) / (_p(2, k) * _p(3, F(k * (k + 1), 2)) * _qfact(k - 1, 3))
        return _finish(pre, bracket)
    if form == "rank_vkp1":
        if k < 2:
            raise DesignError("rank_vkp1 needs k >= 2")
        # 3-exponent of the first term is v/3 - 2k + 2; with +1 the k=2 value is 1680, not 0
        t1 = _LAMBDA9 ** F(v * (v - 9), 486) / (
            _p(2, F(4 * v, 9) - 4) * _p(3, F(v, 3) - 2 * k + 2)
        )
        t2 = _p(2, F(v * v, 27) - F(4 * v, 9) + 3) * _p(3, F(v * v, 54) - F(7 * v, 18) + k - 1)
        bracket = collapse_sum([t1]) - collapse_sum([t2]) + 1
        pre = FV.factorial(v) / (
            _p(2, k + 2) * _p(3, F(k * (k + 1), 2) - 1) * _qfact(k - 2, 3)
        )
        return _finish(pre, bracket)
    raise DesignError(f"unknown ternary form {form!r}; choose from {COROLLARY3_FORMS}")


def corollary2(form: str, k: int) -> int:
    """Closed-form binary counts.

    rank_wk1, rank_wk, rank_wkp1, rank_wkp2: STS(2^k - 1) of 2-rank w-k-1 .. w-k+2.
    ten_2k: STS(10*2^k - 1) of 2-rank 10*2^k - 1 - k.
    """
    F = Fraction
    if form == "ten_2k":
        if k < 0:
            raise DesignError("k must be >= 0")
        w = 2**k
        pre = (
            FV.factorial(10 * w)
            * FV.from_int(122556672) ** (w - 1)
            * _LAMBDA10 ** ((w - 1) * (w - 2) // 6)
        )
        pre = pre / (_p(2, F(k * (k + 1), 2) + 5) * FV.from_int(135) * _qfact(k, 2))
        return _finish(pre)
    w = 2**k
    e_a = F(w * w, 24) - F(3 * w, 4) + k  # shared exponent skeleton
    e_b = F(w * w, 16) - F(5 * w, 4) + 2 * k
    e_c = F(w * w, 48) - F(w, 4) + F(2, 3)
    if form == "rank_wk1":
        if k < 1:
            raise DesignError("rank_wk1 needs k >= 1")
        return _finish(FV.factorial(w) / (_p(2, F(k * (k + 1), 2)) * _qfact(k, 2)))
    if form == "rank_wk":
        if k < 1:
            raise DesignError("rank_wk needs k >= 1")
        bracket = collapse_sum([_p(2, e_a + F(1, 3))]) - 1
        return _finish(FV.factorial(w) / (_p(2, F(k * (k + 1), 2)) * _qfact(k - 1, 2)), bracket)
    if form == "rank_wkp1":
        if k < 2:
            raise DesignError("rank_wkp1 needs k >= 2")
        t1 = _p(3, e_c) * _p(2, e_b - 1)
        t2 = _p(2, e_a - F(2, 3))
        bracket = collapse_sum([t1]) - 3 * collapse_sum([t2]) + 1
        pre = FV.factorial(w) / (FV.from_int(3) * _p(2, F((k + 2) * (k - 1), 2)) * _qfact(k - 2, 2))
        return _finish(pre, bracket)
    if form == "rank_wkp2":
        if k < 3:
            raise DesignError("rank_wkp2 needs k >= 3")
        t1 = (
            FV.from_int(780) ** (F(w, 8) - 1)
            * _LAMBDA8 ** (F(w * w, 384) - F(w, 16) + F(1, 3))
            * _p(2, 3 * k - 12)
        )
        t2 = _p(2, e_b - 3) * _p(3, e_c)
        t3 = _p(2, e_a - F(5, 3))
        bracket = collapse_sum([t1]) - 7 * collapse_sum([t2]) + 7 * collapse_sum([t3]) - 1
        pre = FV.factorial(w) / (
            FV.from_int(21) * _p(2, F(k * (k + 1), 2) - 3) * _qfact(k - 3, 2)
        )
        return _finish(pre, bracket)
    raise DesignError(f"unknown binary form {form!r}; choose from {COROLLARY2_FORMS}")


def corollary_target(family: str, form: str, k: int) -> tuple[int, int, int]:
    """(prime, order, rank) described by a closed form at parameter k."""
    if family == "gf3":
        if form == "seven_3k":
            v = 7 * 3**k
            return 3, v, v - k - 1
        v = 3**k
        shift = {"rank_vk1": -1, "rank_vk": 0, "rank_vkp1": 1}[form]
        return 3, v, v - k + shift
    if form == "ten_2k":
        w = 10 * 2**k
        return 2, w - 1, w - 1 - k
    w = 2**k
    shift = {"rank_wk1": -1, "rank_wk": 0, "rank_wkp1": 1, "rank_wkp2": 2}[form]
    return 2, w - 1, w - k + shift
