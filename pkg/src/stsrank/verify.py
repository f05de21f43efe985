"""Named self-check suites run by ``stsrank verify``."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable, Iterator

from . import counting as ct
from .design import check_rank_exclusion
from .enumerator import (
    census_rank,
    count_latin,
    enum_one_factorizations,
    enum_orthogonal_sts,
    enum_sts,
    iter_orthogonal_sts,
    iter_sts,
)
from .registry import CountRegistry, registry_default
from .structure import compose, decompose, partition_for


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


def _eq(name: str, got, want) -> Check:
    return Check(name, got == want, f"got {got}, expected {want}")


def suite_mobius(reg: CountRegistry) -> Iterator[Check]:
    for q in (2, 3):
        for i in range(5):
            yield _eq(f"mu^({q})_{i} closed = enumerated", ct.mobius_recursive(q, i), ct.mobius_closed(q, i))
        for i in range(1, 7):
            s = sum(ct.gaussian_binomial(i, d, q) * ct.mobius_closed(q, d) for d in range(i + 1))
            yield _eq(f"sum_d [{i},d]_{q} mu_d = 0", s, 0)


def suite_gamma(reg: CountRegistry) -> Iterator[Check]:
    for v in (9, 27):
        k = ct.max_power(v, 3)
        for i in range(k + 1):
            for j in range(i, k + 1):
                lhs = ct.gamma3(v, 0, i) * ct.gamma3(v, i, j)
                rhs = ct.gamma3(v, 0, j) * ct.gaussian_binomial(j, i, 3)
                yield _eq(f"chain Γ_{v} i={i} j={j}", lhs, rhs)
    for w in (8, 16, 32):
        k = ct.max_power(w, 2)
        for i in range(k + 1):
            for j in range(i, k + 1):
                lhs = ct.gamma2(w, 0, i) * ct.gamma2(w, i, j)
                rhs = ct.gamma2(w, 0, j) * ct.gaussian_binomial(j, i, 2)
                yield _eq(f"chain Γ̇_{w} i={i} j={j}", lhs, rhs)
    yield _eq("Γ_{9,0,1}", ct.gamma3(9, 0, 1), factorial(9) // 6**3 // 6)
    yield _eq("Γ̇_{8,0,1}", ct.gamma2(8, 0, 1), 35)


def suite_census(reg: CountRegistry) -> Iterator[Check]:
    yield _eq("Λ_3", count_latin(3), reg.lam(3))
    yield _eq("Λ_4", count_latin(4), reg.lam(4))
    yield _eq("Λ_5", count_latin(5), 161280)
    yield _eq("Π_1", count_latin(1, symmetric=True), reg.pi(1))
    yield _eq("Π_3", count_latin(3, symmetric=True), reg.pi(3))
    yield _eq("Π_5 = 5! x #1F(K_6)", count_latin(5, symmetric=True), 120 * enum_one_factorizations(6))
    yield _eq("#1F(K_6)", enum_one_factorizations(6), 6)
    yield _eq("Ψ_7", enum_sts(7), reg.psi(7))
    yield _eq("Ψ_9", enum_sts(9), reg.psi(9))
    c72 = census_rank(7, 2)
    yield _eq("census STS(7) over GF(2)", c72.histogram, {4: ct.count_by_rank2(7, 4, reg)})
    c93 = census_rank(9, 3)
    yield _eq("census STS(9) over GF(3)", c93.histogram, {6: ct.count_by_rank3(9, 6, reg)})
    for r in (5, 6, 7):
        yield _eq(f"N2(7, {r}) = 0", ct.count_by_rank2(7, r, reg), 0)
    for r in (7, 8):
        yield _eq(f"N3(9, {r}) = 0", ct.count_by_rank3(9, r, reg), 0)


def suite_corollaries(reg: CountRegistry) -> Iterator[Check]:
    yield _eq("rank_vk1 k=2", ct.corollary3("rank_vk1", 2), 840)
    yield _eq("rank_vk k=2", ct.corollary3("rank_vk", 2), 0)
    yield _eq("seven_3k k=0", ct.corollary3("seven_3k", 0), 30)
    yield _eq("rank_wk k=3", ct.corollary2("rank_wk", 3), 0)
    yield _eq("rank_wk k=4", ct.corollary2("rank_wk", 4), ct.count_by_rank2(15, 12, reg))
    yield _eq("ten_2k k=0", ct.corollary2("ten_2k", 0), 840)
    yield _eq("N2(15, 11) = 15!/20160", ct.count_by_rank2(15, 11, reg), factorial(15) // 20160)
    checks = [("gf3", f, k) for f in ("rank_vk1", "rank_vk") for k in (1, 2, 3)]
    checks += [("gf3", "rank_vkp1", k) for k in (2, 3)] + [("gf3", "seven_3k", k) for k in (0, 1)]
    checks += [("gf2", f, k) for f in ("rank_wk1", "rank_wk") for k in (1, 2, 3, 4)]
    checks += [("gf2", "rank_wkp1", k) for k in (2, 3, 4)] + [("gf2", "rank_wkp2", k) for k in (3, 4)]
    checks += [("gf2", "ten_2k", k) for k in (0, 1)]
    for fam, form, k in checks:
        p, v, r = ct.corollary_target(fam, form, k)
        closed = ct.corollary3(form, k) if fam == "gf3" else ct.corollary2(form, k)
        thm = ct.count_by_rank3(v, r, reg) if p == 3 else ct.count_by_rank2(v, r, reg)
        yield _eq(f"{form} k={k} = theorem N{p}({v}, {r})", closed, thm)


def suite_structure(reg: CountRegistry) -> Iterator[Check]:
    cases = [(3, 9, 1), (3, 9, 2), (2, 7, 1), (2, 7, 2), (2, 7, 3)]
    for p, v, j in cases:
        s, gp = partition_for(p, v, j)
        systems = list(iter_orthogonal_sts(s))
        want = ct.phi3(v, j, reg) if p == 3 else ct.phi2(v + 1, j, reg)
        yield _eq(f"#orthogonal GF({p}) v={v} j={j}", len(set(systems)), want)
        ok = all(compose(gp, decompose(x, s)) == x for x in systems)
        yield Check(f"round trip GF({p}) v={v} j={j}", ok)
    yield _eq("Φ_{9,1} via enumerator", enum_orthogonal_sts(partition_for(3, 9, 1)[0]), 12)


def suite_exclusion(reg: CountRegistry) -> Iterator[Check]:
    for v in (7, 9):
        bad = [s for s in iter_sts(v) if not check_rank_exclusion(s)]
        yield Check(f"no STS({v}) deficient in both ranks", not bad, f"{len(bad)} counterexamples")


SUITES: dict[str, Callable[[CountRegistry], Iterator[Check]]] = {
    "mobius": suite_mobius,
    "gamma": suite_gamma,
    "census": suite_census,
    "corollaries": suite_corollaries,
    "structure": suite_structure,
    "exclusion": suite_exclusion,
}


def run_suite(name: str, reg: CountRegistry | None = None) -> list[Check]:
    return list(SUITES[name](reg or registry_default()))
