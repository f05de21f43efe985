"""Acceptance gate: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
"""

from __future__ import annotations

import contextlib
import io
import random
import sys
import time
from math import factorial
from typing import Callable

import pytest

from stsrank import counting as ct
from stsrank.cli import main
from stsrank.design import check_rank_exclusion
from stsrank.enumerator import (
    census_rank,
    count_latin,
    enum_one_factorizations,
    enum_orthogonal_sts,
    enum_sts,
    iter_orthogonal_sts,
    iter_sts,
)
from stsrank.gf_linalg import is_orthogonal_design
from stsrank.registry import registry_default
from stsrank.structure import (
    Ingredients2,
    compose,
    decompose,
    partition_for,
    random_ingredients,
    random_symmetric_square,
)

Result = tuple[bool, str]


def _cli(*argv: str) -> tuple[int, str]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def _failures(pairs: list[tuple[str, object, object]]) -> list[str]:
    return [f"{name}: got {got}, expected {want}" for name, got, want in pairs if got != want]


def check_1() -> Result:
    t0 = time.perf_counter()
    code, out = _cli("count", "--prime", "3", "--order", "27", "--rank", "24")
    dt = time.perf_counter() - t0
    ok = code == 0 and out.strip() == "22300404167684260773163008000000" and dt < 1.0
    return ok, f"output {out.strip()} in {dt:.3f}s"


def check_2() -> Result:
    t0 = time.perf_counter()
    n7 = enum_sts(7)
    t7 = time.perf_counter() - t0
    t0 = time.perf_counter()
    n9 = enum_sts(9)
    t9 = time.perf_counter() - t0
    reg = registry_default()
    c72, c93 = census_rank(7, 2), census_rank(9, 3)
    c73, c92 = census_rank(7, 3), census_rank(9, 2)
    pairs = [
        ("enum_sts(7)", n7, 30),
        ("enum_sts(9)", n9, 840),
        ("census(7,2)", c72.histogram, {4: 30}),
        ("census(9,3)", c93.histogram, {6: 840}),
        ("count_by_rank2(7,4)", ct.count_by_rank2(7, 4, reg), c72.histogram[4]),
        ("count_by_rank3(9,6)", ct.count_by_rank3(9, 6, reg), c93.histogram[6]),
        ("other 2-strata of STS(7)", [ct.count_by_rank2(7, r, reg) for r in (5, 6, 7)], [0, 0, 0]),
        ("other 3-strata of STS(9)", [ct.count_by_rank3(9, r, reg) for r in (7, 8)], [0, 0]),
        ("census(7,3)", c73.histogram, {6: ct.count_by_rank3(7, 6, reg)}),
        ("census(9,2)", c92.histogram, {9: ct.count_by_rank2(9, 9, reg)}),
        ("count_by_rank2(9,8)", ct.count_by_rank2(9, 8, reg), 0),
    ]
    bad = _failures(pairs)
    if t7 >= 1.0 or t9 >= 60.0:
        bad.append(f"too slow: STS(7) {t7:.2f}s, STS(9) {t9:.2f}s")
    return not bad, "; ".join(bad) or f"STS(7) {t7:.2f}s, STS(9) {t9:.2f}s, all strata agree"


def _explained_upsilon(prime: int, order: int, i: int) -> tuple[int, list[int]]:
    """Υ at level i read off ``count --explain`` (outer factor divided back out)."""
    rank = order - 1 - i if prime == 3 else order - i
    code, out = _cli("count", "--prime", str(prime), "--order", str(order), "--rank", str(rank), "--explain")
    assert code == 0, out
    lines = out.strip().splitlines()
    fields = [dict(f.split("=", 1) for f in ln.split("\t")) for ln in lines[:-1]]
    total = int(lines[-1].split("=", 1)[1])
    terms = [int(f["term"]) for f in fields]
    if sum(terms) != total:
        raise AssertionError(f"terms {terms} do not re-sum to {total}")
    outer = int(fields[0]["outer"])
    lib = ct.upsilon3_terms(order, i) if prime == 3 else ct.upsilon2_terms(order + 1, i)
    if [outer * t.value for t in lib] != terms:
        raise AssertionError("CLI terms differ from library terms")
    return total // outer, [t // outer for t in terms]


def check_3() -> Result:
    cases = [(3, 9, 0, 0), (3, 9, 1, 0), (2, 7, 0, 0), (2, 7, 1, 0), (2, 7, 2, 0), (2, 7, 3, 1)]
    bad, shown = [], []
    for prime, order, i, want in cases:
        got, terms = _explained_upsilon(prime, order, i)
        name = f"Υ{'' if prime == 3 else '̇'}_{{{order},{i}}}"
        shown.append(f"{name}={got} ({' + '.join(map(str, terms))})")
        if got != want:
            bad.append(f"{name}: got {got}, expected {want}")
    return not bad, "; ".join(bad) or ", ".join(shown)


def check_4() -> Result:
    t0 = time.perf_counter()
    bad = []
    for q in (2, 3):
        for i in range(5):
            if ct.mobius_recursive(q, i) != ct.mobius_closed(q, i):
                bad.append(f"mu^({q})_{i}")
        for i in range(1, 7):
            if sum(ct.gaussian_binomial(i, d, q) * ct.mobius_closed(q, d) for d in range(i + 1)):
                bad.append(f"sum-to-zero q={q} i={i}")
    dt = time.perf_counter() - t0
    if dt >= 10:
        bad.append(f"took {dt:.1f}s")
    return not bad, ", ".join(bad) or f"closed = enumerated (i <= 4), weighted sums vanish (i <= 6), {dt:.2f}s"


def check_5() -> Result:
    bad, n = [], 0
    families: list[tuple[Callable[[int, int, int], int], int, int]] = [
        (ct.gamma3, v, 3) for v in (9, 27)
    ] + [(ct.gamma2, w, 2) for w in (8, 16, 32)]
    for gamma, order, q in families:
        k = ct.max_power(order, q)
        for j in range(k + 1):
            for i in range(j + 1):
                n += 1
                if gamma(order, 0, i) * gamma(order, i, j) != gamma(order, 0, j) * ct.gaussian_binomial(j, i, q):
                    bad.append(f"{gamma.__name__}({order}) i={i} j={j}")
    return not bad, ", ".join(bad) or f"{n} chain identities hold exactly"


def check_6() -> Result:
    pairs = [
        ("corollary3(rank_vk1,2)", ct.corollary3("rank_vk1", 2), 840),
        ("corollary3(rank_vk,2)", ct.corollary3("rank_vk", 2), 0),
        ("corollary3(seven_3k,0)", ct.corollary3("seven_3k", 0), 30),
        ("corollary2(rank_wk,3)", ct.corollary2("rank_wk", 3), 0),
        ("corollary2(rank_wk,4)", ct.corollary2("rank_wk", 4), 6810804000),
        ("count_by_rank2(15,12)", ct.count_by_rank2(15, 12), 6810804000),
        ("corollary2(ten_2k,0)", ct.corollary2("ten_2k", 0), 840),
        ("count_by_rank2(15,11)", ct.count_by_rank2(15, 11), 64864800),
        ("15!/20160", factorial(15) // 20160, 64864800),
    ]
    bad = _failures(pairs)
    return not bad, "; ".join(bad) or "all seven identities exact"


def check_7() -> Result:
    reg = registry_default()
    k6 = enum_one_factorizations(6)
    pairs = [
        ("Λ3", count_latin(3), reg.lam(3)),
        ("Λ4", count_latin(4), reg.lam(4)),
        ("Π1", count_latin(1, symmetric=True), reg.pi(1)),
        ("Π3", count_latin(3, symmetric=True), reg.pi(3)),
        ("Ψ7", enum_sts(7), reg.psi(7)),
        ("Ψ9", enum_sts(9), reg.psi(9)),
        ("Λ5", count_latin(5), 161280),
        ("1F(K6)", k6, 6),
        ("Π5", count_latin(5, symmetric=True), factorial(5) * k6),
    ]
    t0 = time.perf_counter()
    k8 = enum_one_factorizations(8)
    pairs += [
        ("Π7 (extended)", count_latin(7, symmetric=True), reg.pi(7)),
        ("1F(K8) (extended)", k8, 6240),
        ("Π7 = 7!·1F(K8)", reg.pi(7), factorial(7) * k8),
    ]
    dt = time.perf_counter() - t0
    bad = _failures(pairs)
    return not bad, "; ".join(bad) or f"required and extended tiers match (extended {dt:.1f}s)"


def check_8() -> Result:
    want = {(3, 9, 1): 12, (3, 9, 2): 1, (2, 7, 1): 6, (2, 7, 2): 2, (2, 7, 3): 1}
    bad = []
    for (p, v, j), n in want.items():
        s, gp = partition_for(p, v, j)
        if enum_orthogonal_sts(s) != n:
            bad.append(f"count GF({p}) v={v} j={j}")
        for x in iter_orthogonal_sts(s):
            # compose validates every output; check orthogonality and the inverse map
            if not is_orthogonal_design(x, s) or compose(gp, decompose(x, s)) != x:
                bad.append(f"round trip GF({p}) v={v} j={j}")
                break
    return not bad, ", ".join(bad) or "Φ9,1=12 Φ9,2=1 Φ̇7,1=6 Φ̇7,2=2 Φ̇7,3=1, all round trips exact"


def _sts15_samples(rng: random.Random) -> list:
    out = []
    for j in (4, 3):
        out += list(iter_orthogonal_sts(partition_for(2, 15, j)[0]))
    _, gp2 = partition_for(2, 15, 2)
    out += [compose(gp2, random_ingredients(gp2, rng)) for _ in range(200)]
    s1, gp1 = partition_for(2, 15, 1)
    sevens = list(iter_sts(7))
    for _ in range(50):
        ing = Ingredients2(1, rng.choice(sevens), (random_symmetric_square(7, rng),), ())
        out.append(compose(gp1, ing))
    return out


def check_9() -> Result:
    bad = []
    counts = {}
    for v in (7, 9):
        systems = list(iter_sts(v))
        counts[v] = len(systems)
        bad += [f"STS({v}) violates" for s in systems if not check_rank_exclusion(s)][:1]
    samples = _sts15_samples(random.Random(20240601))
    bad += ["STS(15) sample violates" for s in samples if not check_rank_exclusion(s)][:1]
    detail = f"{counts[7]} STS(7), {counts[9]} STS(9), {len(samples)} composed STS(15)"
    return not bad, ", ".join(bad) or detail


CHECKS: dict[int, Callable[[], Result]] = {
    1: check_1, 2: check_2, 3: check_3, 4: check_4, 5: check_5,
    6: check_6, 7: check_7, 8: check_8, 9: check_9,
}


def _line(n: int, ok: bool, detail: str) -> str:
    return f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"


@pytest.mark.parametrize("n", sorted(CHECKS))
def test_criterion(n: int, capsys) -> None:
    ok, detail = CHECKS[n]()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for n, check in CHECKS.items():
        ok, detail = check()
        results.append(ok)
        print(_line(n, ok, detail), flush=True)
    sys.exit(0 if all(results) else 1)
