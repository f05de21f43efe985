"""Command-line front end: counts, tables, ranks, enumeration, structure, self-checks."""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Any, Sequence

from . import counting as ct
from .design import (
    SteinerTripleSystem,
    check_rank_exclusion,
    rank_profile,
)
from .enumerator import (
    count_latin,
    enum_one_factorizations,
    enum_sts,
    iter_itsls,
    iter_latin,
    iter_one_factorizations,
    iter_sts,
)
from .errors import DesignError, StsRankError, UnknownConstantError
from .gf_linalg import GfMatrix, is_prime, rank
from .registry import CountRegistry, registry_default, registry_load
from .structure import (
    compose,
    decompose,
    full_dual,
    ingredients_from_json,
    ingredients_to_json,
    partition_for,
    partition_from_dual,
    random_ingredients,
    subspace_from_json,
    subspace_to_json,
)
from .verify import SUITES, run_suite

FAMILIES: dict[str, tuple[str, tuple[str, ...]]] = {
    "pow3": ("gf3", ("rank_vk1", "rank_vk", "rank_vkp1")),
    "seven_pow3": ("gf3", ("seven_3k",)),
    "pow2_minus1": ("gf2", ("rank_wk1", "rank_wk", "rank_wkp1", "rank_wkp2")),
    "ten_pow2_minus1": ("gf2", ("ten_2k",)),
}
KINDS = ("latin", "symmetric-latin", "itsls", "sts", "one-factorization")


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True)


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DesignError(f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise DesignError(f"{path}: {exc.strerror}") from None


def _registry(args: argparse.Namespace) -> CountRegistry:
    if args.registry:
        try:
            return registry_load(args.registry)
        except OSError as exc:
            raise DesignError(f"{args.registry}: {exc.strerror}") from None
    return registry_default()


# -- count / table -------------------------------------------------------------

def _rank_range(prime: int, order: int) -> range:
    """Ranks a deficient-or-full STS(order) can have over GF(prime)."""
    if prime == 3:
        return range(order - 1 - ct.max_power(order, 3), order)
    return range(order - ct.max_power(order + 1, 2), order + 1)


def _terms(prime: int, order: int, r: int, reg: CountRegistry) -> list[ct.Term]:
    if prime in (2, 3) and r not in _rank_range(prime, order):
        lo, hi = _rank_range(prime, order)[0], _rank_range(prime, order)[-1]
        raise DesignError(f"{prime}-rank {r} of STS({order}) is outside {lo}..{hi}")
    if prime == 3:
        return ct.rank3_terms(order, r, reg)
    if prime == 2:
        return ct.rank2_terms(order, r, reg)
    raise DesignError(f"rank strata are counted over GF(2) or GF(3), not GF({prime})")


def cmd_count(args: argparse.Namespace) -> None:
    if args.order < 1 or args.order % 6 not in (1, 3):
        raise DesignError(f"no STS of order {args.order}")
    terms = _terms(args.prime, args.order, args.rank, _registry(args))
    total = sum(t.value for t in terms)
    if args.json:
        out: dict[str, Any] = {"prime": args.prime, "order": args.order, "rank": args.rank, "count": str(total)}
        if args.explain:
            out["terms"] = [
                {"j": t.j, "outer": str(t.outer), "gamma": str(t.gamma), "mu": t.mu,
                 "phi": str(t.phi), "value": str(t.value)}
                for t in terms
            ]
        print(_dump(out))
        return
    if args.explain:
        for t in terms:
            print(f"j={t.j}\touter={t.outer}\tgamma={t.gamma}\tmu={t.mu}\tphi={t.phi}\tterm={t.value}")
        print(f"total={total}")
    else:
        print(total)


def _closed_form(field: str, form: str, k: int) -> int:
    return ct.corollary3(form, k) if field == "gf3" else ct.corollary2(form, k)


def _table_rows(family: str, k_max: int, reg: CountRegistry) -> list[dict[str, Any]]:
    field, forms = FAMILIES[family]
    rows = []
    for k in range(k_max + 1):
        for form in forms:
            p, v, r = ct.corollary_target(field, form, k)
            row: dict[str, Any] = {"k": k, "form": form, "order": v, "rank": r}
            try:
                value = _closed_form(field, form, k)
            except DesignError:
                row.update(count=None, check="-")
                rows.append(row)
                continue
            except ArithmeticError as exc:
                raise DesignError(f"{form} at k={k}: {exc}") from None
            row["count"] = str(value)
            try:
                thm = sum(t.value for t in _terms(p, v, r, reg))
            except (UnknownConstantError, DesignError):
                row["check"] = "-"
            else:
                if thm != value:
                    raise DesignError(f"{form} at k={k}: closed form {value} != theorem {thm}")
                row["check"] = "theorem"
            rows.append(row)
    return rows


def cmd_table(args: argparse.Namespace) -> None:
    rows = _table_rows(args.family, args.k_max, _registry(args))
    if args.json:
        print(_dump({"family": args.family, "rows": rows}))
        return
    print("k\tform\torder\trank\tcount\tcheck")
    for r in rows:
        count = r["count"] if r["count"] is not None else "-"
        print(f"{r['k']}\t{r['form']}\t{r['order']}\t{r['rank']}\t{count}\t{r['check']}")


# -- rank ----------------------------------------------------------------------

def _load_design_or_matrix(path: str) -> SteinerTripleSystem | GfMatrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DesignError(f"{path}: {exc.strerror}") from None
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        return SteinerTripleSystem.from_json(data.get("sts", data))
    return GfMatrix.from_text(text)


def cmd_rank(args: argparse.Namespace) -> None:
    if args.prime is not None and not is_prime(args.prime):
        raise DesignError(f"{args.prime} is not prime")
    obj = _load_design_or_matrix(args.input)
    if isinstance(obj, GfMatrix):
        if args.profile:
            raise DesignError("--profile needs an STS, not a matrix")
        if args.prime is not None and args.prime != obj.p:
            raise DesignError(f"matrix is over GF({obj.p}), --prime says {args.prime}")
        r = rank(obj)
        print(_dump({"prime": obj.p, "rank": r}) if args.json else r)
        return
    if not args.profile:
        if args.prime is None:
            raise DesignError("--prime is required unless --profile is given")
        r = obj.p_rank(args.prime)
        print(_dump({"prime": args.prime, "rank": r}) if args.json else r)
        return
    prof = rank_profile(obj)
    verdict = ("holds" if check_rank_exclusion(obj) else "violated") if obj.v > 3 else "n/a"
    out: dict[str, Any] = {"v": obj.v, "rank2": prof.rank2, "rank3": prof.rank3, "exclusion": verdict}
    if args.prime is not None and args.prime not in (2, 3):
        out[f"rank{args.prime}"] = obj.p_rank(args.prime)
    if args.json:
        print(_dump(out))
    else:
        for key, val in out.items():
            print(f"{key}\t{val}")
    if verdict == "violated":
        raise DesignError("system is deficient in both 2-rank and 3-rank")


# -- enumerate -------------------------------------------------------------------

def _factorization_json(fac) -> dict[str, Any]:
    return {"n": fac.n, "factors": [sorted(list(e) for e in f) for f in fac.factors]}


def _iter_kind(kind: str, n: int):
    if kind == "latin":
        return (sq.to_json() for sq in iter_latin(n))
    if kind == "symmetric-latin":
        return (sq.to_json() for sq in iter_latin(n, symmetric=True))
    if kind == "itsls":
        return (sq.to_json() for sq in iter_itsls(n))
    if kind == "sts":
        return (s.to_json() for s in iter_sts(n))
    return (_factorization_json(f) for f in iter_one_factorizations(n))


def _count_kind(kind: str, n: int, workers: int) -> int:
    if kind == "latin":
        return count_latin(n, workers=workers)
    if kind == "symmetric-latin":
        return count_latin(n, symmetric=True, workers=workers)
    if kind == "itsls":
        return sum(1 for _ in iter_itsls(n))
    if kind == "sts":
        return enum_sts(n, workers=workers)
    return enum_one_factorizations(n)


def cmd_enumerate(args: argparse.Namespace) -> None:
    if args.count_only:
        total = _count_kind(args.kind, args.n, args.threads)
    elif args.emit:
        total = 0
        with open(args.emit, "w") as fh:
            for obj in _iter_kind(args.kind, args.n):
                fh.write(_dump(obj) + "\n")
                total += 1
    else:
        total = sum(1 for _ in _iter_kind(args.kind, args.n))
    if args.json:
        print(_dump({"kind": args.kind, "n": args.n, "count": str(total)}))
    else:
        print(total)


# -- construct / decompose ---------------------------------------------------------

def cmd_construct(args: argparse.Namespace) -> None:
    if args.ingredients:
        data = _read_json(args.ingredients)
        ing = ingredients_from_json(data)
        if "subspace" in data:
            s = subspace_from_json(data["subspace"])
            if s.p != args.prime or s.ambient_dim != args.order:
                raise DesignError(
                    f"ingredients subspace lives in GF({s.p})^{s.ambient_dim}, "
                    f"expected GF({args.prime})^{args.order}"
                )
            gp = partition_from_dual(s)
        else:
            s, gp = partition_for(args.prime, args.order, ing.j)
        if args.j is not None and args.j != gp.j:
            raise DesignError(f"ingredients are for j={gp.j}, --j says {args.j}")
    else:
        if args.j is None:
            raise DesignError("--j is required without --ingredients")
        s, gp = partition_for(args.prime, args.order, args.j)
        seed = args.random if args.random is not None else args.seed
        ing = random_ingredients(gp, random.Random(seed))
    sts = compose(gp, ing)
    print(_dump({"sts": sts.to_json(), "subspace": subspace_to_json(s)}))


def cmd_decompose(args: argparse.Namespace) -> None:
    data = _read_json(args.input)
    sts = SteinerTripleSystem.from_json(data.get("sts", data) if isinstance(data, dict) else data)
    if args.subspace:
        s = subspace_from_json(_read_json(args.subspace))
    elif isinstance(data, dict) and "subspace" in data:
        s = subspace_from_json(data["subspace"])
    else:
        s = full_dual(sts, args.prime)
    if s.p != args.prime:
        raise DesignError(f"subspace is over GF({s.p}), --prime says {args.prime}")
    print(_dump(ingredients_to_json(decompose(sts, s), s)))


# -- verify -----------------------------------------------------------------------

def cmd_verify(args: argparse.Namespace) -> None:
    checks = run_suite(args.suite, _registry(args))
    failed = [c for c in checks if not c.ok]
    if args.json:
        print(_dump({"suite": args.suite, "checks": [
            {"name": c.name, "ok": c.ok, **({} if c.ok else {"detail": c.detail})} for c in checks
        ]}))
    else:
        for c in checks:
            print(f"PASS {c.name}" if c.ok else f"FAIL {c.name}: {c.detail}")
        print(f"{len(checks) - len(failed)}/{len(checks)} passed")
    if failed:
        raise StsRankError(f"{len(failed)} check(s) failed in suite {args.suite}")


# -- parser -------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1 so that exit 2 keeps meaning "unknown registry constant"."""

    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    # SUPPRESS defaults let the same flags appear before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--registry", metavar="PATH", default=argparse.SUPPRESS,
                        help="JSON file of extra Ψ/Λ/Π constants")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="emit structured JSON")
    common.add_argument("--threads", type=int, metavar="N", default=argparse.SUPPRESS,
                        help="worker processes for enumeration")
    common.add_argument("--seed", type=int, metavar="S", default=argparse.SUPPRESS,
                        help="seed for random construction")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(
        prog="stsrank",
        description="Exact counts and structure of Steiner triple systems with deficient 2- or 3-rank.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[common], help="number of STS(v) with a given p-rank")
    p.add_argument("--prime", type=int, required=True, choices=(2, 3))
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--explain", action="store_true", help="print every summand")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("table", parents=[common], help="closed-form values along a family")
    p.add_argument("family", choices=sorted(FAMILIES))
    p.add_argument("--k-max", type=int, default=3)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("rank", parents=[common], help="p-rank of an STS JSON or matrix file")
    p.add_argument("input")
    p.add_argument("--prime", type=int)
    p.add_argument("--profile", action="store_true", help="2-rank, 3-rank and exclusion verdict")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("enumerate", parents=[common], help="exhaustive search for small objects")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--emit", metavar="FILE", help="write one JSON object per line")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("construct", parents=[common], help="compose an STS over a canonical subspace")
    p.add_argument("--prime", type=int, required=True, choices=(2, 3))
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--j", type=int)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--ingredients", metavar="PATH")
    src.add_argument("--random", type=int, metavar="SEED")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("decompose", parents=[common], help="split an STS into its ingredients")
    p.add_argument("input")
    p.add_argument("--prime", type=int, required=True, choices=(2, 3))
    p.add_argument("--subspace", metavar="PATH")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", parents=[common], help="run a named self-check suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    if hasattr(sys, "set_int_max_str_digits"):
        # table rows at k >= 4 run to thousands of digits
        sys.set_int_max_str_digits(0)
    args = build_parser().parse_args(argv)
    for name, default in (("registry", None), ("json", False), ("threads", 1), ("seed", 0)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        args.func(args)
    except StsRankError as exc:
        print(f"stsrank: {exc}", file=sys.stderr)
        return exc.exit_code
    except json.JSONDecodeError as exc:
        print(f"stsrank: invalid JSON ({exc})", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
