from __future__ import annotations

import json
from fractions import Fraction
from math import factorial, prod

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stsrank.errors import DesignError, NonIntegralError, UnknownConstantError
from stsrank.factored import FactoredValue as FV
from stsrank.factored import collapse_sum, factorint
from stsrank.registry import CountRegistry, Entry, registry_default, registry_load


@given(st.integers(1, 10**12))
def test_factorint_reconstructs(n):
    factors, rest = factorint(n)
    assert rest == 1
    assert prod(p**e for p, e in factors.items()) == n


def test_factorint_leaves_large_cofactor():
    big = (2**61 - 1) * (2**31 - 1)
    factors, rest = factorint(big, limit=1000)
    assert factors == {} and rest == big


@given(st.integers(-10**9, 10**9), st.integers(1, 10**6))
def test_fraction_round_trip(a, b):
    x = Fraction(a, b)
    assert FV.from_fraction(x).to_fraction() == x


@given(st.integers(1, 10**9), st.integers(1, 10**9))
def test_multiplication_and_division(a, b):
    fa, fb = FV.from_int(a), FV.from_int(b)
    assert (fa * fb).to_int() == a * b
    assert (fa * fb / fb).to_int() == a


@given(st.integers(0, 60))
def test_factorial_by_legendre(n):
    assert FV.factorial(n).to_int() == factorial(n)


def test_rational_exponents_collapse_only_in_combination():
    a = FV.prime_power(2, Fraction(1, 3))
    with pytest.raises(NonIntegralError):
        a.to_int()
    assert (a * FV.prime_power(2, Fraction(2, 3))).to_int() == 2
    assert (FV.from_int(8) ** Fraction(1, 3)).to_int() == 2
    assert collapse_sum([FV.from_int(3), FV.from_int(-5)]) == -2
    with pytest.raises(NonIntegralError):
        FV.from_int(2).inverse().to_int()


def test_zero_and_signs():
    assert (FV.from_int(0) * FV.from_int(7)).to_int() == 0
    assert (FV.from_int(-3) ** 3).to_int() == -27
    with pytest.raises(ZeroDivisionError):
        FV.from_int(0).inverse()


def test_default_registry_constants():
    reg = registry_default()
    assert reg.psi(7) == 30 and reg.psi(9) == 840
    assert reg.lam(4) == 576 and reg.pi(7) == 31449600 == factorial(7) * 6240
    assert reg.lookup("lambda", 10).provenance == "published"
    assert reg.psi(5) == 0 and reg.lookup("psi", 5).provenance == "computed"


def test_missing_constant_names_symbol():
    with pytest.raises(UnknownConstantError, match="Λ_5"):
        registry_default().lam(5)
    with pytest.raises(UnknownConstantError, match="Ψ_13"):
        registry_default().psi(13)


def test_extend_and_conflicts():
    reg = registry_default().extend("lambda", 5, 161280, "computed")
    assert reg.lam(5) == 161280
    assert reg.extend("lambda", 5, 161280) is reg
    with pytest.raises(DesignError, match="conflicting"):
        reg.extend("lambda", 5, 1)
    with pytest.raises(DesignError, match="fixed to 0"):
        reg.extend("psi", 5, 3)
    with pytest.raises(DesignError):
        reg.extend("omega", 1, 1)
    with pytest.raises(UnknownConstantError):
        registry_default().lam(5)  # the original is untouched
    with pytest.raises(TypeError):
        reg.tables["lambda"][6] = Entry(1, "x")  # type: ignore[index]


def test_load_from_file(tmp_path):
    path = tmp_path / "reg.json"
    path.write_text(json.dumps({"psi": {"13": "1197504000"}, "lambda": {"5": "161280"}}))
    reg = registry_load(path)
    assert reg.psi(13) == 1197504000 and reg.lam(5) == 161280
    assert reg.lookup("psi", 13).provenance == "user-supplied"
    assert reg.to_json()["psi"]["13"] == "1197504000"
    path.write_text(json.dumps({"lambda": {"4": "577"}}))
    with pytest.raises(DesignError, match="conflicting"):
        registry_load(path)
    path.write_text(json.dumps({"lambda": {"4": "abc"}}))
    with pytest.raises(DesignError, match="malformed"):
        registry_load(path)
    path.write_text("[")
    with pytest.raises(DesignError):
        registry_load(path)


def test_empty_registry():
    with pytest.raises(UnknownConstantError):
        CountRegistry().psi(7)
