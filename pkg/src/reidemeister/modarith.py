"""Exact integer arithmetic: factorization, valuations, CRT, unit orders and gcd witnesses.

Everything here works on Python ints and is pure. Residues are always
returned as canonical representatives in ``[0, modulus)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from .errors import ValidationError

Factorization = list[tuple[int, int]]


def gcd(*values: int) -> int:
    """Nonnegative gcd of any number of integers; ``gcd(0, 0) == 0``."""
    return math.gcd(*values)


def lcm(*values: int) -> int:
    return math.lcm(*values)


def factorize(k: int) -> Factorization:
    """Prime factorization by trial division, as ``[(prime, exponent), ...]`` ascending."""
    if k < 1:
        raise ValueError(f"factorize needs k >= 1, got {k}")
    out: Factorization = []
    q = 2
    while q * q <= k:
        if k % q == 0:
            e = 0
            while k % q == 0:
                k //= q
                e += 1
            out.append((q, e))
        q += 1 if q == 2 else 2
    if k > 1:
        out.append((k, 1))
    return out


def is_prime(k: int) -> bool:
    if k < 2:
        return False
    return factorize(k) == [(k, 1)]


def prime_powers(k: int) -> list[int]:
    return [q**e for q, e in factorize(k)]


def divisors(k: int) -> list[int]:
    """All positive divisors of ``k`` in ascending order."""
    divs = [1]
    for q, e in factorize(k):
        divs = [d * q**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def totient(k: int) -> int:
    out = k
    for q, _ in factorize(k):
        out -= out // q
    return out


def valuation(k: int, q: int) -> int:
    """Largest ``e`` with ``q**e | k``. Undefined (and rejected) for ``k == 0``."""
    if k == 0:
        raise ValueError("valuation of 0 is infinite")
    if q < 2:
        raise ValueError(f"valuation base must be >= 2, got {q}")
    k = abs(k)
    e = 0
    while k % q == 0:
        k //= q
        e += 1
    return e


def units(k: int) -> list[int]:
    """Canonical representatives of the unit group mod ``k`` (``[0]`` for ``k == 1``)."""
    if k == 1:
        return [0]
    return [u for u in range(1, k) if math.gcd(u, k) == 1]


def crt_solve(system: Iterable[tuple[int, int]]) -> tuple[int, int]:
    """Solve ``x = r_i mod m_i`` for pairwise coprime moduli.

    Returns ``(x, M)`` with ``M`` the product of the moduli and ``0 <= x < M``.
    Raises ``ValueError`` when two moduli share a factor.
    """
    pairs = [(r, m) for r, m in system]
    for r, m in pairs:
        if m < 1:
            raise ValueError(f"modulus must be positive, got {m}")
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            if math.gcd(pairs[i][1], pairs[j][1]) != 1:
                raise ValueError(
                    f"moduli {pairs[i][1]} and {pairs[j][1]} are not coprime"
                )
    M = reduce(lambda acc, rm: acc * rm[1], pairs, 1)
    x = 0
    for r, m in pairs:
        if m == 1:
            continue
        rest = M // m
        x += r * rest * pow(rest, -1, m)
    return x % M, M


def mult_order(a: int, k: int) -> int:
    """Multiplicative order of ``a`` modulo ``k``."""
    if k < 1:
        raise ValueError(f"modulus must be positive, got {k}")
    if math.gcd(a, k) != 1:
        raise ValueError(f"{a} is not a unit mod {k} (gcd = {math.gcd(a, k)})")
    if k == 1:
        return 1
    a %= k
    order = totient(k)
    for q, _ in factorize(order):
        while order % q == 0 and pow(a, order // q, k) == 1:
            order //= q
    return order


def inverse(a: int, k: int) -> int:
    return pow(a, -1, k) if k > 1 else 0


@dataclass(frozen=True)
class WitnessProblem:
    """Input of the gcd-witness construction.

    Find ``g`` with ``gcd(g, n) = 1`` and ``gcd(g - a**i, n) = targets[i]``
    for ``i = 0..p-1``.
    """

    n: int
    p: int
    a: int
    targets: tuple[int, ...]

    def validate(self) -> None:
        n, p, a, d = self.n, self.p, self.a, self.targets
        if n < 1:
            raise ValidationError(f"n must be positive, got {n}")
        if not is_prime(p):
            raise ValidationError(f"p = {p} is not prime")
        if n % p == 0:
            raise ValidationError(f"p = {p} divides n = {n}")
        if len(d) != p:
            raise ValidationError(f"need exactly p = {p} targets, got {len(d)}")
        if math.gcd(a, n) != 1:
            raise ValidationError(f"gcd(a, n) = {math.gcd(a, n)} != 1")
        if math.gcd(a - 1, n) != 1:
            raise ValidationError(f"gcd(a - 1, n) = {math.gcd(a - 1, n)} != 1")
        if n > 1 and mult_order(a, n) != p:
            raise ValidationError(
                f"a = {a} has order {mult_order(a, n)} mod {n}, expected {p}"
            )
        for i, di in enumerate(d):
            if di < 1 or n % di:
                raise ValidationError(f"d_{i} = {di} does not divide n = {n}")
        for i in range(p):
            for j in range(i + 1, p):
                if math.gcd(d[i], d[j]) != 1:
                    raise ValidationError(
                        f"d_{i} = {d[i]} and d_{j} = {d[j]} are not coprime"
                    )
        if p == 2 and n % 3 == 0 and (d[0] * d[1]) % 3:
            raise ValidationError(
                "p = 2 and 3 | n require 3 | d_0 * d_1 (neither target is a multiple of 3)"
            )

    def check(self, gamma: int) -> bool:
        n = self.n
        if math.gcd(gamma, n) != 1:
            return False
        return all(
            math.gcd(gamma - pow(self.a, i, n), n) == di
            for i, di in enumerate(self.targets)
        )


def gcd_witness(problem: WitnessProblem) -> int:
    """Constructive solution of a :class:`WitnessProblem`, as a residue mod ``n``.

    For each prime power ``q**e || n`` that divides some target ``d_i`` exactly
    as ``q**f``, impose ``x - a**i = q**f (mod q**e)``. The prime powers used by
    no target are collected in ``q_rest`` with ``x = -1`` (p odd) or ``x = 3``
    (p = 2) modulo ``q_rest``.
    """
    problem.validate()
    n, p, a = problem.n, problem.p, problem.a
    if n == 1:
        return 0
    system: list[tuple[int, int]] = []
    rest = 1
    for q, e in factorize(n):
        qe = q**e
        owner = None
        for i, di in enumerate(problem.targets):
            f = valuation(di, q)
            if f:
                owner = (i, f)
                break
        if owner is None:
            rest *= qe
        else:
            i, f = owner
            system.append(((pow(a, i, qe) + q**f) % qe, qe))
    if rest > 1:
        system.append(((-1 if p != 2 else 3) % rest, rest))
    gamma, modulus = crt_solve(system)
    assert modulus == n
    if not problem.check(gamma):
        raise RuntimeError(f"gcd witness construction failed for {problem}")
    return gamma


def cyclic_witness(n: int, d: int) -> int:
    """A unit ``g`` mod ``n`` with ``gcd(g - 1, n) = d``.

    ``d`` must divide ``n`` and be even whenever ``n`` is even.
    """
    if n < 1 or d < 1 or n % d:
        raise ValidationError(f"{d} does not divide {n}")
    if n % 2 == 0 and d % 2:
        raise ValidationError(f"n = {n} is even, so d must be even (got {d})")
    if n == 1:
        return 0
    system = []
    rest = 1
    for q, e in factorize(n):
        f = valuation(d, q)
        if f:
            system.append(((1 + q**f) % q**e, q**e))
        else:
            rest *= q**e
    if rest > 1:
        system.append((rest - 1, rest))
    gamma, _ = crt_solve(system)
    assert math.gcd(gamma, n) == 1 and math.gcd(gamma - 1, n) == d
    return gamma


def elements_of_order(p: int, k: int) -> list[int]:
    """Residues mod ``k`` of multiplicative order exactly ``p``."""
    return [u for u in units(k) if k > 1 and pow(u, p, k) == 1 and u != 1]


def product(values: Sequence[int]) -> int:
    return math.prod(values)
