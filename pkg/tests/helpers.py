"""Shared generators for tests."""
from __future__ import annotations

import random

from reidemeister import modarith as ma
from reidemeister.verify import sweep_parameters


def small_groups(max_order: int):
    return list(sweep_parameters(max_order))


def element_of_order_p(p: int, q: int, e: int, rng: random.Random) -> int:
    """A unit of multiplicative order exactly ``p`` modulo ``q^e`` (needs ``p | q - 1``)."""
    qe = q**e
    phi = qe - qe // q
    while True:
        u = rng.randrange(2, qe) if qe > 2 else 1
        if u % q == 0:
            continue
        t = pow(u, phi // p, qe)
        if t != 1:
            return t


def random_witness_problem(rng: random.Random, max_n: int = 10**5) -> ma.WitnessProblem:
    """A random valid instance: ``p`` in {2, 3, 5, 7}, primes of ``n`` all ``1 mod p``."""
    p = rng.choice([2, 3, 5, 7])
    primes = [q for q in range(3, 2000) if ma.is_prime(q) and (q - 1) % p == 0]
    weights = [1 / q for q in primes]
    n, parts = 1, []
    for _ in range(rng.choice([0, 1, 2, 2, 3, 3, 4, 4])):
        q = rng.choices(primes, weights)[0]
        e = rng.choice([1, 1, 1, 2, 3])
        if n % q == 0 or n * q**e > max_n:
            continue
        n *= q**e
        parts.append((q, e))
    system = []
    for q, e in parts:
        k = rng.randrange(1, p)
        system.append((pow(element_of_order_p(p, q, e, rng), k, q**e), q**e))
    a, _ = ma.crt_solve(system) if system else (0, 1)
    d = [1] * p
    for q, e in parts:
        slot = rng.randrange(-1, p)
        if p == 2 and q == 3 and slot < 0:
            slot = rng.randrange(p)
        if slot >= 0:
            d[slot] *= q ** rng.randint(1, e)
    return ma.WitnessProblem(n, p, a, tuple(d))
