"""Seeded random rational instances for the property suites."""
from __future__ import annotations

import random
from fractions import Fraction as F

from motpaver.measures import DiscreteMeasure


def martingale_instance(seed: int, d: int, max_mu: int = 6, max_nu: int = 8, spread: int = 3):
    """(mu, nu) in convex order by construction.

    nu-atoms are drawn from a small integer grid; each mu-atom is the
    barycenter of a random weighted subset of them, so nu is the law of a
    one-step martingale started from mu.
    """
    rng = random.Random(seed)
    grid = [tuple(rng.randint(-spread, spread) for _ in range(d)) for _ in range(4 * max_nu)]
    ys = list(dict.fromkeys(grid))[: rng.randint(2, max_nu)]
    m = rng.randint(1, max_mu)
    xs, mu_w, nu_w = [], [], {y: F(0) for y in ys}
    for _ in range(m):
        k = rng.randint(1, min(len(ys), 4))
        sub = rng.sample(ys, k)
        q = [F(rng.randint(1, 5)) for _ in sub]
        tot = sum(q)
        x = tuple(sum(qq * y[r] for qq, y in zip(q, sub)) / tot for r in range(d))
        mass = F(rng.randint(1, 4))
        xs.append(x)
        mu_w.append(mass)
        for qq, y in zip(q, sub):
            nu_w[y] += mass * qq / tot
    total = sum(mu_w)
    used = [y for y in ys if nu_w[y] > 0]
    mu = DiscreteMeasure(xs, [w / total for w in mu_w])
    nu = DiscreteMeasure(used, [nu_w[y] / total for y in used])
    return mu, nu


def random_pair_1d(seed: int, max_atoms: int = 8):
    """Half the time ordered by construction, otherwise independent draws."""
    rng = random.Random(seed)
    if rng.random() < 0.5:
        return martingale_instance(seed, 1, max_atoms, max_atoms)
    def draw():
        k = rng.randint(1, max_atoms)
        pts = list(dict.fromkeys(F(rng.randint(-8, 8), rng.choice([1, 2])) for _ in range(k)))
        w = [F(rng.randint(1, 6)) for _ in pts]
        s = sum(w)
        return DiscreteMeasure([[p] for p in pts], [v / s for v in w])
    return draw(), draw()


def random_cost(seed: int, m: int, n: int, nonneg: bool = False):
    rng = random.Random(seed + 7919)
    lo = 0 if nonneg else -5
    return [[F(rng.randint(lo, 5), rng.choice([1, 2, 3])) for _ in range(n)] for _ in range(m)]
