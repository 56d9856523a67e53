import random

import numpy as np

from cmsr.model import Instance

# Travel times of the two-taxi illustration: taxi 1 drives 0->1->2->3, taxi 2 drives 0->2->1->3.
FIG1_LEGS = {(0, 1): 10, (1, 2): 10, (2, 3): 15, (0, 2): 12, (2, 1): 15, (1, 3): 20, (3, 4): 9}
FIG1_RATES = (0.013, 0.021, 0.008, 0.017)


def fig1_travel(n=4, filler=25):
    T = np.full((n + 1, n + 1), filler, dtype=np.int64)
    np.fill_diagonal(T, 0)
    for (a, b), t in FIG1_LEGS.items():
        if a <= n and b <= n:
            T[a, b] = t
    return T


def random_case(rng: random.Random, max_n=10, max_k=4, max_l=4, partial=True, max_time=40):
    """A random instance and a random recommendation over it (route lengths may differ)."""
    n = rng.randint(1, max_n)
    k = rng.randint(1, max_k)
    l = rng.randint(1, min(max_l, n))
    T = np.array([[0 if i == j else rng.randint(0, max_time) for j in range(n + 1)] for i in range(n + 1)])
    inst = Instance(n, [rng.uniform(0.002, 0.2) for _ in range(n)], T, rng.randint(0, 80), l, k)
    rec = tuple(
        tuple(rng.sample(range(1, n + 1), rng.randint(1, l) if partial else l)) for _ in range(k)
    )
    return inst, rec
