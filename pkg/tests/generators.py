"""Seeded random inputs shared by the module tests and the acceptance suite."""

import numpy as np


def separated_values(rng, count, lo=-3.0, hi=3.0, gap=0.5):
    while True:
        v = rng.uniform(lo, hi, count)
        if count < 2 or np.min(np.diff(np.sort(v))) >= gap:
            return v


def random_jordan_matrix(rng, n, gap=0.5):
    """S D S^-1 with D a random real block form: scalars, 2x2 rotations-scalings and 2x2 Jordan blocks.

    Block centers are separated by ``gap`` so the clustering threshold is never ambiguous.
    """
    kinds = []
    k = 0
    while k < n:
        kind = int(rng.integers(3))
        if kind > 0 and k + 2 <= n:
            kinds.append("complex" if kind == 2 else "jordan")
            k += 2
        else:
            kinds.append("real")
            k += 1
    centers = separated_values(rng, len(kinds), gap=gap)
    D = np.zeros((n, n))
    k = 0
    for kind, c in zip(kinds, centers):
        if kind == "complex":
            b = rng.uniform(0.5, 2.0)
            D[k : k + 2, k : k + 2] = [[c, -b], [b, c]]
            k += 2
        elif kind == "jordan":
            D[k : k + 2, k : k + 2] = [[c, 1.0], [0.0, c]]
            k += 2
        else:
            D[k, k] = c
            k += 1
    S = rng.standard_normal((n, n)) + 3 * np.eye(n)
    return S @ D @ np.linalg.inv(S)


def well_conditioned(rng, n, max_cond=1e3):
    while True:
        S = rng.standard_normal((n, n)) + 2 * np.eye(n)
        if np.linalg.cond(S) <= max_cond:
            return S


def real_spectrum_cases(rng, count):
    out = []
    while len(out) < count:
        n = int(rng.integers(2, 5))
        vals = np.sort(rng.uniform(-2, 2, n))
        if np.min(np.diff(vals)) < 0.5:
            continue
        S = rng.standard_normal((n, n)) + 2 * np.eye(n)
        if np.linalg.cond(S) > 100:
            continue
        v = rng.standard_normal(n)
        out.append((S @ np.diag(vals) @ np.linalg.inv(S), v / np.linalg.norm(v)))
    return out
