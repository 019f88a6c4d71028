"""Real Jordan decomposition A = A_n + A_h + A_e.

A_s = A_h + A_e is the semisimple part, A_h has real spectrum, A_e purely
imaginary spectrum, A_n is nilpotent and all parts commute.  The parts are
built from spectral projectors onto generalized eigenspaces of eigenvalue
clusters.

Clustering: an eigenvalue computed in floating point is only known to within
roughly ``eps * ||A|| * kappa`` (kappa its condition number); for a defective
eigenvalue of multiplicity m this is of order ``eps**(1/m) ||A||``.  Each
eigenvalue gets a radius of that size (never below ``1e-8 ||A||``), clusters
are the connected components of overlapping discs, and a pair of clusters
closer than ten radii is reported as ill-conditioned instead of guessed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from expflow.errors import IllConditionedSpectrum

TAU_J = 1e-9
CLUSTER_FLOOR = 1e-8
_SAFETY = 10.0


def _as_matrix(A) -> np.ndarray:
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def matrix_to_json(A) -> str:
    A = _as_matrix(A)
    return json.dumps({"n": A.shape[0], "rows": A.tolist()})


def matrix_from_json(text: str | dict) -> np.ndarray:
    obj = json.loads(text) if isinstance(text, str) else text
    A = _as_matrix(obj["rows"])
    if A.shape[0] != obj["n"]:
        raise ValueError("n does not match the number of rows")
    return A


@dataclass(frozen=True)
class Cluster:
    value: complex
    multiplicity: int
    radius: float


@dataclass(frozen=True, eq=False)
class JordanDecomposition:
    A: np.ndarray
    A_n: np.ndarray
    A_s: np.ndarray
    A_h: np.ndarray
    A_e: np.ndarray
    clusters: tuple[Cluster, ...]
    projectors: tuple[np.ndarray, ...]

    @property
    def scale(self) -> float:
        # the zero matrix is measured in absolute terms
        return float(np.linalg.norm(self.A, 2)) or 1.0

    def residuals(self) -> dict[str, float]:
        """Invariant residuals, each divided by the appropriate power of ||A||."""
        A, N, S, H, E = self.A, self.A_n, self.A_s, self.A_h, self.A_e
        c = self.scale
        n = A.shape[0]
        res = {
            "sum": np.linalg.norm(N + H + E - A, 2) / c,
            "semisimple_split": np.linalg.norm(S - H - E, 2) / c,
            "nilpotent": np.linalg.norm(np.linalg.matrix_power(N / c, n), 2),
            "comm_nh": np.linalg.norm(N @ H - H @ N, 2) / c**2,
            "comm_ne": np.linalg.norm(N @ E - E @ N, 2) / c**2,
            "comm_he": np.linalg.norm(H @ E - E @ H, 2) / c**2,
            "h_real_spectrum": float(np.max(np.abs(np.linalg.eigvals(H).imag), initial=0.0)) / c,
            "e_imaginary_spectrum": float(np.max(np.abs(np.linalg.eigvals(E).real), initial=0.0)) / c,
        }
        # A_s is diagonalizable iff the product over its distinct eigenvalues kills it
        P = np.eye(n, dtype=complex)
        for cl in self.clusters:
            P = P @ (S - cl.value * np.eye(n)) / c
        res["s_diagonalizable"] = float(np.linalg.norm(P, 2))
        return {k: float(v) for k, v in res.items()}

    def check(self, tol: float = TAU_J) -> bool:
        return all(v <= tol for v in self.residuals().values())

    def to_dict(self) -> dict:
        return {
            "n": int(self.A.shape[0]),
            "A_n": self.A_n.tolist(),
            "A_s": self.A_s.tolist(),
            "A_h": self.A_h.tolist(),
            "A_e": self.A_e.tolist(),
            "clusters": [
                {"re": c.value.real, "im": c.value.imag, "multiplicity": c.multiplicity} for c in self.clusters
            ],
            "residuals": self.residuals(),
        }


def _eigen_radii(A: np.ndarray, w: np.ndarray, V: np.ndarray, scale: float) -> np.ndarray:
    n = A.shape[0]
    eps = np.finfo(float).eps
    cap = max((_SAFETY * n * eps) ** (1.0 / n), CLUSTER_FLOOR) if n > 1 else CLUSTER_FLOOR
    # left eigenvectors from A^T, matched to w greedily by distance
    wl, Y = np.linalg.eig(A.T)
    dist = np.abs(w[:, None] - wl[None, :])
    match = np.full(n, -1)
    used = np.zeros(n, dtype=bool)
    for flat in np.argsort(dist, axis=None):
        i, j = divmod(int(flat), n)
        if match[i] < 0 and not used[j]:
            match[i] = j
            used[j] = True
    Y = Y[:, match]
    overlap = np.abs(np.sum(Y * V, axis=0))
    norms = np.linalg.norm(V, axis=0) * np.linalg.norm(Y, axis=0)
    with np.errstate(divide="ignore"):
        kappa = np.where(overlap > 0, norms / overlap, np.inf)
    rel = np.clip(_SAFETY * n * eps * kappa, CLUSTER_FLOOR, cap)
    return rel * scale


def _cluster(w: np.ndarray, radii: np.ndarray) -> list[list[int]]:
    n = len(w)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist = np.abs(w[:, None] - w[None, :])
    reach = radii[:, None] + radii[None, :]
    for i in range(n):
        for j in range(i + 1, n):
            if dist[i, j] <= reach[i, j]:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    clusters = list(groups.values())
    for a in range(len(clusters)):
        for b in range(a + 1, len(clusters)):
            sub = dist[np.ix_(clusters[a], clusters[b])] / reach[np.ix_(clusters[a], clusters[b])]
            if sub.min() <= 10.0:
                i, j = np.unravel_index(np.argmin(sub), sub.shape)
                raise IllConditionedSpectrum(
                    f"eigenvalues {w[clusters[a][i]]:.6g} and {w[clusters[b][j]]:.6g} are too close to "
                    "decide whether they coincide; perturb the matrix or separate the spectrum"
                )
    return clusters


def _null_basis(M: np.ndarray, m: int) -> np.ndarray:
    _, _, Vh = np.linalg.svd(M)
    return Vh[-m:].conj().T


def real_jordan(A) -> JordanDecomposition:
    """Split a real square matrix into commuting nilpotent, hyperbolic and elliptic parts."""
    A = _as_matrix(A)
    n = A.shape[0]
    scale = float(np.linalg.norm(A, 2))
    zero = np.zeros_like(A)
    if scale == 0:
        return JordanDecomposition(A, zero, zero.copy(), zero.copy(), zero.copy(), (Cluster(0j, n, 0.0),), (np.eye(n),))
    w, V = np.linalg.eig(A)
    radii = _eigen_radii(A, w, V, scale)
    groups = _cluster(w, radii)
    groups.sort(key=lambda g: (-np.mean(w[g]).real, -np.mean(w[g]).imag))

    bases = []
    mus = []
    for g in groups:
        m = len(g)
        mu = complex(np.mean(w[g]))
        r = float(radii[g].max())
        if abs(mu.imag) <= r:
            mu = complex(mu.real, 0.0)
        M = np.linalg.matrix_power((A - mu * np.eye(n)) / scale, m)
        bases.append(_null_basis(M, m))
        mus.append((mu, r))
    B = np.hstack(bases)
    Binv = np.linalg.inv(B)
    projectors = []
    clusters = []
    col = 0
    for (mu, r), basis in zip(mus, bases):
        m = basis.shape[1]
        P = basis @ Binv[col : col + m]
        col += m
        # the trace of A on the generalized eigenspace gives a sharper centroid
        mu_ref = complex(np.trace(A @ P) / m)
        if mu.imag == 0:
            mu_ref = complex(mu_ref.real, 0.0)
        projectors.append(P)
        clusters.append(Cluster(mu_ref, m, r))
    S = sum(c.value * P for c, P in zip(clusters, projectors))
    H = sum(c.value.real * P for c, P in zip(clusters, projectors))
    A_s = np.real(S)
    A_h = np.real(H)
    A_e = A_s - A_h
    A_n = A - A_s
    return JordanDecomposition(A, A_n, A_s, A_h, A_e, tuple(clusters), tuple(projectors))
