"""Fixtures and brute-force oracles shared by the test modules.

The oracles avoid the package's simplex code path entirely.
"""

from itertools import combinations, product

import numpy as np

from ordinal_transport import ObservedSample, make_distribution

MU = make_distribution([0.4, 0.3, 0.2, 0.1])
NU = make_distribution([0.2, 0.3, 0.3, 0.2])

# Row i = origin category i, column j = destination category j (0-indexed here).
MONOTONE = np.array([[0.2, 0.2, 0.0, 0.0],
                     [0.0, 0.1, 0.2, 0.0],
                     [0.0, 0.0, 0.1, 0.1],
                     [0.0, 0.0, 0.0, 0.1]])
LONG_JUMP = np.array([[0.2, 0.0, 0.2, 0.0],
                      [0.0, 0.3, 0.0, 0.0],
                      [0.0, 0.0, 0.1, 0.1],
                      [0.0, 0.0, 0.0, 0.1]])
LOWER_ENDPOINT = np.array([[0.24, 0.14, 0.00, 0.000],
                           [0.00, 0.145, 0.14, 0.000],
                           [0.00, 0.00, 0.145, 0.045],
                           [0.00, 0.00, 0.00, 0.145]])
UPPER_ENDPOINT = np.array([[0.19, 0.24, 0.00, 0.000],
                           [0.00, 0.045, 0.24, 0.000],
                           [0.00, 0.00, 0.045, 0.145],
                           [0.00, 0.00, 0.00, 0.095]])
MAX_MOBILITY_DISPLAY = np.array([[0.0, 0.0, 0.2, 0.2],
                                 [0.0, 0.0, 0.1, 0.2],
                                 [0.1, 0.2, 0.0, 0.0],
                                 [0.1, 0.1, 0.0, 0.0]])

SOURCE_95 = ObservedSample((760, 570, 380, 190), 100)
TARGET_95 = ObservedSample((380, 570, 570, 380), 100)


def brute_force_lp(c, A, b, lower, upper, maximize=False, tol=1e-9):
    """Optimum over all basic solutions of {Ax = b, lower <= x <= upper}.

    Returns ("optimal", value) or ("infeasible", None). Nonbasic variables sit
    at a finite bound; the feasible set must be bounded for the answer to be
    the true optimum (always the case for the generators used in the tests).
    """
    c, A, b = (np.asarray(v, dtype=float) for v in (c, A, b))
    lower, upper = np.asarray(lower, float), np.asarray(upper, float)
    m, n = A.shape
    r = np.linalg.matrix_rank(A) if m else 0
    best = None
    for basis in combinations(range(n), r):
        basis = list(basis)
        rest = [k for k in range(n) if k not in basis]
        if r and np.linalg.matrix_rank(A[:, basis]) < r:
            continue
        choices = [[v for v in (lower[k], upper[k]) if np.isfinite(v)] for k in rest]
        for fixed in product(*choices):
            x = np.zeros(n)
            x[rest] = fixed
            rhs = b - A[:, rest] @ np.asarray(fixed, dtype=float) if rest else b.copy()
            if r:
                xb, *_ = np.linalg.lstsq(A[:, basis], rhs, rcond=None)
                x[basis] = xb
            if m and np.abs(A @ x - b).max() > 1e-7:
                continue
            if np.any(x < lower - tol) or np.any(x > upper + tol):
                continue
            val = float(c @ x)
            if best is None or (val > best if maximize else val < best):
                best = val
    return ("infeasible", None) if best is None else ("optimal", best)


def transport_vertices(mu, nu, tol=1e-9):
    """All vertices of the transportation polytope of two marginals."""
    mu, nu = np.asarray(mu, float), np.asarray(nu, float)
    K = mu.size
    A = np.vstack([np.kron(np.eye(K), np.ones(K)), np.kron(np.ones(K), np.eye(K))])[:-1]
    b = np.concatenate([mu, nu])[:-1]
    out = []
    for basis in combinations(range(K * K), 2 * K - 1):
        B = A[:, basis]
        if abs(np.linalg.det(B)) < 1e-12:
            continue
        xb = np.linalg.solve(B, b)
        if xb.min() < -tol:
            continue
        x = np.zeros(K * K)
        x[list(basis)] = np.clip(xb, 0, None)
        if not any(np.allclose(x, v, atol=1e-9) for v in out):
            out.append(x)
    return [v.reshape(K, K) for v in out]


def cdf_l1(a, b):
    return float(np.abs(np.cumsum(a)[:-1] - np.cumsum(b)[:-1]).sum())


def random_distribution(rng, K, sparsity=0.0):
    p = rng.dirichlet(np.ones(K))
    if sparsity:
        p[rng.random(K) < sparsity] = 0.0
        if p.sum() == 0:
            p[rng.integers(K)] = 1.0
        p /= p.sum()
    return make_distribution(p)


def ipf_coupling(rng, mu, nu, iters=500):
    """A random interior coupling with the given marginals."""
    mu, nu = np.asarray(mu, float), np.asarray(nu, float)
    P = rng.random((mu.size, nu.size)) + 1e-3
    for _ in range(iters):
        P *= (mu / P.sum(axis=1))[:, None]
        P *= (nu / P.sum(axis=0))[None, :]
    return P


def hundredths_grid(lower_counts, missing):
    """Integer vectors (in hundredths) of every box member on the 0.01 grid.

    The box comes from a sample of 100 units: member ``g`` satisfies
    ``lower_counts <= g <= lower_counts + missing`` and ``sum(g) == 100``.
    """
    L = np.asarray(lower_counts, dtype=int)
    K = L.size
    axes = [np.arange(L[k], L[k] + missing + 1) for k in range(K - 1)]
    pts = np.array(np.meshgrid(*axes, indexing="ij")).reshape(K - 1, -1).T
    last = 100 - pts.sum(axis=1)
    ok = (last >= L[-1]) & (last <= L[-1] + missing)
    return np.column_stack([pts[ok], last[ok]])


def grid_endpoint_oracle(src_counts, src_missing, tgt_counts, tgt_missing):
    """Exact (integer) grid search of min/max discrepancy over two boxes.

    Returns ``(d_low, d_up, low_pairs, up_pairs)`` with the attaining pairs as
    probability vectors.
    """
    G = hundredths_grid(src_counts, src_missing)
    H = hundredths_grid(tgt_counts, tgt_missing)
    FG = np.cumsum(G, axis=1)[:, :-1]
    FH = np.cumsum(H, axis=1)[:, :-1]
    D = np.abs(FG[:, None, :] - FH[None, :, :]).sum(axis=2)
    lo, hi = D.min(), D.max()
    low = [(G[a] / 100, H[b] / 100) for a, b in np.argwhere(D == lo)]
    up = [(G[a] / 100, H[b] / 100) for a, b in np.argwhere(D == hi)]
    return lo / 100, hi / 100, low, up
