"""Shared oracles for the test suite, kept independent of the code paths they
check (plain numpy, explicit inverses, exhaustive searches)."""

import numpy as np


def classical_cca_correlations(X, Y):
    """Canonical correlations of two column-stacked views via the explicit
    C11^-1 C12 C22^-1 C21 eigenproblem."""
    Xc = X - X.mean(axis=1, keepdims=True)
    Yc = Y - Y.mean(axis=1, keepdims=True)
    n = X.shape[1]
    C11 = Xc @ Xc.T / (n - 1)
    C22 = Yc @ Yc.T / (n - 1)
    C12 = Xc @ Yc.T / (n - 1)
    M = np.linalg.inv(C11) @ C12 @ np.linalg.inv(C22) @ C12.T
    rho2 = np.clip(np.linalg.eigvals(M).real, 0.0, None)
    return np.sort(np.sqrt(rho2))[::-1]


def fitted_top_correlations(views):
    """Sample canonical correlations of a 2-view sample-rows dataset."""
    return classical_cca_correlations(views[0].T, views[1].T)


def exhaustive_otsu_threshold(values):
    """Best split by between-class variance over all midpoints of adjacent
    sorted values (exact, histogram-free)."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    best_t, best_s = None, -1.0
    for i in range(len(v) - 1):
        if v[i] == v[i + 1]:
            continue
        t = 0.5 * (v[i] + v[i + 1])
        low, high = v[: i + 1], v[i + 1:]
        w0 = len(low) / len(v)
        w1 = 1.0 - w0
        s = w0 * w1 * (low.mean() - high.mean()) ** 2
        if s > best_s:
            best_s, best_t = s, t
    return best_t
