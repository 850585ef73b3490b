"""Reference solvers used only by the tests.

Nothing here imports the package's SVM code: the dual QP is solved by
accelerated projected gradient with an exact projection, then polished by
solving the KKT system on the detected free set.
"""

from __future__ import annotations

import numpy as np


def gram(kind: str, A: np.ndarray, B: np.ndarray, gamma: float, degree: int = 3,
         coef0: float = 0.0) -> np.ndarray:
    out = np.empty((len(A), len(B)))
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            if kind == "linear":
                out[i, j] = sum(x * y for x, y in zip(a, b))
            elif kind == "rbf":
                out[i, j] = np.exp(-gamma * sum((x - y) ** 2 for x, y in zip(a, b)))
            elif kind == "polynomial":
                out[i, j] = (gamma * sum(x * y for x, y in zip(a, b)) + coef0) ** degree
            elif kind == "sigmoid":
                out[i, j] = np.tanh(gamma * sum(x * y for x, y in zip(a, b)) + coef0)
            else:
                raise ValueError(kind)
    return out


def project(v: np.ndarray, y: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {0 <= a <= hi, y'a = 0} with y in {-1, +1}.

    a(t) = clip(v - t*y, 0, hi) and h(t) = y'a(t) is piecewise linear and
    non-increasing in t, so the root is found exactly between breakpoints.
    """
    brk = np.sort(np.concatenate([v * y, (v - hi) * y]))

    def h(t):
        return y @ np.clip(v - t * y, 0.0, hi)

    vals = np.array([h(t) for t in brk])
    if vals[0] < 0 or vals[-1] > 0:
        raise ValueError("infeasible")
    k = int(np.argmax(vals <= 0))  # first breakpoint with h <= 0
    if k == 0 or vals[k] == 0:
        return np.clip(v - brk[k] * y, 0.0, hi)
    t0, t1, h0, h1 = brk[k - 1], brk[k], vals[k - 1], vals[k]
    t = t0 + (t1 - t0) * h0 / (h0 - h1)
    return np.clip(v - t * y, 0.0, hi)


def dual_value(alpha: np.ndarray, Q: np.ndarray) -> float:
    return float(alpha.sum() - 0.5 * alpha @ Q @ alpha)


def solve_qp(K: np.ndarray, y: np.ndarray, hi: np.ndarray, iters: int = 20000) -> np.ndarray:
    """Maximise e'a - 1/2 a'Qa over the box and the equality constraint."""
    Q = (y[:, None] * y[None, :]) * K
    L = max(np.linalg.eigvalsh(Q).max(), 1e-12)
    a = np.zeros(len(y))
    z, t = a.copy(), 1.0
    for _ in range(iters):
        a_next = project(z - (Q @ z - 1.0) / L, y, hi)
        t_next = (1 + np.sqrt(1 + 4 * t * t)) / 2
        z = a_next + ((t - 1) / t_next) * (a_next - a)
        if np.max(np.abs(a_next - a)) < 1e-15:
            a = a_next
            break
        a, t = a_next, t_next
    return _polish(a, Q, y, hi)


def _polish(a: np.ndarray, Q: np.ndarray, y: np.ndarray, hi: np.ndarray) -> np.ndarray:
    eps = 1e-7 * max(1.0, hi.max())
    free = (a > eps) & (a < hi - eps)
    bound = ~free
    fixed = np.where(a >= hi - eps, hi, 0.0)
    if not free.any():
        cand = np.where(bound, fixed, a)
    else:
        F = np.flatnonzero(free)
        B = np.flatnonzero(bound)
        m = len(F)
        M = np.zeros((m + 1, m + 1))
        M[:m, :m] = Q[np.ix_(F, F)]
        M[:m, m] = y[F]
        M[m, :m] = y[F]
        rhs = np.concatenate([1.0 - Q[np.ix_(F, B)] @ fixed[B], [-(y[B] @ fixed[B])]])
        sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
        cand = fixed.copy()
        cand[F] = sol[:m]
    feasible = np.all(cand >= -1e-12) and np.all(cand <= hi + 1e-12) and abs(y @ cand) < 1e-9
    if feasible and dual_value(cand, Q) >= dual_value(a, Q) - 1e-12:
        return np.clip(cand, 0.0, hi)
    return a


def offset(alpha: np.ndarray, K: np.ndarray, y: np.ndarray, hi: np.ndarray) -> float:
    """Bias b of f(x) = sum a_j y_j K(x_j, x) + b from the margin conditions."""
    s = K @ (alpha * y)
    eps = 1e-7 * max(1.0, hi.max())
    free = (alpha > eps) & (alpha < hi - eps)
    if free.any():
        return float(np.mean(y[free] - s[free]))
    lower, upper = -np.inf, np.inf
    for i in range(len(y)):
        at_hi = alpha[i] >= hi[i] - eps
        # y_i f(x_i) >= 1 when a_i = 0, <= 1 when a_i = C_i
        if (y[i] > 0) != at_hi:
            lower = max(lower, y[i] - s[i])
        else:
            upper = min(upper, y[i] - s[i])
    if np.isinf(lower):
        return float(upper)
    if np.isinf(upper):
        return float(lower)
    return float((lower + upper) / 2)


def ovo_predict_bruteforce(decisions: dict[tuple[int, int], float], k: int) -> int:
    """Majority vote over pairwise decisions, ties by summed signed value."""
    votes = [0] * k
    sums = [0.0] * k
    for (a, b), d in decisions.items():
        if d > 0:
            votes[a] += 1
        else:
            votes[b] += 1
        sums[a] += d
        sums[b] -= d
    top = max(votes)
    tied = [c for c in range(k) if votes[c] == top]
    return max(tied, key=lambda c: (sums[c], -c))
