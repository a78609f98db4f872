"""Closed-form confidence indices used by the index-based bandits."""

from __future__ import annotations

import math

# Upper clamp for KL-UCB bounds; KL(p, 1) is infinite for p < 1.
KLUCB_CEILING = 1.0 - 1e-9
KLUCB_TOL = 1e-6
KLUCB_MAX_ITER = 64


def ucb1_index(mean: float, t: int, n: int, c: float) -> float:
    """``mean + sqrt(c * ln t / n)``."""
    if n < 1:
        raise ValueError("UCB1 index undefined for an unpulled arm")
    return mean + math.sqrt(c * math.log(t) / n)


def bernoulli_kl(p: float, q: float) -> float:
    """KL divergence between Bernoulli(p) and Bernoulli(q), with 0 ln 0 = 0."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q!r}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    kl = 0.0
    if p > 0.0:
        kl += p * math.log(p / q)
    if p < 1.0:
        kl += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return kl


def klucb_upper_bound(successes: float, pulls: float, t: int) -> float:
    """Largest ``q`` in ``[p_hat, 1)`` with ``pulls * KL(p_hat, q) <= ln t``.

    Bisection on the monotone branch ``q >= p_hat``; the returned value is the
    feasible end of the final bracket, so it never overshoots the true root and
    lies within ``KLUCB_TOL`` below it.
    """
    if pulls <= 0:
        raise ValueError("KL-UCB bound needs at least one pull")
    p_hat = min(max(successes / pulls, 0.0), 1.0)
    if p_hat >= KLUCB_CEILING:
        return KLUCB_CEILING
    budget = math.log(t) / pulls if t > 1 else 0.0
    if budget <= 0.0:
        return p_hat
    lo, hi = p_hat, KLUCB_CEILING
    if _kl_lower_ok(p_hat, hi, budget):
        return hi
    for _ in range(KLUCB_MAX_ITER):
        if hi - lo <= KLUCB_TOL:
            break
        mid = 0.5 * (lo + hi)
        if _kl_lower_ok(p_hat, mid, budget):
            lo = mid
        else:
            hi = mid
    return lo


def _kl_lower_ok(p: float, q: float, budget: float) -> bool:
    # q >= p > 0 is guaranteed by the caller except at p == 0.
    kl = 0.0
    if p > 0.0:
        kl += p * math.log(p / q)
    if p < 1.0:
        kl += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return kl <= budget
