"""Lab-wide parameter bundle and the alpha(k, delta) helper.

All rationals are held as ``fractions.Fraction`` so that threshold
comparisons in certificates are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


def as_fraction(x) -> Fraction:
    """Exact Fraction from int/Fraction/decimal-string; floats go via str."""
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def alpha_for_delta(k: int, delta) -> Fraction:
    """Sufficient absorbing-lemma constant for a given extremality delta.

    alpha = (1/2k) * (delta / (24 k (k-1) sqrt(2k)))**(2**(k-1)).

    The square root is rationalized exactly: with e = 2**(k-1) even,
    (x / sqrt(2k))**e == x**e / (2k)**(e/2).  The value is astronomically
    small at desk scale; it is surfaced for reporting, not exercised as a
    sufficient constant by any test.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    delta = as_fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    e = 2 ** (k - 1)
    base = delta / (24 * k * (k - 1))
    return Fraction(1, 2 * k) * base ** e / Fraction(2 * k) ** (e // 2)


@dataclass(frozen=True)
class LabParams:
    """Every constant the lab's routines quantify over.

    limits: node budget for exact searches plus a wall-clock budget in
    seconds (advisory; searches check the node budget, reports record time).
    """

    k: int = 3
    n: int = 6
    alpha: Fraction = Fraction(1, 10)
    delta: Fraction = Fraction(1, 2)
    epsilon: Fraction = Fraction(0)
    t: Fraction = Fraction(2)
    seed: int = 0
    node_budget: int = 2_000_000
    time_budget: float = 600.0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        for name in ("alpha", "delta", "epsilon", "t"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.t < 1:
            raise ValueError("t must be at least 1")
        if self.node_budget <= 0 or self.time_budget <= 0:
            raise ValueError("limits must be strictly positive")
