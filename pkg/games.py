"""
Games Module
Signed nonlocal game rewarding agreement on equal inputs: values, optimal operator-sum level and attainment.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from operators import SCALAR_SUM_INTERVAL

logger = logging.getLogger(__name__)

ATTAINED = "attained by finite-dim family"
NOT_ATTAINED = "not attained: lambda* is irrational, the value is a supremum only"
OUT_OF_INTERVAL = "lambda* outside the scalar-sum interval: formula value not achievable by a sum-lambda*I family"


@dataclass(frozen=True)
class SignedGame:
    """
    Input pairs (x, x) carry weight A = (1-t)/n and reward p(0,0|x,x);
    pairs x != y carry weight B = t/(n^2-n) and penalize p(0,0|x,y).

    t is exact (Fraction or int) when rational; a float t must be declared
    irrational with rational=False.
    """
    n: int
    t: object
    rational: bool = None

    def __post_init__(self):
        if self.n < 5:
            raise ValueError(f"Signed game needs n >= 5, got {self.n}")
        rational = self.rational
        if rational is None:
            rational = isinstance(self.t, (Fraction, int))
        if rational and not isinstance(self.t, (Fraction, int)):
            raise ValueError(f"Rational t must be given exactly as a Fraction, got {self.t!r}")
        t = Fraction(self.t) if rational else float(self.t)
        if not 0 < t < 1:
            raise ValueError(f"t must lie in (0, 1), got {self.t}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "rational", rational)

    @property
    def A(self):
        return (1 - self.t) / self.n

    @property
    def B(self):
        return self.t / (self.n * self.n - self.n)

    def scalar_sum_value(self, lam):
        """(A+B) lam - B lam^2, the value of any family summing to lam * I."""
        return float((self.A + self.B) * lam - self.B * lam * lam)


def expected_value(game, p):
    """A * sum_x p(0,0|x,x) - B * sum_{x != y} p(0,0|x,y)."""
    if p.n != game.n:
        raise ValueError(f"Correlation has n={p.n} but game has n={game.n}")
    agree = p.p[:, :, 0, 0]
    diagonal = float(np.trace(agree))
    return float(game.A) * diagonal - float(game.B) * (float(agree.sum()) - diagonal)


def value_from_family(game, fam):
    """A * sum_x tau(E_x) - B * sum_{x != y} tau(E_x E_y) for a projection family."""
    if fam.size != game.n:
        raise ValueError(f"Family has {fam.size} projections but game has n={game.n}")
    joint = fam.pair_traces()
    singles = sum(fam.trace(v) for v in range(fam.size))
    off_diagonal = float(joint.sum() - np.trace(joint))
    return float(game.A) * singles - float(game.B) * off_diagonal


def lambda_star(game):
    """(A+B)/(2B), exact when t is rational."""
    return (game.A + game.B) / (2 * game.B)


def lambda_star_expansions(game):
    """
    The two closed-form expansions of lambda*.

    Returns:
        (1 - n/2 + (n-1)/(2t), 1 - n/2 + (n-2)/(2t)); only the first agrees with (A+B)/(2B)
    """
    n, t = game.n, game.t
    return 1 - Fraction(n, 2) + (n - 1) / (2 * t), 1 - Fraction(n, 2) + (n - 2) / (2 * t)


def supremum_value(game):
    """(A+B)^2 / (4B)."""
    return float((game.A + game.B) ** 2 / (4 * game.B))


def grid_argmax(game, lo=0.0, hi=None, points=10001):
    """
    Brute-force maximizer of (A+B) lam - B lam^2 on an equally spaced grid.

    Returns:
        (argmax, grid step)
    """
    hi = float(game.n) if hi is None else hi
    grid = np.linspace(lo, hi, points)
    values = float(game.A + game.B) * grid - float(game.B) * grid ** 2
    return float(grid[int(np.argmax(values))]), (hi - lo) / (points - 1)


def lipschitz_constant(game, lam):
    """
    C with |value_from_family - scalar_sum_value(lam)| <= C * eps whenever ||sum E - lam I||_F <= eps <= 1.

    Writing S = sum E = lam I + D, the value is (A+B) tau(S) - B tau(S^2), and
    |tau(D)| <= eps, |tau(D^2)| <= eps^2.
    """
    return float(game.A + game.B) + float(game.B) * (2 * abs(float(lam)) + 1)


def attainment_check(game):
    """
    Decide whether the supremum is reached by a finite-dimensional family summing to lambda* I.

    Returns:
        dict with the game weights, lambda* (and both expansions), supremum, in_interval,
        rational, attained and a conclusion string
    """
    if game.n != 5:
        raise ValueError(f"Attainment analysis is defined for n = 5, got n={game.n}")
    lam = lambda_star(game)
    lo, hi = SCALAR_SUM_INTERVAL
    in_interval = lo <= float(lam) <= hi
    attained = bool(game.rational and in_interval)
    if not in_interval:
        conclusion = OUT_OF_INTERVAL
    elif attained:
        conclusion = ATTAINED
    else:
        conclusion = NOT_ATTAINED
    fraction_form, printed_form = lambda_star_expansions(game)
    logger.debug("n=%d t=%s lambda*=%s in_interval=%s", game.n, game.t, lam, in_interval)
    return {
        "n": game.n,
        "t": str(game.t) if game.rational else float(game.t),
        "A": float(game.A),
        "B": float(game.B),
        "lambda_star": float(lam),
        "lambda_star_exact": str(lam) if game.rational else None,
        "lambda_star_expansion": float(fraction_form),
        "lambda_star_printed_expansion": float(printed_form),
        "supremum": supremum_value(game),
        "interval": [lo, hi],
        "in_interval": in_interval,
        "rational": game.rational,
        "attained": attained,
        "conclusion": conclusion,
    }


if __name__ == "__main__":
    for t, rational in ((Fraction(1, 2), True), (math.sqrt(0.3), False), (Fraction(99, 100), True)):
        report = attainment_check(SignedGame(5, t, rational))
        print(f"t={report['t']}: lambda*={report['lambda_star']:.5f}  sup={report['supremum']:.6f}  "
              f"{report['conclusion']}")
