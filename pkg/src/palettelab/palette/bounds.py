"""Probability toolkit: tail bounds, exact tails and an extremal distribution.

Bounds are returned as floats; exact references use :class:`fractions.Fraction`
or :mod:`scipy.stats`.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, e, exp, log, sqrt
from typing import Callable, Dict, Iterable, Sequence, Tuple, Union

from more_itertools import powerset
from qibo.config import raise_error
from scipy import stats

from palettelab.errors import DomainError, InfeasibleError, ParameterError

Number = Union[int, float, Fraction]


def phi(x: float) -> float:
    """``φ(x) = (1+x) log(1+x) - x`` for ``x ≥ -1``, with ``φ(-1) = 1``."""
    if x < -1:
        raise_error(DomainError, f"phi is undefined at {x} < -1.")
    if x == -1:
        return 1.0
    return (1 + x) * log(1 + x) - x


@dataclass(frozen=True)
class TailBound:
    """A tail probability bound in its two classical forms."""

    phi_form: float
    quadratic_form: float

    @property
    def best(self) -> float:
        return min(self.phi_form, self.quadratic_form)


def _check_mu_t(mu: float, t: float):
    if mu <= 0 or t < 0:
        raise_error(ParameterError, f"Need mu > 0 and t >= 0, got mu={mu}, t={t}.")


def chernoff_upper(mu: float, t: float) -> TailBound:
    """Bounds on ``P(X ≥ μ + t)`` for binomial-like ``X`` with mean ``μ``."""
    _check_mu_t(mu, t)
    return TailBound(
        exp(-mu * phi(t / mu)), exp(-(t**2) / (2 * (mu + t / 3)))
    )


def chernoff_lower(mu: float, t: float) -> TailBound:
    """Bounds on ``P(X ≤ μ - t)``."""
    _check_mu_t(mu, t)
    if t / mu > 1:
        raise_error(DomainError, f"Lower tail needs t <= mu, got t/mu={t / mu}.")
    return TailBound(exp(-mu * phi(-t / mu)), exp(-(t**2) / (2 * mu)))


def large_dev_bound(mu: float, K: float) -> float:
    """``exp[-Kμ log(K/e)]``, bounding ``P(X > Kμ)``."""
    if mu <= 0 or K <= 0:
        raise_error(ParameterError, f"Need mu > 0 and K > 0, got mu={mu}, K={K}.")
    return exp(-K * mu * log(K / e))


def janson_terms(event_sets: Sequence[Iterable], p: float) -> Tuple[float, float]:
    """``μ`` and ``∆̄`` (diagonal included) for events "all of ``A_i`` present"."""
    sets = [frozenset(s) for s in event_sets]
    mu = sum(p ** len(s) for s in sets)
    delta_bar = sum(
        p ** len(a | b) for a in sets for b in sets if a & b
    )
    return mu, delta_bar


def janson_bound(event_sets: Sequence[Iterable], p: float) -> float:
    """Janson's ``exp[-μ²/∆̄]`` bound on the probability that no event occurs.

    Elements of the ground set are present independently with probability
    ``p``; event ``i`` occurs when all of ``event_sets[i]`` are present.
    """
    if not 0 < p < 1:
        raise_error(ParameterError, f"p must lie in (0, 1), got {p}.")
    if any(len(set(s)) == 0 for s in event_sets):
        raise_error(ParameterError, "Event sets must be nonempty.")
    mu, delta_bar = janson_terms(event_sets, p)
    if delta_bar == 0:
        return 1.0
    return exp(-(mu**2) / delta_bar)


def no_event_probability(
    event_sets: Sequence[Iterable], ground: Iterable, p: Number
) -> Number:
    """Exact probability that no event occurs, by enumerating all outcomes."""
    ground = list(ground)
    sets = [frozenset(s) for s in event_sets]
    total = Fraction(0) if isinstance(p, (Fraction, int)) else 0.0
    for present in powerset(ground):
        chosen = frozenset(present)
        if any(s <= chosen for s in sets):
            continue
        total += p ** len(chosen) * (1 - p) ** (len(ground) - len(chosen))
    return total


def lll_check(p: float, max_dependency_degree: int) -> bool:
    """Local lemma condition ``e·p·(Δ+1) < 1``."""
    return e * p * (max_dependency_degree + 1) < 1


def binomial_tail(n: int, p: Number, k: int) -> Number:
    """Exact ``P(Bin(n, p) ≥ k)``, rational when ``p`` is."""
    return sum(
        comb(n, i) * p**i * (1 - p) ** (n - i) for i in range(max(k, 0), n + 1)
    )


def binomial_lower_tail(n: int, p: Number, k: int) -> Number:
    """Exact ``P(Bin(n, p) ≤ k)``."""
    return sum(comb(n, i) * p**i * (1 - p) ** (n - i) for i in range(0, min(k, n) + 1))


def binomial_sf(n: int, p: float, k: int) -> float:
    """``P(Bin(n, p) > k)`` for large ``n``."""
    return float(stats.binom.sf(k, n, p))


def hypergeometric_tail(population: int, successes: int, draws: int, k: int) -> float:
    """``P(X ≥ k)`` for ``X`` hypergeometric."""
    return float(stats.hypergeom.sf(k - 1, population, successes, draws))


def wilson_interval(
    successes: int, trials: int, confidence: float = 0.95
) -> Tuple[float, float]:
    """Wilson score interval for a success proportion."""
    if trials == 0:
        return 0.0, 1.0
    z = float(stats.norm.ppf(1 - (1 - confidence) / 2))
    rate = successes / trials
    denominator = 1 + z**2 / trials
    center = (rate + z**2 / (2 * trials)) / denominator
    half = z * sqrt(rate * (1 - rate) / trials + z**2 / (4 * trials**2)) / denominator
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finitely supported distribution with rational probabilities."""

    points: Tuple[Tuple[Fraction, Fraction], ...]
    """``(value, probability)`` pairs with distinct values."""

    def __post_init__(self):
        if any(prob < 0 for _, prob in self.points):
            raise_error(ParameterError, "Negative probability.")
        if sum(prob for _, prob in self.points) != 1:
            raise_error(ParameterError, "Probabilities do not sum to one.")

    @classmethod
    def from_mapping(cls, weights: Dict[Number, Number]) -> "DiscreteDistribution":
        merged: Dict[Fraction, Fraction] = {}
        for value, prob in weights.items():
            value = Fraction(value)
            merged[value] = merged.get(value, Fraction(0)) + Fraction(prob)
        return cls(tuple(sorted((v, p) for v, p in merged.items() if p != 0)))

    def expectation(self, g: Callable[[Fraction], Number] = lambda x: x) -> Number:
        return sum(prob * g(value) for value, prob in self.points)

    @property
    def mean(self) -> Fraction:
        return self.expectation()

    def truncated_mean(self, b: Number) -> Fraction:
        """``E[X·1{X ≤ b}]``."""
        return sum(prob * value for value, prob in self.points if value <= b)


def cvx_extremal_Z(alpha: Number, beta: Number, a: Number, b: Number) -> DiscreteDistribution:
    """Three-point distribution extremal for convex functionals.

    ``P(Z=b) = β/b``, ``P(Z=a) = (α-β)/a`` and the rest at ``0``; it has
    mean ``α`` and ``E[Z·1{Z ≤ b}] = β``.
    """
    alpha, beta, a, b = (Fraction(x) for x in (alpha, beta, a, b))
    if not (0 <= beta <= alpha and 0 < b <= a):
        raise_error(
            ParameterError, f"Need 0 <= beta <= alpha and 0 < b <= a, got {alpha, beta, a, b}."
        )
    if b == a and alpha != beta:
        raise_error(ParameterError, "With b = a the truncated mean equals the mean.")
    at_b, at_a = beta / b, (alpha - beta) / a
    if b == a:
        at_b, at_a = Fraction(0), alpha / a
    if at_b + at_a > 1:
        raise_error(InfeasibleError, f"beta/b + (alpha-beta)/a = {at_b + at_a} > 1.")
    Z = DiscreteDistribution.from_mapping({0: 1 - at_b - at_a, b: at_b, a: at_a})
    assert Z.mean == alpha
    assert Z.truncated_mean(b) == beta
    return Z
