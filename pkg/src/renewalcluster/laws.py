"""Parametric interarrival and count laws with closed-form moment accessors.

Every interarrival variant here is continuous, hence nonarithmetic by
construction, and has a finite strictly positive mean.  Laws are frozen
dataclasses: immutable, hashable, safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import LawError

__all__ = [
    "Exponential",
    "Uniform",
    "GammaLaw",
    "Mixture",
    "PoissonCount",
    "FixedCount",
]


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise LawError("Exponential rate must be positive")

    def mean(self):
        return 1.0 / self.rate

    def second_moment(self):
        return 2.0 / self.rate**2

    def cdf(self, x):
        return -np.expm1(-self.rate * np.maximum(x, 0.0))

    def partial_mean(self, c):
        # E[X 1{X <= c}]
        if c <= 0:
            return 0.0
        return 1.0 / self.rate - np.exp(-self.rate * c) * (c + 1.0 / self.rate)

    def sup_bound(self):
        return None

    def sample(self, rng, size=None):
        return rng.exponential(1.0 / self.rate, size)


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo >= 0 and self.hi > self.lo):
            raise LawError("Uniform requires 0 <= lo < hi")

    def mean(self):
        return 0.5 * (self.lo + self.hi)

    def second_moment(self):
        return (self.hi**3 - self.lo**3) / (3.0 * (self.hi - self.lo))

    def cdf(self, x):
        return np.clip((x - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def partial_mean(self, c):
        c = min(max(c, self.lo), self.hi)
        return (c**2 - self.lo**2) / (2.0 * (self.hi - self.lo))

    def sup_bound(self):
        return self.hi

    def sample(self, rng, size=None):
        return rng.uniform(self.lo, self.hi, size)


@dataclass(frozen=True)
class GammaLaw:
    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise LawError("Gamma shape and scale must be positive")

    def mean(self):
        return self.shape * self.scale

    def second_moment(self):
        return self.shape * (self.shape + 1.0) * self.scale**2

    def cdf(self, x):
        return stats.gamma.cdf(x, self.shape, scale=self.scale)

    def partial_mean(self, c):
        # E[X 1{X <= c}] = k*theta * F_{k+1}(c)
        return self.mean() * stats.gamma.cdf(c, self.shape + 1.0, scale=self.scale)

    def sup_bound(self):
        return None

    def sample(self, rng, size=None):
        return rng.gamma(self.shape, self.scale, size)


@dataclass(frozen=True)
class Mixture:
    """Finite mixture of the laws above; components are (weight, law) pairs."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise LawError("Mixture needs at least one component")
        w = np.array([c[0] for c in comps], dtype=np.float64)
        if np.any(w <= 0) or not np.isclose(w.sum(), 1.0):
            raise LawError("Mixture weights must be positive and sum to 1")

    def _weights(self):
        return np.array([c[0] for c in self.components])

    def mean(self):
        return sum(w * law.mean() for w, law in self.components)

    def second_moment(self):
        return sum(w * law.second_moment() for w, law in self.components)

    def cdf(self, x):
        return sum(w * law.cdf(x) for w, law in self.components)

    def partial_mean(self, c):
        return sum(w * law.partial_mean(c) for w, law in self.components)

    def sup_bound(self):
        bounds = [law.sup_bound() for _, law in self.components]
        if any(b is None for b in bounds):
            return None
        return max(bounds)

    def sample(self, rng, size=None):
        scalar = size is None
        shape = (1,) if scalar else size
        n = int(np.prod(shape))
        which = rng.choice(len(self.components), size=n, p=self._weights())
        out = np.empty(n)
        for i, (_, law) in enumerate(self.components):
            mask = which == i
            k = int(mask.sum())
            if k:
                out[mask] = law.sample(rng, k)
        return float(out[0]) if scalar else out.reshape(shape)


@dataclass(frozen=True)
class PoissonCount:
    """Poisson cluster-size law; the parameter is the mean."""

    rate: float

    def __post_init__(self):
        if not self.rate >= 0:
            raise LawError("Poisson rate must be nonnegative")

    def mean(self):
        return self.rate

    def second_moment(self):
        return self.rate + self.rate**2

    def sample(self, rng, size=None):
        return rng.poisson(self.rate, size)


@dataclass(frozen=True)
class FixedCount:
    value: int

    def __post_init__(self):
        if not (isinstance(self.value, int) and self.value >= 0):
            raise LawError("FixedCount value must be a nonnegative integer")

    def mean(self):
        return float(self.value)

    def second_moment(self):
        return float(self.value) ** 2

    def sample(self, rng, size=None):
        if size is None:
            return self.value
        return np.full(int(size), self.value, dtype=np.int64)
