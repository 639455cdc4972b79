"""Shared corpus builders for the test suite."""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from fractions import Fraction

from minimaxfit import (
    ExtremeSets,
    FitResult,
    SampleSet,
    extreme_sets,
    fit_minimax,
)


@dataclass
class Instance:
    samples: SampleSet
    degree: int
    fit: FitResult
    extremes: ExtremeSets


def random_samples(rng: random.Random, dimension: int, count: int) -> SampleSet:
    points = []
    seen = set()
    while len(points) < count:
        p = tuple(round(rng.uniform(-1, 1), 6) for _ in range(dimension))
        if p in seen:
            continue
        seen.add(p)
        points.append(p)
    values = [round(rng.uniform(-1, 1), 6) for _ in range(count)]
    return SampleSet(points, values)


def build_fit_corpus(seed: int, count: int, dims, degrees, point_range) -> list[Instance]:
    rng = random.Random(seed)
    corpus = []
    for _ in range(count):
        d = rng.choice(list(dims))
        m = rng.choice(list(degrees))
        n = rng.randint(*point_range)
        samples = random_samples(rng, d, n)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # underdetermined fits are expected here
            fit = fit_minimax(samples, m)
        corpus.append(Instance(samples, m, fit, extreme_sets(fit.model, samples)))
    return corpus


def lemma_system(rng: random.Random, n_left: int, n_right: int):
    """Weight triples satisfying the shift-identity hypotheses exactly."""

    def frac(lo=-3, hi=3):
        return Fraction(rng.randint(lo * 12, hi * 12), 12)

    def positive_frac():
        return Fraction(rng.randint(1, 24), 12)

    raw = [positive_frac() for _ in range(n_left)]
    total = sum(raw)
    alphas = [w / total for w in raw]
    lefts = [(alphas[i], positive_frac(), frac()) for i in range(n_left)]

    raw = [positive_frac() for _ in range(n_right)]
    total = sum(raw)
    betas = [w / total for w in raw]
    bs = [positive_frac() for _ in range(n_right)]
    mass_left = sum(w * a for w, a, _ in lefts)
    mass_right = sum(b * v for b, v in zip(betas, bs))
    bs = [v * mass_left / mass_right for v in bs]  # match the weighted masses

    ys = [frac() for _ in range(n_right - 1)]
    moment_left = sum(w * a * x for w, a, x in lefts)
    partial = sum(betas[i] * bs[i] * ys[i] for i in range(n_right - 1))
    y_last = (moment_left - partial) / (betas[-1] * bs[-1])
    ys.append(y_last)
    rights = [(betas[i], bs[i], ys[i]) for i in range(n_right)]
    return lefts, rights


def synthetic_univariate(signs: str) -> tuple[SampleSet, ExtremeSets]:
    """Extreme sets over points 0..n-1 with the given '+-' sign pattern."""
    n = len(signs)
    xs = [(float(i),) for i in range(n)]
    samples = SampleSet(xs, [1.0 if c == "+" else -1.0 for c in signs])
    plus = tuple(i for i, c in enumerate(signs) if c == "+")
    minus = tuple(i for i, c in enumerate(signs) if c == "-")
    return samples, ExtremeSets(plus=plus, minus=minus, psi=1.0, rel_tol=0.0)
