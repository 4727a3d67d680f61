"""Measurement readout models: exact probabilities or finite-shot estimates.

A binomial oracle turns a true probability p into the relative frequency
r = successes / shots of independent Bernoulli(p) trials, so
r is in {0, 1/shots, ..., 1}, E[r] = p and Var[r] = p(1-p)/shots.  An
exact oracle returns p itself and consumes no shots.

Randomness contract: an oracle is a frozen value carrying a key tuple.
Every random draw comes from a fresh ``numpy`` generator seeded by
``SeedSequence(key)``, and :meth:`MeasurementOracle.keyed` derives child
oracles by extending the key.  Identical keys give identical draws, and
draws under different keys are independent, so results never depend on
evaluation order and a whole experiment is reproducible from one master
seed.  Callers wanting fresh randomness per call must extend the key
themselves (for example with a trial index).

Estimating a degree-n trig polynomial takes 2n+1 probe samples; probe j
draws from ``oracle.keyed(j)``.  :func:`independent_pair` prefixes batch
indices 0 and 1, so the two estimates come from disjoint substreams, and
the product of the pair is an unbiased estimate of the squared
polynomial at every phase.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import trigfit
from .trigfit import TrigPoly

# Bernoulli summation below this shot count, one binomial draw above; the
# cutover changes which generator variates are consumed, never the law.
_BERNOULLI_MAX = 64

# probability slack tolerated on inputs before raising
P_SLACK = 1e-9


@dataclass(frozen=True)
class MeasurementOracle:
    """Readout model: ``shots=None`` for exact, otherwise binomial."""

    shots: int | None = None
    key: tuple[int, ...] = (0,)

    def __post_init__(self):
        if self.shots is not None and (not isinstance(self.shots, int) or self.shots < 1):
            raise ValueError(f"shots must be a positive integer or None, got {self.shots!r}")
        key = tuple(int(k) for k in self.key)
        object.__setattr__(self, "key", key)

    @property
    def exact(self) -> bool:
        return self.shots is None

    def keyed(self, *suffix: int) -> "MeasurementOracle":
        """Child oracle whose substream key extends this one's."""
        return replace(self, key=self.key + tuple(int(k) for k in suffix))

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.key))


def exact_oracle() -> MeasurementOracle:
    return MeasurementOracle(None)


def binomial_oracle(shots: int, seed=0) -> MeasurementOracle:
    key = (seed,) if isinstance(seed, int) else tuple(seed)
    return MeasurementOracle(shots, key)


def substream(*key: int) -> np.random.Generator:
    """Independent generator for an integer key tuple."""
    return np.random.default_rng(np.random.SeedSequence(tuple(int(k) for k in key)))


def estimate_probability(p_true: float, oracle: MeasurementOracle) -> float:
    """One readout of a probability under the oracle's model."""
    p = float(p_true)
    if not -P_SLACK <= p <= 1.0 + P_SLACK:
        raise ValueError(f"probability {p!r} outside [0, 1] beyond tolerance")
    if oracle.exact:
        return p
    p = min(max(p, 0.0), 1.0)
    n = oracle.shots
    rng = oracle.rng()
    if n <= _BERNOULLI_MAX:
        successes = int((rng.random(n) < p).sum())
    else:
        successes = int(rng.binomial(n, p))
    return successes / n


@dataclass(frozen=True)
class EstimatedPoly:
    """A reconstructed trig polynomial plus the shots it consumed."""

    poly: TrigPoly
    shots_used: int


def _probe_values(probe_fn, degree: int) -> np.ndarray:
    phases = trigfit.probe_phases(degree)
    return np.array([float(probe_fn(phi)) for phi in phases])


def estimate_trigpoly_from_probs(p_true, degree: int, oracle: MeasurementOracle) -> EstimatedPoly:
    """Estimate from known true probe values, in probe-schedule order."""
    p_true = np.asarray(p_true, dtype=float)
    k = 2 * degree + 1
    if p_true.shape != (k,):
        raise ValueError(f"need {k} probe values for degree {degree}, got {p_true.shape}")
    samples = np.array(
        [estimate_probability(p_true[j], oracle.keyed(j)) for j in range(k)]
    )
    used = 0 if oracle.exact else k * oracle.shots
    return EstimatedPoly(trigfit.reconstruct(samples, degree), used)


def estimate_trigpoly(probe_fn, degree: int, oracle: MeasurementOracle) -> EstimatedPoly:
    """Sample ``probe_fn`` at the probe schedule and reconstruct.

    ``probe_fn`` maps a phase to a true probability; it is evaluated once
    per probe phase.
    """
    return estimate_trigpoly_from_probs(_probe_values(probe_fn, degree), degree, oracle)


def independent_pair_from_probs(
    p_true, degree: int, oracle: MeasurementOracle
) -> tuple[EstimatedPoly, EstimatedPoly]:
    """Two estimates from disjoint batches of the oracle's substream."""
    return (
        estimate_trigpoly_from_probs(p_true, degree, oracle.keyed(0)),
        estimate_trigpoly_from_probs(p_true, degree, oracle.keyed(1)),
    )


def independent_pair(
    probe_fn, degree: int, oracle: MeasurementOracle
) -> tuple[EstimatedPoly, EstimatedPoly]:
    """Independent pair of estimates of the same polynomial.

    The two batches share nothing but the true probe values, so for a
    binomial oracle E[p~(phi) * p~'(phi)] = p(phi)^2 pointwise.  An exact
    oracle returns two identical exact polynomials.
    """
    return independent_pair_from_probs(_probe_values(probe_fn, degree), degree, oracle)
