"""
How few measurement shots does training really need?
====================================================

Every probability that enters the cost can be estimated from as little
as one measurement shot without biasing the minimization.  This script
runs a reduced sweep over shots-per-readout, compares the resulting
classifiers against the exact-mode baseline, and prices each column in
total measurement shots.
"""

import numpy as np

from smoptics import classifier, circuit, shots, smo

# Reduced grid so the demo finishes in well under a minute; the stock
# experiment (300 points, 10 rounds, 10 seeds) ships as the CLI default.
config = classifier.SweepConfig(
    train_size=150,
    test_size=400,
    shot_counts=(None, 10, 1),
    seeds=(0, 1, 2, 3, 4),
    rounds=6,
)
cells = classifier.run_nall_sweep(config)

print("shots/readout   mean P   std P   total shots")
for n_all in config.shot_counts:
    ps = [c.metrics.p for c in cells if c.n_all == n_all]
    used = next(c.shots_used for c in cells if c.n_all == n_all)
    name = "exact" if n_all is None else str(n_all)
    print(f"{name:>13}   {np.mean(ps):.3f}   {np.std(ps, ddof=1):.3f}   {used:>11,}")

# The budget formula behind the last column: rounds x parameters x
# training points x 5 probes x 2 batches x shots per readout.
spec = circuit.default_reuploading_circuit()
one_shot = smo.TrainingConfig(rounds=6, oracle=shots.binomial_oracle(1))
print(
    "\none-shot budget check:",
    smo.shot_budget(one_shot, spec, dataset_size=150),
    "= 6 * 6 * 150 * 5 * 2 * 1",
)

# Single-shot training costs two orders of magnitude fewer measurements
# than a conventional 200-shot estimate of every probability, at a small
# cost in final classification quality.
