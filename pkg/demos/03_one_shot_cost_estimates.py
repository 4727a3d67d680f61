"""
Unbiased training costs from a single shot per readout
======================================================

Squared-error training needs p^2 terms, but squaring a noisy estimate
p~ adds a bias of Var[p~].  Estimating the probability twice from
disjoint measurement batches and multiplying the two copies removes it:
E[p~ p~'] = p^2 exactly.  This script builds the estimated cost along
one parameter from one-shot readouts and watches its minimizer converge
to the true one as the dataset grows.
"""

import numpy as np

from smoptics import circuit, classifier, fock, shots, smo, trigfit

# A circuit whose cost restriction has a single global minimum, fixed
# random parameters, and a labeled dataset.
spec = circuit.CircuitSpec(
    modes=2,
    photons=2,
    elements=list(circuit.default_reuploading_circuit().elements),
    input_state=fock.basis_state(fock.sector_basis(2, 2), (2, 0)),
    outcome=(2, 0),
    param_count=6,
)
params = shots.substream(41).uniform(-np.pi, np.pi, 6)
dataset = classifier.generate_dataset(classifier.CircleRule(), 1000, seed=42)

# Restrict the cost to parameter 2, the offset of the middle shifter:
# point i contributes (p_i(base_i + theta) - y_i)^2 where p_i is that
# point's probe polynomial.
index = 2
position, role = spec.parameter_site(index)
expr = spec.elements[position].expr
feats, labels = dataset.features(), dataset.labels()
probes = circuit.probe_probabilities(spec, params, feats, position, trigfit.probe_phases(2))
base = expr.constant + params[expr.scale] * feats[:, expr.feature]
slopes = np.ones(len(dataset))

# The exact restriction (an exact oracle returns true probabilities and
# consumes no shots) gives the true minimizer.
def restriction(point_count, oracle):
    costs = [
        smo.PointCost(
            i,
            float(labels[i]),
            shots.independent_pair_from_probs(probes[i], 2, oracle.keyed(i)),
        )
        for i in range(point_count)
    ]
    return smo.estimated_cost_fn(costs, (base[:point_count], slopes[:point_count]))

exact = restriction(1000, shots.exact_oracle())
theta_true = trigfit.minimize_1d(exact, (-np.pi, np.pi), vectorized=True)[0]
print(f"true minimizer of the exact cost: {theta_true:+.4f} rad")

# Now re-estimate every probability from one measurement shot.  The
# estimated restriction is rough, yet its minimizer lands close - and
# closer the more points are averaged.
print("\npoints   argmin error (rad), 5 noise streams")
for count in (30, 100, 300, 1000):
    errors = []
    for trial in range(5):
        noisy = restriction(count, shots.binomial_oracle(1, (7, trial)))
        theta = trigfit.minimize_1d(noisy, (-np.pi, np.pi), vectorized=True)[0]
        delta = abs(theta - theta_true) % (2 * np.pi)
        errors.append(min(delta, 2 * np.pi - delta))
    print(f"{count:6d}   " + "  ".join(f"{e:.3f}" for e in errors))

# Averaging over the dataset is what tames the shot noise: each point
# contributes an independent one-shot estimate of its own curve, and the
# cost only needs their mean.
