"""
Five readouts pin down a circuit's whole phase response
=======================================================

Sweeping any single phase shifter of an n-photon circuit moves the
outcome probability along a trigonometric polynomial of degree n.  For
two photons that is five coefficients, so five probe phases determine
the entire curve - the key to minimizing over a parameter without ever
scanning it.
"""

import numpy as np

from smoptics import circuit, fock, trigfit

# Assemble a small data-reuploading circuit by hand: two phase shifters,
# each encoding one feature behind a trainable offset and scale, mixed
# by a balanced splitter and then by a partially transmitting one with a
# relative phase.  Both photons enter the first mode.
sector = fock.sector_basis(modes=2, photons=2)
balanced = np.array([[1.0, 1.0j], [1.0j, 1.0]]) / np.sqrt(2.0)
tilted = np.array([
    [np.cos(0.9), -np.exp(0.7j) * np.sin(0.9)],
    [np.exp(-0.7j) * np.sin(0.9), np.cos(0.9)],
])
spec = circuit.CircuitSpec(
    modes=2,
    photons=2,
    elements=[
        circuit.PhaseShifter(0, circuit.PhaseExpr(offset=0, scale=1, feature=0)),
        circuit.Beamsplitter((0, 1), balanced),
        circuit.PhaseShifter(1, circuit.PhaseExpr(offset=2, scale=3, feature=1)),
        circuit.Beamsplitter((0, 1), tilted),
    ],
    input_state=fock.basis_state(sector, (2, 0)),
    outcome=(2, 0),
    param_count=4,
)
params = np.random.default_rng(7).uniform(-np.pi, np.pi, spec.param_count)
x = (0.4, -0.3)  # one data point
print("p(x) =", round(circuit.evaluate(spec, params, x), 6))

# Measure the outcome probability with the second shifter's total phase
# overridden at the five probe phases 0, +-2pi/5, +-4pi/5.
position = spec.shifter_positions[1]
schedule = trigfit.probe_phases(degree=2)
samples = [circuit.evaluate_with_probe(spec, params, x, position, phi) for phi in schedule]
print("probe phases:  ", np.round(schedule, 4))
print("probe readouts:", np.round(samples, 6))

# Invert the linear sampling map to get the polynomial coefficients
# [A0, A1 cos, A2 sin, A3 cos2, A4 sin2].
poly = trigfit.reconstruct(samples, degree=2)
print("coefficients:  ", np.round(poly.coeffs, 6))

# The reconstruction is exact, not a fit: compare it against direct
# evaluation on a dense phase grid.
phis = np.linspace(-np.pi, np.pi, 9)
direct = [circuit.evaluate_with_probe(spec, params, x, position, phi) for phi in phis]
print("\n   phi      direct      polynomial")
for phi, d in zip(phis, direct):
    print(f"{phi:+.3f}   {d:.8f}   {poly(phi):.8f}")

# Knowing the closed form, the global minimum over this phase costs one
# dense scan of the polynomial instead of thousands of circuit runs.
theta, value = trigfit.minimize_1d(poly, (-np.pi, np.pi))
print(f"\nglobal minimum: p = {value:.8f} at phase {theta:+.6f}")
