"""Shared fixtures: deterministic RNG, random unitaries, random circuits."""

import numpy as np
import pytest

from smoptics import circuit, fock


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_unitary(rng, dim: int = 2) -> np.ndarray:
    """Haar-ish random unitary via QR of a complex Gaussian matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(rng, sector: fock.FockSector) -> fock.StateVector:
    amps = rng.normal(size=sector.size) + 1j * rng.normal(size=sector.size)
    return fock.StateVector(sector, amps / np.linalg.norm(amps))


def single_minimum_circuit() -> "circuit.CircuitSpec":
    """Layout of the stock classifier with |2,0> input and bunched outcome.

    The stock instance (NOON input, 50-50 splitters, photon-count outcome)
    has exactly pi-periodic cost restrictions in every parameter: the input
    carries no |1,1> component, the splitter's |1,1>->|1,1> amplitude is
    the Hong-Ou-Mandel null, and the equal-weight input cancels the
    residual cos term, so every restriction has only even harmonics and
    twin degenerate minima pi apart.  Feeding |2,0> instead restores odd
    harmonics, giving restrictions with one global minimum - what argmin
    comparisons need.
    """
    base = circuit.default_reuploading_circuit()
    sector = fock.sector_basis(2, 2)
    return circuit.CircuitSpec(
        modes=2,
        photons=2,
        elements=list(base.elements),
        input_state=fock.basis_state(sector, (2, 0)),
        outcome=(2, 0),
        param_count=base.param_count,
    )


def refined_bruteforce_argmin(xs: np.ndarray, vs: np.ndarray) -> float:
    """Grid argmin sharpened by a 3-point parabola through the minimum.

    A raw 10^6-point scan only locates the argmin to half a grid step
    (~3e-6 on [-pi, pi]); the parabola vertex recovers the remaining
    digits for smooth minima.
    """
    i = int(np.argmin(vs))
    if i == 0 or i == len(xs) - 1:
        return float(xs[i])
    h = xs[1] - xs[0]
    denom = vs[i - 1] - 2 * vs[i] + vs[i + 1]
    if denom <= 0:
        return float(xs[i])
    return float(xs[i] + 0.5 * h * (vs[i - 1] - vs[i + 1]) / denom)


def random_circuit(rng, n_features: int = 2):
    """Random 2-mode 2-photon circuit with every parameter used once.

    Returns (spec, params, x, shifter_positions).  Each shifter carries a
    fresh offset parameter and, half the time, a fresh scale parameter on
    a random feature; beamsplitters use random 2x2 unitaries.
    """
    sector = fock.sector_basis(2, 2)
    n_shifters = int(rng.integers(1, 4))
    elements = []
    next_param = 0
    for t in range(n_shifters):
        if rng.random() < 0.5:
            expr = circuit.PhaseExpr(
                offset=next_param,
                scale=next_param + 1,
                feature=int(rng.integers(0, n_features)),
                constant=float(rng.uniform(-1, 1)),
            )
            next_param += 2
        else:
            expr = circuit.PhaseExpr(offset=next_param, constant=float(rng.uniform(-1, 1)))
            next_param += 1
        elements.append(circuit.PhaseShifter(int(rng.integers(0, 2)), expr))
        if t < n_shifters - 1 or rng.random() < 0.7:
            elements.append(circuit.Beamsplitter((0, 1), random_unitary(rng)))
    outcome = sector.basis[int(rng.integers(0, sector.size))]
    spec = circuit.CircuitSpec(
        modes=2,
        photons=2,
        elements=elements,
        input_state=random_state(rng, sector),
        outcome=outcome,
        param_count=next_param,
    )
    params = rng.uniform(-np.pi, np.pi, next_param)
    x = rng.uniform(-1, 1, n_features)
    positions = [p for p, el in enumerate(spec.elements) if isinstance(el, circuit.PhaseShifter)]
    return spec, params, x, positions
