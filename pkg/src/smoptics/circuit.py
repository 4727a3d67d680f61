"""Parameterized passive circuits on a fixed-photon-number sector.

A circuit is an ordered list of elements acting on ``M`` modes: phase
shifters whose phase is an affine expression

    phi = constant + params[offset] + params[scale] * features[feature]

in trainable parameters and data features, and fixed two-mode elements
(beamsplitters) given by a 2x2 unitary.  The default beamsplitter is the
symmetric 50-50 convention with the imaginary cross amplitude,
(1/sqrt 2) [[1, i], [i, 1]].

The measured quantity is the probability of one photon-count outcome,
so a circuit plus an input state defines a map (params, features) ->
probability.  Along the total phase of any single shifter that map is a
trig polynomial of degree equal to the photon number, which is what the
probe-based training exploits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import fock
from .fock import FockSector, StateVector

BS_5050 = np.array([[1.0, 1.0j], [1.0j, 1.0]]) / np.sqrt(2.0)
BS_5050.flags.writeable = False


@dataclass(frozen=True)
class DataPoint:
    """A feature tuple with a binary class label."""

    features: tuple[float, ...]
    label: int

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(float(v) for v in self.features))
        if not all(np.isfinite(self.features)):
            raise ValueError("features must be finite")
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")


@dataclass(frozen=True)
class PhaseExpr:
    """Affine phase expression: constant + params[offset] + params[scale]*x[feature]."""

    offset: int | None = None
    scale: int | None = None
    feature: int | None = None
    constant: float = 0.0

    def __post_init__(self):
        if (self.scale is None) != (self.feature is None):
            raise ValueError("scale and feature must be given together")

    def value(self, params: np.ndarray, features) -> float:
        phi = self.constant
        if self.offset is not None:
            phi += params[self.offset]
        if self.scale is not None:
            if not 0 <= self.feature < len(features):
                raise ValueError(
                    f"feature index {self.feature} out of range for "
                    f"{len(features)} features"
                )
            phi += params[self.scale] * features[self.feature]
        return float(phi)

    def parameters(self):
        if self.offset is not None:
            yield self.offset, "offset"
        if self.scale is not None:
            yield self.scale, "scale"


@dataclass(frozen=True)
class PhaseShifter:
    mode: int
    expr: PhaseExpr


@dataclass(frozen=True, eq=False)
class Beamsplitter:
    modes: tuple[int, int]
    matrix: np.ndarray = field(default_factory=lambda: BS_5050)


Element = Union[PhaseShifter, Beamsplitter]


def _embed_pair(matrix: np.ndarray, modes: tuple[int, int], n_modes: int) -> np.ndarray:
    u = np.eye(n_modes, dtype=complex)
    i, j = modes
    u[i, i], u[i, j] = matrix[0, 0], matrix[0, 1]
    u[j, i], u[j, j] = matrix[1, 0], matrix[1, 1]
    return u


class CircuitSpec:
    """Validated, immutable circuit description.

    Parameters
    ----------
    modes, photons : int
        Sector dimensions.
    elements : sequence of PhaseShifter | Beamsplitter
        Applied in order to the input state.
    input_state : StateVector
        Normalized state on the same sector.
    outcome : occupation tuple
        The measured photon pattern.
    param_count : int
        Number of trainable parameters; every index below this must be
        used by exactly one phase expression, in exactly one role.
    """

    def __init__(self, modes, photons, elements, input_state, outcome, param_count):
        sector = fock.sector_basis(modes, photons)
        if input_state.sector != sector:
            raise ValueError("input state lives on a different sector")
        if abs(input_state.norm() - 1.0) > 1e-12:
            raise ValueError(f"input state is not normalized (norm {input_state.norm()!r})")
        if param_count < 0:
            raise ValueError("param_count must be non-negative")

        sites: dict[int, tuple[int, str]] = {}
        for pos, el in enumerate(elements):
            if isinstance(el, PhaseShifter):
                if not 0 <= el.mode < modes:
                    raise ValueError(f"element {pos}: mode {el.mode} out of range")
                for idx, role in el.expr.parameters():
                    if not 0 <= idx < param_count:
                        raise ValueError(
                            f"element {pos}: parameter index {idx} out of range"
                        )
                    if idx in sites:
                        raise ValueError(
                            f"parameter {idx} is used by more than one phase expression"
                        )
                    sites[idx] = (pos, role)
            elif isinstance(el, Beamsplitter):
                i, j = el.modes
                if i == j or not (0 <= i < modes and 0 <= j < modes):
                    raise ValueError(f"element {pos}: invalid mode pair {el.modes}")
                m = np.asarray(el.matrix, dtype=complex)
                if m.shape != (2, 2):
                    raise ValueError(f"element {pos}: beamsplitter matrix must be 2x2")
                if np.max(np.abs(m.conj().T @ m - np.eye(2))) > 1e-12:
                    raise ValueError(f"element {pos}: beamsplitter matrix is not unitary")
            else:
                raise TypeError(f"unknown element type {type(el).__name__}")
        missing = [j for j in range(param_count) if j not in sites]
        if missing:
            raise ValueError(f"parameters {missing} are not used by any phase expression")

        self.modes = int(modes)
        self.photons = int(photons)
        self.elements = tuple(elements)
        self.input_state = input_state
        self.outcome = tuple(int(k) for k in outcome)
        self.param_count = int(param_count)
        self.sector = sector
        self._out_index = sector.index_of(self.outcome)
        self._sites = sites
        self.shifter_positions = tuple(
            pos for pos, el in enumerate(self.elements) if isinstance(el, PhaseShifter)
        )
        # lifted sector matrices for the fixed elements, once
        self._lifted = {
            pos: fock.lift_mode_unitary(
                _embed_pair(np.asarray(el.matrix, dtype=complex), el.modes, modes), sector
            )
            for pos, el in enumerate(self.elements)
            if isinstance(el, Beamsplitter)
        }

    def parameter_site(self, index: int) -> tuple[int, str]:
        """(element position, role) of a trainable parameter."""
        try:
            return self._sites[index]
        except KeyError:
            raise ValueError(f"parameter {index} is not used by any phase shifter") from None

    def __repr__(self):
        return (
            f"CircuitSpec(modes={self.modes}, photons={self.photons}, "
            f"elements={len(self.elements)}, params={self.param_count})"
        )


def _check_params(spec: CircuitSpec, params) -> np.ndarray:
    p = np.asarray(params, dtype=float)
    if p.shape != (spec.param_count,):
        raise ValueError(f"expected {spec.param_count} parameters, got shape {p.shape}")
    if not np.isfinite(p).all():
        raise ValueError("parameters must be finite")
    return p


def _point_features(x):
    return getattr(x, "features", x)


def bind(spec: CircuitSpec, params, x) -> np.ndarray:
    """Resolved phases of all shifters, in element order."""
    p = _check_params(spec, params)
    features = _point_features(x)
    return np.array(
        [spec.elements[pos].expr.value(p, features) for pos in spec.shifter_positions]
    )


def _evolve(spec: CircuitSpec, phases: np.ndarray, override: tuple[int, float] | None = None):
    """Amplitudes after the full element chain; optionally override one shifter."""
    amps = spec.input_state.amplitudes.copy()
    occ = spec.sector.occupations
    si = 0
    for pos, el in enumerate(spec.elements):
        if isinstance(el, PhaseShifter):
            phi = phases[si]
            if override is not None and pos == override[0]:
                phi = override[1]
            amps = amps * np.exp(1j * phi * occ[:, el.mode])
            si += 1
        else:
            amps = spec._lifted[pos] @ amps
    return amps


def evaluate(spec: CircuitSpec, params, x) -> float:
    """Outcome probability for one data point."""
    amps = _evolve(spec, bind(spec, params, x))
    return float(abs(amps[spec._out_index]) ** 2)


def evaluate_with_probe(
    spec: CircuitSpec, params, x, shifter_index: int, probe_phase: float
) -> float:
    """Outcome probability with one shifter's total phase replaced by ``probe_phase``."""
    if shifter_index not in spec.shifter_positions:
        raise ValueError(f"element {shifter_index} does not address a phase shifter")
    amps = _evolve(spec, bind(spec, params, x), override=(shifter_index, float(probe_phase)))
    return float(abs(amps[spec._out_index]) ** 2)


# -- batched evaluation over many data points ---------------------------------


def _check_features_matrix(x_matrix) -> np.ndarray:
    x = np.asarray(x_matrix, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"feature matrix must be 2-D, got shape {x.shape}")
    return x


def bind_batch(spec: CircuitSpec, params, x_matrix) -> np.ndarray:
    """Shifter phases for every row of a feature matrix, shape (N, n_shifters)."""
    p = _check_params(spec, params)
    x = _check_features_matrix(x_matrix)
    cols = []
    for pos in spec.shifter_positions:
        expr = spec.elements[pos].expr
        col = np.full(x.shape[0], expr.constant)
        if expr.offset is not None:
            col = col + p[expr.offset]
        if expr.scale is not None:
            if not 0 <= expr.feature < x.shape[1]:
                raise ValueError(
                    f"feature index {expr.feature} out of range for {x.shape[1]} features"
                )
            col = col + p[expr.scale] * x[:, expr.feature]
        cols.append(col)
    if not cols:
        return np.zeros((x.shape[0], 0))
    return np.stack(cols, axis=1)


def evaluate_batch(spec: CircuitSpec, params, x_matrix) -> np.ndarray:
    """Outcome probabilities for every row of a feature matrix."""
    x = _check_features_matrix(x_matrix)
    phases = bind_batch(spec, params, x)
    occ = spec.sector.occupations
    amps = np.broadcast_to(spec.input_state.amplitudes, (x.shape[0], spec.sector.size)).copy()
    si = 0
    for pos, el in enumerate(spec.elements):
        if isinstance(el, PhaseShifter):
            amps *= np.exp(1j * np.outer(phases[:, si], occ[:, el.mode]))
            si += 1
        else:
            amps = amps @ spec._lifted[pos].T
    return np.abs(amps[:, spec._out_index]) ** 2


def probe_probabilities(
    spec: CircuitSpec, params, x_matrix, shifter_index: int, probe_phases
) -> np.ndarray:
    """Probabilities at several probe phases of one shifter, for every point.

    Returns shape (N, len(probe_phases)).  Equivalent to calling
    :func:`evaluate_with_probe` pointwise, but factors the circuit into
    the part before the probed shifter (run forward) and the part after
    it (run backward from the outcome), so all probes share the work.
    """
    if shifter_index not in spec.shifter_positions:
        raise ValueError(f"element {shifter_index} does not address a phase shifter")
    x = _check_features_matrix(x_matrix)
    phases = bind_batch(spec, params, x)
    probes = np.asarray(probe_phases, dtype=float)
    occ = spec.sector.occupations
    n = x.shape[0]

    # forward prefix: input through everything before the probed shifter
    pre = np.broadcast_to(spec.input_state.amplitudes, (n, spec.sector.size)).copy()
    si = 0
    for pos, el in enumerate(spec.elements):
        if pos == shifter_index:
            break
        if isinstance(el, PhaseShifter):
            pre *= np.exp(1j * np.outer(phases[:, si], occ[:, el.mode]))
            si += 1
        else:
            pre = pre @ spec._lifted[pos].T

    # backward suffix: outcome row vector pulled through the adjoints
    post = np.zeros((n, spec.sector.size), dtype=complex)
    post[:, spec._out_index] = 1.0
    si = len(spec.shifter_positions)
    for pos in range(len(spec.elements) - 1, shifter_index, -1):
        el = spec.elements[pos]
        if isinstance(el, PhaseShifter):
            si -= 1
            post *= np.exp(-1j * np.outer(phases[:, si], occ[:, el.mode]))
        else:
            post = post @ np.conj(spec._lifted[pos])

    kvec = occ[:, spec.elements[shifter_index].mode]
    weights = np.conj(post) * pre  # (N, D); amplitude = weights @ exp(i k probe)
    amps = weights @ np.exp(1j * np.outer(kvec, probes))
    return np.abs(amps) ** 2


def default_reuploading_circuit() -> CircuitSpec:
    """Two-mode, two-photon data-reuploading classifier circuit.

    Three phase shifters on mode 0 separated by 50-50 beamsplitters.
    Shifter t carries phase params[2t] + params[2t+1] * x[f_t] with the
    feature cycle f = (0, 1, 0), so both features enter and the first is
    re-uploaded.  Input is the two-photon superposition
    (|20> + |02>)/sqrt(2); the measured outcome is the coincidence
    pattern (1, 1).  Six trainable parameters.
    """
    sector = fock.sector_basis(2, 2)
    amps = np.zeros(sector.size, dtype=complex)
    amps[sector.index_of((2, 0))] = 1.0 / np.sqrt(2.0)
    amps[sector.index_of((0, 2))] = 1.0 / np.sqrt(2.0)
    features = (0, 1, 0)
    elements: list[Element] = []
    for t in range(3):
        elements.append(
            PhaseShifter(0, PhaseExpr(offset=2 * t, scale=2 * t + 1, feature=features[t]))
        )
        if t < 2:
            elements.append(Beamsplitter((0, 1)))
    return CircuitSpec(
        modes=2,
        photons=2,
        elements=elements,
        input_state=StateVector(sector, amps),
        outcome=(1, 1),
        param_count=6,
    )


# -- serialization -------------------------------------------------------------


def _complex_pairs(values) -> list[list[float]]:
    return [[float(v.real), float(v.imag)] for v in np.asarray(values, dtype=complex).ravel()]


def spec_to_dict(spec: CircuitSpec) -> dict:
    """JSON-ready description; inverse of :func:`spec_from_dict`."""
    elements = []
    for el in spec.elements:
        if isinstance(el, PhaseShifter):
            elements.append(
                {
                    "kind": "phase_shifter",
                    "mode": el.mode,
                    "expr": {
                        "offset": el.expr.offset,
                        "scale": el.expr.scale,
                        "feature": el.expr.feature,
                        "constant": el.expr.constant,
                    },
                }
            )
        else:
            m = np.asarray(el.matrix, dtype=complex)
            elements.append(
                {"kind": "beamsplitter", "modes": list(el.modes), "matrix": _complex_pairs(m)}
            )
    return {
        "modes": spec.modes,
        "photons": spec.photons,
        "param_count": spec.param_count,
        "elements": elements,
        "input": _complex_pairs(spec.input_state.amplitudes),
        "outcome": list(spec.outcome),
    }


def spec_from_dict(data: dict) -> CircuitSpec:
    sector = fock.sector_basis(int(data["modes"]), int(data["photons"]))
    elements: list[Element] = []
    for entry in data["elements"]:
        if entry["kind"] == "phase_shifter":
            e = entry["expr"]
            elements.append(
                PhaseShifter(
                    int(entry["mode"]),
                    PhaseExpr(
                        offset=None if e["offset"] is None else int(e["offset"]),
                        scale=None if e["scale"] is None else int(e["scale"]),
                        feature=None if e["feature"] is None else int(e["feature"]),
                        constant=float(e["constant"]),
                    ),
                )
            )
        elif entry["kind"] == "beamsplitter":
            pairs = entry["matrix"]
            m = np.array([complex(re, im) for re, im in pairs]).reshape(2, 2)
            elements.append(Beamsplitter((int(entry["modes"][0]), int(entry["modes"][1])), m))
        else:
            raise ValueError(f"unknown element kind {entry.get('kind')!r}")
    amps = np.array([complex(re, im) for re, im in data["input"]])
    return CircuitSpec(
        modes=int(data["modes"]),
        photons=int(data["photons"]),
        elements=elements,
        input_state=StateVector(sector, amps),
        outcome=tuple(int(k) for k in data["outcome"]),
        param_count=int(data["param_count"]),
    )
