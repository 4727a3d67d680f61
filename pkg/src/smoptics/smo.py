"""Sequential coordinate-minimum training of circuit phases.

Along the total phase phi of one shifter the outcome probability of a
circuit with n photons is an exact trig polynomial of degree n, so the
squared-error cost restricted to a single trainable parameter theta is a
degree-2n trig polynomial after the per-point affine substitution
phi_i = c_i + s_i * theta.  One update therefore:

1. samples the 2n+1 probe phases of the parameter's shifter with two
   independent measurement batches per training point,
2. reconstructs the per-point pair (p~_i, p~'_i) and assembles

       C~(theta) = mean_i [ p~_i(phi_i) p~'_i(phi_i) - 2 y_i p~_i(phi_i) + y_i^2 ],

   which is unbiased for the true cost at every theta because the two
   batches are independent,
3. jumps to the global minimizer of C~ over the parameter's interval.

With the exact oracle both factors equal the true polynomial, every
update is an exact coordinate minimization, and the cost never
increases.  The estimator is used as is: probabilities and products are
never clamped.

Cost model: one update consumes 2 * (2n+1) * shots per training point,
so a full run takes rounds * params * N * (2n+1) * 2 * shots readouts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import circuit, shots, trigfit
from .circuit import CircuitSpec
from .shots import EstimatedPoly, MeasurementOracle

_INIT_TAG = 101  # substream namespace for parameter initialization


class TraceEntry(NamedTuple):
    round: int
    param_index: int
    theta: float
    est_min: float
    exact_cost: float
    cum_shots: int


@dataclass
class TrainingConfig:
    """Knobs for :func:`train`.

    ``seed`` is the master seed: it draws the initial parameters (when
    none are passed) and, combined with the oracle's key, pins every
    measurement outcome.  ``min_round_improvement`` optionally stops
    exact-mode training once the relative cost improvement over one full
    round falls below the cutoff; default off.
    """

    rounds: int = 10
    oracle: MeasurementOracle = field(default_factory=shots.exact_oracle)
    param_order: tuple[int, ...] | None = None
    scale_interval: tuple[float, float] = (-2.0 * np.pi, 2.0 * np.pi)
    grid_points: int = 2048
    tol: float = 1e-10
    seed: int = 0
    min_round_improvement: float | None = None

    def __post_init__(self):
        if self.rounds < 0:
            raise ValueError("rounds must be non-negative")
        if self.grid_points < 3:
            raise ValueError("grid_points must be at least 3")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        lo, hi = self.scale_interval
        if not lo < hi:
            raise ValueError(f"invalid scale interval {self.scale_interval!r}")


@dataclass
class TrainState:
    params: np.ndarray
    round: int = 0
    trace: tuple[TraceEntry, ...] = ()
    shots_used: int = 0


@dataclass(frozen=True)
class PointCost:
    """Independent estimate pair for one training point's probability."""

    index: int
    target: float
    pair: tuple[EstimatedPoly, EstimatedPoly]


def _point_list(dataset) -> tuple:
    points = tuple(getattr(dataset, "points", dataset))
    if not points:
        raise ValueError("dataset is empty")
    return points


def _arrays(points) -> tuple[np.ndarray, np.ndarray]:
    x = np.array([p.features for p in points], dtype=float)
    y = np.array([p.label for p in points], dtype=float)
    return x, y


def exact_cost(spec: CircuitSpec, params, dataset) -> float:
    """Mean squared error (1/N) sum_i (p_i - y_i)^2 at exact probabilities."""
    x, y = _arrays(_point_list(dataset))
    p = circuit.evaluate_batch(spec, params, x)
    return float(np.mean((p - y) ** 2))


def estimated_cost_fn(point_costs: Sequence[PointCost], phase_map) -> Callable:
    """Cost estimate along one parameter as a callable of theta.

    ``phase_map`` is the pair of arrays (offsets, slopes) of the affine
    substitution phi_i = offsets[i] + slopes[i] * theta.  The returned
    callable accepts a scalar or a 1-D array of theta values.

    The per-point product p~_i p~'_i is expanded in complex harmonics
    (convolution of coefficients), the substitution folds the offsets in
    as coefficient rotations, and evaluation reduces to powers of
    z_i = exp(i * slopes[i] * theta).
    """
    if not point_costs:
        raise ValueError("need at least one point cost")
    offsets = np.asarray(phase_map[0], dtype=float)
    slopes = np.asarray(phase_map[1], dtype=float)
    n_pts = len(point_costs)
    if offsets.shape != (n_pts,) or slopes.shape != (n_pts,):
        raise ValueError("phase map arrays must match the number of points")
    degree = point_costs[0].pair[0].poly.degree
    for pc in point_costs:
        if pc.pair[0].poly.degree != degree or pc.pair[1].poly.degree != degree:
            raise ValueError("all estimate pairs must share one degree")

    k_in = 2 * degree + 1
    u = np.stack([trigfit.to_complex(pc.pair[0].poly) for pc in point_costs])
    v = np.stack([trigfit.to_complex(pc.pair[1].poly) for pc in point_costs])
    y = np.array([pc.target for pc in point_costs])

    # harmonics of p~ p~' - 2 y p~ + y^2 per point, indices -2n..2n
    center = 2 * degree
    q = np.zeros((n_pts, 4 * degree + 1), dtype=complex)
    for a in range(k_in):
        for b in range(k_in):
            q[:, a + b] += u[:, a] * v[:, b]
    q[:, center - degree : center + degree + 1] -= 2.0 * y[:, None] * u
    q[:, center] += y * y

    # real polynomials have Hermitian coefficients, so after rotating the
    # offsets in, the k >= 0 half carries everything:
    # value = Re(h_0) + 2 sum_k Re(h_k z^k)
    ks = np.arange(0, 2 * degree + 1)
    h = q[:, center:] * np.exp(1j * np.outer(offsets, ks))

    common_slope = slopes[0] if np.all(slopes == slopes[0]) else None
    if common_slope is not None:
        d = h.mean(axis=0)

        def cost(theta):
            th = np.asarray(theta, dtype=float)
            flat = np.atleast_1d(th)
            waves = np.exp(1j * common_slope * np.outer(flat, ks[1:]))
            vals = d[0].real + 2.0 * (waves @ d[1:]).real
            return float(vals[0]) if th.ndim == 0 else vals

        return cost

    def cost(theta):
        th = np.asarray(theta, dtype=float)
        flat = np.atleast_1d(th)
        z = np.exp(1j * slopes[:, None] * flat[None, :])
        vals = np.full(flat.shape, h[:, 0].real.mean())
        zk = z
        for k in range(1, 2 * degree + 1):
            vals = vals + (2.0 / n_pts) * (h[:, k] @ zk).real
            if k < 2 * degree:
                zk = zk * z
        return float(vals[0]) if th.ndim == 0 else vals

    return cost


def update_parameter(
    spec: CircuitSpec, state: TrainState, dataset, index: int, config: TrainingConfig
) -> TrainState:
    """One coordinate update: probe, reconstruct, minimize, write back."""
    points = _point_list(dataset)
    x, y = _arrays(points)
    pos, role = spec.parameter_site(index)
    degree = spec.photons
    k = 2 * degree + 1
    schedule = trigfit.probe_phases(degree)
    probs = circuit.probe_probabilities(spec, state.params, x, pos, schedule)

    point_costs = []
    for i in range(len(points)):
        pair = shots.independent_pair_from_probs(
            probs[i], degree, config.oracle.keyed(state.round, index, i)
        )
        point_costs.append(PointCost(i, float(y[i]), pair))

    expr = spec.elements[pos].expr
    params = state.params
    base = np.full(len(points), expr.constant)
    if role == "offset":
        if expr.scale is not None:
            base = base + params[expr.scale] * x[:, expr.feature]
        slopes = np.ones(len(points))
        interval = (-np.pi, np.pi)
    else:
        if expr.offset is not None:
            base = base + params[expr.offset]
        slopes = x[:, expr.feature]
        interval = config.scale_interval

    cost = estimated_cost_fn(point_costs, (base, slopes))
    theta, est_min = trigfit.minimize_1d(
        cost, interval, grid_points=config.grid_points, tol=config.tol, vectorized=True
    )
    # the unchanged value competes too whenever it lies in the interval;
    # keeps exact-mode descent monotone beyond grid resolution
    current = float(params[index])
    if interval[0] <= current <= interval[1]:
        at_current = float(cost(current))
        if at_current < est_min or (at_current == est_min and current < theta):
            theta, est_min = current, at_current

    new_params = params.copy()
    new_params[index] = theta
    added = 0 if config.oracle.exact else 2 * k * config.oracle.shots * len(points)
    cum = state.shots_used + added
    entry = TraceEntry(
        state.round, index, float(theta), float(est_min),
        exact_cost(spec, new_params, points), cum,
    )
    return TrainState(new_params, state.round, state.trace + (entry,), cum)


def train(
    spec: CircuitSpec, dataset, config: TrainingConfig, initial_params=None
) -> TrainState:
    """Run ``config.rounds`` full sweeps over the parameters in order."""
    points = _point_list(dataset)
    if config.param_order is None:
        order: tuple[int, ...] = tuple(range(spec.param_count))
    else:
        order = tuple(config.param_order)
        if sorted(order) != list(range(spec.param_count)):
            raise ValueError("param_order must be a permutation of all parameter indices")
    if initial_params is None:
        rng = shots.substream(config.seed, _INIT_TAG)
        params = rng.uniform(-np.pi, np.pi, spec.param_count)
    else:
        params = np.array(initial_params, dtype=float)
        if params.shape != (spec.param_count,):
            raise ValueError(f"initial params must have shape ({spec.param_count},)")

    state = TrainState(params)
    previous = exact_cost(spec, params, points) if config.min_round_improvement is not None else None
    for r in range(config.rounds):
        state.round = r
        for index in order:
            state = update_parameter(spec, state, dataset, index, config)
        if previous is not None and config.oracle.exact:
            latest = state.trace[-1].exact_cost
            if previous - latest <= config.min_round_improvement * max(previous, 1e-300):
                break
            previous = latest
    return state


def shot_budget(config: TrainingConfig, spec: CircuitSpec, dataset_size: int) -> int:
    """Total readouts of a full run; 0 for the exact oracle (no sampling)."""
    if config.oracle.exact:
        return 0
    k = 2 * spec.photons + 1
    return config.rounds * spec.param_count * dataset_size * k * 2 * config.oracle.shots
