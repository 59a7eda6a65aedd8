"""From-scratch multi-layer feedforward network trained by online backpropagation.

All arithmetic is float64 numpy. The update rule is plain gradient descent on
half the summed squared error, per pattern, with a momentum term that re-applies
a fraction of the previous total step. No batching, no alternative optimizers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, InvalidTopologyError


def sigmoid(v):
    """Logistic activation 1/(1+e^-v), stable for large |v|.

    Accepts a scalar or ndarray; returns the same shape.
    """
    v = np.asarray(v, dtype=float)
    scalar = v.ndim == 0
    v = np.atleast_1d(v)
    out = np.empty_like(v)
    pos = v >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
    ev = np.exp(v[~pos])
    out[~pos] = ev / (1.0 + ev)
    return float(out[0]) if scalar else out


def sigmoid_deriv(y):
    """Derivative of the logistic function expressed via its output: y*(1-y)."""
    return y * (1.0 - y)


@dataclass
class Network:
    """Layered weights and biases with sigmoid activations everywhere.

    weights[i] has shape (layer_sizes[i+1], layer_sizes[i]); biases[i] matches
    the destination layer. Training metadata (trained_epochs, alpha, beta) is
    carried along so a saved model documents how it was produced.
    """

    layer_sizes: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    rng_seed: int
    trained_epochs: int = 0
    alpha: Optional[float] = None
    beta: Optional[float] = None

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_size(self) -> int:
        return self.layer_sizes[-1]

    def copy(self) -> "Network":
        return replace(
            self,
            layer_sizes=list(self.layer_sizes),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
        )

    def validate(self) -> None:
        """Raise if the topology or parameter shapes are inconsistent."""
        _check_layer_sizes(self.layer_sizes)
        if len(self.weights) != len(self.layer_sizes) - 1 or len(self.biases) != len(self.layer_sizes) - 1:
            raise InvalidTopologyError("expected one weight matrix and bias vector per non-input layer")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            want = (self.layer_sizes[i + 1], self.layer_sizes[i])
            if w.shape != want:
                raise DimensionError(f"weight matrix {i} has shape {w.shape}, expected {want}")
            if b.shape != (self.layer_sizes[i + 1],):
                raise DimensionError(f"bias vector {i} has shape {b.shape}, expected ({self.layer_sizes[i + 1]},)")
            if not (np.isfinite(w).all() and np.isfinite(b).all()):
                raise InvalidTopologyError(f"non-finite parameter in layer {i + 2}")


@dataclass
class ForwardTrace:
    """Per-layer local fields and activations from one forward pass.

    activations[0] is the input; locals_[k] and activations[k+1] belong to the
    (k+2)-th layer in 1-based layer numbering.
    """

    locals_: list[np.ndarray]
    activations: list[np.ndarray]

    @property
    def output(self) -> np.ndarray:
        return self.activations[-1]


@dataclass
class TrainConfig:
    """Online-update training settings.

    learning_rate and momentum are both confined to [0,1]. stop_loss, when set,
    ends training early once an epoch's mean per-pattern loss drops below it
    (the returned history is then shorter than `epochs`).
    """

    learning_rate: float = 0.1
    momentum: float = 0.1
    epochs: int = 10000
    rng_seed: int = 0
    shuffle: bool = True
    stop_loss: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.learning_rate <= 1.0:
            raise ValueError(f"learning_rate must be in [0,1], got {self.learning_rate}")
        if not 0.0 <= self.momentum <= 1.0:
            raise ValueError(f"momentum must be in [0,1], got {self.momentum}")
        if self.epochs < 1:
            raise ValueError("epochs must be positive")


@dataclass
class MomentumState:
    """Previous total applied step per parameter, zero before the first update."""

    weight_steps: list[np.ndarray]
    bias_steps: list[np.ndarray]

    @classmethod
    def zeros_for(cls, net: Network) -> "MomentumState":
        return cls(
            weight_steps=[np.zeros_like(w) for w in net.weights],
            bias_steps=[np.zeros_like(b) for b in net.biases],
        )

    def copy(self) -> "MomentumState":
        return MomentumState(
            weight_steps=[s.copy() for s in self.weight_steps],
            bias_steps=[s.copy() for s in self.bias_steps],
        )


def _check_layer_sizes(layer_sizes: Sequence[int]) -> None:
    if len(layer_sizes) < 3:
        raise InvalidTopologyError(f"need at least 3 layers (input, hidden, output), got {len(layer_sizes)}")
    for size in layer_sizes:
        if int(size) != size or size < 1:
            raise InvalidTopologyError(f"layer sizes must be positive integers, got {list(layer_sizes)}")


def init_network(layer_sizes: Sequence[int], seed: int) -> Network:
    """Create a network with uniform weights in [-1/sqrt(fan_in), +1/sqrt(fan_in)].

    Biases start at zero so initial activations sit near the sigmoid midpoint.
    Deterministic for a fixed seed.
    """
    _check_layer_sizes(layer_sizes)
    sizes = [int(s) for s in layer_sizes]
    rng = np.random.default_rng(seed)
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        r = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-r, r, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Network(layer_sizes=sizes, weights=weights, biases=biases, rng_seed=int(seed))


def forward(net: Network, x) -> ForwardTrace:
    """Propagate one input through every layer, keeping local fields and outputs."""
    x = np.asarray(x, dtype=float)
    if x.shape != (net.input_size,):
        raise DimensionError(f"input has shape {x.shape}, expected ({net.input_size},)")
    locals_ = []
    activations = [x]
    y = x
    for w, b in zip(net.weights, net.biases):
        v = w @ y + b
        y = sigmoid(v)
        locals_.append(v)
        activations.append(y)
    return ForwardTrace(locals_=locals_, activations=activations)


def loss(output, target) -> float:
    """Half the summed squared residual between target and output."""
    output = np.asarray(output, dtype=float)
    target = np.asarray(target, dtype=float)
    if output.shape != target.shape:
        raise DimensionError(f"output shape {output.shape} != target shape {target.shape}")
    diff = target - output
    return 0.5 * float(diff @ diff)


def backprop_deltas(net: Network, trace: ForwardTrace, target) -> list[np.ndarray]:
    """Per-layer error terms, output layer last.

    Output layer: (target - y) * y * (1 - y). Hidden layer k: the next layer's
    deltas pulled back through its weights, times this layer's sigmoid slope.
    Signs are chosen so that adding learning_rate * delta * activation to a
    weight descends the loss.
    """
    target = np.asarray(target, dtype=float)
    if target.shape != (net.output_size,):
        raise DimensionError(f"target has shape {target.shape}, expected ({net.output_size},)")
    if len(trace.activations) != len(net.layer_sizes):
        raise DimensionError("trace does not match network depth")
    for size, y in zip(net.layer_sizes, trace.activations):
        if y.shape != (size,):
            raise DimensionError("trace activations do not match network layer sizes")

    n_param_layers = len(net.weights)
    deltas: list[np.ndarray] = [np.empty(0)] * n_param_layers
    y_out = trace.activations[-1]
    deltas[-1] = (target - y_out) * sigmoid_deriv(y_out)
    for i in range(n_param_layers - 2, -1, -1):
        y_i = trace.activations[i + 1]
        deltas[i] = (net.weights[i + 1].T @ deltas[i + 1]) * sigmoid_deriv(y_i)
    return deltas


def _step_in_place(weights, biases, deltas, activations, alpha, beta, prev_w, prev_b):
    """Apply one momentum update to parameter arrays, recording the applied step.

    prev_w/prev_b hold the previous total step on entry and this step's total
    on exit. Single shared kernel for apply_update and train.
    """
    for i in range(len(weights)):
        step_w = alpha * np.outer(deltas[i], activations[i])
        step_w += beta * prev_w[i]
        step_b = alpha * deltas[i] + beta * prev_b[i]
        weights[i] += step_w
        biases[i] += step_b
        prev_w[i] = step_w
        prev_b[i] = step_b


def apply_update(
    net: Network,
    deltas: list[np.ndarray],
    trace: ForwardTrace,
    config: TrainConfig,
    momentum_state: MomentumState,
) -> tuple[Network, MomentumState]:
    """One weight/bias update with momentum; returns fresh net and state.

    Each weight moves by learning_rate * delta * upstream activation, plus
    momentum times the previous total step; biases likewise without the
    activation factor.
    """
    for i, d in enumerate(deltas):
        if d.shape != (net.layer_sizes[i + 1],):
            raise DimensionError(f"delta {i} has shape {d.shape}, expected ({net.layer_sizes[i + 1]},)")
        if momentum_state.weight_steps[i].shape != net.weights[i].shape:
            raise DimensionError("momentum state does not match network shape")
    out = net.copy()
    state = momentum_state.copy()
    _step_in_place(
        out.weights, out.biases, deltas, trace.activations,
        config.learning_rate, config.momentum, state.weight_steps, state.bias_steps,
    )
    return out, state


def train(net: Network, dataset, config: TrainConfig) -> tuple[Network, list[float]]:
    """Run per-pattern (online) updates over the dataset for config.epochs epochs.

    dataset is a sequence of (input, target) pairs, or a pair of 2-D arrays
    (inputs, targets) with one row per pattern. Pattern order is reshuffled
    each epoch with the seeded generator when config.shuffle is set. Returns
    the trained network and the per-epoch mean pattern loss.
    """
    if isinstance(dataset, tuple) and len(dataset) == 2 and np.asarray(dataset[0]).ndim == 2:
        inputs = np.asarray(dataset[0], dtype=float)
        targets = np.asarray(dataset[1], dtype=float)
    else:
        pairs = list(dataset)
        if not pairs:
            raise ValueError("training dataset is empty")
        inputs = np.asarray([p[0] for p in pairs], dtype=float)
        targets = np.asarray([p[1] for p in pairs], dtype=float)
    if inputs.shape[0] == 0:
        raise ValueError("training dataset is empty")
    if inputs.shape[1] != net.input_size:
        raise DimensionError(f"pattern width {inputs.shape[1]} != input layer size {net.input_size}")
    if targets.shape != (inputs.shape[0], net.output_size):
        raise DimensionError(f"target shape {targets.shape} does not match ({inputs.shape[0]}, {net.output_size})")

    out = net.copy()
    weights, biases = out.weights, out.biases
    prev_w = [np.zeros_like(w) for w in weights]
    prev_b = [np.zeros_like(b) for b in biases]
    rng = np.random.default_rng(config.rng_seed)
    alpha, beta = config.learning_rate, config.momentum
    n = inputs.shape[0]
    n_layers = len(weights)
    history: list[float] = []

    for _ in range(config.epochs):
        order = rng.permutation(n) if config.shuffle else range(n)
        epoch_loss = 0.0
        for idx in order:
            x = inputs[idx]
            t = targets[idx]
            # forward
            ys = [x]
            y = x
            for w, b in zip(weights, biases):
                y = sigmoid(w @ y + b)
                ys.append(y)
            diff = t - y
            epoch_loss += 0.5 * float(diff @ diff)
            # backward
            deltas = [np.empty(0)] * n_layers
            deltas[-1] = diff * y * (1.0 - y)
            for i in range(n_layers - 2, -1, -1):
                yi = ys[i + 1]
                deltas[i] = (weights[i + 1].T @ deltas[i + 1]) * yi * (1.0 - yi)
            _step_in_place(weights, biases, deltas, ys, alpha, beta, prev_w, prev_b)
        mean_loss = epoch_loss / n
        history.append(mean_loss)
        if not np.isfinite(mean_loss):
            break
        if config.stop_loss is not None and mean_loss < config.stop_loss:
            break

    out.trained_epochs = net.trained_epochs + len(history)
    out.alpha = alpha
    out.beta = beta
    return out, history


def analytic_gradient(net: Network, x, target) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """dE/dW and dE/db for one pattern, from the backprop deltas."""
    trace = forward(net, x)
    deltas = backprop_deltas(net, trace, target)
    grad_w = [-np.outer(d, trace.activations[i]) for i, d in enumerate(deltas)]
    grad_b = [-d for d in deltas]
    return grad_w, grad_b


def grad_check(net: Network, x, target, h: float = 1e-5) -> float:
    """Max relative disagreement between analytic and central-difference gradients.

    Every weight and bias is perturbed by +-h. The per-parameter relative error
    uses a denominator floor so that near-zero gradients are compared on an
    absolute scale (floor chosen so an absolute gap of 1e-8 reads as 1e-4).
    """
    if h <= 0:
        raise ValueError("h must be positive")
    x = np.asarray(x, dtype=float)
    target = np.asarray(target, dtype=float)
    grad_w, grad_b = analytic_gradient(net, x, target)
    probe = net.copy()
    worst = 0.0

    def numeric(arr, idx):
        orig = arr[idx]
        arr[idx] = orig + h
        e_plus = loss(forward(probe, x).output, target)
        arr[idx] = orig - h
        e_minus = loss(forward(probe, x).output, target)
        arr[idx] = orig
        return (e_plus - e_minus) / (2.0 * h)

    floor = 1e-4
    for li in range(len(probe.weights)):
        for idx in np.ndindex(probe.weights[li].shape):
            num = numeric(probe.weights[li], idx)
            ana = grad_w[li][idx]
            worst = max(worst, abs(ana - num) / max(abs(ana), abs(num), floor))
        for (k,) in np.ndindex(probe.biases[li].shape):
            num = numeric(probe.biases[li], (k,))
            ana = grad_b[li][k]
            worst = max(worst, abs(ana - num) / max(abs(ana), abs(num), floor))
    return worst
