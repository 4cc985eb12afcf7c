"""Dense feedforward networks in float64 numpy with hand-written backprop."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ACTIVATIONS = ("relu", "identity")


class ShapeError(ValueError):
    pass


@dataclass
class Layer:
    W: np.ndarray  # (fan_out, fan_in)
    b: np.ndarray  # (fan_out,)
    activation: str


class GradientSet(list):
    """List of (dW, db) pairs, one per layer."""

    def scaled(self, c: float) -> GradientSet:
        return GradientSet((c * dW, c * db) for dW, db in self)


class DenseNet:
    def __init__(self, layers: list[Layer]):
        for prev, nxt in zip(layers, layers[1:]):
            if prev.W.shape[0] != nxt.W.shape[1]:
                raise ShapeError("adjacent layer widths do not chain")
        for layer in layers:
            if layer.activation not in ACTIVATIONS:
                raise ValueError(f"unknown activation {layer.activation!r}")
        self.layers = layers

    @classmethod
    def build(cls, widths: list[int], rng: np.random.Generator) -> DenseNet:
        """ReLU hidden layers, identity output; He-uniform weights, zero biases."""
        layers = []
        for i, (fan_in, fan_out) in enumerate(zip(widths, widths[1:])):
            limit = np.sqrt(6.0 / fan_in)
            W = rng.uniform(-limit, limit, size=(fan_out, fan_in))
            act = "identity" if i == len(widths) - 2 else "relu"
            layers.append(Layer(W, np.zeros(fan_out), act))
        return cls(layers)

    @property
    def input_width(self) -> int:
        return self.layers[0].W.shape[1]

    @property
    def output_width(self) -> int:
        return self.layers[-1].W.shape[0]

    def copy(self) -> DenseNet:
        return DenseNet([Layer(l.W.copy(), l.b.copy(), l.activation) for l in self.layers])

    def parameters(self) -> list[np.ndarray]:
        return [p for l in self.layers for p in (l.W, l.b)]

    def _forward_cache(self, x: np.ndarray):
        # x is (batch, input_width); returns per-layer inputs and pre-activations
        inputs, pre = [], []
        a = x
        for layer in self.layers:
            inputs.append(a)
            z = a @ layer.W.T + layer.b
            pre.append(z)
            a = np.maximum(z, 0.0) if layer.activation == "relu" else z
        return a, inputs, pre

    def forward(self, x) -> np.ndarray:
        """Accepts one input vector or a (batch, width) matrix."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.input_width:
            raise ShapeError(f"input width {x.shape[-1]} != {self.input_width}")
        single = x.ndim == 1
        out, _, _ = self._forward_cache(x[None, :] if single else x)
        return out[0] if single else out

    def backward_mse(self, x, target: float, action_index: int) -> GradientSet:
        """Gradient of (target - out[action_index])**2 for a single input."""
        if not 0 <= action_index < self.output_width:
            raise IndexError(f"action_index {action_index} out of range")
        x = np.asarray(x, dtype=np.float64)
        return self.batch_gradient(x[None, :], np.array([target], dtype=np.float64),
                                   np.array([action_index]))[0]

    def batch_gradient(self, X, targets, actions) -> tuple[GradientSet, np.ndarray]:
        """Mean over the batch of (target_i - out_i[a_i])**2 gradients.

        Returns the gradients and the per-item TD errors (target - prediction).
        """
        X = np.asarray(X, dtype=np.float64)
        if X.shape[1] != self.input_width:
            raise ShapeError(f"input width {X.shape[1]} != {self.input_width}")
        actions = np.asarray(actions, dtype=np.int64)
        if actions.min() < 0 or actions.max() >= self.output_width:
            raise IndexError("action index out of range")
        n = X.shape[0]
        out, inputs, pre = self._forward_cache(X)
        rows = np.arange(n)
        td = np.asarray(targets, dtype=np.float64) - out[rows, actions]

        delta = np.zeros_like(out)
        delta[rows, actions] = -2.0 * td / n
        grads = []
        for layer, a_in, z in zip(reversed(self.layers), reversed(inputs), reversed(pre)):
            if layer.activation == "relu":
                delta = delta * (z > 0)
            grads.append((delta.T @ a_in, delta.sum(axis=0)))
            delta = delta @ layer.W
        grads.reverse()
        return GradientSet(grads), td

    def sgd_step(self, grads: GradientSet, lr: float) -> DenseNet:
        if lr < 0:
            raise ValueError("lr must be non-negative")
        for layer, (dW, db) in zip(self.layers, grads):
            layer.W -= lr * dW
            layer.b -= lr * db
        return self

    def soft_update(self, online: DenseNet, tau: float) -> DenseNet:
        """Blend online parameters into this (target) net: theta' <- tau*theta + (1-tau)*theta'."""
        if not 0.0 <= tau <= 1.0:
            raise ValueError("tau must lie in [0, 1]")
        if [p.shape for p in self.parameters()] != [p.shape for p in online.parameters()]:
            raise ShapeError("target and online nets are not shape-congruent")
        for mine, theirs in zip(self.parameters(), online.parameters()):
            mine *= 1.0 - tau
            mine += tau * theirs
        return self

    def state_arrays(self, prefix: str) -> dict[str, np.ndarray]:
        arrays = {}
        for i, layer in enumerate(self.layers):
            arrays[f"{prefix}.{i}.W"] = layer.W
            arrays[f"{prefix}.{i}.b"] = layer.b
            arrays[f"{prefix}.{i}.act"] = np.array(layer.activation)
        return arrays

    @classmethod
    def from_arrays(cls, arrays, prefix: str) -> DenseNet:
        layers = []
        i = 0
        while f"{prefix}.{i}.W" in arrays:
            layers.append(Layer(np.array(arrays[f"{prefix}.{i}.W"], dtype=np.float64),
                                np.array(arrays[f"{prefix}.{i}.b"], dtype=np.float64),
                                str(arrays[f"{prefix}.{i}.act"])))
            i += 1
        return cls(layers)


def forward(net: DenseNet, x) -> np.ndarray:
    return net.forward(x)


def backward_mse(net: DenseNet, x, target: float, action_index: int) -> GradientSet:
    return net.backward_mse(x, target, action_index)


def sgd_step(net: DenseNet, grads: GradientSet, lr: float) -> DenseNet:
    return net.sgd_step(grads, lr)


def soft_update(target_net: DenseNet, online_net: DenseNet, tau: float) -> DenseNet:
    return target_net.soft_update(online_net, tau)
