"""Episodic controller-design objective: tanh policy network on a stochastic
point-mass navigation task.

One fitness evaluation is one Monte Carlo episode: the network reads
(position, velocity, target offset), outputs a bounded acceleration, and the
fitness is the negated discounted return of the episode. Random start
positions and per-step velocity perturbations make the fitness stochastic;
a controller that parks on the target has both low fitness and low fitness
variance, while a bad controller far from the target sees large, noisy
values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Objective, RngStream
from .errors import ContractViolationError

OBSERVATION_SIZE = 6  # position (2), velocity (2), target offset (2)
ACTION_SIZE = 2


def param_count(layer_sizes) -> int:
    """Total number of weights and biases of a fully connected network."""
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2:
        raise ContractViolationError("need at least an input and an output layer")
    if any(s <= 0 for s in sizes):
        raise ContractViolationError("layer sizes must be positive")
    return sum(nin * nout + nout for nin, nout in zip(sizes, sizes[1:]))


@dataclass(frozen=True)
class PolicyNetwork:
    """Flat-parameter tanh network; per layer a row-major (out x in) weight
    matrix followed by the bias vector."""

    layer_sizes: tuple[int, ...]
    theta: np.ndarray

    def __post_init__(self):
        expected = param_count(self.layer_sizes)
        if self.theta.shape != (expected,):
            raise ContractViolationError(
                f"theta must have length {expected} for layers {self.layer_sizes}, "
                f"got {self.theta.shape}"
            )


def policy_forward(net: PolicyNetwork, observation) -> np.ndarray:
    """Feedforward pass with tanh at every layer; outputs lie in (-1, 1)."""
    h = np.asarray(observation, dtype=np.float64)
    sizes = net.layer_sizes
    if h.shape != (sizes[0],):
        raise ContractViolationError(f"observation must have length {sizes[0]}")
    off = 0
    for nin, nout in zip(sizes, sizes[1:]):
        w = net.theta[off : off + nin * nout].reshape(nout, nin)
        off += nin * nout
        b = net.theta[off : off + nout]
        off += nout
        h = np.tanh(w @ h + b)
    return h


@dataclass(frozen=True)
class PointMassTask:
    """Navigate a noisy point mass to a fixed target.

    Per step: velocity += action_scale * action + noise, position += velocity,
    reward = -||position - target||. ``fixed_start`` pins the initial
    (position, velocity) for deterministic tests; otherwise the start
    position is drawn uniformly from [-1, 1]^2 with zero velocity.
    """

    horizon: int = 100
    gamma: float = 1.0
    transition_noise: float = 0.05
    action_scale: float = 0.1
    target: tuple[float, float] = (0.0, 0.0)
    fixed_start: tuple[tuple[float, float], tuple[float, float]] | None = None

    def __post_init__(self):
        if self.horizon < 1:
            raise ContractViolationError("horizon must be >= 1")
        if not (0.0 < self.gamma <= 1.0):
            raise ContractViolationError("gamma must lie in (0, 1]")
        if self.transition_noise < 0:
            raise ContractViolationError("transition noise must be non-negative")


def rollout(task: PointMassTask, net: PolicyNetwork, rng: RngStream) -> float:
    """Simulate one episode; returns the negated discounted return.

    Non-finite parameters short-circuit to +inf so a blown-up candidate is
    ranked strictly worst instead of contaminating downstream arithmetic.
    """
    sizes = net.layer_sizes
    if sizes[0] != OBSERVATION_SIZE or sizes[-1] != ACTION_SIZE:
        raise ContractViolationError(
            f"policy must map {OBSERVATION_SIZE} observations to {ACTION_SIZE} actions, "
            f"got layers {sizes}"
        )
    theta = np.ascontiguousarray(net.theta, dtype=np.float64)
    if not np.isfinite(theta).all():
        return float("inf")
    if task.fixed_start is not None:
        pos0 = np.asarray(task.fixed_start[0], dtype=np.float64)
        vel0 = np.asarray(task.fixed_start[1], dtype=np.float64)
    else:
        pos0 = rng.uniform(-1.0, 1.0, 2)
        vel0 = np.zeros(2)
    if task.transition_noise > 0:
        noise = task.transition_noise * rng.standard_normal((task.horizon, 2))
    else:
        noise = np.zeros((task.horizon, 2))
    return float(
        kernels.rollout(
            theta,
            np.asarray(sizes, dtype=np.int64),
            pos0,
            vel0,
            np.asarray(task.target, dtype=np.float64),
            noise,
            task.gamma,
            task.action_scale,
            task.horizon,
        )
    )


class PointMassObjective(Objective):
    """Controller-design fitness: one Monte Carlo episode per evaluation."""

    def __init__(self, task: PointMassTask | None = None,
                 hidden: tuple[int, ...] = (30, 30, 10)):
        self.task = task if task is not None else PointMassTask()
        self.layer_sizes = (OBSERVATION_SIZE, *hidden, ACTION_SIZE)
        self.dim = param_count(self.layer_sizes)
        self.name = "pointmass"

    def eval(self, x: np.ndarray, rng: RngStream) -> float:
        net = PolicyNetwork(self.layer_sizes, np.asarray(x, dtype=np.float64))
        return rollout(self.task, net, rng)
