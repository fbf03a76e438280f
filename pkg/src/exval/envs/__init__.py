"""Benchmark environments and the name-based construction registry."""

from __future__ import annotations

from .chain import ChainEnv, expected_steps_to_goal_always_right
from .control import MountainCarEnv, PendulumEnv
from .gridworld import CliffEnv
from .taxi import TaxiEnv

_REGISTRY = {
    "chain": ChainEnv,
    "cliff": CliffEnv,
    "taxi": TaxiEnv,
    "mountaincar": MountainCarEnv,
    "pendulum": PendulumEnv,
}


def env_names():
    return sorted(_REGISTRY)


def make_env(name: str, **params):
    """Construct an environment by registry name with keyword parameters."""
    try:
        cls = _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown environment {name!r}; known: {', '.join(env_names())}"
        ) from None
    return cls(**params)


__all__ = [
    "ChainEnv", "CliffEnv", "TaxiEnv", "MountainCarEnv", "PendulumEnv",
    "make_env", "env_names", "expected_steps_to_goal_always_right",
]
