"""Environment protocol, episode runner, and RNG discipline.

Environments here are pure transition samplers: ``step`` maps (raw state,
action, rng) to a StepOutcome and keeps no episode bookkeeping.  The
runner owns the step counter, applies the step cap, and assembles
EpisodeLogs.  Raw states stay in physical units inside the environment;
``observe`` converts them to what agents see (min-max normalized vectors
for continuous domains, plain integer indices for tabular ones).

Each run derives three independent random streams (environment, agent,
evaluation) from a (base_seed, run_seed) pair, so agent stochasticity
never perturbs environment draws across configurations and interleaved
evaluations never perturb training.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class EnvSpec:
    """Static description of an environment's spaces and episode cap."""

    state_dim: int
    max_episode_steps: int
    n_states: int | None = None       # tabular state count, if discrete
    n_actions: int | None = None      # discrete action count
    action_low: np.ndarray | None = None   # box action bounds otherwise
    action_high: np.ndarray | None = None

    @property
    def discrete_actions(self) -> bool:
        return self.n_actions is not None

    def validate_action(self, action) -> None:
        if self.n_actions is not None:
            a = int(action)
            if not 0 <= a < self.n_actions:
                raise ValueError(f"action {a} outside [0, {self.n_actions})")
            return
        a = np.atleast_1d(np.asarray(action, dtype=float))
        if a.shape[0] != self.action_low.shape[0]:
            raise ValueError("action dimension mismatch")
        if np.any(a < self.action_low - 1e-12) or np.any(
                a > self.action_high + 1e-12):
            raise ValueError(f"action {a} outside box")


@dataclass(frozen=True)
class StepOutcome:
    """Raw result of one environment transition."""

    next_state: object
    reward: float
    terminal: bool       # absorbing state reached (goal or penalty)
    goal: bool           # terminal specifically because of the goal


@dataclass(frozen=True)
class Transition:
    """One agent-visible step.

    ``terminal`` marks end of episode for any reason; ``truncated`` marks
    the step-cap case, where the episode ends but the underlying state is
    not absorbing, so value bootstrapping must not be zeroed.  Only
    ``absorbing`` transitions zero the bootstrap.
    """

    state: object
    action: object
    reward: float
    next_state: object
    terminal: bool
    truncated: bool = False
    goal: bool = False

    @property
    def absorbing(self) -> bool:
        return self.terminal and not self.truncated


@dataclass
class EpisodeLog:
    transitions: list = field(default_factory=list)
    return_undiscounted: float = 0.0
    steps: int = 0
    reached_goal: bool = False
    kappa_used: list = field(default_factory=list)


def seed_streams(base_seed: int, run_seed: int):
    """Derive (env, agent, eval) generators for one run.

    The same (base_seed, run_seed) pair always yields the same three
    streams; distinct run_seeds yield statistically independent ones.
    """
    root = np.random.SeedSequence([int(base_seed), int(run_seed)])
    env_ss, agent_ss, eval_ss = root.spawn(3)
    return (np.random.default_rng(env_ss), np.random.default_rng(agent_ss),
            np.random.default_rng(eval_ss))


def run_episode(env, agent, env_rng, agent_rng, *, kappa: float,
                learn: bool = True, max_steps: int | None = None,
                collect_transitions: bool = True) -> EpisodeLog:
    """Run one episode to termination or the step cap.

    In learning mode the agent sees every transition through ``observe``
    and gets an ``end_episode`` hook; otherwise the agent is only asked
    to act and its internal state must come out bitwise untouched.
    """
    cap = env.spec.max_episode_steps if max_steps is None else max_steps
    log = EpisodeLog()
    raw = env.reset(env_rng)
    obs = env.observe(raw)
    for step_index in range(cap):
        action = agent.act(obs, kappa, agent_rng)
        outcome = env.step(raw, action, env_rng)
        obs_next = env.observe(outcome.next_state)
        truncated = (not outcome.terminal) and step_index == cap - 1
        tr = Transition(state=obs, action=action, reward=outcome.reward,
                        next_state=obs_next,
                        terminal=outcome.terminal or truncated,
                        truncated=truncated, goal=outcome.goal)
        if learn:
            agent.observe(tr, kappa, agent_rng)
        log.return_undiscounted += tr.reward
        log.steps += 1
        log.kappa_used.append(kappa)
        if collect_transitions:
            log.transitions.append(tr)
        if outcome.goal:
            log.reached_goal = True
        if tr.terminal:
            break
        raw = outcome.next_state
        obs = obs_next
    if learn:
        agent.end_episode(kappa, agent_rng)
    return log


def eval_pure_exploit(env, agent, n_episodes: int, eval_rng,
                      max_steps: int | None = None) -> np.ndarray:
    """Score the current policy with exploration off and models frozen.

    Runs n_episodes greedy-in-Q episodes (kappa forced to 0, no learning)
    and returns their undiscounted returns.  Draws only from the eval
    stream, so interleaving these does not disturb training streams.
    """
    returns = np.empty(n_episodes)
    for i in range(n_episodes):
        log = run_episode(env, agent, eval_rng, eval_rng, kappa=0.0,
                          learn=False, max_steps=max_steps,
                          collect_transitions=False)
        returns[i] = log.return_undiscounted
    return returns
