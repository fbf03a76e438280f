"""Exploration-weight schedules controlling kappa across episodes.

The schedule clock ticks once per training episode.  Schedules answer
two questions each episode: what kappa to act with, and whether model
learning is frozen.  The target-stop variant additionally consumes the
returns of interleaved pure-exploitation evaluation episodes and latches
exploration off permanently once the target is met.
"""

from __future__ import annotations

import numpy as np


def target_check(eval_returns, target: float, n_consecutive: int) -> bool:
    """True iff the most recent n_consecutive returns all exceed target."""
    if n_consecutive < 1:
        raise ValueError("n_consecutive must be >= 1")
    tail = list(eval_returns)[-n_consecutive:]
    if len(tail) < n_consecutive:
        return False
    return all(r > target for r in tail)


class ConstantKappa:
    wants_eval = False

    def __init__(self, kappa0: float):
        self.kappa0 = float(kappa0)

    def kappa_at(self, episode: int) -> float:
        return self.kappa0

    def frozen_at(self, episode: int) -> bool:
        return False


class DecayKappa:
    """kappa(t) = 1 / (1 + c t) with t counted in episodes."""

    wants_eval = False

    def __init__(self, c: float):
        self.c = float(c)

    def kappa_at(self, episode: int) -> float:
        return 1.0 / (1.0 + self.c * episode)

    def frozen_at(self, episode: int) -> bool:
        return False


class BudgetStop:
    """kappa0 for the first ``budget`` episodes, then 0 with all learning
    (tables, posteriors, and visit counts) frozen."""

    wants_eval = False

    def __init__(self, kappa0: float, budget: int):
        self.kappa0 = float(kappa0)
        self.budget = int(budget)

    def kappa_at(self, episode: int) -> float:
        return self.kappa0 if episode < self.budget else 0.0

    def frozen_at(self, episode: int) -> bool:
        return episode >= self.budget


class StopResume:
    """Exploration and learning pause during [stop_at, resume_at)."""

    wants_eval = False

    def __init__(self, kappa0: float, stop_at: int, resume_at: int):
        if resume_at < stop_at:
            raise ValueError("resume_at must be >= stop_at")
        self.kappa0 = float(kappa0)
        self.stop_at = int(stop_at)
        self.resume_at = int(resume_at)

    def _stopped(self, episode: int) -> bool:
        return self.stop_at <= episode < self.resume_at

    def kappa_at(self, episode: int) -> float:
        return 0.0 if self._stopped(episode) else self.kappa0

    def frozen_at(self, episode: int) -> bool:
        return self._stopped(episode)


class TargetStop:
    """Latch kappa to 0 once n_eval consecutive evaluation returns beat
    the target.

    After every training episode the run loop scores the greedy policy
    with n_eval pure-exploitation episodes and feeds the returns back
    through ``note_eval``.  Latching is permanent; learning continues
    (only exploration stops, so the policy keeps refining on clean
    rewards).
    """

    wants_eval = True

    def __init__(self, kappa0: float, target: float = 0.1,
                 n_eval: int = 5):
        self.kappa0 = float(kappa0)
        self.target = float(target)
        self.n_eval = int(n_eval)
        self.latched = False
        self.latched_at = None
        self._history = []

    def kappa_at(self, episode: int) -> float:
        return 0.0 if self.latched else self.kappa0

    def frozen_at(self, episode: int) -> bool:
        return False

    def note_eval(self, returns, episode: int) -> None:
        if self.latched:
            return
        self._history.extend(float(r) for r in np.atleast_1d(returns))
        if target_check(self._history, self.target, self.n_eval):
            self.latched = True
            self.latched_at = int(episode)


_VARIANTS = {
    "constant": ConstantKappa,
    "decay": DecayKappa,
    "budget_stop": BudgetStop,
    "stop_resume": StopResume,
    "target_stop": TargetStop,
}


def make_schedule(variant: str, **params):
    try:
        cls = _VARIANTS[variant]
    except KeyError:
        raise ValueError(
            f"unknown schedule variant {variant!r}; known: "
            f"{', '.join(sorted(_VARIANTS))}") from None
    return cls(**params)
