"""Value-learning agent with separate exploitation and exploration heads
over random Fourier features.

Two linear regression heads share one Bayesian posterior covariance:
Q is trained on environment rewards, U on exploration rewards derived
from the posterior's own predictive variance,

    r_e(s') = mean_a V[Q(s', a)] - V_max,

which is 0 where the model knows nothing and approaches -V_max where it
is saturated, so U accumulates "how much is left to learn downstream".
Actions maximize Q + kappa * U over a candidate set (all actions when
discrete, uniform box samples plus endpoints when continuous).

Per step the posterior absorbs the transition through a rank-1 update
with bootstrapped targets; at each episode end the weight means are
re-solved by fixed-point sweeps over the whole transition store, with
exploration rewards recomputed under the current covariance first, so
stale per-step targets get corrected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bayes import (VARIANCE_ADDITIVE, VARIANCE_SCALED, BayesianLinearModel)
from .core import EnvSpec, Transition
from .features import QUASI_RANDOM, JointRffMap, make_joint_map


def pair_value_matrix(Cs, Ss, Ca, Sa, m, scale):
    """Linear-model values for every (state, candidate action) pair.

    With phi(s, a) = scale * [cos(ps + pa), sin(ps + pa)] built from
    separate state and action projections, the angle-sum identities give
    phi(s, a)^T m from the per-state and per-action cos/sin blocks alone,
    so an (N states) x (K actions) value matrix costs two matrix products
    instead of N*K embeddings.  Cs/Ss are cos/sin of the state
    projections (N x M/2), Ca/Sa of the action projections (K x M/2),
    m a weight vector of length M, scale the embedding's 1/sqrt(M/2).
    """
    n_spectral = Ca.shape[1]
    mc, ms = m[:n_spectral], m[n_spectral:]
    Ac = (Ca * mc + Sa * ms).T * scale
    As = (Ca * ms - Sa * mc).T * scale
    return Cs @ Ac + Ss @ As


def v_max(alpha: float, beta: float, form: str = VARIANCE_SCALED) -> float:
    """Supremum of the predictive variance over unit-norm features.

    The posterior covariance's eigenvalues never exceed 1/alpha, so for
    unit-norm phi the epistemic term phi^T S phi is at most 1/alpha,
    attained everywhere on a fresh posterior.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    if form == VARIANCE_SCALED:
        return 1.0 / (alpha * beta)
    if form == VARIANCE_ADDITIVE:
        return 1.0 / beta + 1.0 / alpha
    raise ValueError(f"unknown variance form: {form!r}")


@dataclass
class EmuqConfig:
    gamma: float = 0.99
    alpha: float = 0.1
    beta: float = 1.0
    kappa: float | None = None          # None selects 1/V_max
    n_features: int = 300
    lengthscale_state: float = 0.3
    lengthscale_action: float = 1.0
    scheme: str = QUASI_RANDOM
    n_action_candidates: int = 100      # K, continuous action search
    n_expectation_samples: int = 64     # K_e, variance average samples
    n_sweep_candidates: int = 20        # policy candidates inside sweeps
    variance_form: str = VARIANCE_SCALED
    sweep_tol: float = 1e-6
    sweep_max_iters: int = 200
    r_e_override: float | None = None   # force a constant r_e (diagnostics)
    symmetrize_every: int = 1000

    @property
    def v_max(self) -> float:
        return v_max(self.alpha, self.beta, self.variance_form)

    def effective_kappa(self) -> float:
        return 1.0 / self.v_max if self.kappa is None else float(self.kappa)


class EmuQ:
    """Exploration-values agent for continuous or discrete action spaces.

    Parameters
    ----------
    env_spec : the environment's EnvSpec (dimensions and action kind).
    config : EmuqConfig.
    rng : generator used once here to seed the frozen feature map.
    """

    def __init__(self, env_spec: EnvSpec, config: EmuqConfig, rng):
        self.spec = env_spec
        self.config = config
        feature_seed = int(rng.integers(2 ** 63))
        if env_spec.discrete_actions:
            self.fmap = make_joint_map(
                env_spec.state_dim, config.lengthscale_state,
                n_features=config.n_features, scheme=config.scheme,
                seed=feature_seed, n_actions=env_spec.n_actions,
                lengthscale_action=config.lengthscale_action)
        else:
            self.fmap = make_joint_map(
                env_spec.state_dim, config.lengthscale_state,
                n_features=config.n_features, scheme=config.scheme,
                seed=feature_seed, action_low=env_spec.action_low,
                action_high=env_spec.action_high,
                lengthscale_action=config.lengthscale_action)
        self.model = BayesianLinearModel(config.n_features, config.alpha,
                                         config.beta, n_heads=2)
        self._phi_rows: list[np.ndarray] = []
        self._rewards: list[float] = []
        self._next_obs: list[np.ndarray] = []
        self._absorbing: list[bool] = []
        self._r_e: list[float] = []
        # Largest reward magnitude seen; floors the Q bootstrap range at
        # unit scale before any reward has arrived.
        self._r_abs_max = 1.0
        self.sweep_history: list[dict] = []
        # Running invariant monitors over every emitted r_e / variance.
        self.re_count = 0
        self.re_min = 0.0
        self.re_max = -np.inf
        self.re_range_violations = 0
        self.var_max_seen = 0.0
        self.var_violations = 0

    # -- feature helpers -------------------------------------------------

    @property
    def v_max(self) -> float:
        return self.config.v_max

    def _as_state(self, obs) -> np.ndarray:
        return np.atleast_1d(np.asarray(obs, dtype=float))

    def _candidate_actions(self, rng) -> np.ndarray:
        """Uniform box samples, endpoints appended for 1-D actions."""
        low, high = self.spec.action_low, self.spec.action_high
        cands = rng.uniform(low, high,
                            size=(self.config.n_action_candidates,
                                  low.shape[0]))
        if low.shape[0] == 1:
            cands = np.vstack([cands, low[None, :], high[None, :]])
        return cands

    def _pair_features(self, obs, actions) -> np.ndarray:
        state = self._as_state(obs)
        states = np.broadcast_to(state, (len(actions), state.shape[0]))
        return self.fmap.embed_pairs(states, actions)

    def predict(self, obs, action) -> tuple[float, float]:
        """(Q, U) posterior means for one state-action pair."""
        if self.spec.discrete_actions:
            phi = self._pair_features(obs, np.array([int(action)]))[0]
        else:
            phi = self._pair_features(
                obs, np.asarray(action, dtype=float).reshape(1, -1))[0]
        q, u = self.model.predict_mean(phi)
        return float(q), float(u)

    # -- acting ----------------------------------------------------------

    def act(self, obs, kappa: float, rng):
        if self.spec.discrete_actions:
            actions = np.arange(self.spec.n_actions)
        else:
            actions = self._candidate_actions(rng)
        phi = self._pair_features(obs, actions)
        means = phi @ self.model.m                    # (K, 2)
        balanced = means[:, 0] + kappa * means[:, 1]
        idx = int(np.argmax(balanced))                # ties: first candidate
        if self.spec.discrete_actions:
            return int(actions[idx])
        return actions[idx].copy()

    # -- exploration reward ----------------------------------------------

    def _variance_candidates(self, rng) -> np.ndarray:
        if self.spec.discrete_actions:
            return np.arange(self.spec.n_actions)
        low, high = self.spec.action_low, self.spec.action_high
        return rng.uniform(low, high,
                           size=(self.config.n_expectation_samples,
                                 low.shape[0]))

    def _re_from_centered(self, centered: np.ndarray) -> float:
        """Map mean centered quadratic form phi^T (S - I/alpha) phi to r_e.

        On a fresh posterior the centered matrix is exactly zero, so the
        result is an exact 0.0; as data accumulates it falls toward
        -V_max.  Clipping guards the bounds against rounding drift.
        """
        c = self.config
        mean_centered = float(np.mean(centered))
        if c.variance_form == VARIANCE_SCALED:
            raw = mean_centered / c.beta
        else:
            raw = mean_centered
        if raw > 1e-9 or raw < -self.v_max - 1e-9:
            self.re_range_violations += 1
        return float(np.clip(raw, -self.v_max, 0.0))

    def exploration_reward(self, obs_next, rng) -> float:
        """Average posterior Q-variance over actions at s', minus V_max."""
        c = self.config
        if c.r_e_override is not None:
            r_e = float(np.clip(c.r_e_override, -self.v_max, 0.0))
            self._note_re(r_e)
            return r_e
        actions = self._variance_candidates(rng)
        phi = self._pair_features(obs_next, actions)
        centered = self.model.centered_quadratic(phi)
        norms = np.einsum("ij,ij->i", phi, phi)
        epistemic = centered + norms / c.alpha        # phi^T S phi rows
        if c.variance_form == VARIANCE_SCALED:
            variances = epistemic / c.beta
        else:
            variances = 1.0 / c.beta + epistemic
        self.var_max_seen = max(self.var_max_seen, float(variances.max()))
        if np.any(variances > self.v_max + 1e-9):
            self.var_violations += 1
        r_e = self._re_from_centered(centered)
        self._note_re(r_e)
        return r_e

    def _note_re(self, r_e: float) -> None:
        self.re_count += 1
        self.re_min = min(self.re_min, r_e)
        self.re_max = max(self.re_max, r_e)

    # -- learning --------------------------------------------------------

    def _boot_bounds(self):
        """Attainable value ranges for the two heads, or None if unbounded.

        A discounted sum of per-step quantities in [lo, hi] lies in
        [lo, hi] / (1 - gamma).  Projecting bootstraps there discards
        only impossible values, and it breaks the runaway feedback that
        bootstrapped regression develops under a weak prior (small
        alpha), where one reward can amplify through S by up to 1/alpha
        per step.
        """
        denom = 1.0 - self.config.gamma
        if denom <= 0.0:
            return None
        q_span = self._r_abs_max / denom
        u_span = self.v_max / denom
        return (-q_span, q_span), (-u_span, 0.0)

    def observe(self, tr: Transition, kappa: float, rng) -> None:
        c = self.config
        self._r_abs_max = max(self._r_abs_max, abs(float(tr.reward)))
        if self.spec.discrete_actions:
            phi = self._pair_features(tr.state,
                                      np.array([int(tr.action)]))[0]
        else:
            phi = self._pair_features(
                tr.state,
                np.asarray(tr.action, dtype=float).reshape(1, -1))[0]
        r_e = self.exploration_reward(tr.next_state, rng)
        if tr.absorbing:
            boot_q = boot_u = 0.0
        else:
            a_next = self.act(tr.next_state, kappa, rng)
            if self.spec.discrete_actions:
                phi_next = self._pair_features(
                    tr.next_state, np.array([int(a_next)]))[0]
            else:
                phi_next = self._pair_features(
                    tr.next_state, a_next.reshape(1, -1))[0]
            boot_q, boot_u = phi_next @ self.model.m
            bounds = self._boot_bounds()
            if bounds is not None:
                (q_lo, q_hi), (u_lo, u_hi) = bounds
                boot_q = float(np.clip(boot_q, q_lo, q_hi))
                boot_u = float(np.clip(boot_u, u_lo, u_hi))
        self.model.observe(phi, [tr.reward + c.gamma * boot_q,
                                 r_e + c.gamma * boot_u])
        if self.model.n_observed % c.symmetrize_every == 0:
            self.model.symmetrize()
        self._phi_rows.append(phi)
        self._rewards.append(float(tr.reward))
        self._next_obs.append(self._as_state(tr.next_state))
        self._absorbing.append(bool(tr.absorbing))
        self._r_e.append(r_e)

    def end_episode(self, kappa: float, rng) -> None:
        if self._phi_rows:
            self._sweep(kappa, rng)

    # -- episode sweep ---------------------------------------------------

    def _sweep_action_set(self, rng) -> np.ndarray:
        if self.spec.discrete_actions:
            return np.arange(self.spec.n_actions)
        low, high = self.spec.action_low, self.spec.action_high
        cands = rng.uniform(low, high, size=(self.config.n_sweep_candidates,
                                             low.shape[0]))
        if low.shape[0] == 1:
            cands = np.vstack([cands, low[None, :], high[None, :]])
        return cands

    def _sweep(self, kappa: float, rng) -> None:
        """Fixed-point re-solve of both weight means over the full store.

        Policy evaluation inside the sweep maximizes Q + kappa U over a
        shared candidate action set; the trigonometric split of the
        feature map lets all (stored state, candidate) values come from
        two matrix products per iteration.
        """
        c = self.config
        self.model.symmetrize()
        Phi = np.vstack(self._phi_rows)
        r = np.asarray(self._rewards)
        absorbing = np.asarray(self._absorbing, dtype=bool)
        next_states = np.vstack(self._next_obs)
        n_spectral = self.fmap.n_spectral
        scale = 1.0 / np.sqrt(n_spectral)

        proj_s = self.fmap.state_projection(next_states)
        Cs, Ss = np.cos(proj_s), np.sin(proj_s)

        actions = self._sweep_action_set(rng)
        proj_a = self.fmap.action_projection(actions)
        Ca, Sa = np.cos(proj_a), np.sin(proj_a)

        def pair_values(m):
            return pair_value_matrix(Cs, Ss, Ca, Sa, m, scale)

        bounds = self._boot_bounds()
        if bounds is None:
            bounds = ((-np.inf, np.inf), (-np.inf, np.inf))
        (q_lo, q_hi), (u_lo, u_hi) = bounds

        def solve_head(targets, m0, t0, values_other, weight_self,
                       weight_other, boot_lo, boot_hi):
            """Iterate m <- beta S Phi^T (targets + gamma boot(m)) with the
            bootstrap taken at the balanced argmax action and projected to
            the head's attainable value range.

            The iteration need not be a contraction; if iterates leave the
            finite range the head falls back to its incremental per-step
            fit (m0, t0) rather than installing diverged values.
            """
            m = m0.copy()
            t = t0.copy()
            with np.errstate(over="ignore", invalid="ignore"):
                for it in range(c.sweep_max_iters):
                    values = pair_values(m)
                    balanced = (weight_self * values
                                + weight_other * values_other)
                    k_star = np.argmax(balanced, axis=1)
                    boot = values[np.arange(values.shape[0]), k_star]
                    boot = np.clip(boot, boot_lo, boot_hi)
                    boot[absorbing] = 0.0
                    t = c.beta * (Phi.T @ (targets + c.gamma * boot))
                    m_new = self.model.S @ t
                    delta = float(np.max(np.abs(m_new - m)))
                    if not np.isfinite(delta):
                        return m0.copy(), t0.copy(), it + 1, False
                    m = m_new
                    if delta < c.sweep_tol:
                        return m, t, it + 1, True
            return m, t, c.sweep_max_iters, False

        m_q0 = self.model.m[:, 0]
        m_u0 = self.model.m[:, 1]

        values_u_fixed = pair_values(m_u0)
        m_q, t_q, iters_q, ok_q = solve_head(r, m_q0, self.model.t[:, 0],
                                             values_u_fixed, 1.0, kappa,
                                             q_lo, q_hi)

        r_e = self._recompute_exploration_rewards(Cs, Ss, absorbing, rng)
        self._r_e = list(r_e)

        values_q_fixed = pair_values(m_q)
        m_u, t_u, iters_u, ok_u = solve_head(r_e, m_u0, self.model.t[:, 1],
                                             values_q_fixed, kappa, 1.0,
                                             u_lo, u_hi)

        self.model.set_targets(np.column_stack([t_q, t_u]))
        self.sweep_history.append({
            "n": len(r), "iters_q": iters_q, "converged_q": ok_q,
            "iters_u": iters_u, "converged_u": ok_u,
        })

    def _recompute_exploration_rewards(self, Cs, Ss, absorbing, rng):
        """Exploration rewards for all stored next states under current S.

        Uses the exact average over the candidate action set: with
        second-moment matrices of the candidate cos/sin projections, the
        action average of phi^T C phi collapses into one quadratic form
        per state (brute-force-checked in the test suite).
        """
        c = self.config
        if c.r_e_override is not None:
            value = float(np.clip(c.r_e_override, -self.v_max, 0.0))
            return np.full(Cs.shape[0], value)
        n_spectral = self.fmap.n_spectral
        actions = self._variance_candidates(rng)
        proj_a = self.fmap.action_projection(actions)
        Ca, Sa = np.cos(proj_a), np.sin(proj_a)
        k = actions.shape[0]
        g_cc = Ca.T @ Ca / k
        g_cs = Ca.T @ Sa / k
        g_sc = g_cs.T
        g_ss = Sa.T @ Sa / k

        C = self.model.S - np.eye(self.model.n_features) / c.alpha
        c_cc = C[:n_spectral, :n_spectral]
        c_cs = C[:n_spectral, n_spectral:]
        c_sc = C[n_spectral:, :n_spectral]
        c_ss = C[n_spectral:, n_spectral:]

        e_uu = c_cc * g_cc + c_cs * g_cs + c_sc * g_sc + c_ss * g_ss
        e_uv = -c_cc * g_cs + c_cs * g_cc - c_sc * g_ss + c_ss * g_sc
        e_vu = -c_cc * g_sc - c_cs * g_ss + c_sc * g_cc + c_ss * g_cs
        e_vv = c_cc * g_ss - c_cs * g_sc - c_sc * g_cs + c_ss * g_cc
        blocks = np.block([[e_uu, e_uv], [e_vu, e_vv]])

        F = np.concatenate([Cs, Ss], axis=1)
        mean_centered = np.einsum("ij,ij->i", F @ blocks, F) / n_spectral
        if c.variance_form == VARIANCE_SCALED:
            raw = mean_centered / c.beta
        else:
            raw = mean_centered
        return np.clip(raw, -self.v_max, 0.0)

    # -- checkpointing ---------------------------------------------------

    def state_arrays(self) -> dict:
        """Posterior and feature-map arrays for checkpointing."""
        return {
            "S": self.model.S, "m": self.model.m, "t": self.model.t,
            "n_observed": np.asarray(self.model.n_observed),
            "frequencies": self.fmap.rff.frequencies,
            "lengthscales": self.fmap.rff.lengthscales,
            "feature_scheme": np.asarray(self.fmap.rff.scheme),
            "feature_seed": np.asarray(self.fmap.rff.seed),
        }

    def load_state_arrays(self, arrays) -> None:
        """Restore posterior and feature map exactly as checkpointed."""
        from .features import RffMap

        freqs = np.array(arrays["frequencies"])
        freqs.setflags(write=False)
        rff = RffMap(frequencies=freqs,
                     lengthscales=np.array(arrays["lengthscales"]),
                     scheme=str(arrays["feature_scheme"]),
                     seed=int(arrays["feature_seed"]))
        self.fmap = JointRffMap(
            rff=rff, state_dim=self.fmap.state_dim,
            action_dim=self.fmap.action_dim,
            action_low=self.fmap.action_low,
            action_high=self.fmap.action_high,
            n_actions=self.fmap.n_actions)
        self.model.S = np.array(arrays["S"])
        self.model.t = np.array(arrays["t"])
        self.model.m = np.array(arrays["m"])
        self.model.n_observed = int(arrays["n_observed"])
