"""Feature embeddings for linear value models.

Two families are provided:

* Random Fourier features: a randomized cos/sin embedding whose inner
  products approximate an anisotropic RBF kernel.  Frequencies are drawn
  from the kernel's spectral density, either by Monte-Carlo sampling or
  from a scrambled Halton sequence pushed through the inverse normal CDF
  (lower approximation error at equal feature count).
* Fourier basis features: the deterministic cos(pi * s^T C) value-function
  basis of order n.  Not a kernel approximation; kept as a comparison
  baseline.  Feature count grows as (n+1)^d.

All embeddings are pure functions of their inputs and the (immutable)
feature map, so maps can be shared freely.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm, qmc

MONTE_CARLO = "monte-carlo"
QUASI_RANDOM = "quasi-random"


def kernel_exact(x, x2, lengthscales) -> float:
    """Anisotropic RBF kernel exp(-1/2 * sum_i ((x_i - x2_i)/l_i)^2).

    Reference implementation used as a test oracle for the feature
    approximations; not on any hot path.
    """
    x = np.asarray(x, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x.shape != x2.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {x2.shape}")
    ls = np.broadcast_to(np.asarray(lengthscales, dtype=float), x.shape)
    return float(np.exp(-0.5 * np.sum(((x - x2) / ls) ** 2)))


@dataclass(frozen=True)
class RffMap:
    """Frozen random-Fourier-feature map.

    ``frequencies`` has shape (input_dim, n_spectral); each output feature
    vector is [cos(x^T w_1) .. cos(x^T w_m), sin(x^T w_1) .. sin(x^T w_m)]
    scaled by 1/sqrt(n_spectral), so every embedded vector has unit
    Euclidean norm and <phi(x), phi(x')> estimates the RBF kernel value.
    """

    frequencies: np.ndarray
    lengthscales: np.ndarray
    scheme: str
    seed: int

    @property
    def input_dim(self) -> int:
        return self.frequencies.shape[0]

    @property
    def n_spectral(self) -> int:
        return self.frequencies.shape[1]

    @property
    def n_features(self) -> int:
        return 2 * self.frequencies.shape[1]


def sample_rff(lengthscales, n_spectral: int, scheme: str = MONTE_CARLO,
               seed: int = 0) -> RffMap:
    """Draw a frequency matrix for the anisotropic RBF kernel.

    The spectral density of exp(-1/2 ||tau/l||^2) is a zero-mean Gaussian
    with per-dimension standard deviation 1/l_i.  The quasi-random scheme
    replaces i.i.d. normal draws with a scrambled Halton sequence (distinct
    prime base per dimension) mapped through the inverse normal CDF, which
    reduces kernel approximation error at equal n_spectral.

    An output feature vector has length 2 * n_spectral (cos block then sin
    block), so ask for n_spectral = M/2 to get M features.
    """
    ls = np.atleast_1d(np.asarray(lengthscales, dtype=float))
    if np.any(ls <= 0):
        raise ValueError("lengthscales must be positive")
    if n_spectral < 1:
        raise ValueError("n_spectral must be >= 1")
    d = ls.shape[0]
    if scheme == MONTE_CARLO:
        rng = np.random.default_rng(seed)
        unit = rng.standard_normal((d, n_spectral))
    elif scheme == QUASI_RANDOM:
        halton = qmc.Halton(d=d, scramble=True, seed=seed)
        u = halton.random(n_spectral)      # (n_spectral, d) in (0, 1)
        unit = norm.ppf(u).T
    else:
        raise ValueError(f"unknown sampling scheme: {scheme!r}")
    freqs = unit / ls[:, None]
    freqs.setflags(write=False)
    return RffMap(frequencies=freqs, lengthscales=ls, scheme=scheme, seed=seed)


def rff_embed(x, fmap: RffMap) -> np.ndarray:
    """Embed a single input (or a batch, rows-as-inputs) with an RffMap."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != fmap.input_dim:
        raise ValueError(
            f"input dim {x.shape[-1]} != map dim {fmap.input_dim}")
    proj = x @ fmap.frequencies
    scale = 1.0 / np.sqrt(fmap.n_spectral)
    return np.concatenate([np.cos(proj), np.sin(proj)], axis=-1) * scale


@dataclass(frozen=True)
class JointRffMap:
    """RFF map over concatenated (state, action) inputs.

    States arrive normalized to [0, 1]^state_dim.  Continuous actions are
    min-max normalized to [0, 1]^action_dim from the given box before
    embedding; discrete actions are one-hot encoded.  State dimensions use
    the state lengthscale, action (or one-hot) dimensions the action
    lengthscale.

    The frequency matrix splits into a state block and an action block, so
    projections of states and actions can be computed separately and
    combined per pair; the batched policy/variance helpers rely on this.
    """

    rff: RffMap
    state_dim: int
    action_dim: int
    action_low: np.ndarray | None = None    # None for one-hot discrete
    action_high: np.ndarray | None = None
    n_actions: int | None = None            # set for discrete actions
    _eye: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_features(self) -> int:
        return self.rff.n_features

    @property
    def n_spectral(self) -> int:
        return self.rff.n_spectral

    @property
    def discrete(self) -> bool:
        return self.n_actions is not None

    def encode_actions(self, actions) -> np.ndarray:
        """Map raw actions to the normalized/one-hot embedding input block."""
        if self.discrete:
            idx = np.atleast_1d(np.asarray(actions, dtype=int))
            return np.eye(self.n_actions)[idx]
        a = np.atleast_2d(np.asarray(actions, dtype=float))
        return (a - self.action_low) / (self.action_high - self.action_low)

    def state_projection(self, states) -> np.ndarray:
        states = np.atleast_2d(np.asarray(states, dtype=float))
        return states @ self.rff.frequencies[: self.state_dim]

    def action_projection(self, actions) -> np.ndarray:
        return self.encode_actions(actions) @ self.rff.frequencies[self.state_dim:]

    def embed(self, state, action) -> np.ndarray:
        """Feature vector for one (state, action) pair."""
        state = np.asarray(state, dtype=float).reshape(1, -1)
        proj = self.state_projection(state)[0] + self.action_projection(
            np.asarray(action).reshape(1, -1) if not self.discrete else action)[0]
        scale = 1.0 / np.sqrt(self.n_spectral)
        return np.concatenate([np.cos(proj), np.sin(proj)]) * scale

    def embed_pairs(self, states, actions) -> np.ndarray:
        """Row-wise features for paired states[i], actions[i]."""
        proj = self.state_projection(states) + self.action_projection(actions)
        scale = 1.0 / np.sqrt(self.n_spectral)
        return np.concatenate([np.cos(proj), np.sin(proj)], axis=1) * scale


def joint_embed(state, action, fmap: JointRffMap) -> np.ndarray:
    """Embed a (state, action) pair; see JointRffMap.embed."""
    return fmap.embed(state, action)


def make_joint_map(state_dim: int, lengthscale_state, *, n_features: int,
                   scheme: str = QUASI_RANDOM, seed: int = 0,
                   action_low=None, action_high=None,
                   n_actions: int | None = None,
                   lengthscale_action=1.0) -> JointRffMap:
    """Build a JointRffMap for a box or discrete action space.

    ``n_features`` is the output feature-vector length and must be even;
    n_features/2 spectral samples are drawn.
    """
    if n_features % 2 != 0:
        raise ValueError("n_features must be even (paired cos/sin blocks)")
    if n_actions is not None:
        action_dim = n_actions
        low = high = None
    else:
        low = np.atleast_1d(np.asarray(action_low, dtype=float))
        high = np.atleast_1d(np.asarray(action_high, dtype=float))
        action_dim = low.shape[0]
    ls = np.concatenate([
        np.full(state_dim, float(lengthscale_state)),
        np.full(action_dim, float(lengthscale_action)),
    ])
    rff = sample_rff(ls, n_features // 2, scheme=scheme, seed=seed)
    return JointRffMap(rff=rff, state_dim=state_dim, action_dim=action_dim,
                       action_low=low, action_high=high, n_actions=n_actions)


@dataclass(frozen=True)
class FourierBasisMap:
    """Order-n Fourier value-function basis on [0, 1]^d.

    Coefficients are the full Cartesian product {0..n}^d, so the feature
    count is (n+1)^d.
    """

    order: int
    input_dim: int
    coefficients: np.ndarray    # (d, (n+1)^d)

    @property
    def n_features(self) -> int:
        return self.coefficients.shape[1]


def make_fourier_basis(order: int, input_dim: int) -> FourierBasisMap:
    if order < 0 or input_dim < 1:
        raise ValueError("order must be >= 0 and input_dim >= 1")
    combos = np.array(
        list(itertools.product(range(order + 1), repeat=input_dim)),
        dtype=float).T
    combos.setflags(write=False)
    return FourierBasisMap(order=order, input_dim=input_dim,
                           coefficients=combos)


def fourier_basis_embed(s, fmap: FourierBasisMap) -> np.ndarray:
    """cos(pi * s^T C) over all coefficient columns; s in [0, 1]^d."""
    s = np.asarray(s, dtype=float)
    if s.shape[-1] != fmap.input_dim:
        raise ValueError(
            f"input dim {s.shape[-1]} != map dim {fmap.input_dim}")
    return np.cos(np.pi * (s @ fmap.coefficients))
