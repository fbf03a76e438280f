"""Goal-only Taxi on the canonical 5x5 grid.

Four special cells (R, G, Y, B).  Each episode the taxi starts in a
random cell, a passenger waits at one special cell, and a different
special cell is the destination.  Dropping the passenger at the
destination pays +1 and ends the episode; pickup or dropoff anywhere
wrong pays -0.1; moves pay 0.  Moves through the grid's interior walls
are blocked.

The 500 states encode (taxi row, taxi column, passenger location,
destination), with passenger location 4 meaning "in the taxi".  All
transitions are deterministic, so they are precomputed into lookup
tables once per instance.
"""

from __future__ import annotations

import numpy as np

from ..core import EnvSpec, StepOutcome

SOUTH, NORTH, EAST, WEST, PICKUP, DROPOFF = range(6)

SPECIAL_CELLS = ((0, 0), (0, 4), (4, 0), (4, 3))    # R, G, Y, B
IN_TAXI = 4

# Interior walls of the canonical layout, as unordered cell pairs that
# east/west moves may not cross.
_WALLS = {
    frozenset({(0, 1), (0, 2)}),
    frozenset({(1, 1), (1, 2)}),
    frozenset({(3, 0), (3, 1)}),
    frozenset({(4, 0), (4, 1)}),
    frozenset({(3, 2), (3, 3)}),
    frozenset({(4, 2), (4, 3)}),
}


def encode(row: int, col: int, pass_loc: int, dest: int) -> int:
    return ((row * 5 + col) * 5 + pass_loc) * 4 + dest


def decode(state: int):
    state, dest = divmod(state, 4)
    state, pass_loc = divmod(state, 5)
    row, col = divmod(state, 5)
    return row, col, pass_loc, dest


class TaxiEnv:
    def __init__(self, max_episode_steps: int = 500):
        self.spec = EnvSpec(
            state_dim=4,
            max_episode_steps=max_episode_steps,
            n_states=500,
            n_actions=6,
        )
        self._build_tables()

    def _build_tables(self) -> None:
        n = 500
        self.next_state = np.empty((n, 6), dtype=np.int64)
        self.reward = np.zeros((n, 6))
        self.terminal = np.zeros((n, 6), dtype=bool)
        for s in range(n):
            row, col, pass_loc, dest = decode(s)
            for a in range(6):
                nr, nc, np_loc = row, col, pass_loc
                r = 0.0
                term = False
                if a == SOUTH:
                    nr = min(row + 1, 4)
                elif a == NORTH:
                    nr = max(row - 1, 0)
                elif a == EAST:
                    if frozenset({(row, col), (row, col + 1)}) not in _WALLS:
                        nc = min(col + 1, 4)
                elif a == WEST:
                    if frozenset({(row, col), (row, col - 1)}) not in _WALLS:
                        nc = max(col - 1, 0)
                elif a == PICKUP:
                    if pass_loc < IN_TAXI and (row, col) == SPECIAL_CELLS[pass_loc]:
                        np_loc = IN_TAXI
                    else:
                        r = -0.1
                else:    # DROPOFF
                    if pass_loc == IN_TAXI and (row, col) == SPECIAL_CELLS[dest]:
                        np_loc = dest
                        r = 1.0
                        term = True
                    elif pass_loc == IN_TAXI and (row, col) in SPECIAL_CELLS:
                        # Legal set-down at the wrong special cell: the
                        # passenger leaves the taxi, penalty applies.
                        np_loc = SPECIAL_CELLS.index((row, col))
                        r = -0.1
                    else:
                        r = -0.1
                self.next_state[s, a] = encode(nr, nc, np_loc, dest)
                self.reward[s, a] = r
                self.terminal[s, a] = term

    def reset(self, rng) -> int:
        row = int(rng.integers(5))
        col = int(rng.integers(5))
        pass_loc = int(rng.integers(4))
        dest = int(rng.integers(3))
        if dest >= pass_loc:
            dest += 1    # destination differs from the passenger cell
        return encode(row, col, pass_loc, dest)

    def observe(self, state: int):
        return state

    def step(self, state: int, action, rng) -> StepOutcome:
        a = int(action)
        if not 0 <= a < 6:
            raise ValueError(f"invalid taxi action {a}")
        s = int(state)
        term = bool(self.terminal[s, a])
        return StepOutcome(int(self.next_state[s, a]),
                           float(self.reward[s, a]),
                           terminal=term, goal=term)
