"""Randomised depth-first search for spec-satisfying model traces.

The search runs over successor groups of ``sym_step``.  Branch order is
shuffled with the job's seed.  A branch is cut as soon as its monitor is
violated forever or its state is covered by the store.  Once a branch is at
least ``len_min`` long and satisfies the spec it is emitted with probability
``1/(len_max - depth + 1)`` (always at ``len_max``) and the search backtracks.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from ..errors import GenerationTimeout
from .spec import SATISFIED, TRIVIAL, VIOLATED, Monitor
from .symbolic import StateStore, SymState, sym_step


@dataclass(frozen=True)
class ExploreConfig:
    len_min: int = 8
    len_max: int = 25
    node_budget: int = 600  # expansions per job; keeps jobs deterministic
    max_wall_time: float = None  # seconds; results are then flagged and may vary
    grouping: str = "exact"
    prune: bool = True
    max_traces: int = None


@dataclass
class SymTrace:
    steps: list  # of SymSucc
    spec_id: str
    seed: int

    def __len__(self):
        return len(self.steps)


@dataclass
class Exploration:
    """Iterator over emitted traces; flags describe why it stopped."""

    rt: object
    spec: object
    config: ExploreConfig
    seed: int
    universe: list
    timed_out: bool = False
    budget_spent: bool = False
    expansions: int = 0
    emitted: int = 0
    store: StateStore = field(default_factory=StateStore)

    def __iter__(self):
        cfg = self.config
        rng = random.Random(self.seed)
        mon = Monitor(self.spec)
        deadline = None if cfg.max_wall_time is None else time.monotonic() + cfg.max_wall_time
        root = SymState.of(self.rt.initial_state())
        # frames: (symbolic state, monitor state, path of SymSucc)
        stack = [(root, mon.start, ())]
        while stack:
            if cfg.max_traces is not None and self.emitted >= cfg.max_traces:
                return
            sym, mstate, path = stack.pop()
            depth = len(path)
            if depth >= cfg.len_min and mon.status(mstate) == SATISFIED:
                if depth >= cfg.len_max or rng.random() * (cfg.len_max - depth + 1) < 1:
                    self.emitted += 1
                    yield SymTrace(list(path), self.spec.id, self.seed)
                    continue
            if depth >= cfg.len_max:
                continue
            if cfg.prune and self.store.subsumed(sym, depth, mstate):
                continue
            if self.expansions >= cfg.node_budget:
                self.budget_spent = True
                return
            if deadline is not None and time.monotonic() > deadline:
                self.timed_out = True
                return
            self.expansions += 1
            succs = sym_step(self.rt, sym, self.universe, mon, mstate, cfg.grouping)
            succs = [s for s in succs if mon.status(s.monitor) != VIOLATED]
            rng.shuffle(succs)
            # the first pushed is explored last
            for s in succs:
                stack.append((s.state, s.monitor, path + (s,)))


def explore(rt, spec=None, config=None, seed=0, universe=None):
    """Stream of symbolic traces of ``rt`` satisfying ``spec``."""
    from .universe import input_universe

    spec = spec or TRIVIAL
    universe = universe if universe is not None else input_universe(rt)
    return Exploration(rt, spec, config or ExploreConfig(), seed, universe)


__all__ = ["ExploreConfig", "Exploration", "SymTrace", "explore", "GenerationTimeout"]
