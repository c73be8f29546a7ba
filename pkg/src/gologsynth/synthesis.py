"""Strategy extraction by backward labelling from hypothesised good states.

``synthesize`` runs the labelling loop for a hypothesis H of final and
accepting states.  Hypotheses are either enumerated exhaustively in order
of decreasing size, or (the default) refined as a greatest fixpoint:
start from all final accepting states and drop those the labelling could not
confirm.  Because the set of confirmed states grows monotonically with H,
the fixpoint is the largest successful hypothesis, which is exactly the
first success of the exhaustive order, at polynomial cost.
"""

from __future__ import annotations

import itertools
import logging
import time
from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from .errors import ResourceLimitError

log = logging.getLogger(__name__)


@dataclass
class Strategy:
    """Partial map state -> set of actions."""

    choice: dict

    def __getitem__(self, s):
        return self.choice[s]

    def __contains__(self, s):
        return s in self.choice

    def __len__(self):
        return len(self.choice)

    def reachable(self, arena):
        seen, stack = set(), [s for s in arena.initial if s in self.choice]
        while stack:
            s = stack.pop()
            if s in seen:
                continue
            seen.add(s)
            for a, t in arena.succ(s):
                if a in self.choice[s] and t in self.choice:
                    stack.append(t)
        return seen

    def restricted(self, arena):
        r = self.reachable(arena)
        return Strategy({s: self.choice[s] for s in sorted(r)})

    def size(self, arena):
        """(states, transitions) of the sub-arena the strategy can visit."""
        r = self.reachable(arena)
        edges = sum(1 for s in r for a, t in arena.succ(s) if a in self.choice[s])
        return len(r), edges


@dataclass
class SynthesisResult:
    strategy: Strategy | None
    hypothesis: frozenset | None = None
    hypotheses_tried: int = 0
    stats: dict = field(default_factory=dict)
    # labelled set of the last hypothesis tried; diagnostic on failure
    reach: frozenset = frozenset()

    @property
    def realizable(self):
        return self.strategy is not None


def _split_succ(arena, s):
    env, ctrl = [], []
    for a, t in arena.succ(s):
        (env if arena.is_env(a) else ctrl).append((a, t))
    return env, ctrl


def label(arena, H, pred=None, strict=True):
    """One pass of the labelling loop for hypothesis H.

    Returns (R, sigma).  ``strict`` adds two repairs to the literal loop:
    a final non-accepting state is only labelled if it has a controllable
    successor already known to be good, and sigma(s) is read off G as it was
    before s joined it.  Without the first, a play may stop in a final
    non-accepting state; without the second, a controllable self-loop on s
    can be chosen and the strategy need not terminate.
    """
    pred = pred if pred is not None else arena.pred()
    F, Acc = arena.final, arena.accepting
    G = set(H)
    R = set()
    sigma = {}
    for s in sorted(G):
        env, _ = _split_succ(arena, s)
        if not env:
            R.add(s)
            sigma[s] = frozenset()
    Q = deque(s for s in arena.states if any(t in G for _, t in arena.succ(s)))
    inq = set(Q)
    while Q:
        s = Q.popleft()
        inq.discard(s)
        env, ctrl = _split_succ(arena, s)
        bad_final = s in F and s not in Acc
        if bad_final and not ctrl:
            continue
        if s in R:
            continue
        if env:
            ok = all(t in G for _, t in env)
        else:
            ok = any(t in G for _, t in ctrl)
        if ok and strict and bad_final:
            ok = any(t in G for _, t in ctrl)
        if not ok:
            continue
        if s in F and s in Acc:
            sigma[s] = frozenset(a for a, _ in env)
        elif strict:
            # only states labelled before s, so every choice descends a rank
            sigma[s] = frozenset(a for a, t in arena.succ(s) if t in G)
        G.add(s)
        R.add(s)
        if not strict and not (s in F and s in Acc):
            sigma[s] = frozenset(a for a, t in arena.succ(s) if t in G)
        for _, p in pred[s]:
            if p not in inq:
                Q.append(p)
                inq.add(p)
    return R, sigma


def hypothesis_order(candidates, cap=20):
    """All subsets of the candidates, largest first, lexicographic within a
    size.  Raises ResourceLimitError when there are more than ``cap``."""
    cands = sorted(candidates)
    if len(cands) > cap:
        raise ResourceLimitError(
            f"{len(cands)} final accepting states exceed the hypothesis cap of {cap}",
            {"candidates": len(cands)})
    for k in range(len(cands), -1, -1):
        for H in itertools.combinations(cands, k):
            yield frozenset(H)


def synthesize(arena, mode="refine", max_hypothesis_states=20, strict=True):
    """Winning terminating strategy or a result with ``strategy=None``."""
    t0 = time.perf_counter()
    pred = arena.pred()
    cands = frozenset(arena.final & arena.accepting)
    S0 = set(arena.initial)
    tried = 0
    R = set()

    def done(sigma, H):
        st = Strategy(sigma).restricted(arena)
        return SynthesisResult(st, frozenset(H), tried,
                               {"seconds": time.perf_counter() - t0, "mode": mode},
                               frozenset(sigma))

    if mode == "exhaustive":
        for H in hypothesis_order(cands, max_hypothesis_states):
            tried += 1
            R, sigma = label(arena, H, pred, strict)
            if H <= R and S0 <= R:
                return done(sigma, H)
    elif mode == "refine":
        H = cands
        while True:
            tried += 1
            R, sigma = label(arena, H, pred, strict)
            if H <= R and S0 <= R:
                return done(sigma, H)
            H2 = H & R
            if H2 == H:
                break
            H = H2
    else:
        raise ValueError(f"unknown hypothesis mode {mode!r}")
    return SynthesisResult(None, None, tried, {"seconds": time.perf_counter() - t0, "mode": mode},
                           frozenset(R))


# ---------------------------------------------------------------- checking

def is_valid_action_set(arena, s, U):
    acts = {a for a, _ in arena.succ(s)}
    if not U <= acts:
        return False
    if any(arena.is_env(a) and a not in U for a in acts):
        return False
    if not U and s not in arena.final:
        return False
    return True


@dataclass
class StrategyCheck:
    valid: bool
    winning: bool
    terminating: bool
    problems: list = field(default_factory=list)

    @property
    def ok(self):
        return self.valid and self.winning and self.terminating


def check_strategy(arena, strategy):
    """Validity, winning (every reachable stopping point is accepting) and
    termination (no strategy cycle avoids stopping points)."""
    sigma = strategy.choice if isinstance(strategy, Strategy) else strategy
    problems = []
    valid = True
    for s in arena.initial:
        if s not in sigma:
            valid = False
            problems.append(f"undefined on initial state {s}")
    reach = set()
    stack = [s for s in arena.initial if s in sigma]
    while stack:
        s = stack.pop()
        if s in reach:
            continue
        reach.add(s)
        if not is_valid_action_set(arena, s, sigma[s]):
            valid = False
            problems.append(f"invalid action set at state {s}")
        for a, t in arena.succ(s):
            if a in sigma[s]:
                if t not in sigma:
                    valid = False
                    problems.append(f"undefined on successor {t} of {s}")
                else:
                    stack.append(t)

    def stoppable(s):
        return s in arena.final and all(arena.is_env(a) for a in sigma[s])

    winning = True
    for s in sorted(reach):
        if stoppable(s) and s not in arena.accepting:
            winning = False
            problems.append(f"play can end in non-accepting state {s}")
    g = nx.DiGraph()
    for s in reach:
        if stoppable(s):
            continue
        g.add_node(s)
        for a, t in arena.succ(s):
            if a in sigma[s] and t in reach and not stoppable(t):
                g.add_edge(s, t)
    terminating = nx.is_directed_acyclic_graph(g)
    if not terminating:
        problems.append("strategy admits an infinite play avoiding stopping points")
    return StrategyCheck(valid, winning, terminating, problems)
