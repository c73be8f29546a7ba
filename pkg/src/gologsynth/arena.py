"""Finite game arena over types, program nodes, effects and obligations.

Types are built lazily.  Construction starts from a single context holding
only the initial theory.  Whenever a needed sentence (a guard, termination
condition, context condition or assignment literal, each regressed to the
initial situation) is open in a context, that context's whole lineage is
cloned into two refinements and exploration resumes in both.  The arena is
the disjoint union of the surviving lineages.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field

from . import bat as B
from . import logic as L
from . import ltlf as T
from . import program as P
from .errors import InconsistentTheoryError, NotSituationDeterminedError, ResourceLimitError
from .reasoner import Reasoner, equivalent

log = logging.getLogger(__name__)

ACCEPT = (frozenset(), True)


@dataclass
class Problem:
    """A program over a basic action theory, a temporal specification and
    the set of action functions controlled by the environment."""

    bat: B.BasicActionTheory
    program: object
    spec: object
    env_functions: frozenset = frozenset()
    name: str = ""

    def is_env(self, action):
        return action.function in self.env_functions


@dataclass(frozen=True)
class TypeContext:
    """Partial type: signed sentences about the initial situation."""

    judgments: frozenset = frozenset()

    def refine(self, sentence, value):
        return TypeContext(self.judgments | {(sentence, bool(value))})

    def __len__(self):
        return len(self.judgments)

    def sorted(self):
        return sorted(self.judgments, key=lambda j: (L.sort_key(j[0]), j[1]))


def split(reasoner, ctx, sentence):
    """Consistent refinements of ctx on an open sentence (two, or fewer if a
    refinement is inconsistent)."""
    out = []
    for v in (True, False):
        c = ctx.refine(sentence, v)
        if reasoner.satisfiable(reasoner.context_literals(c.judgments)):
            out.append(c)
    return out


class Arena:
    """Explicit finite game: integer states, deterministic labelled
    transitions, final/accepting flags and an environment action set."""

    def __init__(self, n, initial, final, accepting, succ, env_actions,
                 info=None, contexts=None, stats=None):
        self.states = list(range(n))
        self.initial = list(initial)
        self.final = set(final)
        self.accepting = set(accepting)
        self._succ = [tuple(x) for x in succ]
        self.env_actions = frozenset(env_actions)
        self.info = info
        self.contexts = contexts or []
        self.stats = dict(stats or {})
        for s, out in enumerate(self._succ):
            acts = [a for a, _ in out]
            if len(acts) != len(set(acts)):
                raise NotSituationDeterminedError(f"state {s} has two successors for one action")

    def succ(self, s):
        return self._succ[s]

    def transitions(self):
        for s in self.states:
            for a, t in self._succ[s]:
                yield s, a, t

    @property
    def n_transitions(self):
        return sum(len(x) for x in self._succ)

    def is_env(self, a):
        return a in self.env_actions

    def pred(self):
        out = [[] for _ in self.states]
        for s, a, t in self.transitions():
            out[t].append((a, s))
        return out

    def reachable(self, roots=None):
        seen = set()
        stack = list(self.initial if roots is None else roots)
        while stack:
            s = stack.pop()
            if s not in seen:
                seen.add(s)
                stack.extend(t for _, t in self._succ[s])
        return seen

    def restrict(self, roots):
        """Sub-arena reachable from ``roots`` (which become its initial
        states), renumbered in ascending order of the old ids."""
        keep = sorted(self.reachable(roots))
        new = {s: i for i, s in enumerate(keep)}
        return Arena(len(keep), [new[s] for s in roots],
                     {new[s] for s in keep if s in self.final},
                     {new[s] for s in keep if s in self.accepting},
                     [tuple((a, new[t]) for a, t in self._succ[s]) for s in keep],
                     self.env_actions,
                     [self.info[s] for s in keep] if self.info else None,
                     self.contexts, self.stats)


@dataclass
class StateInfo:
    context: int
    effects: frozenset
    obligations: frozenset
    program: object


class _Lineage:
    __slots__ = ("ctx", "lits", "index", "keys", "flags", "succ", "queue", "initial")

    def __init__(self, ctx, lits):
        self.ctx, self.lits = ctx, lits
        self.index, self.keys, self.flags, self.succ = {}, [], [], []
        self.queue = deque()
        self.initial = None

    def clone(self, ctx, lits):
        c = _Lineage(ctx, lits)
        c.index = dict(self.index)
        c.keys = list(self.keys)
        c.flags = list(self.flags)
        c.succ = list(self.succ)
        c.queue = deque(self.queue)
        c.initial = self.initial
        return c

    def intern(self, key):
        i = self.index.get(key)
        if i is None:
            i = len(self.keys)
            self.index[key] = i
            self.keys.append(key)
            self.flags.append(None)
            self.succ.append(())
            self.queue.append(i)
        return i


class _View:
    """Context answering truth queries through the shared reasoner."""

    __slots__ = ("reasoner", "lits")

    def __init__(self, reasoner, lits):
        self.reasoner, self.lits = reasoner, lits

    def truth(self, sentence):
        if sentence is L.TOP:
            return True
        if sentence is L.BOT:
            return False
        return self.reasoner.decide_lits(self.lits, self.reasoner.literal(sentence)).as_bool()


class ArenaBuilder:
    """Initialize / split / expand to a fixpoint.

    ``expand_dead`` controls whether states with no live obligation (A = {})
    are expanded; verification needs them, synthesis does not.
    """

    def __init__(self, problem, expand_dead=False, max_states=200000,
                 semantic_dedup=False, reasoner=None, canonical_graph=True):
        self.problem = problem
        self.bat = problem.bat
        self.expand_dead = expand_dead
        self.max_states = max_states
        self.semantic_dedup = semantic_dedup
        self.graph = P.characteristic_graph(problem.program, canonical=canonical_graph)
        self.reasoner = reasoner or Reasoner(self.bat.theory())
        if not self.reasoner.base_consistent:
            raise InconsistentTheoryError("the initial theory is inconsistent")
        self.phi = T.tcanon(T.tnf(T.nnf(problem.spec)))
        self._assign = {}
        self._sem = {}
        self.stats = {"splits": 0, "contexts_discarded": 0, "expansions": 0}

    # -- obligations

    def assignments(self, chi):
        r = self._assign.get(chi)
        if r is None:
            if chi is None:
                f = self.phi
            else:
                kids = sorted(chi, key=T.tfmt)
                f = T.tcanon(T.tand(*kids)) if kids else T.TRUE
            r = T.enumerate_assignments(T.xnf(f))
            self._assign[chi] = r
        return r

    def _obligations(self, view, pairs, E):
        """Collect (X(P), T(P)) over assignments P of the given chi whose
        literals hold after E.  All literals are checked for refutation
        before splitting on the first open one."""
        out = set()
        pending = None
        for chi in pairs:
            for p in self.assignments(chi):
                dead, open_ = False, None
                for phi, pos in p.fluent_literals:
                    q = B.regress(E, phi)
                    v = view.truth(q)
                    if v is None:
                        open_ = open_ or q
                    elif v != pos:
                        dead = True
                        break
                if dead:
                    continue
                if open_ is not None:
                    pending = pending or open_
                    continue
                out.add((p.X, p.T))
        if pending is not None:
            raise B.SplitRequest(pending)
        return frozenset(out)

    def _normalize(self, E):
        if not self.semantic_dedup:
            return E
        r = self._sem.get(E)
        if r is None:
            r = semantic_normalize(E, self.bat.universe)
            self._sem[E] = r
        return r

    # -- exploration

    def _initial(self, view):
        A = self._obligations(view, [None], B.EMPTY)
        return (B.EMPTY, A, self.graph.initial)

    def _expand(self, view, key):
        E, A, rho = key
        live = []
        for act, guard, dst in self.graph.out(rho):
            q = B.regress(E, guard)
            v = view.truth(q)
            if v is None:
                raise B.SplitRequest(q)
            if v:
                live.append((act, dst))
        q = B.regress(E, self.graph.term_cond[rho])
        final = view.truth(q)
        if final is None:
            raise B.SplitRequest(q)
        accepting = ACCEPT in A
        if not A and not self.expand_dead:
            return final, accepting, ()
        seen = set()
        succ = []
        chis = [chi for chi, theta in sorted(A, key=_obl_key) if not theta]
        for act, dst in live:
            if act in seen:
                raise NotSituationDeterminedError(
                    f"two enabled edges for {L.fmt(act)} at node {P.pfmt(rho)}")
            seen.add(act)
            eff = B.effects_of(view, E, act, self.bat)
            E2 = self._normalize(B.accumulate(E, eff))
            A2 = self._obligations(view, chis, E2)
            succ.append((act, (E2, A2, dst)))
        return final, accepting, tuple(succ)

    def build(self):
        t0 = time.perf_counter()
        r = self.reasoner
        root = TypeContext()
        todo = deque([_Lineage(root, ())])
        done = []
        total = 0
        while todo:
            lin = todo.popleft()
            view = _View(r, lin.lits)
            try:
                if lin.initial is None:
                    lin.initial = lin.intern(self._initial(view))
                while lin.queue:
                    i = lin.queue[0]
                    final, acc, succ = self._expand(view, lin.keys[i])
                    self.stats["expansions"] += 1
                    lin.flags[i] = (final, acc)
                    lin.succ[i] = tuple((a, lin.intern(k)) for a, k in succ)
                    lin.queue.popleft()
                    if len(lin.keys) + total > self.max_states:
                        self.stats.update(states=len(lin.keys) + total, contexts=len(done) + 1 + len(todo),
                                          seconds=time.perf_counter() - t0)
                        raise ResourceLimitError(
                            f"arena exceeds {self.max_states} states", self.stats)
            except B.SplitRequest as sr:
                self.stats["splits"] += 1
                kids = split(r, lin.ctx, sr.sentence)
                self.stats["contexts_discarded"] += 2 - len(kids)
                for c in kids:
                    todo.append(lin.clone(c, r.context_literals(c.judgments)))
                continue
            done.append(lin)
            total += len(lin.keys)
        arena = self._assemble(done)
        arena.stats.update(self.stats)
        arena.stats.update(seconds=time.perf_counter() - t0, reasoner=dict(r.stats))
        return arena

    def _assemble(self, lineages):
        offset = 0
        initial, final, accepting, succ, info, contexts = [], set(), set(), [], [], []
        env = set()
        for ci, lin in enumerate(lineages):
            contexts.append(lin.ctx)
            initial.append(offset + lin.initial)
            for i, key in enumerate(lin.keys):
                f, a = lin.flags[i]
                if f:
                    final.add(offset + i)
                if a:
                    accepting.add(offset + i)
                succ.append(tuple((act, offset + j) for act, j in lin.succ[i]))
                for act, _ in lin.succ[i]:
                    if self.problem.is_env(act):
                        env.add(act)
                E, A, rho = key
                info.append(StateInfo(ci, E, A, rho))
            offset += len(lin.keys)
        for act in self.graph.actions():
            if self.problem.is_env(act):
                env.add(act)
        stats = {"states": offset, "transitions": sum(len(s) for s in succ),
                 "contexts": len(lineages), "graph_nodes": len(self.graph.nodes),
                 "graph_edges": len(self.graph.edges)}
        return Arena(offset, initial, final, accepting, succ, env, info, contexts, stats)


def _obl_key(o):
    chi, theta = o
    return (sorted(T.tfmt(c) for c in chi), theta)


def build(problem, **opts):
    return ArenaBuilder(problem, **opts).build()


def initialize(problem, **opts):
    """Initial states only: one (context, E={}, A, root) per context that the
    initial assignments force apart."""
    b = ArenaBuilder(problem, **opts)
    r = b.reasoner
    todo = deque([TypeContext()])
    out = []
    while todo:
        ctx = todo.popleft()
        view = _View(r, r.context_literals(ctx.judgments))
        try:
            key = b._initial(view)
        except B.SplitRequest as sr:
            todo.extend(split(r, ctx, sr.sentence))
            continue
        out.append((ctx, StateInfo(len(out), *key)))
    return out


def semantic_normalize(E, universe):
    """Drop effect literals whose descriptor is unsatisfiable and merge
    literals with equivalent descriptors (grounded over the universe)."""
    groups = {}
    for l in B.sorted_effects(E):
        groups.setdefault((l.fluent, l.positive), []).append(l)
    out = []
    for (_, _), lits in groups.items():
        kept = []
        for l in lits:
            if equivalent(l.epsilon, L.BOT, universe):
                continue
            if any(equivalent(l.epsilon, k.epsilon, universe) for k in kept):
                continue
            kept.append(l)
        out.extend(kept)
    return frozenset(out)


# ---------------------------------------------------------------- verification

@dataclass
class VerifyResult:
    ok: bool
    path: list = field(default_factory=list)   # [s0, a1, s1, ..., an, sn]

    def actions(self):
        return self.path[1::2]


def verify(arena):
    """True iff every reachable final state is accepting; otherwise a
    shortest path to a violating final state."""
    parent = {}
    q = deque()
    for s in arena.initial:
        if s not in parent:
            parent[s] = None
            q.append(s)
    while q:
        s = q.popleft()
        if s in arena.final and s not in arena.accepting:
            path = [s]
            while parent[path[0]] is not None:
                p, a = parent[path[0]]
                path[:0] = [p, a]
            return VerifyResult(False, path)
        for a, t in arena.succ(s):
            if t not in parent:
                parent[t] = (s, a)
                q.append(t)
    return VerifyResult(True, [])
