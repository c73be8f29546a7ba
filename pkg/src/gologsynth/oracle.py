"""Explicit-world reference semantics.

Everything here works directly from the semantic definitions: worlds are
finite valuations, situations are reached by progressing successor state
axioms, programs run by their transition rules.  Nothing in this module uses
regression, characteristic graphs or types, so it can serve as an oracle for
the symbolic machinery.
"""

from __future__ import annotations

import itertools
from collections import deque

from . import logic as L
from . import program as P
from .errors import ResourceLimitError


# ---------------------------------------------------------------- evaluation

def evaluate(phi, true_atoms, objects, env=None):
    """Truth of a formula in the valuation ``true_atoms`` (a set of ground
    Atoms) with quantifiers ranging over ``objects``."""
    env = env or {}

    def term(t):
        if isinstance(t, L.Var):
            return env[t]
        return t

    def ev(f):
        if f is L.TOP:
            return True
        if f is L.BOT:
            return False
        if isinstance(f, L.Atom):
            return L.Atom(f.fluent, tuple(term(a) for a in f.args)) in true_atoms
        if isinstance(f, L.Eq):
            return term(f.left) is term(f.right)
        if isinstance(f, L.Not):
            return not ev(f.body)
        if isinstance(f, L.And):
            return all(ev(c) for c in f.children)
        if isinstance(f, L.Or):
            return any(ev(c) for c in f.children)
        if isinstance(f, L.QUANTIFIERS):
            x = f.var
            saved = env.get(x)
            count = 0
            try:
                for o in objects:
                    env[x] = o
                    if ev(f.body):
                        count += 1
                        if isinstance(f, L.Exists):
                            return True
                    elif isinstance(f, L.Forall):
                        return False
            finally:
                if saved is None:
                    env.pop(x, None)
                else:
                    env[x] = saved
            if isinstance(f, L.Forall):
                return True
            if isinstance(f, L.Exists):
                return False
            if isinstance(f, L.CountGeq):
                return count >= f.m
            return count <= f.m
        raise TypeError(repr(f))

    env = dict(env)
    return ev(phi)


def ground_atoms(fluents, objects):
    out = []
    for f, n in sorted(fluents.items()):
        for args in itertools.product(objects, repeat=n):
            out.append(L.Atom(f, args))
    return out


# ---------------------------------------------------------------- worlds

class WorldModel:
    """A world given by its initial valuation; later situations are obtained
    by progression through the successor state axioms."""

    def __init__(self, bat, true_atoms):
        self.bat = bat
        self.objects = bat.universe.objects
        self.initial = frozenset(true_atoms)
        self._states = {(): self.initial}
        self._atoms = ground_atoms(bat.fluents, self.objects)
        self._truth = {}

    @property
    def universe(self):
        return self.bat.universe

    def state(self, z):
        z = tuple(z)
        s = self._states.get(z)
        if s is None:
            s = self.progress_state(self.state(z[:-1]), z[-1])
            self._states[z] = s
        return s

    def holds(self, phi, z=()):
        st = self.state(z)
        key = (phi, st)
        v = self._truth.get(key)
        if v is None:
            v = self._truth[key] = evaluate(phi, st, self.objects)
        return v

    def _gamma(self, pairs, args, head, action, state):
        for pair in pairs:
            if pair.action != action.function or len(pair.pattern) != len(action.args):
                continue
            env = dict(zip(head, args))
            ok = True
            for t, n in zip(pair.pattern, action.args):
                if isinstance(t, L.Name):
                    ok = t is n
                elif t in env:
                    ok = env[t] is n
                else:
                    env[t] = n
                if not ok:
                    break
            if ok and evaluate(pair.epsilon, state, self.objects, env) \
                    and evaluate(pair.kappa, state, self.objects, env):
                return True
        return False

    def progress_state(self, state, action):
        out = set()
        for atom in self._atoms:
            ssa = self.bat.ssas[atom.fluent]
            if ssa.rigid:
                if atom in state:
                    out.add(atom)
                continue
            if self._gamma(ssa.positive, atom.args, ssa.params, action, state):
                out.add(atom)
            elif atom in state and not self._gamma(ssa.negative, atom.args, ssa.params, action, state):
                out.add(atom)
        return frozenset(out)


def progress(w, action):
    """World whose initial valuation is w after ``action``."""
    return WorldModel(w.bat, w.progress_state(w.initial, action))


# ---------------------------------------------------------------- models

def enumerate_models(sentences, fluents, objects, max_atoms=20):
    """All valuations over the ground atoms of ``fluents`` satisfying the
    sentences (sets of true atoms)."""
    atoms = ground_atoms(fluents, objects)
    if len(atoms) > max_atoms:
        raise ResourceLimitError(f"{len(atoms)} ground atoms exceed the budget of {max_atoms}",
                                 {"atoms": len(atoms)})
    sentences = list(sentences)
    out = []
    for bits in itertools.product((False, True), repeat=len(atoms)):
        val = frozenset(a for a, b in zip(atoms, bits) if b)
        if all(evaluate(s, val, objects) for s in sentences):
            out.append(val)
    return out


def worlds(bat, max_atoms=20):
    return [WorldModel(bat, m) for m in
            enumerate_models(bat.initial, bat.fluents, bat.universe.objects, max_atoms)]


# ---------------------------------------------------------------- program semantics

def is_final(w, z, d):
    if isinstance(d, P.Act):
        return False
    if isinstance(d, P.Test):
        return w.holds(d.phi, z)
    if isinstance(d, (P.Seq, P.Conc)):
        return is_final(w, z, d.left) and is_final(w, z, d.right)
    if isinstance(d, P.Choice):
        return is_final(w, z, d.left) or is_final(w, z, d.right)
    if isinstance(d, P.Star):
        return True
    raise TypeError(repr(d))


def transitions(w, z, d):
    """Set of (action, remaining program) one step from configuration (z, d)."""
    out = set()
    if isinstance(d, P.Act):
        out.add((d.action, P.NIL))
    elif isinstance(d, P.Seq):
        for a, r in transitions(w, z, d.left):
            out.add((a, P.Seq(r, d.right)))
        if is_final(w, z, d.left):
            out |= transitions(w, z, d.right)
    elif isinstance(d, P.Choice):
        out = transitions(w, z, d.left) | transitions(w, z, d.right)
    elif isinstance(d, P.Conc):
        for a, r in transitions(w, z, d.left):
            out.add((a, P.Conc(r, d.right)))
        for a, r in transitions(w, z, d.right):
            out.add((a, P.Conc(d.left, r)))
    elif isinstance(d, P.Star):
        for a, r in transitions(w, z, d.body):
            out.add((a, P.Seq(r, d)))
    return out


def enumerate_executions(w, d, max_len=6):
    """Map trace -> whether some configuration reached by it is final, for
    every trace of length <= max_len the program can produce in w."""
    result = {}
    q = deque([((), d)])
    seen = {((), d)}
    while q:
        z, rest = q.popleft()
        result[z] = result.get(z, False) or is_final(w, z, rest)
        if len(z) >= max_len:
            continue
        for a, r in transitions(w, z, rest):
            cfg = (z + (a,), r)
            if cfg not in seen:
                seen.add(cfg)
                q.append(cfg)
    return result


def configurations(w, d, max_len=6):
    """All reachable configurations (z, remaining program)."""
    q = deque([((), d)])
    seen = {((), d)}
    while q:
        z, rest = q.popleft()
        if len(z) >= max_len:
            continue
        for a, r in transitions(w, z, rest):
            cfg = (z + (a,), r)
            if cfg not in seen:
                seen.add(cfg)
                q.append(cfg)
    return seen


# ---------------------------------------------------------------- games

def _plays_ok(game, sigma):
    """Independent winning/terminating test by explicit exploration."""
    env = game.env_actions
    reach = set()
    stack = list(game.initial)
    while stack:
        s = stack.pop()
        if s in reach:
            continue
        if s not in sigma:
            return False
        reach.add(s)
        for a, t in game.succ(s):
            if a in sigma[s]:
                stack.append(t)

    def stoppable(s):
        return s in game.final and all(a in env for a in sigma[s])

    for s in reach:
        if stoppable(s) and s not in game.accepting:
            return False
    # terminating: from every reachable state, every sigma-path eventually
    # meets a stoppable state; fails iff a cycle avoids stoppable states
    colour = {}

    def cyclic(s):
        colour[s] = 1
        for a, t in game.succ(s):
            if a not in sigma[s] or stoppable(t):
                continue
            c = colour.get(t, 0)
            if c == 1 or (c == 0 and cyclic(t)):
                return True
        colour[s] = 2
        return False

    for s in reach:
        if not stoppable(s) and colour.get(s, 0) == 0 and cyclic(s):
            return False
    return True


def valid_action_sets(game, s):
    acts = sorted({a for a, _ in game.succ(s)}, key=str)
    env = [a for a in acts if a in game.env_actions]
    ctrl = [a for a in acts if a not in game.env_actions]
    out = []
    for k in range(len(ctrl) + 1):
        for extra in itertools.combinations(ctrl, k):
            U = frozenset(env) | frozenset(extra)
            if not U and s not in game.final:
                continue
            out.append(U)
    return out


def brute_force_strategy(game, max_states=8):
    """Exhaustive search for a winning terminating strategy; None if none.

    Assigns every valid action set to each state as it becomes reachable and
    checks complete assignments with an explicit play analysis.
    """
    if len(game.states) > max_states:
        raise ResourceLimitError(f"brute force limited to {max_states} states",
                                 {"states": len(game.states)})
    options = {s: valid_action_sets(game, s) for s in game.states}

    def search(sigma, frontier):
        if not frontier:
            return dict(sigma) if _plays_ok(game, sigma) else None
        s, rest = frontier[0], frontier[1:]
        for U in options[s]:
            if s in game.final and s not in game.accepting and all(a in game.env_actions for a in U):
                continue  # a play could stop here
            sigma[s] = U
            nxt = list(rest)
            for a, t in game.succ(s):
                if a in U and t not in sigma and t not in nxt:
                    nxt.append(t)
            r = search(sigma, nxt)
            del sigma[s]
            if r is not None:
                return r
        return None

    return search({}, list(dict.fromkeys(game.initial)))
