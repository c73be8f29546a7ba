"""Differential checks of arenas and strategies against explicit worlds.

Worlds are sampled per context with the SAT backend; everything after that
(progression, program transitions, temporal truth) is computed by the oracle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import ltlf as T
from . import oracle as O
from .oracle import WorldModel, ground_atoms


def sample_worlds(reasoner, bat, context, k=4, seed=0):
    """Up to k distinct initial valuations consistent with the base theory
    and a type context (iterable of (sentence, polarity))."""
    rng = random.Random(seed)
    base = list(reasoner.context_literals(context))
    if not reasoner.satisfiable(base):
        return []
    atoms = ground_atoms(bat.fluents, bat.universe.objects)
    out, seen = [], set()
    for _ in range(4 * k):
        lits = list(base)
        order = list(atoms)
        rng.shuffle(order)
        for a in order:
            v = reasoner.atom_var(a)
            pick = v if rng.random() < 0.5 else -v
            if reasoner.satisfiable(lits + [pick]):
                lits.append(pick)
            else:
                lits.append(-pick)
        m = reasoner.model(lits)
        true = frozenset(a for a in atoms if m.get(a, False))
        if true not in seen:
            seen.add(true)
            out.append(WorldModel(bat, true))
            if len(out) >= k:
                break
    return out


@dataclass
class PlayReport:
    plays: int = 0
    steps: int = 0
    truncated: int = 0
    problems: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.problems


def check_plays(arena, sigma, problem, world, start, max_depth=40, report=None, dedup=True):
    """Follow every sigma-play from arena state ``start`` in ``world``.

    At each visited state the arena's final flag, accepting flag and enabled
    actions must agree with the explicit semantics, and every stoppable state
    must end a trace satisfying the specification.
    """
    rep = report or PlayReport()
    spec = problem.spec
    seen = set()
    stack = [(start, (), frozenset([problem.program]))]
    while stack:
        s, z, cfgs = stack.pop()
        if dedup:
            key = (s, world.state(z), cfgs)
            if key in seen:
                continue
            seen.add(key)
        rep.steps += 1
        final = any(O.is_final(world, z, d) for d in cfgs)
        if final != (s in arena.final):
            rep.problems.append(f"state {s} after {_tr(z)}: final flag {s in arena.final}, oracle {final}")
        moves = {}
        for d in cfgs:
            for a, r in O.transitions(world, z, d):
                moves.setdefault(a, set()).add(r)
        sat = T.eval_trace(world, (), z, spec)
        if sat != (s in arena.accepting):
            rep.problems.append(f"state {s} after {_tr(z)}: accepting {s in arena.accepting}, oracle {sat}")
        arena_acts = {a for a, _ in arena.succ(s)}
        if s in sigma and arena_acts != set(moves):
            rep.problems.append(f"state {s} after {_tr(z)}: arena actions {_acts(arena_acts)}, "
                                f"oracle {_acts(moves)}")
        if s not in sigma:
            rep.problems.append(f"strategy undefined at state {s} after {_tr(z)}")
            continue
        U = sigma[s]
        if final and all(arena.is_env(a) for a in U):
            rep.plays += 1
            if not sat:
                rep.problems.append(f"play {_tr(z)} may stop without satisfying the specification")
        if len(z) >= max_depth:
            rep.truncated += 1
            continue
        for a, t in arena.succ(s):
            if a in U and a in moves:
                stack.append((t, z + (a,), frozenset(moves[a])))
    return rep


def check_strategy_plays(arena, sigma, problem, reasoner, worlds_per_context=3, seed=0,
                         max_depth=40, dedup=True):
    rep = PlayReport()
    for s0 in arena.initial:
        ctx = arena.contexts[arena.info[s0].context]
        for w in sample_worlds(reasoner, problem.bat, ctx.judgments, worlds_per_context, seed):
            check_plays(arena, sigma, problem, w, s0, max_depth, rep, dedup)
    return rep


def _tr(z):
    return "<" + ", ".join(str(a) for a in z) + ">"


def _acts(acts):
    return "{" + ", ".join(sorted(str(a) for a in acts)) + "}"


# ---------------------------------------------------------------- verification

@dataclass
class VerifyCheck:
    arena_ok: bool
    oracle_ok: bool
    exhausted: bool
    witness: tuple | None = None

    @property
    def agree(self):
        return self.arena_ok == self.oracle_ok


def oracle_verify(problem, worlds, depth=6):
    """(holds, exhausted, witness): whether every terminating execution up to
    ``depth`` satisfies the specification in every world.  ``exhausted``
    reports that no configuration at the depth bound could still move."""
    exhausted = True
    for w in worlds:
        execs = O.enumerate_executions(w, problem.program, depth)
        for z, final in sorted(execs.items(), key=lambda kv: len(kv[0])):
            if final and not T.eval_trace(w, (), z, problem.spec):
                return False, exhausted, z
        for z, rest in O.configurations(w, problem.program, depth + 1):
            if len(z) > depth:
                exhausted = False
                break
    return True, exhausted, None
