"""Translate a parsed problem file into core inputs.

Sugar expansions:  pick x:{n1..nk}. d  ->  d[x/n1] | ... | d[x/nk];
while c do d -> {test(c); d}*; test(!c);  if c then a else b ->
test(c); a | test(!c); b;  loop d -> d*;  d? -> d | nil;  @A(o) ->
test(Poss_A(o)); A(o).
"""

from __future__ import annotations

import logging

from .. import bat as B
from .. import logic as L
from .. import ltlf as T
from .. import program as P
from ..arena import Problem
from ..errors import NotSituationDeterminedError, ParseError
from ..reasoner import Reasoner, Universe, bounded_positions, unbounded_quantifiers
from . import syntax as S

log = logging.getLogger(__name__)


def desugar_program(sp, poss=None, env=None):
    """Core program for a surface program; ``poss`` maps action names to
    PossDecl, ``env`` maps pick variables to names."""
    poss = poss or {}
    env = env or {}

    def ground(phi):
        r = L.subst(phi, env) if env else phi
        if not L.is_sentence(r):
            raise ParseError(f"unbound variables {sorted(v.name for v in L.free_vars(r))} "
                             f"in program condition {L.fmt(r)}")
        return r

    if isinstance(sp, S.SNil):
        return P.NIL
    if isinstance(sp, S.SAct):
        args = []
        for a in sp.args:
            a = env.get(a, a)
            if not isinstance(a, L.Name):
                raise ParseError(f"unbound variable {a.name} in action {sp.name}")
            args.append(a)
        act = P.Act(L.ActionTerm(sp.name, tuple(args)))
        if sp.extended and sp.name in poss:
            d = poss[sp.name]
            pre = L.subst(d.formula, dict(zip(d.params, args)))
            return P.Seq(P.Test(pre), act)
        return act
    if isinstance(sp, S.STest):
        return P.Test(ground(sp.phi))
    if isinstance(sp, S.SSeq):
        return P.seq(*(desugar_program(x, poss, env) for x in sp.items))
    if isinstance(sp, S.SChoice):
        return P.choice(*(desugar_program(x, poss, env) for x in sp.items))
    if isinstance(sp, S.SConc):
        return P.conc(*(desugar_program(x, poss, env) for x in sp.items))
    if isinstance(sp, (S.SStar, S.SLoop)):
        return P.Star(desugar_program(sp.body, poss, env))
    if isinstance(sp, S.SOpt):
        return P.Choice(desugar_program(sp.body, poss, env), P.NIL)
    if isinstance(sp, S.SWhile):
        c = ground(sp.cond)
        return P.Seq(P.Star(P.Seq(P.Test(c), desugar_program(sp.body, poss, env))),
                     P.Test(L.neg(c)))
    if isinstance(sp, S.SIf):
        c = ground(sp.cond)
        return P.Choice(P.Seq(P.Test(c), desugar_program(sp.then, poss, env)),
                        P.Seq(P.Test(L.neg(c)), desugar_program(sp.other, poss, env)))
    if isinstance(sp, S.SPick):
        (v, names), rest = sp.bindings[0], sp.bindings[1:]
        body = S.SPick(rest, sp.body) if rest else sp.body
        return P.choice(*(desugar_program(body, poss, {**env, v: n}) for n in names))
    raise TypeError(repr(sp))


def build_bat(pf, padding=1):
    ssas = {s.fluent: B.SSA(s.fluent, s.params, s.positive, s.negative) for s in pf.ssas}
    poss = {d.action: B.PossAxiom(d.action, d.params, d.formula) for d in pf.preconditions}
    bat = B.BasicActionTheory(dict(pf.fluents), dict(pf.actions), frozenset(pf.initial),
                              ssas, Universe([L.Name(o) for o in pf.objects], padding), poss)
    B.check_acyclic(bat)
    return bat


def desugar(pf, padding=1, check_determined=True):
    """(Problem, warnings) for a parsed file."""
    bat = build_bat(pf, padding)
    poss = {d.action: d for d in pf.preconditions}
    prog = desugar_program(pf.program, poss)
    if check_determined:
        g = P.characteristic_graph(prog)
        bad = P.find_nondeterminism(g)
        if bad is not None:
            node, act = bad
            raise NotSituationDeterminedError(
                f"program is not situation-determined: action {L.fmt(act)} labels two edges "
                f"at node {P.pfmt(node)}")
    problem = Problem(bat, prog, pf.spec, frozenset(pf.environment), name=pf.source or "")
    return problem, quantifier_warnings(pf, bat, prog)


def _spec_sentences(f, out):
    if isinstance(f, T.TFluent):
        out.append(f.phi)
    elif isinstance(f, (T.TNot, T.Next, T.WeakNext)):
        _spec_sentences(f.body, out)
    elif isinstance(f, (T.TAnd, T.TOr)):
        for c in f.children:
            _spec_sentences(c, out)
    elif isinstance(f, (T.Until, T.Release)):
        _spec_sentences(f.left, out)
        _spec_sentences(f.right, out)
    return out


def quantifier_warnings(pf, bat, prog):
    """Quantifiers whose truth may depend on the number of padding objects.

    A fluent position counts as bounded when the initial theory confines it
    to named objects and every positive effect takes that argument from the
    action (whose arguments are always named)."""
    r = Reasoner(bat.theory())
    if not r.base_consistent:
        return []
    bounded = set()
    for f, i in bounded_positions(r, dict(pf.fluents)):
        head = bat.ssas[f].params[i]
        if all(head in e.pattern for e in bat.ssas[f].positive):
            bounded.add((f, i))
    formulas = list(pf.initial) + _spec_sentences(pf.spec, []) + sorted(P.tests_of(prog), key=L.sort_key)
    for s in pf.ssas:
        for e in s.positive + s.negative:
            formulas += [e.epsilon, e.kappa]
    out = []
    seen = set()
    for phi in formulas:
        for q in unbounded_quantifiers(phi, bounded):
            key = L.fmt(q)
            if key not in seen:
                seen.add(key)
                out.append(key)
    return out
