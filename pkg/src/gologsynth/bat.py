"""Basic action theories with local-effect successor state axioms.

Effects are tracked symbolically: an effect set records which fluent
instances an action sequence may have made true or false, and regression
rewrites a query about the current situation into one about the initial
situation.
"""

from __future__ import annotations

import itertools
import math
import logging
from dataclasses import dataclass, field

import networkx as nx

from . import logic as L
from .errors import CyclicTheoryError, ResourceLimitError, SortError
from .logic import Node
from .reasoner import TheoryHandle, Universe

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EffectPair:
    """One disjunct of a SSA side: action pattern, effect descriptor eps and
    context condition kappa."""

    action: str
    pattern: tuple
    epsilon: object = L.TOP
    kappa: object = L.TOP

    def pattern_vars(self):
        return [t for t in self.pattern if isinstance(t, L.Var)]


@dataclass(frozen=True)
class SSA:
    fluent: str
    params: tuple
    positive: tuple = ()
    negative: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "positive", tuple(self.positive))
        object.__setattr__(self, "negative", tuple(self.negative))
        if len(set(self.params)) != len(self.params):
            raise SortError(f"repeated head variable in SSA for {self.fluent}")
        head = set(self.params)
        for p in self.positive + self.negative:
            pv = set(p.pattern_vars())
            extra = L.free_vars(p.epsilon) - head - pv
            if extra:
                raise SortError(f"effect descriptor of {self.fluent} has stray variables "
                                f"{sorted(v.name for v in extra)}")
            extra = L.free_vars(p.kappa) - pv
            if extra:
                raise SortError(f"context condition of {self.fluent} mentions "
                                f"{sorted(v.name for v in extra)} outside the action pattern")

    @property
    def rigid(self):
        return not self.positive and not self.negative


@dataclass(frozen=True)
class PossAxiom:
    action: str
    params: tuple
    formula: object


class EffectLiteral(Node):
    """<F+, eps> or <F-, eps>; eps has the fluent's SSA head variables free."""

    __slots__ = ()

    def __new__(cls, fluent, positive, params, epsilon):
        return Node.__new__(cls, fluent, bool(positive), tuple(params), epsilon)

    @property
    def fluent(self):
        return self._args[0]

    @property
    def positive(self):
        return self._args[1]

    @property
    def params(self):
        return self._args[2]

    @property
    def epsilon(self):
        return self._args[3]

    def __str__(self):
        sign = "+" if self.positive else "-"
        head = f"{self.fluent}({', '.join(p.name for p in self.params)})" if self.params else self.fluent
        return f"<{head}{sign}, {L.fmt(self.epsilon)}>"

    __repr__ = __str__

    def __lt__(self, other):
        return _lit_key(self) < _lit_key(other)


def _lit_key(l):
    return (l.fluent, not l.positive, L.sort_key(l.epsilon))


def effect_literal(fluent, positive, params, epsilon):
    return EffectLiteral(fluent, positive, params, L.canonicalize(epsilon))


def effect_set(literals):
    """Canonical effect set: descriptors canonicalised, vacuous ones dropped."""
    out = set()
    for l in literals:
        eps = L.canonicalize(l.epsilon)
        if eps is L.BOT:
            continue
        out.add(l if eps is l.epsilon else EffectLiteral(l.fluent, l.positive, l.params, eps))
    return frozenset(out)


EMPTY = frozenset()


def sorted_effects(E):
    return sorted(E, key=_lit_key)


# ---------------------------------------------------------------- the theory

@dataclass
class BasicActionTheory:
    fluents: dict
    actions: dict
    initial: frozenset
    ssas: dict
    universe: Universe
    poss: dict = field(default_factory=dict)

    def __post_init__(self):
        self.initial = frozenset(self.initial)
        for f, n in self.fluents.items():
            if f not in self.ssas:
                params = tuple(L.Var(f"x{i}") for i in range(1, n + 1))
                self.ssas[f] = SSA(f, params)
            elif len(self.ssas[f].params) != n:
                raise SortError(f"SSA for {f} has {len(self.ssas[f].params)} parameters, arity is {n}")
        for f, s in self.ssas.items():
            if f not in self.fluents:
                raise SortError(f"SSA for undeclared fluent {f}")
            for p in s.positive + s.negative:
                if p.action not in self.actions:
                    raise SortError(f"SSA for {f} mentions undeclared action {p.action}")
                if len(p.pattern) != self.actions[p.action]:
                    raise SortError(f"action {p.action} used with {len(p.pattern)} arguments")
        self._inst = {}

    def theory(self):
        return TheoryHandle(self.initial, self.universe)

    def ground_actions(self):
        objs = self.universe.named
        for a, n in sorted(self.actions.items()):
            for args in itertools.product(objs, repeat=n):
                yield L.ActionTerm(a, args)

    def poss_formula(self, action):
        ax = self.poss.get(action.function)
        if ax is None:
            return L.TOP
        return L.subst(ax.formula, dict(zip(ax.params, action.args)))

    def instantiate(self, fluent, action):
        key = (fluent, action)
        r = self._inst.get(key)
        if r is None:
            r = instantiate_ssa(self.ssas[fluent], action)
            self._inst[key] = r
        return r

    def effect_fluents(self):
        return sorted(f for f, s in self.ssas.items() if not s.rigid)


# ---------------------------------------------------------------- instantiation

def _match(pair, head, action):
    if pair.action != action.function or len(pair.pattern) != len(action.args):
        return None
    eqs, binding, heads = [], {}, {}
    for p, n in zip(pair.pattern, action.args):
        if isinstance(p, L.Name):
            if p is not n:
                return None
        elif p in head:
            eqs.append(L.Eq(p, n))
            heads.setdefault(p, n)
        else:
            if binding.get(p, n) is not n:
                return None
            binding[p] = n
    return eqs, binding, heads


def instantiate_ssa(ssa, action):
    """[[gamma^+_F]]_alpha and [[gamma^-_F]]_alpha as lists of (eps, kappa):
    eps has the head variables free, kappa is a sentence."""
    head = set(ssa.params)
    result = []
    for side in (ssa.positive, ssa.negative):
        out = []
        for pair in side:
            m = _match(pair, head, action)
            if m is None:
                continue
            eqs, binding, heads = m
            eps = L.canonicalize(L.conj(L.subst(pair.epsilon, binding), *eqs))
            kappa = L.canonicalize(L.subst(pair.kappa, {**binding, **heads}))
            if eps is L.BOT or kappa is L.BOT:
                continue
            out.append((eps, kappa))
        # identical descriptors from different pairs merge their contexts
        merged = {}
        for eps, kappa in out:
            merged.setdefault(eps, []).append(kappa)
        result.append(tuple((eps, L.canonicalize(L.disj(*ks))) for eps, ks in
                            sorted(merged.items(), key=lambda kv: L.sort_key(kv[0]))))
    return tuple(result)


# ---------------------------------------------------------------- dependencies

def dependency_graph(bat):
    """Edge F -> F' iff F' occurs in an effect descriptor of F's SSA."""
    g = nx.DiGraph()
    g.add_nodes_from(bat.fluents)
    for f, s in bat.ssas.items():
        for p in s.positive + s.negative:
            for f2 in L.fluents_of(p.epsilon):
                g.add_edge(f, f2)
    return g


def check_acyclic(bat):
    g = dependency_graph(bat)
    try:
        cyc = nx.find_cycle(g)
    except nx.NetworkXNoCycle:
        return g
    raise CyclicTheoryError([u for u, _ in cyc] + [cyc[0][0]])


def fluent_depth(bat):
    """Length of the longest dependency path starting at each fluent."""
    g = check_acyclic(bat)
    depth = {}
    for f in reversed(list(nx.topological_sort(g))):
        depth[f] = max((depth[s] + 1 for s in g.successors(f)), default=0)
    return depth


# ---------------------------------------------------------------- regression

def _by_fluent(E):
    groups = {}
    for l in E:
        groups.setdefault(l.fluent, ([], []))[0 if l.positive else 1].append(l)
    return groups


_REGRESS: dict = {}


def regress(E, phi):
    """R[E, phi]: phi evaluated after the effects E, as a formula about the
    situation before them."""
    if not E:
        return phi
    key = (E, phi)
    r = _REGRESS.get(key)
    if r is None:
        groups = _by_fluent(E)
        r = L.canonicalize(_regress(phi, groups, {}))
        _REGRESS[key] = r
    return r


def _regress(phi, groups, memo):
    r = memo.get(phi)
    if r is not None:
        return r
    if isinstance(phi, L.Atom):
        g = groups.get(phi.fluent)
        if g is None:
            r = phi
        else:
            pos, negs = g
            sub = lambda l: L.subst(l.epsilon, dict(zip(l.params, phi.args)))
            keep = L.conj(phi, *(L.neg(sub(l)) for l in sorted_effects(negs)))
            r = L.disj(keep, *(sub(l) for l in sorted_effects(pos)))
    elif isinstance(phi, L.Not):
        r = L.Not(_regress(phi.body, groups, memo))
    elif isinstance(phi, (L.And, L.Or)):
        r = type(phi)(*(_regress(c, groups, memo) for c in phi.children))
    elif isinstance(phi, (L.Forall, L.Exists)):
        r = type(phi)(phi.var, _regress(phi.body, groups, memo))
    elif isinstance(phi, (L.CountGeq, L.CountLeq)):
        r = type(phi)(phi.m, phi.var, _regress(phi.body, groups, memo))
    else:
        r = phi
    memo[phi] = r
    return r


class SplitRequest(Exception):
    """Raised when a sentence is open in the current context; the caller
    refines the context on it and retries."""

    def __init__(self, sentence):
        super().__init__(L.fmt(sentence))
        self.sentence = sentence


def effects_of(ctx, E, action, bat):
    """Effects of ``action`` after accumulated effects E in context ``ctx``.

    ``ctx.truth(sentence)`` must return True, False, or None (open); an open
    context condition raises SplitRequest.
    """
    out = []
    for f in bat.effect_fluents():
        ssa = bat.ssas[f]
        pos, neg = bat.instantiate(f, action)
        for sign, pairs in ((True, pos), (False, neg)):
            for eps, kappa in pairs:
                if kappa is L.TOP:
                    v = True
                else:
                    q = regress(E, kappa)
                    v = ctx.truth(q)
                    if v is None:
                        raise SplitRequest(q)
                if v:
                    out.append(EffectLiteral(f, sign, ssa.params, eps))
    return effect_set(out)


_ACC: dict = {}


def accumulate(E0, E1):
    """E0 followed by E1, where E1's descriptors refer to the situation
    reached after E0."""
    key = (E0, E1)
    r = _ACC.get(key)
    if r is not None:
        return r
    out = [EffectLiteral(l.fluent, l.positive, l.params, regress(E0, l.epsilon)) for l in E1]
    neg1 = {}
    for l in out:
        if not l.positive:
            neg1.setdefault(l.fluent, []).append(l)
    for l in E0:
        if l.positive:
            blocks = [L.neg(L.subst(n.epsilon, dict(zip(n.params, l.params))))
                      for n in neg1.get(l.fluent, ())]
            out.append(EffectLiteral(l.fluent, True, l.params, L.conj(l.epsilon, *blocks)))
        else:
            out.append(l)
    r = effect_set(out)
    _ACC[key] = r
    return r


class EvalContext:
    """Context that answers by evaluating regressed sentences in a fixed
    initial valuation (used by the oracle-based tests)."""

    def __init__(self, holds):
        self._holds = holds

    def truth(self, sentence):
        return bool(self._holds(sentence))


# ---------------------------------------------------------------- relevant effects

def relevant_effects(bat, actions=None, limit=20000):
    """The stratified set of all effect literals regression can ever need,
    stratum by fluent depth.  Doubly exponential in general; raises
    ResourceLimitError past ``limit`` candidate combinations."""
    depth = fluent_depth(bat)
    actions = list(actions if actions is not None else bat.ground_actions())
    descs = {}
    for f in bat.effect_fluents():
        pos, neg = set(), set()
        for a in actions:
            p, n = bat.instantiate(f, a)
            pos.update(e for e, _ in p)
            neg.update(e for e, _ in n)
        descs[f] = (sorted(pos, key=L.sort_key), sorted(neg, key=L.sort_key))
    levels = max(depth.values(), default=0)
    strata = []
    acc = set()
    budget = [0]

    def spend(n):
        budget[0] += n
        if budget[0] > limit:
            raise ResourceLimitError("relevant-effect enumeration exceeds limit", {"limit": limit})

    for i in range(levels + 1):
        layer = set(acc)
        for f in bat.effect_fluents():
            if depth[f] > i:
                continue
            ssa = bat.ssas[f]
            pos, neg = descs[f]
            deps = set()
            for e in pos + neg:
                deps |= set(L.fluents_of(e))
            below = sorted((l for l in acc if l.fluent in deps), key=_lit_key)
            subsets = []
            for k in range(len(below) + 1):
                spend(math.comb(len(below), k))
                subsets.extend(frozenset(c) for c in itertools.combinations(below, k))
            for e in neg:
                for E in subsets:
                    layer.add(effect_literal(f, False, ssa.params, regress(E, e)))
            negatives = sorted({regress(E, e) for e in neg for E in subsets}, key=L.sort_key)
            spend(2 ** len(negatives) * max(1, len(pos)) * len(subsets))
            for e in pos:
                bases = {regress(E, e) for E in subsets}
                for k in range(len(negatives) + 1):
                    for X in itertools.combinations(negatives, k):
                        for b in bases:
                            layer.add(effect_literal(
                                f, True, ssa.params, L.conj(b, *(L.neg(x) for x in X))))
        layer = {l for l in layer if l.epsilon is not L.BOT}
        strata.append(frozenset(layer))
        acc = layer
    return strata[-1] if strata else frozenset()

