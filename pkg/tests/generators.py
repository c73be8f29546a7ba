"""Random instance generators shared by the test modules.

Everything takes an explicit ``random.Random`` so campaigns are reproducible.
"""

from __future__ import annotations

import itertools
import random

from gologsynth import arena as A
from gologsynth import bat as B
from gologsynth import logic as L
from gologsynth import ltlf as T
from gologsynth import oracle as O
from gologsynth import program as P
from gologsynth.reasoner import Universe

x, y = L.Var("x"), L.Var("y")
o1, o2 = L.Name("o1"), L.Name("o2")
p, q = L.Atom("p"), L.Atom("q")


def r(t):
    return L.Atom("r", (t,))


# ---------------------------------------------------------------- a small fixed domain

def small_bat(padding=0):
    """p, q nullary, r unary over {o1, o2}; actions a, b, c.

    a: +p, -r(o2)      b: -p, +q if p      c: -q, +r(x) for x = o1 or when p
    """
    ssas = {
        "p": B.SSA("p", (), positive=(B.EffectPair("a", ()),), negative=(B.EffectPair("b", ()),)),
        "q": B.SSA("q", (), positive=(B.EffectPair("b", (), kappa=p),),
                   negative=(B.EffectPair("c", ()),)),
        "r": B.SSA("r", (x,), positive=(B.EffectPair("c", (), epsilon=L.disj(L.Eq(x, o1), p)),),
                   negative=(B.EffectPair("a", (), epsilon=L.Eq(x, o2)),)),
    }
    return B.BasicActionTheory({"p": 0, "q": 0, "r": 1}, {"a": 0, "b": 0, "c": 0}, [], ssas,
                               Universe(("o1", "o2"), padding))


ACTIONS = [L.ActionTerm(n) for n in "abc"]

SENTENCES = [p, q, L.Exists(x, r(x)), r(o1), L.conj(p, L.neg(q)), L.Forall(x, r(x)),
             L.CountGeq(2, x, r(x))]


def fixed_worlds(bat, k=None):
    ws = O.worlds(bat)
    if k is None or k >= len(ws):
        return ws
    # spread over the valuation lattice
    step = len(ws) / k
    return [ws[int(i * step)] for i in range(k)]


def traces(actions, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(actions, repeat=n)


# ---------------------------------------------------------------- temporal formulas

def random_ltlf(rng, atoms, depth=4, max_nodes=14):
    """Formula over the given fluent sentences with temporal depth <= depth
    and at most about ``max_nodes`` operators."""
    budget = [max_nodes]

    def gen(d):
        budget[0] -= 1
        if d == 0 or budget[0] <= 0 or rng.random() < 0.25:
            c = rng.random()
            if c < 0.06:
                return T.TRUE
            if c < 0.1:
                return T.FALSE
            return T.TFluent(rng.choice(atoms))
        op = rng.choice(["not", "and", "or", "X", "WX", "U", "R", "F", "G", "and", "or"])
        if op == "not":
            return T.TNot(gen(d))
        if op in ("and", "or"):
            kids = [gen(d) for _ in range(rng.randint(2, 3 if budget[0] > 6 else 2))]
            return (T.TAnd if op == "and" else T.TOr)(*kids)
        if op == "X":
            return T.Next(gen(d - 1))
        if op == "WX":
            return T.WeakNext(gen(d - 1))
        if op == "F":
            return T.eventually(gen(d - 1))
        if op == "G":
            return T.always(gen(d - 1))
        return (T.Until if op == "U" else T.Release)(gen(d - 1), gen(d - 1))
    return gen(depth)


def temporal_depth(f):
    if isinstance(f, (T.Next, T.WeakNext)):
        return 1 + temporal_depth(f.body)
    if isinstance(f, (T.Until, T.Release)):
        return 1 + max(temporal_depth(f.left), temporal_depth(f.right))
    if isinstance(f, T.TNot):
        return temporal_depth(f.body)
    if isinstance(f, (T.TAnd, T.TOr)):
        return max(temporal_depth(c) for c in f.children)
    return 0


def fluent_atoms(f):
    if isinstance(f, T.TFluent):
        return {f.phi}
    out = set()
    for c in f._args:
        if isinstance(c, T.TNode):
            out |= fluent_atoms(c)
    return out


# ---------------------------------------------------------------- first-order formulas

def random_formula(rng, fluents, names, free=(), depth=3, quant=True):
    """C2 formula whose free variables are among ``free``; fluents maps
    name -> arity (arity <= 2)."""
    pool = [L.Var("x"), L.Var("y")]

    def term(scope):
        opts = list(names) + list(scope)
        return rng.choice(opts)

    def atom(scope):
        f = rng.choice(sorted(fluents))
        if rng.random() < 0.15 and (scope or names):
            return L.Eq(term(scope), term(scope))
        return L.Atom(f, tuple(term(scope) for _ in range(fluents[f])))

    def gen(d, scope):
        if d == 0 or rng.random() < 0.3:
            c = rng.random()
            if c < 0.05:
                return L.TOP
            if c < 0.1:
                return L.BOT
            return atom(scope)
        k = rng.random()
        if k < 0.2:
            return L.Not(gen(d - 1, scope))
        if k < 0.45:
            return L.And(gen(d - 1, scope), gen(d - 1, scope))
        if k < 0.7 or not quant:
            return L.Or(gen(d - 1, scope), gen(d - 1, scope))
        v = rng.choice(pool)
        body = gen(d - 1, tuple(sorted(set(scope) | {v}, key=lambda t: t.name)))
        kind = rng.choice(["A", "E", "E", "G", "L"])
        if kind == "A":
            return L.Forall(v, body)
        if kind == "E":
            return L.Exists(v, body)
        m = rng.randint(0, 2)
        return (L.CountGeq if kind == "G" else L.CountLeq)(m, v, body)

    return gen(depth, tuple(free))


# ---------------------------------------------------------------- basic action theories

def random_bat(rng, max_fluents=3, max_objects=2, max_actions=3):
    """Acyclic theory: descriptors of fluent i mention only fluents < i, so
    the fluent depth is at most 2."""
    nf = rng.randint(1, max_fluents)
    fl = {f"f{i}": rng.randint(0, 1) for i in range(nf)}
    na = rng.randint(1, max_actions)
    acts = {f"a{i}": rng.randint(0, 1) for i in range(na)}
    named = tuple(f"o{i}" for i in range(1, rng.randint(1, max_objects) + 1))
    names = [L.Name(n) for n in named]
    padding = rng.choice([0, 0, 1]) if len(named) < max_objects else 0
    u = Universe(named, padding)
    ssas = {}
    for i, (f, n) in enumerate(fl.items()):
        head = tuple(L.Var(v) for v in ("x",)[:n])
        lower = {g: fl[g] for g in list(fl)[:i]}
        sides = ([], [])
        for side in sides:
            for _ in range(rng.randint(0, 2)):
                a = rng.choice(sorted(acts))
                pat = []
                for _ in range(acts[a]):
                    c = rng.random()
                    if head and c < 0.5:
                        pat.append(head[0])
                    elif c < 0.8:
                        pat.append(L.Var("y"))
                    else:
                        pat.append(rng.choice(names))
                pv = tuple(dict.fromkeys(t for t in pat if isinstance(t, L.Var)))
                scope = tuple(dict.fromkeys(head + pv))
                eps = L.TOP
                if lower and rng.random() < 0.6:
                    eps = random_formula(rng, lower, names, scope, depth=2)
                elif scope and rng.random() < 0.3:
                    eps = L.Eq(scope[0], rng.choice(names))
                # context conditions may mention any fluent
                kappa = L.TOP
                if rng.random() < 0.4:
                    kvars = tuple(v for v in pv if v not in head)
                    kappa = random_formula(rng, fl, names, kvars, depth=2)
                side.append(B.EffectPair(a, tuple(pat), eps, kappa))
        ssas[f] = B.SSA(f, head, tuple(sides[0]), tuple(sides[1]))
    init = []
    if rng.random() < 0.5:
        init.append(random_formula(rng, fl, names, (), depth=2))
    bat = B.BasicActionTheory(fl, acts, init, ssas, u)
    B.check_acyclic(bat)
    return bat


# ---------------------------------------------------------------- programs

def random_program(rng, actions=ACTIONS, tests=SENTENCES, depth=3):
    def gen(d):
        if d == 0 or rng.random() < 0.2:
            if rng.random() < 0.75:
                return P.Act(rng.choice(actions))
            return P.Test(rng.choice(tests + [L.neg(t) for t in tests] + [L.TOP]))
        k = rng.choice(["seq", "seq", "choice", "choice", "conc", "star"])
        if k == "star":
            return P.Star(gen(d - 1))
        cls = {"seq": P.Seq, "choice": P.Choice, "conc": P.Conc}[k]
        return cls(gen(d - 1), gen(d - 1))
    return gen(depth)


def random_sd_program(rng, actions=ACTIONS, tests=SENTENCES, depth=3, tries=200):
    """A random program whose characteristic graph is situation determined."""
    for _ in range(tries):
        d = random_program(rng, actions, tests, depth)
        if P.check_situation_determined(P.characteristic_graph(d)):
            return d
    return P.Act(actions[0])


# ---------------------------------------------------------------- arenas

CTRL = [L.ActionTerm("c1"), L.ActionTerm("c2")]
ENV = [L.ActionTerm("e1"), L.ActionTerm("e2")]


def random_arena(rng, n=None, max_states=8):
    n = n or rng.randint(1, max_states)
    succ = []
    for _ in range(n):
        out = []
        for a in CTRL + ENV:
            if rng.random() < (0.45 if a in CTRL else 0.25):
                out.append((a, rng.randrange(n)))
        succ.append(tuple(out))
    final = {s for s in range(n) if rng.random() < 0.45}
    accepting = {s for s in range(n) if rng.random() < 0.5}
    initial = [0] if n == 1 or rng.random() < 0.8 else [0, rng.randrange(1, n)]
    return A.Arena(n, initial, final, accepting, succ, ENV)
