"""Temporal formulas over finite traces whose atoms are fluent sentences.

Provides negation normal form, the tail-normal form (TNF) that makes the
``Tail`` marker explicit, the next-normal form (XNF) that unrolls one step,
and prime-implicant enumeration over the propositional abstraction.
"""

from __future__ import annotations

import itertools

from . import logic as L
from .errors import NotNNFError
from .logic import Node

__all__ = [
    "TFluent", "TTail", "TTrue", "TFalse", "TNot", "TAnd", "TOr", "Next",
    "WeakNext", "Until", "Release", "TAIL", "TRUE", "FALSE", "tand", "tor",
    "tnot", "eventually", "always", "timplies", "nnf", "is_nnf", "tnf",
    "tnft", "xnf", "tcanon", "propositional_atoms", "enumerate_assignments",
    "PropAssignment", "eval_trace", "tfmt",
]


class TNode(Node):
    __slots__ = ()

    def __str__(self):
        return tfmt(self)

    def __repr__(self):
        return f"{type(self).__name__}<{tfmt(self)}>"

    def __lt__(self, other):
        return tfmt(self) < tfmt(other)


class TFluent(TNode):
    __slots__ = ()

    def __new__(cls, phi):
        if not L.is_sentence(phi):
            raise ValueError(f"temporal atom must be a sentence: {L.fmt(phi)}")
        return Node.__new__(cls, phi)

    @property
    def phi(self):
        return self._args[0]


class TTail(TNode):
    __slots__ = ()


class TTrue(TNode):
    __slots__ = ()


class TFalse(TNode):
    __slots__ = ()


TAIL = TTail()
TRUE = TTrue()
FALSE = TFalse()


class TNot(TNode):
    __slots__ = ()

    @property
    def body(self):
        return self._args[0]


class TAnd(TNode):
    __slots__ = ()

    @property
    def children(self):
        return self._args


class TOr(TNode):
    __slots__ = ()

    @property
    def children(self):
        return self._args


class Next(TNode):
    __slots__ = ()

    @property
    def body(self):
        return self._args[0]


class WeakNext(TNode):
    __slots__ = ()

    @property
    def body(self):
        return self._args[0]


class Until(TNode):
    __slots__ = ()

    @property
    def left(self):
        return self._args[0]

    @property
    def right(self):
        return self._args[1]


class Release(TNode):
    __slots__ = ()

    @property
    def left(self):
        return self._args[0]

    @property
    def right(self):
        return self._args[1]


# ---------------------------------------------------------------- builders

def tand(*xs):
    return xs[0] if len(xs) == 1 else TAnd(*xs)


def tor(*xs):
    return xs[0] if len(xs) == 1 else TOr(*xs)


def tnot(x):
    return TNot(x)


def eventually(x):
    return Until(TRUE, x)


def always(x):
    return TNot(eventually(TNot(x)))


def timplies(a, b):
    return TOr(TNot(a), b)


# ---------------------------------------------------------------- printing

_TSTR: dict = {}


def tfmt(f):
    s = _TSTR.get(f)
    if s is None:
        s = _tfmt(f, 0)
        _TSTR[f] = s
    return s


def _tfmt(f, ctx):
    if isinstance(f, TFluent):
        s = L.fmt(f.phi)
        if isinstance(f.phi, (L.And, L.Or, L.Forall, L.Exists, L.CountGeq, L.CountLeq)) \
                or isinstance(f.phi, L.Eq) or (isinstance(f.phi, L.Not) and isinstance(f.phi.body, L.Eq)):
            return f"[{s}]"
        return s
    if f is TAIL:
        return "Tail"
    if f is TRUE:
        return "true"
    if f is FALSE:
        return "false"
    if isinstance(f, TNot):
        return "!" + _tfmt(f.body, 9)
    if isinstance(f, Next):
        return "X " + _tfmt(f.body, 9)
    if isinstance(f, WeakNext):
        return "WX " + _tfmt(f.body, 9)
    if isinstance(f, (TAnd, TOr)):
        p = 2 if isinstance(f, TAnd) else 1
        op = " & " if p == 2 else " | "
        s = op.join(_tfmt(c, p + 1) for c in f.children)
        return f"({s})" if ctx > p else s
    if isinstance(f, (Until, Release)):
        op = " U " if isinstance(f, Until) else " R "
        s = _tfmt(f.left, 4) + op + _tfmt(f.right, 4)
        return f"({s})" if ctx > 3 else s
    raise TypeError(repr(f))


# ---------------------------------------------------------------- NNF

_NNF: dict = {}


def nnf(f, pos=True):
    """Push negations to fluent atoms and Tail; X and WX are duals."""
    key = (f, pos)
    r = _NNF.get(key)
    if r is not None:
        return r
    if isinstance(f, (TFluent, TTail)):
        r = f if pos else TNot(f)
    elif f is TRUE or f is FALSE:
        r = f if pos else (FALSE if f is TRUE else TRUE)
    elif isinstance(f, TNot):
        r = nnf(f.body, not pos)
    elif isinstance(f, (TAnd, TOr)):
        kids = tuple(nnf(c, pos) for c in f.children)
        r = (TAnd if isinstance(f, TAnd) == pos else TOr)(*kids)
    elif isinstance(f, Next):
        r = Next(nnf(f.body)) if pos else WeakNext(nnf(f.body, False))
    elif isinstance(f, WeakNext):
        r = WeakNext(nnf(f.body)) if pos else Next(nnf(f.body, False))
    elif isinstance(f, Until):
        r = Until(nnf(f.left), nnf(f.right)) if pos else \
            Release(nnf(f.left, False), nnf(f.right, False))
    elif isinstance(f, Release):
        r = Release(nnf(f.left), nnf(f.right)) if pos else \
            Until(nnf(f.left, False), nnf(f.right, False))
    else:
        raise TypeError(repr(f))
    _NNF[key] = r
    return r


def is_nnf(f):
    if isinstance(f, TNot):
        return isinstance(f.body, (TFluent, TTail))
    if isinstance(f, (TAnd, TOr)):
        return all(is_nnf(c) for c in f.children)
    if isinstance(f, (Next, WeakNext)):
        return is_nnf(f.body)
    if isinstance(f, (Until, Release)):
        return is_nnf(f.left) and is_nnf(f.right)
    return True


def _is_fluent_literal(f):
    if isinstance(f, TNot):
        f = f.body
    return isinstance(f, TFluent)


# ---------------------------------------------------------------- TNF / XNF

NOT_TAIL = TNot(TAIL)


def tnft(f):
    """Tail-marking translation; input must be in NNF."""
    if f is TRUE or f is FALSE or _is_fluent_literal(f) or f is TAIL or f == NOT_TAIL:
        return f
    if isinstance(f, Next):
        return TAnd(NOT_TAIL, Next(tnft(f.body)))
    if isinstance(f, WeakNext):
        return TOr(TAIL, Next(tnft(f.body)))
    if isinstance(f, TAnd):
        return TAnd(*(tnft(c) for c in f.children))
    if isinstance(f, TOr):
        return TOr(*(tnft(c) for c in f.children))
    if isinstance(f, Until):
        return Until(TAnd(NOT_TAIL, tnft(f.left)), tnft(f.right))
    if isinstance(f, Release):
        return Release(TOr(TAIL, tnft(f.left)), tnft(f.right))
    raise NotNNFError(f"not in negation normal form: {tfmt(f)}")


def tnf(f):
    if not is_nnf(f):
        raise NotNNFError(f"not in negation normal form: {tfmt(f)}")
    return TAnd(tnft(f), Until(TRUE, TAIL))


def xnf(f):
    """Next normal form: temporal operators appear only under X."""
    if isinstance(f, (TAnd, TOr)):
        return type(f)(*(xnf(c) for c in f.children))
    if isinstance(f, Until):
        return TOr(xnf(f.right), TAnd(xnf(f.left), Next(f)))
    if isinstance(f, Release):
        return TAnd(xnf(f.right), TOr(xnf(f.left), Next(f)))
    return f


# ---------------------------------------------------------------- canonical form

def _tcomp(lit):
    return lit.body if isinstance(lit, TNot) else TNot(lit)


def _is_tlit(f):
    if isinstance(f, TNot):
        f = f.body
    return isinstance(f, (TFluent, TTail))


_TC: dict = {}


def tcanon(f):
    """Flatten/sort/deduplicate junctions, fold constants, canonicalise the
    fluent sentences.  Equivalence preserving."""
    r = _TC.get(f)
    if r is not None:
        return r
    if isinstance(f, TFluent):
        phi = L.canonicalize(f.phi)
        if phi is L.TOP:
            r = TRUE
        elif phi is L.BOT:
            r = FALSE
        elif isinstance(phi, L.Not):
            r = TNot(TFluent(phi.body))
        else:
            r = TFluent(phi)
    elif isinstance(f, TNot):
        b = tcanon(f.body)
        if b is TRUE:
            r = FALSE
        elif b is FALSE:
            r = TRUE
        elif isinstance(b, TNot):
            r = b.body
        elif _is_tlit(b):
            r = TNot(b)
        else:
            r = tcanon(nnf(b, False))
    elif isinstance(f, (TAnd, TOr)):
        is_and = isinstance(f, TAnd)
        unit, zero = (TRUE, FALSE) if is_and else (FALSE, TRUE)
        out = set()
        r = None
        for c in f.children:
            c = tcanon(c)
            if c is zero:
                r = zero
                break
            if c is unit:
                continue
            if isinstance(c, type(f)):
                out.update(c.children)
            else:
                out.add(c)
        if r is None:
            if any(_is_tlit(c) and _tcomp(c) in out for c in out):
                r = zero
            elif not out:
                r = unit
            elif len(out) == 1:
                r = next(iter(out))
            else:
                r = type(f)(*sorted(out, key=tfmt))
    elif isinstance(f, Next):
        b = tcanon(f.body)
        r = FALSE if b is FALSE else Next(b)
    elif isinstance(f, WeakNext):
        b = tcanon(f.body)
        r = TRUE if b is TRUE else WeakNext(b)
    elif isinstance(f, (Until, Release)):
        a, b = tcanon(f.left), tcanon(f.right)
        if b is TRUE or b is FALSE:
            r = b
        elif isinstance(f, Until) and a is FALSE:
            r = b
        elif isinstance(f, Release) and a is TRUE:
            r = b
        else:
            r = type(f)(a, b)
    else:
        r = f
    _TC[f] = r
    _TC[r] = r
    return r


# ---------------------------------------------------------------- propositional view

def _is_patom(f):
    return isinstance(f, (TFluent, TTail, Next, WeakNext, Until, Release))


def propositional_atoms(f):
    """Atoms of the propositional abstraction: fluent sentences, Tail and
    maximal temporal subformulas."""
    if _is_patom(f):
        return {f}
    if isinstance(f, TNot):
        return propositional_atoms(f.body)
    if isinstance(f, (TAnd, TOr)):
        out = set()
        for c in f.children:
            out |= propositional_atoms(c)
        return out
    return set()


def _consistent(term):
    return not any((a, not s) in term for a, s in term)


def _minimize(terms):
    terms = sorted(set(terms), key=len)
    out = []
    for t in terms:
        if not any(o <= t for o in out):
            out.append(t)
    return out


def _dnf(f):
    if f is TRUE:
        return [frozenset()]
    if f is FALSE:
        return []
    if _is_patom(f):
        return [frozenset([(f, True)])]
    if isinstance(f, TNot):
        if not _is_patom(f.body):
            return _dnf(nnf(f.body, False))
        return [frozenset([(f.body, False)])]
    if isinstance(f, TOr):
        return _minimize(t for c in f.children for t in _dnf(c))
    if isinstance(f, TAnd):
        acc = [frozenset()]
        for c in f.children:
            acc = _minimize(a | b for a in acc for b in _dnf(c) if _consistent(a | b))
            if not acc:
                break
        return acc
    raise TypeError(repr(f))


def prime_implicants(f):
    """All prime implicants of the propositional abstraction (Blake closure)."""
    terms = _minimize(_dnf(f))
    changed = True
    while changed:
        changed = False
        for t1, t2 in itertools.combinations(list(terms), 2):
            clash = [(a, s) for a, s in t1 if (a, not s) in t2]
            if len(clash) != 1:
                continue
            a, s = clash[0]
            c = (t1 | t2) - {(a, True), (a, False)}
            if any(t <= c for t in terms):
                continue
            terms = [t for t in terms if not c <= t] + [c]
            changed = True
            break
    return sorted(terms, key=lambda t: (len(t), sorted((tfmt(a), s) for a, s in t)))


class PropAssignment:
    """A prime implicant, viewed as fluent literals L, next-obligations X and
    the tail flag T."""

    __slots__ = ("literals", "fluent_literals", "X", "T")

    def __init__(self, literals):
        self.literals = frozenset(literals)
        fl, xs, t = [], set(), False
        for a, s in self.literals:
            if isinstance(a, TFluent):
                fl.append((a.phi, s))
            elif a is TAIL:
                t = s
            elif isinstance(a, Next):
                if not s:
                    raise ValueError("negated X literal in an assignment of an NNF formula")
                xs.add(a.body)
            else:
                raise ValueError(f"atom {tfmt(a)} outside next normal form")
        self.fluent_literals = tuple(sorted(fl, key=lambda p: (L.sort_key(p[0]), p[1])))
        self.X = frozenset(xs)
        self.T = t

    @property
    def L(self):
        """Fluent literals as sentences."""
        return tuple(phi if s else L.neg(phi) for phi, s in self.fluent_literals)

    def __eq__(self, other):
        return isinstance(other, PropAssignment) and self.literals == other.literals

    def __hash__(self):
        return hash(self.literals)

    def __repr__(self):
        lits = ", ".join(("" if s else "!") + tfmt(a) for a, s in
                         sorted(self.literals, key=lambda p: tfmt(p[0])))
        return f"PropAssignment({{{lits}}})"


_ASSIGN: dict = {}


def enumerate_assignments(f):
    """Prime-implicant assignments of an XNF formula, deterministic order."""
    r = _ASSIGN.get(f)
    if r is None:
        r = tuple(PropAssignment(t) for t in prime_implicants(f))
        _ASSIGN[f] = r
    return r


# ---------------------------------------------------------------- finite-trace semantics

def eval_trace(world, z, zp, f):
    """Truth of f at situation z with remaining trace zp in ``world``.

    ``world.holds(phi, situation)`` must decide fluent sentences.  Tail holds
    exactly when the remaining trace is empty.
    """
    full = tuple(z) + tuple(zp)
    s, m = len(z), len(zp)
    # truth vectors are bitmasks: bit k is the value at position s + k
    ones = (1 << (m + 1)) - 1
    last = 1 << m
    memo = {}

    def ev(g):
        v = memo.get(g)
        if v is not None:
            return v
        c = type(g)
        if c is TFluent:
            phi = g.phi
            v = 0
            for k in range(m + 1):
                if world.holds(phi, full[:s + k]):
                    v |= 1 << k
        elif c is TAnd:
            v = ones
            for ch in g.children:
                v &= ev(ch)
        elif c is TOr:
            v = 0
            for ch in g.children:
                v |= ev(ch)
        elif c is TNot:
            v = ones & ~ev(g.body)
        elif c is Next:
            v = ev(g.body) >> 1
        elif c is WeakNext:
            v = (ev(g.body) >> 1) | last
        elif c is Until or c is Release:
            a, b = ev(g.left), ev(g.right)
            v = b & last
            until = c is Until
            for k in range(m - 1, -1, -1):
                bit = 1 << k
                nxt = (v >> 1) & bit
                if until:
                    if b & bit or (a & bit and nxt):
                        v |= bit
                elif b & bit and (a & bit or nxt):
                    v |= bit
        elif g is TAIL:
            v = last
        elif g is TRUE:
            v = ones
        elif g is FALSE:
            v = 0
        else:
            raise TypeError(repr(g))
        memo[g] = v
        return v

    return bool(ev(f) & 1)
