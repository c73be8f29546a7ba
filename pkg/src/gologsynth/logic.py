"""Fluent formulas: first-order sentences over standard names.

Formulas are immutable and hash-consed, so structural equality coincides with
identity and hashing is O(1).  The two-variable counting fragment is enforced
only where it matters (``check_c2``); the AST itself is general first-order.
"""

from __future__ import annotations

import itertools

from .errors import C2Error, SortError

__all__ = [
    "Node", "Var", "Name", "ActionTerm", "Atom", "Eq", "Top", "Bot", "Not",
    "And", "Or", "Forall", "Exists", "CountGeq", "CountLeq", "TOP", "BOT",
    "conj", "disj", "neg", "implies", "iff", "neq", "free_vars", "variables",
    "fluents_of", "names_of", "substitute", "subst", "to_nnf", "check_c2",
    "canonicalize", "is_literal", "is_sentence", "fmt", "sort_key",
    "complement",
]


class Node:
    """Base of all interned syntax nodes.

    Subclasses never define ``__init__``; the positional constructor arguments
    become ``_args`` and the pair (class, args) is the interning key.
    """

    __slots__ = ("_args", "__weakref__")
    _table: dict = {}

    def __new__(cls, *args):
        key = (cls, args)
        node = Node._table.get(key)
        if node is None:
            node = object.__new__(cls)
            node._args = args
            Node._table[key] = node
        return node

    def __reduce__(self):
        return (type(self), self._args)

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __str__(self):
        return fmt(self)

    def __repr__(self):
        return f"{type(self).__name__}<{fmt(self)}>"

    def __lt__(self, other):
        return sort_key(self) < sort_key(other)


# ---------------------------------------------------------------- terms

class Var(Node):
    __slots__ = ()
    sort = "object"

    @property
    def name(self):
        return self._args[0]


class Name(Node):
    """A standard name of sort object."""

    __slots__ = ()
    sort = "object"

    @property
    def text(self):
        return self._args[0]


class ActionTerm(Node):
    """A ground action A(n1,...,nk); standard name of sort action."""

    __slots__ = ()
    sort = "action"

    def __new__(cls, function, args=()):
        args = tuple(args)
        for a in args:
            if not isinstance(a, Name):
                raise SortError(f"action argument {a!r} is not an object name")
        return Node.__new__(cls, function, args)

    @property
    def function(self):
        return self._args[0]

    @property
    def args(self):
        return self._args[1]


# ---------------------------------------------------------------- formulas

class Formula(Node):
    __slots__ = ()


class Top(Formula):
    __slots__ = ()


class Bot(Formula):
    __slots__ = ()


TOP = Top()
BOT = Bot()


class Atom(Formula):
    __slots__ = ()

    def __new__(cls, fluent, args=()):
        args = tuple(args)
        for a in args:
            if not isinstance(a, (Var, Name)):
                raise SortError(f"fluent argument {a!r} must be an object term")
        return Node.__new__(cls, fluent, args)

    @property
    def fluent(self):
        return self._args[0]

    @property
    def args(self):
        return self._args[1]


class Eq(Formula):
    __slots__ = ()

    def __new__(cls, left, right):
        for a in (left, right):
            if not isinstance(a, (Var, Name)):
                raise SortError(f"equality argument {a!r} must be an object term")
        return Node.__new__(cls, left, right)

    @property
    def left(self):
        return self._args[0]

    @property
    def right(self):
        return self._args[1]


class Not(Formula):
    __slots__ = ()

    @property
    def body(self):
        return self._args[0]


class And(Formula):
    __slots__ = ()

    @property
    def children(self):
        return self._args


class Or(Formula):
    __slots__ = ()

    @property
    def children(self):
        return self._args


class _Quant(Formula):
    __slots__ = ()

    def __new__(cls, var, body):
        if not isinstance(var, Var):
            raise SortError(f"quantified {var!r} is not a variable")
        return Node.__new__(cls, var, body)

    @property
    def var(self):
        return self._args[0]

    @property
    def body(self):
        return self._args[1]


class Forall(_Quant):
    __slots__ = ()


class Exists(_Quant):
    __slots__ = ()


class _Count(Formula):
    __slots__ = ()

    def __new__(cls, m, var, body):
        if not isinstance(var, Var):
            raise SortError(f"quantified {var!r} is not a variable")
        if m < 0:
            raise ValueError("counting bound must be non-negative")
        return Node.__new__(cls, int(m), var, body)

    @property
    def m(self):
        return self._args[0]

    @property
    def var(self):
        return self._args[1]

    @property
    def body(self):
        return self._args[2]


class CountGeq(_Count):
    """There are at least m objects x with body."""

    __slots__ = ()


class CountLeq(_Count):
    """There are at most m objects x with body."""

    __slots__ = ()


QUANTIFIERS = (Forall, Exists, CountGeq, CountLeq)


# ---------------------------------------------------------------- builders

def neg(phi):
    if phi is TOP:
        return BOT
    if phi is BOT:
        return TOP
    if isinstance(phi, Not):
        return phi.body
    return Not(phi)


def conj(*parts):
    """Conjunction with flattening and unit folding."""
    out = []
    for p in parts:
        if p is BOT:
            return BOT
        if p is TOP:
            continue
        if isinstance(p, And):
            out.extend(p.children)
        else:
            out.append(p)
    if not out:
        return TOP
    if len(out) == 1:
        return out[0]
    return And(*out)


def disj(*parts):
    out = []
    for p in parts:
        if p is TOP:
            return TOP
        if p is BOT:
            continue
        if isinstance(p, Or):
            out.extend(p.children)
        else:
            out.append(p)
    if not out:
        return BOT
    if len(out) == 1:
        return out[0]
    return Or(*out)


def implies(a, b):
    return disj(neg(a), b)


def iff(a, b):
    return conj(implies(a, b), implies(b, a))


def neq(a, b):
    return Not(Eq(a, b))


def complement(lit):
    return lit.body if isinstance(lit, Not) else Not(lit)


def is_literal(phi):
    if isinstance(phi, Not):
        phi = phi.body
    return isinstance(phi, (Atom, Eq))


# ---------------------------------------------------------------- printing

_PREC = {Or: 1, And: 2}
_STR: dict = {}


def _fmt_term(t):
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Name):
        return t.text
    if isinstance(t, ActionTerm):
        if not t.args:
            return t.function
        return f"{t.function}({', '.join(a.text for a in t.args)})"
    raise SortError(repr(t))


def _fmt(phi, ctx):
    if isinstance(phi, (Var, Name, ActionTerm)):
        return _fmt_term(phi)
    if phi is TOP:
        return "true"
    if phi is BOT:
        return "false"
    if isinstance(phi, Atom):
        if not phi.args:
            return phi.fluent
        return f"{phi.fluent}({', '.join(_fmt_term(a) for a in phi.args)})"
    if isinstance(phi, Eq):
        return f"{_fmt_term(phi.left)} = {_fmt_term(phi.right)}"
    if isinstance(phi, Not):
        b = phi.body
        if isinstance(b, Eq):
            return f"{_fmt_term(b.left)} != {_fmt_term(b.right)}"
        return "!" + _fmt(b, 3)
    if isinstance(phi, (And, Or)):
        op = " & " if isinstance(phi, And) else " | "
        p = _PREC[type(phi)]
        s = op.join(_fmt(c, p + 1) for c in phi.children)
        return f"({s})" if ctx > p else s
    if isinstance(phi, QUANTIFIERS):
        if isinstance(phi, Forall):
            q = "forall"
        elif isinstance(phi, Exists):
            q = "exists"
        elif isinstance(phi, CountGeq):
            q = f"exists>={phi.m}"
        else:
            q = f"exists<={phi.m}"
        s = f"{q} {phi.var.name}. {_fmt(phi.body, 0)}"
        return f"({s})" if ctx > 0 else s
    raise TypeError(f"not a formula: {phi!r}")


def fmt(phi):
    """Render in the surface syntax accepted by the frontend parser."""
    s = _STR.get(phi)
    if s is None:
        s = _fmt(phi, 0)
        _STR[phi] = s
    return s


def sort_key(phi):
    return fmt(phi)


# ---------------------------------------------------------------- inspection

_FV: dict = {}


def free_vars(phi):
    """Free variables of a formula (frozenset of Var)."""
    r = _FV.get(phi)
    if r is not None:
        return r
    if isinstance(phi, Var):
        r = frozenset([phi])
    elif isinstance(phi, (Name, Top, Bot)):
        r = frozenset()
    elif isinstance(phi, Atom):
        r = frozenset(a for a in phi.args if isinstance(a, Var))
    elif isinstance(phi, Eq):
        r = frozenset(a for a in (phi.left, phi.right) if isinstance(a, Var))
    elif isinstance(phi, Not):
        r = free_vars(phi.body)
    elif isinstance(phi, (And, Or)):
        r = frozenset().union(*(free_vars(c) for c in phi.children))
    elif isinstance(phi, QUANTIFIERS):
        r = free_vars(phi.body) - {phi.var}
    else:
        raise TypeError(f"not a formula: {phi!r}")
    _FV[phi] = r
    return r


def is_sentence(phi):
    return not free_vars(phi)


def variables(phi):
    """All variable symbols occurring in phi, free or bound."""
    if isinstance(phi, Var):
        return {phi}
    if isinstance(phi, (Atom, Eq)):
        return set(free_vars(phi))
    if isinstance(phi, (Top, Bot, Name)):
        return set()
    if isinstance(phi, Not):
        return variables(phi.body)
    if isinstance(phi, (And, Or)):
        out = set()
        for c in phi.children:
            out |= variables(c)
        return out
    if isinstance(phi, QUANTIFIERS):
        return variables(phi.body) | {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def _walk(phi):
    stack = [phi]
    seen = set()
    while stack:
        f = stack.pop()
        if f in seen:
            continue
        seen.add(f)
        yield f
        if isinstance(f, Not):
            stack.append(f.body)
        elif isinstance(f, (And, Or)):
            stack.extend(f.children)
        elif isinstance(f, QUANTIFIERS):
            stack.append(f.body)


def fluents_of(phi):
    """Mapping fluent name -> arity for every fluent symbol in phi."""
    out = {}
    for f in _walk(phi):
        if isinstance(f, Atom):
            out[f.fluent] = len(f.args)
    return out


def atoms_of(phi):
    return {f for f in _walk(phi) if isinstance(f, Atom)}


def names_of(phi):
    out = set()
    for f in _walk(phi):
        if isinstance(f, Atom):
            out.update(a for a in f.args if isinstance(a, Name))
        elif isinstance(f, Eq):
            out.update(a for a in (f.left, f.right) if isinstance(a, Name))
    return out


# ---------------------------------------------------------------- substitution

_POOL = ("x", "y", "z", "u", "v", "w")


def fresh_var(avoid):
    names = {v.name for v in avoid}
    for n in _POOL:
        if n not in names:
            return Var(n)
    for i in itertools.count(1):
        n = f"v{i}"
        if n not in names:
            return Var(n)


def _term_sub(t, mapping):
    return mapping.get(t, t) if isinstance(t, Var) else t


_SUBST: dict = {}


def subst(phi, mapping):
    """Simultaneous capture-avoiding substitution of variables by terms."""
    fv = free_vars(phi)
    mapping = {k: v for k, v in mapping.items() if k in fv and k is not v}
    if not mapping:
        return phi
    for v in mapping.values():
        if not isinstance(v, (Var, Name)):
            raise SortError(f"cannot substitute {v!r} for an object variable")
    key = (phi, tuple(sorted(mapping.items(), key=lambda kv: kv[0].name)))
    r = _SUBST.get(key)
    if r is None:
        r = _subst(phi, mapping)
        _SUBST[key] = r
    return r


def _subst(phi, mapping):
    if isinstance(phi, Atom):
        return Atom(phi.fluent, tuple(_term_sub(a, mapping) for a in phi.args))
    if isinstance(phi, Eq):
        return Eq(_term_sub(phi.left, mapping), _term_sub(phi.right, mapping))
    if isinstance(phi, Not):
        return Not(subst(phi.body, mapping))
    if isinstance(phi, (And, Or)):
        return type(phi)(*(subst(c, mapping) for c in phi.children))
    if isinstance(phi, QUANTIFIERS):
        x, body = phi.var, phi.body
        inner = {k: v for k, v in mapping.items() if k is not x}
        incoming = {v for v in inner.values() if isinstance(v, Var)}
        if x in incoming:
            y = fresh_var(variables(body) | incoming | set(inner))
            body = subst(body, {x: y})
            x = y
        body = subst(body, inner)
        if isinstance(phi, (CountGeq, CountLeq)):
            return type(phi)(phi.m, x, body)
        return type(phi)(x, body)
    return phi


def substitute(phi, x, n):
    """phi[x/n] for an object variable x and an object name (or variable) n."""
    if not isinstance(x, Var):
        raise SortError(f"{x!r} is not a variable")
    if not isinstance(n, (Name, Var)):
        raise SortError(f"cannot substitute {n!r} of sort "
                        f"{getattr(n, 'sort', '?')} for object variable {x.name}")
    return subst(phi, {x: n})


# ---------------------------------------------------------------- normal forms

_NNF: dict = {}


def to_nnf(phi):
    """Negation normal form; counting quantifiers are dualised on negation."""
    r = _NNF.get((phi, True))
    if r is None:
        r = _nnf(phi, True)
        _NNF[(phi, True)] = r
    return r


def _nnf(phi, pos):
    key = (phi, pos)
    r = _NNF.get(key)
    if r is not None:
        return r
    if phi is TOP or phi is BOT:
        r = phi if pos else neg(phi)
    elif isinstance(phi, (Atom, Eq)):
        r = phi if pos else Not(phi)
    elif isinstance(phi, Not):
        r = _nnf(phi.body, not pos)
    elif isinstance(phi, (And, Or)):
        kids = tuple(_nnf(c, pos) for c in phi.children)
        flip = isinstance(phi, And) != pos
        r = (Or if flip else And)(*kids)
    elif isinstance(phi, (Forall, Exists)):
        body = _nnf(phi.body, pos)
        if pos:
            r = type(phi)(phi.var, body)
        else:
            r = (Exists if isinstance(phi, Forall) else Forall)(phi.var, body)
    elif isinstance(phi, CountGeq):
        body = _nnf(phi.body, True)
        if pos:
            r = CountGeq(phi.m, phi.var, body)
        elif phi.m == 0:
            r = BOT
        else:
            r = CountLeq(phi.m - 1, phi.var, body)
    elif isinstance(phi, CountLeq):
        body = _nnf(phi.body, True)
        r = CountLeq(phi.m, phi.var, body) if pos else CountGeq(phi.m + 1, phi.var, body)
    else:
        raise TypeError(f"not a formula: {phi!r}")
    _NNF[key] = r
    return r


def check_c2(phi, max_vars=2):
    """Raise C2Error unless phi uses at most two variable symbols, fluents
    of arity at most two, and no action terms."""
    vs = variables(phi)
    if len(vs) > max_vars:
        raise C2Error(f"{len(vs)} variable symbols ({', '.join(sorted(v.name for v in vs))}) in {fmt(phi)}")
    for f in _walk(phi):
        if isinstance(f, Atom) and len(f.args) > 2:
            raise C2Error(f"fluent {f.fluent} has arity {len(f.args)} > 2")
    return True


# ---------------------------------------------------------------- canonical form

def _name_eq(phi):
    """Decide equalities between names/identical terms; None if undecided."""
    a, b = phi.left, phi.right
    if a is b:
        return True
    if isinstance(a, Name) and isinstance(b, Name):
        return False
    return None


def _orient(phi):
    a, b = phi.left, phi.right
    # variables first, then by text, so x = c is the binding shape
    ka = (0 if isinstance(a, Var) else 1, fmt(a))
    kb = (0 if isinstance(b, Var) else 1, fmt(b))
    return phi if ka <= kb else Eq(b, a)


def _binding(lit, positive):
    """(var, name) if lit is x = c (positive) or x != c (negative)."""
    if positive:
        if not isinstance(lit, Eq):
            return None
        e = lit
    else:
        if not (isinstance(lit, Not) and isinstance(lit.body, Eq)):
            return None
        e = lit.body
    if isinstance(e.left, Var) and isinstance(e.right, Name):
        return e.left, e.right
    if isinstance(e.right, Var) and isinstance(e.left, Name):
        return e.right, e.left
    return None


def _lit_value(lit, assume):
    if lit in assume:
        return TOP
    if complement(lit) in assume:
        return BOT
    return lit


def _simp(phi, assume):
    if phi is TOP or phi is BOT:
        return phi
    if isinstance(phi, Atom):
        return _lit_value(phi, assume)
    if isinstance(phi, Eq):
        d = _name_eq(phi)
        if d is not None:
            return TOP if d else BOT
        return _lit_value(_orient(phi), assume)
    if isinstance(phi, Not):
        inner = _simp(phi.body, frozenset())
        if inner is TOP:
            return BOT
        if inner is BOT:
            return TOP
        if isinstance(inner, (Atom, Eq)):
            return _lit_value(Not(inner), assume)
        return _simp(_nnf(inner, False), assume)
    if isinstance(phi, (And, Or)):
        return _simp_junction(phi, assume)
    if isinstance(phi, QUANTIFIERS):
        return _simp_quant(phi, assume)
    raise TypeError(f"not a formula: {phi!r}")


def _simp_junction(phi, assume):
    is_and = isinstance(phi, And)
    unit, zero = (TOP, BOT) if is_and else (BOT, TOP)
    kind = type(phi)

    def flat(items):
        out = []
        for c in items:
            if c is zero:
                return None
            if c is unit:
                continue
            if isinstance(c, kind):
                out.extend(c.children)
            else:
                out.append(c)
        return out

    kids = flat(_simp(c, assume) for c in phi.children)
    if kids is None:
        return zero
    lits = {c for c in kids if is_literal(c)}
    for l in lits:
        if complement(l) in lits:
            return zero
    # one-point substitution: x = c in a conjunction (x != c in a disjunction)
    for l in sorted(lits, key=sort_key):
        b = _binding(l, is_and)
        if b is not None:
            x, c = b
            kids = [k if k is l else subst(k, {x: c}) for k in kids]
            kids = flat(_simp(k, assume) for k in kids)
            if kids is None:
                return zero
            lits = {k for k in kids if is_literal(k)}
            for l2 in lits:
                if complement(l2) in lits:
                    return zero
            break
    ctx = set(assume)
    ctx.update(lits if is_and else (complement(l) for l in lits))
    ctx = frozenset(ctx)
    out = []
    for k in kids:
        out.append(k if k in lits else _simp(k, ctx))
    out = flat(out)
    if out is None:
        return zero
    uniq = sorted(set(out), key=sort_key)
    lits = {c for c in uniq if is_literal(c)}
    for l in lits:
        if complement(l) in lits:
            return zero
    if not uniq:
        return unit
    if len(uniq) == 1:
        return uniq[0]
    return kind(*uniq)


def _simp_quant(phi, assume):
    x = phi.var
    inner_assume = frozenset(l for l in assume if x not in free_vars(l))
    body = _simp(phi.body, inner_assume)
    if isinstance(phi, (Forall, Exists)):
        is_ex = isinstance(phi, Exists)
        if body is TOP or body is BOT:
            return body
        if x not in free_vars(body):
            return body
        # one-point rules
        pts = body.children if isinstance(body, (And if is_ex else Or)) else (body,)
        for l in sorted((p for p in pts if is_literal(p)), key=sort_key):
            b = _binding(l, is_ex)
            if b is not None and b[0] is x:
                rest = [p for p in pts if p is not l]
                if not rest:
                    return _one_point_trivial(is_ex)
                comb = conj(*rest) if is_ex else disj(*rest)
                return _simp(subst(comb, {x: b[1]}), assume)
        # miniscoping
        split_kind = Or if is_ex else And
        if isinstance(body, split_kind):
            return _simp(split_kind(*(type(phi)(x, c) for c in body.children)), assume)
        stay_kind = And if is_ex else Or
        if isinstance(body, stay_kind):
            outside = [c for c in body.children if x not in free_vars(c)]
            if outside:
                inside = [c for c in body.children if x in free_vars(c)]
                inner = stay_kind(*inside) if len(inside) > 1 else inside[0]
                return _simp(stay_kind(*outside, type(phi)(x, inner)), assume)
        return type(phi)(x, body)
    # counting quantifiers
    m = phi.m
    if isinstance(phi, CountGeq):
        if m == 0:
            return TOP
        if body is BOT:
            return BOT
        if m == 1:
            return _simp(Exists(x, body), assume)
    else:
        if body is BOT:
            return TOP
        if m == 0:
            return _simp(Forall(x, _nnf(body, False)), assume)
    return type(phi)(m, x, body)


def _one_point_trivial(is_ex):
    # exists x. x = c  is valid;  forall x. x != c  is unsatisfiable
    return TOP if is_ex else BOT


_CANON: dict = {}


def canonicalize(phi):
    """Equivalence-preserving normal form; idempotent.

    NNF, flattening, sorting and deduplication of junctions, unit folding,
    complementary literals, unique names, one-point rules for equalities,
    propagation of sibling literals into nested junctions, and miniscoping.
    """
    r = _CANON.get(phi)
    if r is not None:
        return r
    cur = to_nnf(phi)
    for _ in range(64):
        nxt = _simp(cur, frozenset())
        if nxt is cur:
            break
        cur = nxt
    _CANON[phi] = cur
    _CANON[cur] = cur
    return cur
