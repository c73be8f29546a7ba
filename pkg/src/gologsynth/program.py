"""Core Golog program expressions and characteristic graphs."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass

from . import logic as L
from .errors import ResourceLimitError, SortError
from .logic import Node

log = logging.getLogger(__name__)

__all__ = [
    "Act", "Test", "Seq", "Choice", "Conc", "Star", "NIL", "seq", "choice",
    "conc", "pfmt", "termination_condition", "edges", "canonical_program",
    "CharGraph", "characteristic_graph", "check_situation_determined",
    "actions_of", "tests_of", "find_nondeterminism",
]


class Prog(Node):
    __slots__ = ()

    def __str__(self):
        return pfmt(self)

    def __repr__(self):
        return f"{type(self).__name__}<{pfmt(self)}>"

    def __lt__(self, other):
        return pfmt(self) < pfmt(other)


class Act(Prog):
    __slots__ = ()

    def __new__(cls, action):
        if not isinstance(action, L.ActionTerm):
            raise SortError(f"{action!r} is not a ground action")
        return Node.__new__(cls, action)

    @property
    def action(self):
        return self._args[0]


class Test(Prog):
    __slots__ = ()

    def __new__(cls, phi):
        if not L.is_sentence(phi):
            raise SortError(f"test condition must be a sentence: {L.fmt(phi)}")
        return Node.__new__(cls, phi)

    @property
    def phi(self):
        return self._args[0]


class _Bin(Prog):
    __slots__ = ()

    @property
    def left(self):
        return self._args[0]

    @property
    def right(self):
        return self._args[1]


class Seq(_Bin):
    __slots__ = ()


class Choice(_Bin):
    __slots__ = ()


class Conc(_Bin):
    __slots__ = ()


class Star(Prog):
    __slots__ = ()

    @property
    def body(self):
        return self._args[0]


NIL = Test(L.TOP)


def _fold(cls, parts):
    parts = list(parts)
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = cls(p, out)
    return out


def seq(*parts):
    return _fold(Seq, parts)


def choice(*parts):
    return _fold(Choice, parts)


def conc(*parts):
    return _fold(Conc, parts)


# ---------------------------------------------------------------- printing

_PSTR: dict = {}
_PP = {Conc: 1, Choice: 2, Seq: 3}


def pfmt(d):
    s = _PSTR.get(d)
    if s is None:
        s = _pfmt(d, 0)
        _PSTR[d] = s
    return s


def _pfmt(d, ctx):
    if d is NIL:
        return "nil"
    if isinstance(d, Act):
        return L.fmt(d.action)
    if isinstance(d, Test):
        return f"test({L.fmt(d.phi)})"
    if isinstance(d, Star):
        return f"{{{_pfmt(d.body, 0)}}}*"
    if isinstance(d, _Bin):
        p = _PP[type(d)]
        op = {Seq: "; ", Choice: " | ", Conc: " || "}[type(d)]
        # binary constructors nest to the right; a left child of the same kind needs braces
        s = _pfmt(d.left, p + 1) + op + _pfmt(d.right, p)
        return f"{{{s}}}" if ctx > p else s
    raise TypeError(repr(d))


# ---------------------------------------------------------------- semantics tables

_TC: dict = {}


def termination_condition(d):
    """phi(delta), canonicalised."""
    r = _TC.get(d)
    if r is None:
        r = L.canonicalize(_tc(d))
        _TC[d] = r
    return r


def _tc(d):
    if isinstance(d, Act):
        return L.BOT
    if isinstance(d, Test):
        return d.phi
    if isinstance(d, (Seq, Conc)):
        return L.conj(_tc(d.left), _tc(d.right))
    if isinstance(d, Choice):
        return L.disj(_tc(d.left), _tc(d.right))
    if isinstance(d, Star):
        return L.TOP
    raise TypeError(repr(d))


_EDGES: dict = {}


def edges(d):
    """Outgoing edges (action, guard, successor) of a program expression,
    guards canonicalised, edges with guard false dropped."""
    r = _EDGES.get(d)
    if r is None:
        r = tuple(sorted(_edges(d), key=_edge_key))
        _EDGES[d] = r
    return r


def _edge_key(e):
    return (L.fmt(e[0]), L.sort_key(e[1]), pfmt(e[2]))


def _edges(d):
    out = set()
    if isinstance(d, Act):
        out.add((d.action, L.TOP, NIL))
    elif isinstance(d, Seq):
        for a, g, r in edges(d.left):
            out.add((a, g, Seq(r, d.right)))
        t = termination_condition(d.left)
        if t is not L.BOT:
            for a, g, r in edges(d.right):
                out.add((a, L.canonicalize(L.conj(t, g)), r))
    elif isinstance(d, Choice):
        out.update(edges(d.left))
        out.update(edges(d.right))
    elif isinstance(d, Conc):
        for a, g, r in edges(d.left):
            out.add((a, g, Conc(r, d.right)))
        for a, g, r in edges(d.right):
            out.add((a, g, Conc(d.left, r)))
    elif isinstance(d, Star):
        for a, g, r in edges(d.body):
            out.add((a, g, Seq(r, d)))
    return {e for e in out if e[1] is not L.BOT}


# ---------------------------------------------------------------- canonical programs

def _seq_items(d):
    if isinstance(d, Seq):
        return _seq_items(d.left) + _seq_items(d.right)
    return [d]


def _choice_items(d):
    if isinstance(d, Choice):
        return _choice_items(d.left) + _choice_items(d.right)
    return [d]


_CANON: dict = {}


def canonical_program(d):
    """Right-nested sequences without nil steps, flattened/sorted/deduplicated
    choices, canonical test conditions.  Preserves termination conditions
    and edges up to the same identification of successors."""
    r = _CANON.get(d)
    if r is not None:
        return r
    if isinstance(d, Act):
        r = d
    elif isinstance(d, Test):
        r = Test(L.canonicalize(d.phi))
    elif isinstance(d, Seq):
        items = [canonical_program(x) for x in _seq_items(d)]
        items = [x for x in items if x is not NIL]
        r = seq(*items) if items else NIL
    elif isinstance(d, Choice):
        items = sorted({canonical_program(x) for x in _choice_items(d)}, key=pfmt)
        r = choice(*items)
    elif isinstance(d, Conc):
        a, b = canonical_program(d.left), canonical_program(d.right)
        if a is NIL:
            r = b
        elif b is NIL:
            r = a
        else:
            r = Conc(a, b)
    elif isinstance(d, Star):
        r = Star(canonical_program(d.body))
    else:
        raise TypeError(repr(d))
    _CANON[d] = r
    _CANON[r] = r
    return r


# ---------------------------------------------------------------- graphs

@dataclass
class CharGraph:
    initial: object
    nodes: list
    edges: list
    term_cond: dict
    canonical: bool = True

    def out(self, node):
        return self._out.get(node, ())

    def __post_init__(self):
        self._out = {}
        for src, a, g, dst in self.edges:
            self._out.setdefault(src, []).append((a, g, dst))
        self.index = {n: i for i, n in enumerate(self.nodes)}

    def actions(self):
        return sorted({e[1] for e in self.edges}, key=L.fmt)


def characteristic_graph(d, canonical=True, max_nodes=100000):
    """Least node/edge closure from d.  With ``canonical`` nodes are
    identified up to canonical program form and parallel edges to the same
    successor are merged by disjoining their guards."""
    norm = canonical_program if canonical else (lambda x: x)
    start = norm(d)
    nodes = [start]
    seen = {start}
    out_edges = []
    term = {}
    q = deque([start])
    while q:
        n = q.popleft()
        term[n] = termination_condition(n)
        merged = {}
        for a, g, r in edges(n):
            r = norm(r)
            merged.setdefault((a, r), []).append(g)
        for (a, r), gs in sorted(merged.items(), key=lambda kv: (L.fmt(kv[0][0]), pfmt(kv[0][1]))):
            g = L.canonicalize(L.disj(*gs)) if len(gs) > 1 else gs[0]
            if g is L.BOT:
                continue
            out_edges.append((n, a, g, r))
            if r not in seen:
                seen.add(r)
                nodes.append(r)
                q.append(r)
                if len(nodes) > max_nodes:
                    raise ResourceLimitError(f"characteristic graph exceeds {max_nodes} nodes",
                                             {"nodes": len(nodes)})
    return CharGraph(start, nodes, out_edges, term, canonical)


def find_nondeterminism(g):
    """First (node, action) where the action labels two outgoing edges."""
    for n in g.nodes:
        seen = set()
        for a, _, _ in g.out(n):
            if a in seen:
                return n, a
            seen.add(a)
    return None


def check_situation_determined(g):
    """Sufficient syntactic condition: every ground action labels at most one
    outgoing edge of every node."""
    return find_nondeterminism(g) is None


def actions_of(d):
    if isinstance(d, Act):
        return {d.action}
    if isinstance(d, Test):
        return set()
    if isinstance(d, Star):
        return actions_of(d.body)
    return actions_of(d.left) | actions_of(d.right)


def tests_of(d):
    if isinstance(d, Act):
        return set()
    if isinstance(d, Test):
        return {d.phi}
    if isinstance(d, Star):
        return tests_of(d.body)
    return tests_of(d.left) | tests_of(d.right)
