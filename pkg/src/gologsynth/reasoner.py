"""Decision procedure for fluent sentences over a finite universe.

Sentences are grounded over the named objects plus a few anonymous padding
objects, Tseitin-encoded, and handed to an incremental SAT solver.  The base
theory is loaded once per ``Reasoner``; context judgments are passed as
assumption literals, so every query is a single ``solve`` call.
"""

from __future__ import annotations

import enum
import itertools
import logging
import shlex
import subprocess
import threading
from dataclasses import dataclass, field
from functools import lru_cache

from pysat.solvers import Solver

from . import logic as L
from .errors import InconsistentTheoryError, ProverError, SortError

log = logging.getLogger(__name__)

PAD_PREFIX = "_o"


class Verdict(str, enum.Enum):
    ENTAILED = "entailed"
    REFUTED = "refuted"
    OPEN = "open"

    def as_bool(self):
        return {Verdict.ENTAILED: True, Verdict.REFUTED: False}.get(self)


@dataclass(frozen=True)
class Universe:
    """Named objects plus ``padding`` anonymous ones (standing in for the
    infinitely many names the theory says nothing about)."""

    named: tuple
    padding: int = 1

    def __post_init__(self):
        names = tuple(sorted({n if isinstance(n, L.Name) else L.Name(n) for n in self.named},
                             key=lambda n: n.text))
        object.__setattr__(self, "named", names)
        if self.padding < 0:
            raise ValueError("padding must be non-negative")

    @property
    def objects(self):
        return self.named + tuple(L.Name(f"{PAD_PREFIX}{i}") for i in range(1, self.padding + 1))

    def __len__(self):
        return len(self.named) + self.padding

    def extend(self, names):
        return Universe(tuple(self.named) + tuple(names), self.padding)


@dataclass(frozen=True)
class TheoryHandle:
    sentences: frozenset
    universe: Universe

    def __post_init__(self):
        object.__setattr__(self, "sentences", frozenset(self.sentences))
        for s in self.sentences:
            if not L.is_sentence(s):
                raise SortError(f"not a sentence: {L.fmt(s)}")
            L.check_c2(s)


# ---------------------------------------------------------------- grounding

def _mk(kind, parts):
    unit, zero = (L.TOP, L.BOT) if kind is L.And else (L.BOT, L.TOP)
    out = []
    seen = set()
    for p in parts:
        if p is zero:
            return zero
        if p is unit:
            continue
        for q in (p.children if isinstance(p, kind) else (p,)):
            if q not in seen:
                seen.add(q)
                out.append(q)
    if not out:
        return unit
    if len(out) == 1:
        return out[0]
    return kind(*out)


def _neg(p):
    if isinstance(p, L.Not):
        return p.body
    return L.neg(p)


_GROUND: dict = {}


def ground(phi, universe):
    """Quantifier-free equivalent of a sentence over the universe's objects.

    Equalities between names are decided by unique names; counting
    quantifiers expand over subsets.
    """
    objs = universe.objects if isinstance(universe, Universe) else tuple(universe)
    return _ground(phi, objs)


def _ground(phi, objs):
    key = (phi, objs)
    r = _GROUND.get(key)
    if r is not None:
        return r
    if phi is L.TOP or phi is L.BOT:
        r = phi
    elif isinstance(phi, L.Atom):
        if any(isinstance(a, L.Var) for a in phi.args):
            raise SortError(f"free variable in {L.fmt(phi)}")
        r = phi
    elif isinstance(phi, L.Eq):
        if isinstance(phi.left, L.Var) or isinstance(phi.right, L.Var):
            raise SortError(f"free variable in {L.fmt(phi)}")
        r = L.TOP if phi.left is phi.right else L.BOT
    elif isinstance(phi, L.Not):
        r = _neg(_ground(phi.body, objs))
    elif isinstance(phi, (L.And, L.Or)):
        r = _mk(type(phi), (_ground(c, objs) for c in phi.children))
    elif isinstance(phi, L.QUANTIFIERS):
        x = phi.var
        inst = [_ground(L.substitute(phi.body, x, n), objs) for n in objs]
        if isinstance(phi, L.Forall):
            r = _mk(L.And, inst)
        elif isinstance(phi, L.Exists):
            r = _mk(L.Or, inst)
        elif isinstance(phi, L.CountGeq):
            if phi.m == 0:
                r = L.TOP
            else:
                r = _mk(L.Or, (_mk(L.And, c) for c in itertools.combinations(inst, phi.m)))
        else:
            k = phi.m + 1
            if k > len(inst):
                r = L.TOP
            else:
                r = _mk(L.And, (_mk(L.Or, [_neg(i) for i in c])
                                for c in itertools.combinations(inst, k)))
    else:
        raise TypeError(f"not a formula: {phi!r}")
    _GROUND[key] = r
    return r


# ---------------------------------------------------------------- SAT backend

class Reasoner:
    """Incremental decision procedure for one base theory.

    ``context`` arguments are iterables of (sentence, polarity) pairs; they
    become solver assumptions.  All verdicts are memoised.
    """

    def __init__(self, theory, solver="minisat22"):
        self.theory = theory
        self.universe = theory.universe
        self._objs = self.universe.objects
        self._solver = Solver(name=solver)
        self._lock = threading.RLock()
        self._lit = {}
        self._atoms = {}
        self._top = self._new_var()
        self._solver.add_clause([self._top])
        self._memo = {}
        self.stats = {"queries": 0, "sat_calls": 0, "memo_hits": 0}
        for s in sorted(theory.sentences, key=L.sort_key):
            self._solver.add_clause([self.literal(s)])
        self.base_consistent = self._solve([])
        if not self.base_consistent:
            log.warning("base theory is inconsistent over %d objects", len(self._objs))

    def _new_var(self):
        self._nv = getattr(self, "_nv", 0) + 1
        return self._nv

    def close(self):
        self._solver.delete()

    def atom_var(self, atom):
        v = self._atoms.get(atom)
        if v is None:
            v = self._new_var()
            self._atoms[atom] = v
        return v

    @property
    def atoms(self):
        return dict(self._atoms)

    def literal(self, sentence):
        """SAT literal equivalent to a sentence (grounding + Tseitin)."""
        with self._lock:
            lit = self._lit.get(sentence)
            if lit is None:
                lit = self._encode(_ground(sentence, self._objs))
                self._lit[sentence] = lit
            return lit

    def _encode(self, g):
        lit = self._lit.get(g)
        if lit is not None:
            return lit
        if g is L.TOP:
            lit = self._top
        elif g is L.BOT:
            lit = -self._top
        elif isinstance(g, L.Atom):
            lit = self.atom_var(g)
        elif isinstance(g, L.Not):
            lit = -self._encode(g.body)
        elif isinstance(g, (L.And, L.Or)):
            kids = [self._encode(c) for c in g.children]
            v = self._new_var()
            add = self._solver.add_clause
            if isinstance(g, L.And):
                for k in kids:
                    add([-v, k])
                add([v] + [-k for k in kids])
            else:
                for k in kids:
                    add([v, -k])
                add([-v] + kids)
            lit = v
        else:
            raise TypeError(f"not ground: {g!r}")
        self._lit[g] = lit
        return lit

    def context_literals(self, context):
        out = []
        for s, pos in context:
            l = self.literal(s)
            out.append(l if pos else -l)
        return tuple(sorted(set(out)))

    def _solve(self, assumptions):
        self.stats["sat_calls"] += 1
        return self._solver.solve(assumptions=list(assumptions))

    def satisfiable(self, lits):
        with self._lock:
            return self._solve(lits)

    def model(self, lits=()):
        """A satisfying valuation (dict ground atom -> bool) or None."""
        with self._lock:
            if not self._solve(lits):
                return None
            m = set(x for x in self._solver.get_model() if x > 0)
            return {a: (v in m) for a, v in self._atoms.items()}

    def decide_lits(self, ctx_lits, lit):
        key = (ctx_lits, lit)
        with self._lock:
            self.stats["queries"] += 1
            r = self._memo.get(key)
            if r is not None:
                self.stats["memo_hits"] += 1
                return r
            base = list(ctx_lits)
            if not self._solve(base + [-lit]):
                r = Verdict.ENTAILED
            elif not self._solve(base + [lit]):
                r = Verdict.REFUTED
            else:
                r = Verdict.OPEN
            self._memo[key] = r
            return r

    def decide(self, phi, context=()):
        return self.decide_lits(self.context_literals(context), self.literal(phi))

    def entails(self, phi, context=()):
        return self.decide(phi, context) is Verdict.ENTAILED

    def consistent(self, extra=()):
        """Is base theory plus the extra sentences satisfiable?"""
        lits = [self.literal(s) for s in extra]
        return self.satisfiable(lits)

    def valid(self, phi):
        """Validity over the universe, ignoring the base theory."""
        g = _ground(phi, self._objs)
        return _valid_ground(g)


def _valid_ground(g):
    if g is L.TOP:
        return True
    if g is L.BOT:
        return False
    s = Solver(name="minisat22")
    r = Reasoner.__new__(Reasoner)
    r._solver, r._lit, r._atoms, r._lock = s, {}, {}, threading.RLock()
    r._nv = 0
    r._top = r._new_var()
    s.add_clause([r._top])
    try:
        lit = r._encode(g)
        return not s.solve(assumptions=[-lit])
    finally:
        s.delete()


@lru_cache(maxsize=64)
def reasoner_for(theory):
    return Reasoner(theory)


def consistent(theory, extra=()):
    return reasoner_for(theory).consistent(extra)


def entails(theory, phi, context=()):
    return reasoner_for(theory).entails(phi, context)


def decide(theory, phi, context=()):
    return reasoner_for(theory).decide(phi, context)


def equivalent(a, b, universe):
    """Grounded equivalence of two formulas with the same free variables,
    checked for every assignment of objects to the free variables."""
    fv = sorted(L.free_vars(a) | L.free_vars(b), key=lambda v: v.name)
    objs = universe.objects
    for vals in itertools.product(objs, repeat=len(fv)):
        m = dict(zip(fv, vals))
        if not _valid_ground(_ground(L.iff(L.subst(a, m), L.subst(b, m)), objs)):
            return False
    return True


# ---------------------------------------------------------------- bounded-quantifier lint

def bounded_positions(reasoner, arities):
    """Pairs (fluent, i) such that the base theory confines argument i of the
    fluent to named objects."""
    named = reasoner.universe.named
    out = set()
    for f, n in sorted(arities.items()):
        xs = [L.Var(f"x{j}") for j in range(n)]
        for i in range(n):
            body = L.implies(L.Atom(f, tuple(xs)), L.disj(*(L.Eq(xs[i], c) for c in named)))
            claim = body
            for x in reversed(xs):
                claim = L.Forall(x, claim)
            if reasoner.entails(claim):
                out.add((f, i))
    return out


def unbounded_quantifiers(phi, bounded):
    """Quantified subformulas whose truth may change with the number of
    padding objects.

    ``bounded`` holds (fluent, position) pairs that can only be true of named
    objects.  A plain quantifier is safe when its variable occurs only in
    bounded positions and in equalities with names: all padding objects then
    behave alike, so one padding object is as good as many.  A counting
    quantifier is safe only when a bounded atom on its variable is a conjunct
    of its body.
    """
    found = []

    def occurrences_ok(x, f):
        if isinstance(f, L.Atom):
            return all((f.fluent, i) in bounded for i, a in enumerate(f.args) if a is x)
        if isinstance(f, L.Eq):
            other = f.right if f.left is x else f.left if f.right is x else None
            return other is None or not isinstance(other, L.Var)
        if isinstance(f, L.Not):
            return occurrences_ok(x, f.body)
        if isinstance(f, (L.And, L.Or)):
            return all(occurrences_ok(x, c) for c in f.children)
        if isinstance(f, L.QUANTIFIERS):
            return f.var is x or occurrences_ok(x, f.body)
        return True

    def guarded(x, body):
        parts = body.children if isinstance(body, L.And) else (body,)
        return any(isinstance(p, L.Atom) and any(a is x and (p.fluent, i) in bounded
                                                 for i, a in enumerate(p.args)) for p in parts)

    def walk(f):
        if isinstance(f, L.Not):
            walk(f.body)
        elif isinstance(f, (L.And, L.Or)):
            for c in f.children:
                walk(c)
        elif isinstance(f, L.QUANTIFIERS):
            if isinstance(f, (L.Forall, L.Exists)):
                ok = occurrences_ok(f.var, f.body)
            else:
                ok = isinstance(f, L.CountGeq) and guarded(f.var, f.body)
            if not ok:
                found.append(f)
            walk(f.body)

    walk(L.to_nnf(phi))
    return found


# ---------------------------------------------------------------- external prover

def to_sexpr(phi):
    """S-expression rendering; variables carry a leading '?'."""
    def term(t):
        return "?" + t.name if isinstance(t, L.Var) else t.text

    if phi is L.TOP:
        return "true"
    if phi is L.BOT:
        return "false"
    if isinstance(phi, L.Atom):
        return "(" + " ".join([phi.fluent] + [term(a) for a in phi.args]) + ")"
    if isinstance(phi, L.Eq):
        return f"(= {term(phi.left)} {term(phi.right)})"
    if isinstance(phi, L.Not):
        return f"(not {to_sexpr(phi.body)})"
    if isinstance(phi, (L.And, L.Or)):
        op = "and" if isinstance(phi, L.And) else "or"
        return f"({op} {' '.join(to_sexpr(c) for c in phi.children)})"
    if isinstance(phi, L.Forall):
        return f"(forall ?{phi.var.name} {to_sexpr(phi.body)})"
    if isinstance(phi, L.Exists):
        return f"(exists ?{phi.var.name} {to_sexpr(phi.body)})"
    if isinstance(phi, L.CountGeq):
        return f"(exists>= {phi.m} ?{phi.var.name} {to_sexpr(phi.body)})"
    if isinstance(phi, L.CountLeq):
        return f"(exists<= {phi.m} ?{phi.var.name} {to_sexpr(phi.body)})"
    raise TypeError(repr(phi))


def _tokens(text):
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse_sexpr(text):
    toks = _tokens(text)
    pos = 0

    def read():
        nonlocal pos
        t = toks[pos]
        pos += 1
        if t == "(":
            out = []
            while toks[pos] != ")":
                out.append(read())
            pos += 1
            return out
        return t

    tree = read()
    if pos != len(toks):
        raise ProverError("trailing tokens in s-expression")
    return tree


def sexpr_to_formula(tree):
    def term(t):
        return L.Var(t[1:]) if t.startswith("?") else L.Name(t)

    if isinstance(tree, str):
        if tree == "true":
            return L.TOP
        if tree == "false":
            return L.BOT
        return L.Atom(tree, ())
    head, args = tree[0], tree[1:]
    if head == "=":
        return L.Eq(term(args[0]), term(args[1]))
    if head == "not":
        return L.Not(sexpr_to_formula(args[0]))
    if head in ("and", "or"):
        return (L.And if head == "and" else L.Or)(*(sexpr_to_formula(a) for a in args))
    if head in ("forall", "exists"):
        return (L.Forall if head == "forall" else L.Exists)(term(args[0]), sexpr_to_formula(args[1]))
    if head in ("exists>=", "exists<="):
        cls = L.CountGeq if head == "exists>=" else L.CountLeq
        return cls(int(args[0]), term(args[1]), sexpr_to_formula(args[2]))
    return L.Atom(head, tuple(term(a) for a in args))


def problem_sexpr(sentences, universe):
    objs = " ".join(n.text for n in universe.objects)
    body = " ".join(f"(assert {to_sexpr(s)})" for s in sorted(sentences, key=L.sort_key))
    return f"(problem (universe {objs}) {body})"


@dataclass
class ExternalProver:
    """Adapter for an out-of-process satisfiability checker.

    Each query writes one line, ``(problem (universe ...) (assert ...) ...)``,
    to a fresh process and expects ``sat``, ``unsat`` or ``unknown`` on stdout.
    ``unknown`` and timeouts are reported as open verdicts.
    """

    command: str
    timeout: float = 30.0
    calls: int = field(default=0, init=False)

    def check(self, sentences, universe):
        self.calls += 1
        req = problem_sexpr(sentences, universe) + "\n"
        try:
            out = subprocess.run(shlex.split(self.command), input=req, capture_output=True,
                                 text=True, timeout=self.timeout)
        except subprocess.TimeoutExpired:
            return "unknown"
        answer = out.stdout.strip().split()[:1]
        if not answer or answer[0] not in ("sat", "unsat", "unknown"):
            raise ProverError(f"unexpected prover output {out.stdout!r} (stderr {out.stderr!r})")
        return answer[0]

    def decide(self, theory, phi, context=()):
        base = set(theory.sentences) | {s if pos else L.Not(s) for s, pos in context}
        if self.check(base | {L.Not(phi)}, theory.universe) == "unsat":
            return Verdict.ENTAILED
        if self.check(base | {phi}, theory.universe) == "unsat":
            return Verdict.REFUTED
        return Verdict.OPEN

    def consistent(self, theory, extra=()):
        r = self.check(set(theory.sentences) | set(extra), theory.universe)
        if r == "unknown":
            raise InconsistentTheoryError("prover could not decide consistency")
        return r == "sat"
