"""Surface syntax of problem files (``.gl``, header ``golog-synth v1``).

The file is a sequence of sections introduced by a header at column 0::

    golog-synth v1
    objects: d1, r1, kitchen
    fluents: at/1, dirtyDish/2
    actions: goto/1, addDish/2
    environment actions: addDish
    initial:
      - forall x. at(x) <-> x = kitchen
    preconditions:
      poss goto(x): x = r1 | x = kitchen
    successor state axioms:
      ssa at(x):
        + goto(x)
        - goto(y)
      ssa dirtyDish(x, y):
        + addDish(x, y)
    program:
      loop { pick y : {r1}. @goto(y) }
    specification:
      F G !exists x, y. dirtyDish(x, y)

Effect lines are ``+ A(pattern) [: eps] [when kappa]`` (``-`` for negative
effects).  Identifiers bound by a quantifier, an axiom head, an action
pattern or a pick are variables; every other identifier must be a declared
object.  Comments start with ``#``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .. import logic as L
from .. import ltlf as T
from ..bat import EffectPair
from ..errors import C2Error, ParseError

HEADER = "golog-synth v1"

SECTIONS = ("objects", "fluents", "actions", "environment actions", "initial",
            "preconditions", "successor state axioms", "program", "specification")

RESERVED = {
    "forall", "exists", "true", "false", "nil", "test", "while", "do", "if",
    "then", "else", "loop", "pick", "poss", "ssa", "when", "F", "G", "X", "WX",
    "U", "R", "Tail",
}


# ---------------------------------------------------------------- sugar programs

class SProg:
    """Base of surface program nodes (frozen dataclasses)."""


@dataclass(frozen=True)
class SNil(SProg):
    pass


@dataclass(frozen=True)
class SAct(SProg):
    name: str
    args: tuple = ()
    extended: bool = False   # written @A(...): guarded by its precondition


@dataclass(frozen=True)
class STest(SProg):
    phi: object


@dataclass(frozen=True)
class SSeq(SProg):
    items: tuple


@dataclass(frozen=True)
class SChoice(SProg):
    items: tuple


@dataclass(frozen=True)
class SConc(SProg):
    items: tuple


@dataclass(frozen=True)
class SStar(SProg):
    body: SProg


@dataclass(frozen=True)
class SOpt(SProg):
    body: SProg


@dataclass(frozen=True)
class SLoop(SProg):
    body: SProg


@dataclass(frozen=True)
class SWhile(SProg):
    cond: object
    body: SProg


@dataclass(frozen=True)
class SIf(SProg):
    cond: object
    then: SProg
    other: SProg


@dataclass(frozen=True)
class SPick(SProg):
    bindings: tuple          # ((Var, (Name, ...)), ...)
    body: SProg


# ---------------------------------------------------------------- problem file

@dataclass(frozen=True)
class SSADecl:
    fluent: str
    params: tuple
    positive: tuple = ()
    negative: tuple = ()


@dataclass(frozen=True)
class PossDecl:
    action: str
    params: tuple
    formula: object


@dataclass
class ProblemFile:
    objects: tuple = ()
    fluents: tuple = ()       # ((name, arity), ...)
    actions: tuple = ()
    environment: tuple = ()
    initial: tuple = ()
    preconditions: tuple = ()
    ssas: tuple = ()
    program: SProg | None = None
    spec: object = None
    source: str | None = field(default=None, compare=False)

    @property
    def fluent_arity(self):
        return dict(self.fluents)

    @property
    def action_arity(self):
        return dict(self.actions)


# ---------------------------------------------------------------- lexing

@dataclass(frozen=True)
class Tok:
    kind: str        # "id", "int", "sym", "eof"
    text: str
    line: int
    col: int
    bol: bool = False


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#.*)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym><->|->|!=|>=|<=|\|\||[&|!=(){},.;?*:@+\-/])
""", re.X)

_HEADER_RE = re.compile(r"^([a-z][a-z ]*[a-z]):(.*)$")


def _tokenize_line(text, lineno, col0, source, out):
    pos = 0
    first = True
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", lineno, col0 + pos + 1, source)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            out.append(Tok(kind, m.group(), lineno, col0 + pos + 1, first))
            first = False
        pos = m.end()


def split_sections(text, source=None):
    """Map section name -> token list; checks the version header."""
    lines = text.splitlines()
    header_seen = False
    sections = {}
    current = None
    for i, raw in enumerate(lines, 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if not header_seen:
            if stripped != HEADER:
                raise ParseError(f"expected header {HEADER!r}", i, 1, source)
            header_seen = True
            continue
        if not raw[0].isspace():
            m = _HEADER_RE.match(raw)
            if m is None or m.group(1) not in SECTIONS:
                raise ParseError(f"unknown section header {raw.split(':')[0]!r}", i, 1, source)
            current = m.group(1)
            if current in sections:
                raise ParseError(f"duplicate section {current!r}", i, 1, source)
            sections[current] = []
            _tokenize_line(m.group(2), i, len(m.group(1)) + 2, source, sections[current])
            continue
        if current is None:
            raise ParseError("indented text outside a section", i, 1, source)
        _tokenize_line(raw, i, 1, source, sections[current])
    if not header_seen:
        raise ParseError(f"missing header {HEADER!r}", 1, 1, source)
    return sections


# ---------------------------------------------------------------- token parser

class _Parser:
    def __init__(self, toks, ctx, source=None, eof=None):
        self.toks = list(toks)
        self.i = 0
        self.ctx = ctx
        self.source = source
        last = self.toks[-1] if self.toks else eof
        self.eof = Tok("eof", "<end>", last.line if last else 1, (last.col + len(last.text)) if last else 1)

    # -- cursor
    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else self.eof

    def next(self):
        t = self.peek()
        self.i += 1
        return t

    def at(self, text, k=0):
        t = self.peek(k)
        return t.kind in ("sym", "id") and t.text == text

    def accept(self, text):
        if self.at(text):
            return self.next()
        return None

    def expect(self, text):
        t = self.peek()
        if not self.at(text):
            self.fail(f"expected {text!r}, found {t.text!r}", t)
        return self.next()

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col, self.source)

    def done(self):
        return self.i >= len(self.toks)

    def end(self):
        if not self.done():
            self.fail(f"unexpected {self.peek().text!r}")

    def ident(self, what="identifier"):
        t = self.peek()
        if t.kind != "id":
            self.fail(f"expected {what}, found {t.text!r}")
        if t.text in RESERVED:
            self.fail(f"{t.text!r} is a reserved word")
        if t.text.startswith("_"):
            self.fail(f"identifiers may not start with an underscore: {t.text!r}")
        return self.next()

    def integer(self):
        t = self.peek()
        if t.kind != "int":
            self.fail(f"expected a number, found {t.text!r}")
        self.next()
        return int(t.text)

    # -- terms and formulas
    def binder(self, bound):
        t = self.ident("variable")
        if t.text in self.ctx.objects:
            self.fail(f"variable {t.text!r} clashes with a declared object", t)
        return L.Var(t.text)

    def term(self, bound):
        t = self.ident("term")
        v = L.Var(t.text)
        if v in bound:
            return v
        if t.text in self.ctx.objects:
            return L.Name(t.text)
        self.fail(f"undeclared object or unbound variable {t.text!r}", t)

    def formula(self, bound):
        return self._iff(bound)

    def _iff(self, bound):
        left = self._imp(bound)
        while self.accept("<->"):
            left = L.iff(left, self._imp(bound))
        return left

    def _imp(self, bound):
        left = self._or(bound)
        if self.accept("->"):
            return L.implies(left, self._imp(bound))
        return left

    def _or(self, bound):
        items = [self._and(bound)]
        while self.accept("|"):
            items.append(self._and(bound))
        return items[0] if len(items) == 1 else L.Or(*items)

    def _and(self, bound):
        items = [self._unary(bound)]
        while self.accept("&"):
            items.append(self._unary(bound))
        return items[0] if len(items) == 1 else L.And(*items)

    def _quant_head(self):
        t = self.next()
        if t.text == "forall":
            return L.Forall, None
        if self.accept(">="):
            return L.CountGeq, self.integer()
        if self.accept("<="):
            return L.CountLeq, self.integer()
        return L.Exists, None

    def _quantified(self, bound, body_fn):
        kind, m = self._quant_head()
        vs = [self.binder(bound)]
        while self.accept(","):
            vs.append(self.binder(bound))
        self.expect(".")
        inner = set(bound) | set(vs)
        body = body_fn(inner)
        for v in reversed(vs):
            body = kind(v, body) if m is None else kind(m, v, body)
        return body

    def _unary(self, bound):
        if self.accept("!"):
            return L.Not(self._unary(bound))
        if self.at("forall") or self.at("exists"):
            return self._quantified(bound, self.formula)
        return self._primary(bound)

    def _primary(self, bound):
        t = self.peek()
        if self.accept("true"):
            return L.TOP
        if self.accept("false"):
            return L.BOT
        if self.accept("("):
            f = self.formula(bound)
            self.expect(")")
            return f
        if t.kind != "id":
            self.fail(f"expected a formula, found {t.text!r}")
        if self.at("(", 1):
            name = self.ident("fluent").text
            ar = self.ctx.fluent_arity.get(name)
            if ar is None:
                self.fail(f"undeclared fluent {name!r}", t)
            self.expect("(")
            args = [self.term(bound)]
            while self.accept(","):
                args.append(self.term(bound))
            self.expect(")")
            if len(args) != ar:
                self.fail(f"fluent {name} has arity {ar}, used with {len(args)} arguments", t)
            return L.Atom(name, tuple(args))
        if self.at("=", 1) or self.at("!=", 1):
            left = self.term(bound)
            op = self.next().text
            right = self.term(bound)
            eq = L.Eq(left, right)
            return eq if op == "=" else L.Not(eq)
        if self.ctx.fluent_arity.get(t.text) == 0:
            self.next()
            return L.Atom(t.text, ())
        self.fail(f"expected a formula, found {t.text!r}")

    # -- temporal formulas: ("f", fluent formula) or ("t", temporal node)
    def temporal(self):
        return _lift(self._t_iff())

    def _t_iff(self):
        left = self._t_imp()
        while self.accept("<->"):
            right = self._t_imp()
            if left[0] == right[0] == "f":
                left = ("f", L.iff(left[1], right[1]))
            else:
                a, b = _lift(left), _lift(right)
                left = ("t", T.TAnd(T.timplies(a, b), T.timplies(b, a)))
        return left

    def _t_imp(self):
        left = self._t_or()
        if self.accept("->"):
            right = self._t_imp()
            if left[0] == right[0] == "f":
                return ("f", L.implies(left[1], right[1]))
            return ("t", T.timplies(_lift(left), _lift(right)))
        return left

    def _t_junction(self, op, sub, fcls, tcls):
        items = [sub()]
        while self.accept(op):
            items.append(sub())
        if len(items) == 1:
            return items[0]
        if all(k == "f" for k, _ in items):
            return ("f", fcls(*(x for _, x in items)))
        return ("t", tcls(*(_lift(x) for x in items)))

    def _t_or(self):
        return self._t_junction("|", self._t_and, L.Or, T.TOr)

    def _t_and(self):
        return self._t_junction("&", self._t_bin, L.And, T.TAnd)

    def _t_bin(self):
        left = self._t_unary()
        if self.at("U") or self.at("R"):
            op = self.next().text
            right = self._t_bin()
            cls = T.Until if op == "U" else T.Release
            return ("t", cls(_lift(left), _lift(right)))
        return left

    def _t_unary(self):
        if self.accept("!"):
            k, x = self._t_unary()
            return ("f", L.Not(x)) if k == "f" else ("t", T.TNot(x))
        for op, fn in (("X", T.Next), ("WX", T.WeakNext), ("F", T.eventually), ("G", T.always)):
            if self.accept(op):
                return ("t", fn(_lift(self._t_unary())))
        if self.at("forall") or self.at("exists"):
            return ("f", self._quantified(frozenset(), self.formula))
        if self.at("("):
            self.next()
            r = self._t_iff()
            self.expect(")")
            return r
        return ("f", self._primary(frozenset()))

    # -- programs
    def program(self, bound):
        return self._p_junction("||", self._p_choice, SConc, bound)

    def _p_junction(self, op, sub, cls, bound):
        items = [sub(bound)]
        while self.accept(op):
            items.append(sub(bound))
        return items[0] if len(items) == 1 else cls(tuple(items))

    def _p_choice(self, bound):
        return self._p_junction("|", self._p_seq, SChoice, bound)

    def _p_seq(self, bound):
        return self._p_junction(";", self._p_postfix, SSeq, bound)

    def _p_postfix(self, bound):
        p = self._p_primary(bound)
        while True:
            if self.accept("?"):
                p = SOpt(p)
            elif self.accept("*"):
                p = SStar(p)
            else:
                return p

    def _p_primary(self, bound):
        t = self.peek()
        if self.accept("nil"):
            return SNil()
        if self.accept("{"):
            p = self.program(bound)
            self.expect("}")
            return p
        if self.accept("test"):
            self.expect("(")
            phi = self.formula(bound)
            self.expect(")")
            return STest(phi)
        if self.accept("while"):
            c = self.formula(bound)
            self.expect("do")
            return SWhile(c, self._p_postfix(bound))
        if self.accept("if"):
            c = self.formula(bound)
            self.expect("then")
            a = self._p_postfix(bound)
            self.expect("else")
            return SIf(c, a, self._p_postfix(bound))
        if self.accept("loop"):
            return SLoop(self._p_postfix(bound))
        if self.accept("pick"):
            binds = [self._p_binding(bound)]
            while self.accept(","):
                binds.append(self._p_binding(bound))
            self.expect(".")
            inner = set(bound) | {v for v, _ in binds}
            return SPick(tuple(binds), self._p_postfix(inner))
        ext = bool(self.accept("@"))
        t = self.peek()
        name = self.ident("action").text
        ar = self.ctx.action_arity.get(name)
        if ar is None:
            self.fail(f"undeclared action {name!r}", t)
        args = []
        if self.accept("("):
            args.append(self.term(bound))
            while self.accept(","):
                args.append(self.term(bound))
            self.expect(")")
        if len(args) != ar:
            self.fail(f"action {name} has arity {ar}, used with {len(args)} arguments", t)
        return SAct(name, tuple(args), ext)

    def _p_binding(self, bound):
        v = self.binder(bound)
        self.expect(":")
        self.expect("{")
        names = []
        if not self.at("}"):
            names.append(self._name())
            while self.accept(","):
                names.append(self._name())
        close = self.expect("}")
        if not names:
            self.fail(f"pick over an empty set for {v.name}", close)
        return (v, tuple(names))

    def _name(self):
        t = self.ident("object")
        if t.text not in self.ctx.objects:
            self.fail(f"undeclared object {t.text!r}", t)
        return L.Name(t.text)


def _lift(r):
    k, x = r
    if k == "t":
        return x
    if x is L.TOP:
        return T.TRUE
    if x is L.BOT:
        return T.FALSE
    return T.TFluent(x)


# ---------------------------------------------------------------- file parser

class _Ctx:
    def __init__(self):
        self.objects = set()
        self.fluent_arity = {}
        self.action_arity = {}


def _split_items(toks, starters):
    items, cur = [], None
    for t in toks:
        if t.bol and t.kind in ("sym", "id") and t.text in starters:
            cur = [t]
            items.append(cur)
        elif cur is None:
            raise ParseError(f"expected one of {sorted(starters)}, found {t.text!r}", t.line, t.col)
        else:
            cur.append(t)
    return items


def _name_list(p):
    out = []
    if p.done():
        return out
    out.append(p.ident())
    while p.accept(","):
        out.append(p.ident())
    p.end()
    return out


def _sig_list(p, what):
    out = []
    if p.done():
        return out
    while True:
        t = p.ident(what)
        p.expect("/")
        out.append((t.text, p.integer(), t))
        if not p.accept(","):
            break
    p.end()
    return out


def _check_c2(phi, tok, source):
    try:
        L.check_c2(phi)
    except C2Error as e:
        raise ParseError(f"{e}: {L.fmt(phi)}", tok.line, tok.col, source) from None


def parse(text, source=None):
    """Parse a problem file into a :class:`ProblemFile`."""
    secs = split_sections(text, source)
    ctx = _Ctx()
    pf = ProblemFile(source=source)

    def P(toks):
        return _Parser(toks, ctx, source)

    def need(name):
        if name not in secs:
            raise ParseError(f"missing section {name!r}", 1, 1, source)
        return secs[name]

    objs = _name_list(P(need("objects")))
    seen = set()
    for t in objs:
        if t.text in seen:
            raise ParseError(f"object {t.text!r} declared twice", t.line, t.col, source)
        seen.add(t.text)
    ctx.objects = seen
    pf.objects = tuple(t.text for t in objs)

    for key, store in (("fluents", ctx.fluent_arity), ("actions", ctx.action_arity)):
        for name, n, t in _sig_list(P(need(key)), key[:-1]):
            if name in store or name in ctx.objects or name in ctx.fluent_arity:
                raise ParseError(f"symbol {name!r} declared twice", t.line, t.col, source)
            store[name] = n
    pf.fluents = tuple(ctx.fluent_arity.items())
    pf.actions = tuple(ctx.action_arity.items())

    env = []
    for t in _name_list(P(secs.get("environment actions", []))):
        if t.text not in ctx.action_arity:
            raise ParseError(f"undeclared action {t.text!r}", t.line, t.col, source)
        env.append(t.text)
    pf.environment = tuple(env)

    initial = []
    for item in _split_items(secs.get("initial", []), {"-"}):
        p = P(item[1:])
        if p.done():
            p.fail("empty initial item", item[0])
        phi = p.formula(frozenset())
        p.end()
        _check_c2(phi, item[0], source)
        initial.append(phi)
    pf.initial = tuple(initial)

    poss = []
    for item in _split_items(secs.get("preconditions", []), {"poss"}):
        p = P(item[1:])
        t = p.ident("action")
        if t.text not in ctx.action_arity:
            p.fail(f"undeclared action {t.text!r}", t)
        params = _params(p)
        if len(params) != ctx.action_arity[t.text]:
            p.fail(f"action {t.text} has arity {ctx.action_arity[t.text]}", t)
        p.expect(":")
        phi = p.formula(frozenset(params))
        p.end()
        _check_c2(phi, item[0], source)
        if any(d.action == t.text for d in poss):
            p.fail(f"second precondition axiom for {t.text}", t)
        poss.append(PossDecl(t.text, params, phi))
    pf.preconditions = tuple(poss)

    pf.ssas = tuple(_parse_ssas(secs.get("successor state axioms", []), ctx, source))

    prog_toks = need("program")
    if not prog_toks:
        raise ParseError("empty program section", 1, 1, source)
    p = P(prog_toks)
    pf.program = p.program(frozenset())
    p.end()

    spec_toks = need("specification")
    if not spec_toks:
        raise ParseError("empty specification section", 1, 1, source)
    p = P(spec_toks)
    pf.spec = p.temporal()
    p.end()
    return pf


def _params(p):
    params = []
    if p.accept("("):
        params.append(p.binder(frozenset()))
        while p.accept(","):
            params.append(p.binder(frozenset()))
        p.expect(")")
    if len(set(params)) != len(params):
        p.fail("repeated parameter")
    return tuple(params)


def _parse_ssas(toks, ctx, source):
    out = []
    current = None
    for item in _split_items(toks, {"ssa", "+", "-"}):
        head = item[0]
        p = _Parser(item[1:], ctx, source)
        if head.text == "ssa":
            t = p.ident("fluent")
            if t.text not in ctx.fluent_arity:
                p.fail(f"undeclared fluent {t.text!r}", t)
            params = _params(p)
            if len(params) != ctx.fluent_arity[t.text]:
                p.fail(f"fluent {t.text} has arity {ctx.fluent_arity[t.text]}", t)
            p.expect(":")
            p.end()
            if any(s.fluent == t.text for s in out):
                p.fail(f"second successor state axiom for {t.text}", t)
            current = SSADecl(t.text, params)
            out.append(current)
            continue
        if current is None:
            raise ParseError("effect line before any 'ssa' header", head.line, head.col, source)
        t = p.ident("action")
        ar = ctx.action_arity.get(t.text)
        if ar is None:
            p.fail(f"undeclared action {t.text!r}", t)
        pattern = []
        if p.accept("("):
            pattern.append(_pattern_term(p, ctx))
            while p.accept(","):
                pattern.append(_pattern_term(p, ctx))
            p.expect(")")
        if len(pattern) != ar:
            p.fail(f"action {t.text} has arity {ar}", t)
        bound = frozenset(current.params) | {x for x in pattern if isinstance(x, L.Var)}
        eps = L.TOP
        kappa = L.TOP
        if p.accept(":"):
            eps = p.formula(bound)
        if p.accept("when"):
            kappa = p.formula(bound)
        p.end()
        _check_c2(eps, head, source)
        _check_c2(kappa, head, source)
        pair = EffectPair(t.text, tuple(pattern), eps, kappa)
        if head.text == "+":
            current = SSADecl(current.fluent, current.params, current.positive + (pair,), current.negative)
        else:
            current = SSADecl(current.fluent, current.params, current.positive, current.negative + (pair,))
        out[-1] = current
    return out


def _pattern_term(p, ctx):
    t = p.ident("term")
    if t.text in ctx.objects:
        return L.Name(t.text)
    return L.Var(t.text)


def parse_file(path):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), source=str(path))
