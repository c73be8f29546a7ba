"""Pretty-printer for problem files; ``parse(print_problem(p)) == p``."""

from __future__ import annotations

from .. import logic as L
from .. import ltlf as T
from . import syntax as S


def fmt_formula(phi):
    return L.fmt(phi)


# ---------------------------------------------------------------- temporal

def _is_always(f):
    return (isinstance(f, T.TNot) and isinstance(f.body, T.Until) and f.body.left is T.TRUE
            and isinstance(f.body.right, T.TNot))


def fmt_temporal(f):
    return _tf(f, 0)


def _tf(f, ctx):
    # ctx: 0 top, 1 or-operand, 2 and-operand, 3 until-operand, 4 unary operand
    if isinstance(f, T.TFluent):
        phi = f.phi
        s = L.fmt(phi)
        # same precedence as the temporal junctions, so that a lifted
        # sentence prints like the temporal formula it was parsed from
        if isinstance(phi, L.Or):
            return _wrap(s, ctx > 1)
        if isinstance(phi, L.And):
            return _wrap(s, ctx > 2)
        return _wrap(s, ctx >= 1 and isinstance(phi, L.QUANTIFIERS))
    if f is T.TRUE:
        return "true"
    if f is T.FALSE:
        return "false"
    if f is T.TAIL:
        raise ValueError("the Tail marker has no surface syntax")
    if _is_always(f):
        return _wrap("G " + _tf(f.body.right.body, 4), ctx > 3)
    if isinstance(f, T.TNot):
        return "!" + _tf(f.body, 4)
    if isinstance(f, T.Next):
        return _wrap("X " + _tf(f.body, 4), ctx > 3)
    if isinstance(f, T.WeakNext):
        return _wrap("WX " + _tf(f.body, 4), ctx > 3)
    if isinstance(f, T.Until) and f.left is T.TRUE:
        return _wrap("F " + _tf(f.right, 4), ctx > 3)
    if isinstance(f, (T.Until, T.Release)):
        op = " U " if isinstance(f, T.Until) else " R "
        return _wrap(_tf(f.left, 4) + op + _tf(f.right, 3), ctx > 3)
    if isinstance(f, (T.TAnd, T.TOr)):
        p = 2 if isinstance(f, T.TAnd) else 1
        op = " & " if p == 2 else " | "
        return _wrap(op.join(_tf(c, p + 1) for c in f.children), ctx > p)
    raise TypeError(repr(f))


def _wrap(s, cond):
    return f"({s})" if cond else s


# ---------------------------------------------------------------- programs

def _term(t):
    return t.name if isinstance(t, L.Var) else t.text


def fmt_program(p):
    return _pf(p, 0)


def _pf(p, ctx):
    # ctx: 0 top, 1 conc operand, 2 choice operand, 3 seq operand, 4 postfix operand
    if isinstance(p, S.SNil):
        return "nil"
    if isinstance(p, S.SAct):
        s = ("@" if p.extended else "") + p.name
        if p.args:
            s += "(" + ", ".join(_term(a) for a in p.args) + ")"
        return s
    if isinstance(p, S.STest):
        return f"test({L.fmt(p.phi)})"
    if isinstance(p, S.SOpt):
        return _pf(p.body, 4) + "?"
    if isinstance(p, S.SStar):
        return _pf(p.body, 4) + "*"
    if isinstance(p, (S.SSeq, S.SChoice, S.SConc)):
        lvl, op = {S.SConc: (1, " || "), S.SChoice: (2, " | "), S.SSeq: (3, "; ")}[type(p)]
        s = op.join(_pf(x, lvl + 1) for x in p.items)
        return f"{{ {s} }}" if ctx > lvl else s
    if isinstance(p, S.SLoop):
        s = "loop " + _pf(p.body, 4)
    elif isinstance(p, S.SWhile):
        s = f"while {L.fmt(p.cond)} do {_pf(p.body, 4)}"
    elif isinstance(p, S.SIf):
        s = f"if {L.fmt(p.cond)} then {_pf(p.then, 4)} else {_pf(p.other, 4)}"
    elif isinstance(p, S.SPick):
        binds = ", ".join(f"{v.name} : {{{', '.join(n.text for n in ns)}}}" for v, ns in p.bindings)
        s = f"pick {binds}. {_pf(p.body, 4)}"
    else:
        raise TypeError(repr(p))
    # keyword forms end in a postfix operand; a trailing ?/* would bind to it
    return f"{{ {s} }}" if ctx >= 4 else s


# ---------------------------------------------------------------- files

def _head(name, params):
    if not params:
        return name
    return f"{name}({', '.join(v.name for v in params)})"


def _effect(sign, pair):
    s = f"    {sign} {pair.action}"
    if pair.pattern:
        s += "(" + ", ".join(_term(t) for t in pair.pattern) + ")"
    if pair.epsilon is not L.TOP:
        s += f" : {L.fmt(pair.epsilon)}"
    if pair.kappa is not L.TOP:
        s += f" when {L.fmt(pair.kappa)}"
    return s


def print_problem(pf):
    out = [S.HEADER]
    out.append("objects: " + ", ".join(pf.objects))
    out.append("fluents: " + ", ".join(f"{n}/{a}" for n, a in pf.fluents))
    out.append("actions: " + ", ".join(f"{n}/{a}" for n, a in pf.actions))
    if pf.environment:
        out.append("environment actions: " + ", ".join(pf.environment))
    if pf.initial:
        out.append("initial:")
        out.extend(f"  - {L.fmt(phi)}" for phi in pf.initial)
    if pf.preconditions:
        out.append("preconditions:")
        out.extend(f"  poss {_head(d.action, d.params)}: {L.fmt(d.formula)}" for d in pf.preconditions)
    if pf.ssas:
        out.append("successor state axioms:")
        for s in pf.ssas:
            out.append(f"  ssa {_head(s.fluent, s.params)}:")
            out.extend(_effect("+", e) for e in s.positive)
            out.extend(_effect("-", e) for e in s.negative)
    out.append("program:")
    out.append("  " + fmt_program(pf.program))
    out.append("specification:")
    out.append("  " + fmt_temporal(pf.spec))
    return "\n".join(out) + "\n"
