"""JSON and DOT renderings of arenas and strategies."""

from __future__ import annotations

import json
import re

from .. import bat as B
from .. import logic as L
from .. import ltlf as T
from .. import program as P

FORMAT = "golog-synth-arena/1"

_STATE = {
    "type": "object",
    "required": ["id", "rho", "final", "accepting", "initial", "context", "effects", "judgments",
                 "obligations"],
    "properties": {
        "id": {"type": "integer", "minimum": 0},
        "rho": {"type": "string"},
        "final": {"type": "boolean"},
        "accepting": {"type": "boolean"},
        "initial": {"type": "boolean"},
        "context": {"type": "integer", "minimum": 0},
        "effects": {"type": "array", "items": {"type": "string"}},
        "judgments": {"type": "array", "items": {"type": "string"}},
        "obligations": {"type": "array", "items": {
            "type": "object", "required": ["chi", "theta"],
            "properties": {"chi": {"type": "array", "items": {"type": "string"}},
                           "theta": {"type": "boolean"}}}},
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "golog-synth arena and strategy",
    "type": "object",
    "required": ["format", "states", "transitions", "strategy", "meta"],
    "properties": {
        "format": {"const": FORMAT},
        "states": {"type": "array", "items": _STATE},
        "transitions": {"type": "array", "items": {
            "type": "object", "required": ["src", "action", "dst", "environment"],
            "properties": {"src": {"type": "integer"}, "action": {"type": "string"},
                           "dst": {"type": "integer"}, "environment": {"type": "boolean"}}}},
        "strategy": {"oneOf": [
            {"type": "null"},
            {"type": "object", "patternProperties": {
                "^[0-9]+$": {"type": "array", "items": {"type": "string"}}},
             "additionalProperties": False}]},
        "meta": {"type": "object"},
    },
}


def _judgment(j):
    phi, v = j
    return L.fmt(phi) if v else L.fmt(L.neg(phi))


def _state_json(arena, s, initial):
    info = arena.info[s] if arena.info else None
    d = {"id": s, "final": s in arena.final, "accepting": s in arena.accepting,
         "initial": s in initial, "rho": "", "context": 0, "effects": [], "judgments": [],
         "obligations": []}
    if info is not None:
        d["rho"] = P.pfmt(info.program)
        d["context"] = info.context
        d["effects"] = [str(l) for l in B.sorted_effects(info.effects)]
        if arena.contexts:
            d["judgments"] = [_judgment(j) for j in arena.contexts[info.context].sorted()]
        d["obligations"] = [{"chi": sorted(T.tfmt(c) for c in chi), "theta": bool(theta)}
                            for chi, theta in sorted(info.obligations,
                                                     key=lambda o: (sorted(T.tfmt(c) for c in o[0]), o[1]))]
    return d


def arena_to_dict(arena, strategy=None, meta=None, only_strategy=False):
    """Plain-data view; with ``only_strategy`` just the states the strategy
    can reach are emitted."""
    sigma = getattr(strategy, "choice", strategy)
    if only_strategy and sigma is not None:
        states = sorted(sigma)
    else:
        states = list(arena.states)
    keep = set(states)
    initial = set(arena.initial)
    trans = [{"src": s, "action": L.fmt(a), "dst": t, "environment": arena.is_env(a)}
             for s in states for a, t in arena.succ(s) if t in keep]
    return {
        "format": FORMAT,
        "states": [_state_json(arena, s, initial) for s in states],
        "transitions": trans,
        "strategy": None if sigma is None else
        {str(s): sorted(L.fmt(a) for a in sigma[s]) for s in sorted(sigma)},
        "meta": dict(meta or {}),
    }


def to_json(arena, strategy=None, meta=None, only_strategy=False):
    return json.dumps(arena_to_dict(arena, strategy, meta, only_strategy), indent=1, default=str)


_ACTION = re.compile(r"^\s*([A-Za-z][A-Za-z0-9_']*)\s*(?:\((.*)\))?\s*$")


def parse_action(text):
    m = _ACTION.match(text)
    if m is None:
        raise ValueError(f"not an action term: {text!r}")
    args = [a.strip() for a in m.group(2).split(",")] if m.group(2) else []
    return L.ActionTerm(m.group(1), tuple(L.Name(a) for a in args))


def load_strategy(data):
    """Choice map {state id: frozenset of ActionTerm} from JSON text or a
    dict produced by :func:`arena_to_dict`."""
    if isinstance(data, str):
        data = json.loads(data)
    sigma = data.get("strategy")
    if sigma is None:
        return None
    return {int(k): frozenset(parse_action(a) for a in v) for k, v in sigma.items()}


def _dot_escape(s):
    return s.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(arena, strategy=None, only_strategy=False, name="arena"):
    """Final states are double circles, accepting states are filled.  With a
    strategy, chosen controllable edges are bold, unchosen ones dotted gray,
    and environment edges plain."""
    sigma = getattr(strategy, "choice", strategy)
    states = sorted(sigma) if (only_strategy and sigma is not None) else list(arena.states)
    keep = set(states)
    lines = [f'digraph "{_dot_escape(name)}" {{', "  rankdir=LR;",
             '  node [shape=circle, fontsize=10];', '  edge [fontsize=9];']
    for s in states:
        attrs = [f'label="{s}"']
        attrs.append("shape=doublecircle" if s in arena.final else "shape=circle")
        if s in arena.accepting:
            attrs.append('style=filled, fillcolor="lightgray"')
        if s in arena.initial:
            attrs.append("penwidth=2")
        lines.append(f"  s{s} [{', '.join(attrs)}];")
    for s in states:
        for a, t in arena.succ(s):
            if t not in keep:
                continue
            attrs = [f'label="{_dot_escape(L.fmt(a))}"']
            if sigma is not None and not arena.is_env(a):
                chosen = s in sigma and a in sigma[s]
                attrs.append("style=bold" if chosen else 'style=dotted, color="gray"')
            lines.append(f"  s{s} -> s{t} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
