"""Generator for the benchmark problem files.

Run ``python3 -m gologsynth.corpus.generate`` to rewrite the ``.gl`` files
next to this module.
"""

from __future__ import annotations

import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent


def _alts(var, names):
    return " | ".join(f"{var} = {n}" for n in names)


def dishwasher(rooms, dishes, env_loop=True, robot_env=False):
    """Robot collecting dirty dishes from rooms into the kitchen dishwasher.

    ``robot_env`` hands ``goto`` to the environment, so the robot can no
    longer reach the rooms on its own.
    """
    ds = [f"d{i}" for i in range(1, dishes + 1)]
    rs = [f"r{i}" for i in range(1, rooms + 1)]
    D = ", ".join(ds)
    R = ", ".join(rs)
    env = ["addDish"] + (["goto"] if robot_env else [])
    robot = (f"loop {{ while exists x. onRobot(x) do pick x : {{{D}}}. @unload(x); "
             f"pick y : {{{R}}}. {{ @goto(y); while exists x. dirtyDish(x, y) do "
             f"pick x : {{{D}}}. @load(x, y) }}; @goto(kitchen) }}")
    prog = robot
    if env_loop:
        prog += f" || loop pick x : {{{D}}}, y : {{{R}}}. @addDish(x, y)"
    return f"""golog-synth v1
# dishwasher robot: {rooms} room(s), {dishes} dish(es)
objects: {", ".join(ds + rs)}, kitchen
fluents: dish/1, room/1, at/1, new/1, onRobot/1, dirtyDish/2
actions: load/2, unload/1, addDish/2, goto/1
environment actions: {", ".join(env)}
initial:
  - forall x. dish(x) <-> {_alts("x", ds)}
  - forall x. room(x) <-> {_alts("x", rs)}
  - forall x. at(x) <-> x = kitchen
  - forall x. new(x) <-> dish(x) & (forall y. !dirtyDish(x, y)) & !onRobot(x)
  - forall x. onRobot(x) -> dish(x) & !(exists y. dirtyDish(x, y))
  - forall x. forall y. dirtyDish(x, y) -> dish(x) & room(y) & !onRobot(x)
preconditions:
  poss load(x, y): dirtyDish(x, y) & at(y)
  poss unload(x): onRobot(x) & at(kitchen)
  poss addDish(x, y): new(x) & room(y)
  poss goto(x): room(x) | x = kitchen
successor state axioms:
  ssa dirtyDish(x, y):
    + addDish(x, y)
    - load(x, y)
  ssa onRobot(x):
    + load(x, y)
    - unload(x)
  ssa new(x):
    - addDish(x, y)
  ssa at(x):
    + goto(x)
    - goto(y)
program:
  {prog}
specification:
  F G !(exists x. exists y. dirtyDish(x, y))
"""


def warehouse(boxes):
    """Robot carrying boxes between shelves; the environment may drop a
    held box, breaking fragile unwrapped contents."""
    bs = [f"b{i}" for i in range(1, boxes + 1)]
    B = ", ".join(bs)
    return f"""golog-synth v1
# warehouse robot: {boxes} box(es)
objects: s1, s2, {B}
fluents: shelf/1, box/1, rAt/1, at/2, in/2, wrap/1, fragile/1, broken/1, holding/1
actions: take/2, move/2, put/2, addWrap/1, drop/1
environment actions: drop
initial:
  - forall x. shelf(x) <-> x = s1 | x = s2
  - forall x. box(x) <-> {_alts("x", bs)}
  - forall x. (exists y. in(x, y)) -> !shelf(x) & !box(x)
  - exists x. wrap(x)
  - forall x. !broken(x) & !holding(x)
  - rAt(s1) & (forall x. box(x) -> at(x, s1))
  - forall x. forall y. in(x, y) & box(y) -> at(x, s1)
  - forall y. y != s1 -> !rAt(y) & (forall x. !at(x, y))
  - forall x. forall y. in(x, y) -> !wrap(x)
preconditions:
  poss take(x, y): at(x, y) & rAt(y)
  poss move(x, y): rAt(x) & shelf(y) & x != y
  poss put(x, y): holding(x) & rAt(y)
  poss addWrap(x): exists y. rAt(y) & at(x, y)
  poss drop(x): holding(x)
successor state axioms:
  ssa rAt(y):
    + move(x, y)
    - move(y, z)
  ssa at(x, y):
    + move(z, y) : exists v. holding(v) & (v = x | in(x, v))
    - move(y, z) : exists v. holding(v) & (v = x | in(x, v))
  ssa holding(x):
    + take(x, y)
    - put(x, y)
  ssa broken(x):
    + drop(y) : in(x, y) & fragile(x) & !(exists x. in(x, y) & wrap(x))
  ssa in(x, y):
    + addWrap(y) : wrap(x)
program:
  loop pick l0 : {{s1, s2}}. {{ @move(l0, s1)?; pick b : {{{B}}}. {{ @addWrap(b)?; @take(b, s1); @drop(b)?; pick l2 : {{s1, s2}}. {{ @move(s1, l2); @put(b, l2) }} }} }}
specification:
  F forall o. in(o, b1) -> !broken(o) & at(o, s2)
"""


def corpus():
    """File name -> contents for every shipped problem."""
    out = {}
    for r in (1, 2):
        for d in (1, 2, 3):
            out[f"dishwasher_r{r}_d{d}.gl"] = dishwasher(r, d)
    out["dishwasher_r1_d1_noenv.gl"] = dishwasher(1, 1, env_loop=False)
    out["dishwasher_r1_d1_robot_env.gl"] = dishwasher(1, 1, robot_env=True)
    out["dishwasher_r2_d2_robot_env.gl"] = dishwasher(2, 2, robot_env=True)
    for b in (1, 2):
        out[f"warehouse_b{b}.gl"] = warehouse(b)
    return out


def path(name):
    return HERE / name


def names():
    return sorted(p.name for p in HERE.glob("*.gl"))


def main(argv=None):
    target = Path(argv[0]) if argv else HERE
    for name, text in corpus().items():
        (target / name).write_text(text, encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
