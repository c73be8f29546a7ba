"""Benchmark runs: one CSV row per problem plus a summary figure."""

from __future__ import annotations

import csv
import re
import time
from pathlib import Path

from .. import arena as A
from .. import synthesis as Y
from ..errors import ResourceLimitError
from . import desugar as D
from . import syntax as S

COLUMNS = ["R", "D/B", "Nodes TS", "Edges TS", "Nodes St", "Edges St", "Time"]

_DISH = re.compile(r"dishwasher_r(\d+)_d(\d+)")
_WARE = re.compile(r"warehouse_b(\d+)")


def size_params(path):
    """(R, D/B) read off a corpus file name; '-' where not applicable."""
    name = Path(path).name
    m = _DISH.search(name)
    if m:
        return m.group(1), m.group(2)
    m = _WARE.search(name)
    if m:
        return "-", m.group(1)
    return "-", "-"


def run_instance(path, padding=1, max_states=200000, semantic_dedup=False,
                 hypothesis_mode="refine", max_hypothesis_states=20):
    """Parse, build and synthesize; returns a result row (dict)."""
    r, db = size_params(path)
    row = {"R": r, "D/B": db, "instance": Path(path).name}
    t0 = time.perf_counter()
    pf = S.parse_file(path)
    prob, _ = D.desugar(pf, padding)
    try:
        ar = A.build(prob, max_states=max_states, semantic_dedup=semantic_dedup)
    except ResourceLimitError as e:
        row.update({"Nodes TS": "--", "Edges TS": "--", "Nodes St": "--", "Edges St": "--",
                    "Time": "--", "outcome": f"cap: {e}"})
        return row
    res = Y.synthesize(ar, mode=hypothesis_mode, max_hypothesis_states=max_hypothesis_states)
    elapsed = time.perf_counter() - t0
    row.update({"Nodes TS": len(ar.states), "Edges TS": ar.n_transitions})
    if res.realizable:
        n, m = res.strategy.size(ar)
        row.update({"Nodes St": n, "Edges St": m, "outcome": "strategy"})
    else:
        row.update({"Nodes St": "--", "Edges St": "--", "outcome": "unrealizable"})
    row["Time"] = f"{elapsed:.2f}"
    return row


def write_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=COLUMNS, extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow(row)


def plot(rows, path):
    """Arena and strategy sizes (log scale) and wall time per instance."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = [r.get("instance", f"{r['R']}/{r['D/B']}").replace(".gl", "") for r in rows]

    def num(v):
        try:
            return float(v)
        except (TypeError, ValueError):
            return float("nan")

    xs = range(len(rows))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(max(8, 1.1 * len(rows) + 4), 4.2))
    w = 0.2
    for k, (col, lab) in enumerate([("Nodes TS", "arena nodes"), ("Edges TS", "arena edges"),
                                    ("Nodes St", "strategy nodes"), ("Edges St", "strategy edges")]):
        ax1.bar([x + (k - 1.5) * w for x in xs], [num(r[col]) for r in rows], w, label=lab)
    ax1.set_yscale("log")
    ax1.set_xticks(list(xs))
    ax1.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax1.set_ylabel("count")
    ax1.legend(fontsize=7)
    ax2.bar(list(xs), [num(r["Time"]) for r in rows], color="tab:gray")
    ax2.set_xticks(list(xs))
    ax2.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax2.set_ylabel("time [s]")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def bench(paths, csv_path, png_path=None, **opts):
    rows = [run_instance(p, **opts) for p in paths]
    write_csv(rows, csv_path)
    if png_path:
        plot(rows, png_path)
    return rows
