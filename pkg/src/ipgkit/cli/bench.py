"""Batch runner: one row per (instance, algorithm), plus per-size aggregates.

Parallelism is bounded by the IPGKIT_THREADS environment variable (default
1); rows are sorted afterwards so output does not depend on scheduling.
"""

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from ..rational import as_fraction, format_fraction
from .runner import run_safely
from .serialize import load_instance

ROW_FIELDS = ("instance", "algo", "status", "epsilon", "time_s", "iterations", "pos")
SUMMARY_FIELDS = (
    "size",
    "algo",
    "n_eq",
    "n_pure_eq",
    "n_tl",
    "mean_time_s",
    "mean_iterations",
    "mean_pos",
)


def _instance_size(doc) -> int:
    if doc.cng is not None:
        return doc.cng.resource_count
    return sum(doc.game.num_vars(i) for i in range(doc.game.num_players))


def _row(record, size) -> dict:
    return {
        "instance": record.instance,
        "algo": record.algo,
        "status": record.status,
        "epsilon": "" if record.epsilon is None else format_fraction(record.epsilon),
        "time_s": f"{record.wall_time:.6f}",
        "iterations": "" if record.iterations is None else record.iterations,
        "pos": "" if record.pos is None else format_fraction(record.pos),
        "_size": size,
    }


def _is_pure_payload(record) -> bool:
    if record.payload is None:
        return False
    if "pure" in record.payload:
        return True
    return all(len(side["support"]) == 1 for side in record.payload["mixed"])


def run_bench(directory, algos, time_limit=None, selection="welfare", max_iterations=1000):
    """Run every algorithm on every instance file; returns (rows, summary)."""
    paths = sorted(Path(directory).glob("*.json"))
    docs = [(path, load_instance(path)) for path in paths]
    tasks = [(doc, algo) for _, doc in docs for algo in algos]

    def work(task):
        doc, algo = task
        record = run_safely(
            doc,
            algo,
            selection=selection,
            time_limit=time_limit,
            max_iterations=max_iterations,
        )
        row = _row(record, _instance_size(doc))
        row["_pure"] = _is_pure_payload(record)
        return row

    threads = max(1, int(os.environ.get("IPGKIT_THREADS", "1")))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, tasks))
    else:
        rows = [work(t) for t in tasks]
    rows.sort(key=lambda r: (r["instance"], r["algo"]))
    return rows, summarize(rows)


def summarize(rows):
    """Per (size, algo) aggregates, recomputable from the rows alone."""
    groups = {}
    for row in rows:
        groups.setdefault((row["_size"], row["algo"]), []).append(row)
    out = []
    for (size, algo), members in sorted(groups.items()):
        n_eq = sum(1 for r in members if r["status"] in ("eq", "pureEq"))
        n_pure = sum(
            1
            for r in members
            if r["status"] == "pureEq" or (r["status"] == "eq" and r.get("_pure"))
        )
        n_tl = sum(1 for r in members if r["status"] == "timeLimit")
        times = [float(r["time_s"]) for r in members]
        iterations = [int(r["iterations"]) for r in members if r["iterations"] != ""]
        pos = [as_fraction(r["pos"]) for r in members if r["pos"] != ""]
        out.append(
            {
                "size": size,
                "algo": algo,
                "n_eq": n_eq,
                "n_pure_eq": n_pure,
                "n_tl": n_tl,
                "mean_time_s": f"{sum(times) / len(times):.6f}" if times else "",
                "mean_iterations": (
                    f"{sum(iterations) / len(iterations):.3f}" if iterations else ""
                ),
                "mean_pos": (
                    f"{float(sum(pos, Fraction(0)) / len(pos)):.6f}" if pos else ""
                ),
            }
        )
    return out


def render_csv(rows, summary) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=ROW_FIELDS, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    buf.write("\n")
    swriter = csv.DictWriter(buf, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
    swriter.writeheader()
    for row in summary:
        swriter.writerow(row)
    return buf.getvalue()
