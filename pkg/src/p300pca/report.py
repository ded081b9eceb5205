"""Methods x datasets accuracy tables from EvalReport files."""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .evaluation import EvalReport

METHOD_NAMES = {"lda": "LDA", "qda": "QDA", "lr": "LR", "nlr": "NLR"}
METHOD_ORDER = ("LDA", "QDA", "LR", "NLR")


def method_name(cfg):
    name = METHOD_NAMES.get(cfg["classifier"], cfg["classifier"].upper())
    if cfg["features"]["mode"] != "raw":
        name = "PCA+" + name
    return name


def cell_text(report: EvalReport):
    """``"55.0"``, ``"55.0(2)"`` with selection, ``"-"`` when any repetition failed."""
    mean = report.mean_accuracy
    if mean is None or report.error_tally:
        return "-"
    text = f"{100 * mean:.1f}"
    if report.config["features"]["mode"] in ("pca_fs", "pca_restricted_fs"):
        counts = report.chosen_component_counts()
        text += f"({int(round(float(np.median(counts))))})"
    return text


def build_table(paths):
    """Return ``(rows, columns, cells)`` with cells[(row, column)] -> text."""
    cells, values = {}, {}
    rows, columns = [], []
    for p in paths:
        p = Path(p)
        if not p.is_file():
            raise FileNotFoundError(f"report not found: {p}")
        rep = EvalReport.load(p)
        row, col = method_name(rep.config), rep.config.get("label", p.stem)
        if row not in rows:
            rows.append(row)
        if col not in columns:
            columns.append(col)
        cells[(row, col)] = cell_text(rep)
        values[(row, col)] = None if cells[(row, col)] == "-" else 100 * rep.mean_accuracy

    def rank(r):
        base = r.replace("PCA+", "")
        return (r.startswith("PCA+"), METHOD_ORDER.index(base) if base in METHOD_ORDER else 99, r)

    rows.sort(key=rank)
    return rows, columns, cells, values


def to_csv(rows, columns, cells):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method"] + columns)
    for r in rows:
        w.writerow([r] + [cells.get((r, c), "") for c in columns])
    return buf.getvalue()


def to_text(rows, columns, cells):
    header = ["method"] + columns
    body = [[r] + [cells.get((r, c), "") for c in columns] for r in rows]
    widths = [max(len(str(x)) for x in col) for col in zip(header, *body)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for line in body:
        lines.append("  ".join([line[0].ljust(widths[0])] + [v.rjust(w) for v, w in zip(line[1:], widths[1:])]))
    return "\n".join(lines) + "\n"


def report(eval_json_paths, out_dir=None, figures=True):
    """Render the table; write ``table.csv``, ``table.txt`` and a bar chart to ``out_dir``."""
    rows, columns, cells, values = build_table(eval_json_paths)
    text = to_text(rows, columns, cells)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "table.csv").write_text(to_csv(rows, columns, cells))
        (out / "table.txt").write_text(text)
        if figures:
            from .plotting import plot_accuracy_table

            table = {r: {c: values.get((r, c)) for c in columns} for r in rows}
            plot_accuracy_table(table, out / "accuracy.png")
    return text
