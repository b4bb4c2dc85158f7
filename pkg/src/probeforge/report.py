"""Result-file schema, run manifests and report rendering.

Results are JSONL: probe rows (one per task/bundle/layer) and Simple
Bound rows (one per task/bundle/mode).  The renderer is a pure function
of result files — every number in a report is copied from exactly one
row, never recomputed.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .probe import ProbeResult

PROBE_ROW = "probe"
SIMPLE_BOUND_ROW = "simple_bound"


class ReportError(Exception):
    pass


def _digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, ensure_ascii=False).encode("utf-8")
    return hashlib.blake2b(blob, digest_size=16).hexdigest()


def file_digest(path: str | Path) -> str:
    return hashlib.blake2b(Path(path).read_bytes(),
                           digest_size=16).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    seed: int
    corpus_digest: str
    config_digest: str
    tasks: tuple[str, ...]
    created_at: str

    @property
    def digest(self) -> str:
        # stable across reruns: the timestamp is excluded
        return _digest({
            "seed": self.seed, "corpus_digest": self.corpus_digest,
            "config_digest": self.config_digest, "tasks": list(self.tasks),
        })

    def to_dict(self) -> dict:
        return {
            "seed": self.seed, "corpus_digest": self.corpus_digest,
            "config_digest": self.config_digest, "tasks": list(self.tasks),
            "created_at": self.created_at, "digest": self.digest,
        }


def make_manifest(seed: int, corpus_digest: str, config: dict,
                  tasks: list[str]) -> RunManifest:
    return RunManifest(
        seed=seed, corpus_digest=corpus_digest,
        config_digest=_digest(config), tasks=tuple(tasks),
        created_at=datetime.now(timezone.utc).isoformat())


def read_manifest(path: str | Path) -> RunManifest:
    r = json.loads(Path(path).read_text(encoding="utf-8"))
    man = RunManifest(int(r["seed"]), r["corpus_digest"], r["config_digest"],
                      tuple(r["tasks"]), r["created_at"])
    if r.get("digest") != man.digest:
        raise ReportError(f"manifest digest mismatch in {path}")
    return man


# --- results file -------------------------------------------------------

def probe_row(result: ProbeResult, manifest_digest: str) -> dict:
    row = {"row_type": PROBE_ROW, "manifest_digest": manifest_digest}
    row.update(result.to_dict())
    return row


def simple_bound_rows(result: ProbeResult, manifest_digest: str) -> list[dict]:
    """Task-level baseline rows derived from one representative run;
    Simple Bounds do not depend on the layer."""
    rows = [{
        "row_type": SIMPLE_BOUND_ROW, "manifest_digest": manifest_digest,
        "task": result.task, "bundle_id": result.bundle_id, "layer": None,
        "mode": "global", "metric_name": result.metric_name,
        "metric_value": result.simple_bound_global,
    }]
    if result.simple_bound_per_key is not None:
        rows.append({
            "row_type": SIMPLE_BOUND_ROW, "manifest_digest": manifest_digest,
            "task": result.task, "bundle_id": result.bundle_id, "layer": None,
            "mode": "per_key", "metric_name": result.metric_name,
            "metric_value": result.simple_bound_per_key,
        })
    return rows


def write_results(rows: list[dict], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def read_results(path: str | Path) -> list[dict]:
    rows = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rows.append(json.loads(line))
    if not rows:
        raise ReportError(f"empty results file: {path}")
    return rows


# --- rendering ----------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.4f}"


@dataclass
class BundleResults:
    bundle_id: str
    probe: dict[tuple[str, int], dict]       # (task, layer) -> row
    bounds: dict[tuple[str, str], dict]      # (task, mode) -> row

    @property
    def tasks(self) -> set[str]:
        return {t for t, _ in self.probe}

    def best(self, task: str) -> dict:
        """Best-layer probe row for a task (lower is better)."""
        rows = [r for (t, _), r in self.probe.items() if t == task]
        return min(rows, key=lambda r: (r["metric_value"], r["layer"]))

    def bound(self, task: str) -> dict:
        """Canonical Simple Bound row: per-key where present, else global."""
        return self.bounds.get((task, "per_key"), self.bounds[(task, "global")])


def group_results(all_rows: list[dict]) -> list[BundleResults]:
    by_bundle: dict[str, BundleResults] = {}
    for row in all_rows:
        bid = row["bundle_id"]
        br = by_bundle.setdefault(bid, BundleResults(bid, {}, {}))
        if row["row_type"] == PROBE_ROW:
            br.probe[(row["task"], int(row["layer"]))] = row
        elif row["row_type"] == SIMPLE_BOUND_ROW:
            br.bounds[(row["task"], row["mode"])] = row
        else:
            raise ReportError(f"unknown row_type {row['row_type']!r}")
    for br in by_bundle.values():
        for task in br.tasks:
            if (task, "global") not in br.bounds:
                raise ReportError(
                    f"bundle {br.bundle_id}: no Simple Bound row for {task}")
    return sorted(by_bundle.values(), key=lambda b: b.bundle_id)


def render_report(bundles: list[BundleResults], out_dir: str | Path) -> Path:
    """Write report.md plus a long-format per-layer CSV into out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    warnings: list[str] = []
    task_sets = [b.tasks for b in bundles]
    tasks = sorted(set.intersection(*task_sets)) if task_sets else []
    if task_sets and tasks != sorted(set.union(*task_sets)):
        dropped = sorted(set.union(*task_sets) - set(tasks))
        warnings.append(
            "bundles disagree on task sets; reporting on the intersection "
            f"(omitted: {', '.join(dropped)})")
    if not tasks:
        raise ReportError("no common tasks across result files")
    for b in bundles:
        for row in b.probe.values():
            for w in row.get("warnings", []):
                warnings.append(f"{b.bundle_id}/{row['task']}: {w}")

    lines = ["# Probing report", ""]
    if warnings:
        lines.append("## Warnings")
        lines.extend(f"- {w}" for w in dict.fromkeys(warnings))
        lines.append("")

    lines.append("## Best layer per task")
    lines.append("")
    header = "| task | metric | " + " | ".join(
        f"{b.bundle_id} (layer)" for b in bundles) + " | Simple Bound |"
    lines.append(header)
    lines.append("|" + "---|" * (len(bundles) + 3))
    for task in tasks:
        cells = []
        bests = [b.best(task) for b in bundles]
        lowest = min(r["metric_value"] for r in bests)
        for r in bests:
            val = _fmt(r["metric_value"])
            if r["metric_value"] == lowest and len(bundles) > 1:
                val = f"**{val}**"
            cells.append(f"{val} ({r['layer']})")
        sb = bundles[0].bound(task)
        lines.append(f"| {task} | {bests[0]['metric_name']} | "
                     + " | ".join(cells) + f" | {_fmt(sb['metric_value'])} |")
    lines.append("")
    lines.append("Lower is better; bold marks the per-task minimum.")
    lines.append("")
    (out_dir / "report.md").write_text("\n".join(lines) + "\n",
                                       encoding="utf-8")

    csv_path = out_dir / "per_layer.csv"
    with csv_path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bundle_id", "task", "layer", "metric_name",
                    "metric_value", "simple_bound_global",
                    "simple_bound_per_key"])
        for b in bundles:
            for (task, layer) in sorted(b.probe):
                if task not in tasks:
                    continue
                r = b.probe[(task, layer)]
                w.writerow([b.bundle_id, task, layer, r["metric_name"],
                            r["metric_value"], r["simple_bound_global"],
                            r.get("simple_bound_per_key", "")])
    return out_dir / "report.md"
