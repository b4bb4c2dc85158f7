"""Command-line entry points for the probing pipeline.

Exit codes: 0 success, 1 validation error (bad inputs, degenerate data),
2 I/O error (missing or unreadable files).
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import embed, probe, report, taskgen
from .corpus import CorpusError, PreprocessError, load_corpus
from .syntax import LexError, ParseError

_VALIDATION_ERRORS = (
    CorpusError, PreprocessError, LexError, ParseError,
    taskgen.TaskGenError, embed.BundleError, report.ReportError, ValueError,
)


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _VALIDATION_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except OSError as exc:
            click.echo(f"i/o error: {exc}", err=True)
            sys.exit(2)
    return wrapper


@click.group()
def main():
    """Generate probing datasets, train probes, and render reports."""


def _corpus_digest(corp) -> str:
    return report._digest([[s.id, s.text] for s in corp.snippets])


@main.command()
@click.option("--corpus", "corpus_path", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--seed", type=int, default=0, show_default=True)
@_handle_errors
def generate(corpus_path: Path, out_dir: Path, seed: int):
    """Build the eight probing datasets from a Java snippet corpus."""
    corp = load_corpus(corpus_path, global_seed=seed)
    if corp.skipped:
        click.echo(f"skipped {corp.skipped} unparseable snippet(s)", err=True)
    datasets, variants = taskgen.generate_all(corp)
    tasks_dir = out_dir / "tasks"
    tasks_dir.mkdir(parents=True, exist_ok=True)
    for task in taskgen.ALL_TASKS:
        taskgen.write_examples(datasets[task], tasks_dir / f"{task}.jsonl")
    taskgen.write_variants(variants, out_dir / "variants.jsonl")
    manifest = report.make_manifest(
        seed=seed, corpus_digest=_corpus_digest(corp),
        config={"seed": seed, "tasks": taskgen.ALL_TASKS},
        tasks=taskgen.ALL_TASKS)
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest.to_dict(), indent=2) + "\n", encoding="utf-8")
    click.echo(f"wrote {len(taskgen.ALL_TASKS)} datasets, "
               f"{len(variants)} variants to {out_dir}")


def _load_data_dir(data_dir: Path):
    manifest = report.read_manifest(data_dir / "manifest.json")
    variants = taskgen.read_variants(data_dir / "variants.jsonl")
    datasets = {
        task: taskgen.read_examples(data_dir / "tasks" / f"{task}.jsonl")
        for task in manifest.tasks
    }
    return manifest, variants, datasets


@main.command("probe")
@click.option("--data", "data_dir", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--bundle", "bundle_path", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--seed", type=int, default=None,
              help="Split seed; defaults to the dataset manifest seed.")
@_handle_errors
def probe_cmd(data_dir: Path, bundle_path: Path, out_path: Path,
              seed: int | None):
    """Train probes for every task and layer of one embedding bundle."""
    manifest, variants, datasets = _load_data_dir(data_dir)
    bundle = embed.read_bundle(bundle_path)
    config = probe.ProbeConfig(seed=manifest.seed if seed is None else seed)
    vtext = {(v.snippet_id, v.variant_id): v.text for v in variants}
    rows: list[dict] = []
    for task in manifest.tasks:
        examples = datasets[task]
        if not examples:
            click.echo(f"warning: no examples for task {task}", err=True)
            continue
        first = None
        try:
            for layer in range(bundle.num_layers):
                result = probe.run_probe(examples, bundle, layer, config,
                                         variant_texts=vtext)
                rows.append(report.probe_row(result, manifest.digest))
                for w in result.warnings:
                    click.echo(f"warning: {task} layer {layer}: {w}",
                               err=True)
                if first is None:
                    first = result
        except ValueError as exc:
            # degenerate task data (e.g. one class) must not sink the run
            click.echo(f"warning: skipping task {task}: {exc}", err=True)
            rows = [r for r in rows if r.get("task") != task]
            continue
        rows.extend(report.simple_bound_rows(first, manifest.digest))
        click.echo(f"{task}: best {first.metric_name} "
                   f"{min(r['metric_value'] for r in rows if r.get('task') == task and r['row_type'] == report.PROBE_ROW):.4f}")
    report.write_results(rows, out_path)
    click.echo(f"wrote {len(rows)} result rows to {out_path}")


@main.command("report")
@click.argument("results", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@_handle_errors
def report_cmd(results: tuple[Path, ...], out_dir: Path):
    """Render best-layer tables and per-layer CSV from result files."""
    rows = [row for path in results for row in report.read_results(path)]
    bundles = report.group_results(rows)
    out = report.render_report(bundles, out_dir)
    click.echo(f"wrote {out} and {out.with_name('per_layer.csv')}")


@main.command("mock-bundle")
@click.option("--data", "data_dir", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--dim", type=int, default=32, show_default=True)
@click.option("--layers", type=int, default=4, show_default=True,
              help="Transformer block count; the bundle adds layer 0.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@_handle_errors
def mock_bundle(data_dir: Path, dim: int, layers: int, seed: int,
                out_path: Path):
    """Write a deterministic random-noise bundle for the variants file."""
    variants = taskgen.read_variants(data_dir / "variants.jsonl")
    bundle = embed.make_mock_bundle(variants, hidden_size=dim,
                                    num_block_layers=layers, seed=seed)
    embed.write_bundle(bundle, out_path)
    click.echo(f"wrote mock bundle ({bundle.num_layers} layers, "
               f"d={dim}) to {out_path}")
