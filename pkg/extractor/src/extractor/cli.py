"""Command-line entry point for embedding extraction.

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from .core import ExtractionError, ExtractionSpec, extract, load_variants


@click.command()
@click.option("--checkpoint", required=True,
              help="Model id or local checkpoint directory.")
@click.option("--variants", "variants_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--side", type=click.Choice(["encoder", "decoder"]),
              default="encoder", show_default=True)
@click.option("--out", "out_dir", required=True,
              type=click.Path(path_type=Path))
@click.option("--max-subtokens", type=int, default=512, show_default=True)
@click.option("--batch-size", type=int, default=8, show_default=True)
@click.option("--limit", type=int, default=None,
              help="Extract only the first N variants.")
def main(checkpoint: str, variants_path: Path, side: str, out_dir: Path,
         max_subtokens: int, batch_size: int, limit: int | None):
    """Dump all hidden-state layers of a checkpoint over a variants file."""
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    try:
        variants = load_variants(variants_path)
        if limit is not None:
            variants = variants[:limit]
        spec = ExtractionSpec(checkpoint=checkpoint, side=side,
                              out_dir=out_dir, max_subtokens=max_subtokens,
                              batch_size=batch_size)
        out = extract(spec, variants)
    except ExtractionError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(2)
    click.echo(f"wrote bundle to {out}")


if __name__ == "__main__":
    main()
