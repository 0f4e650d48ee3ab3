"""Command-line entry point for the headline preprocessor."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .pipeline import preprocess


@click.command()
@click.option("--headlines", "headlines_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path(), help="CoNLL-U output file.")
@click.option("--manifest", "manifest_path", default=None, type=click.Path(), help="Manifest JSON path (default: <out>.manifest.json).")
def main(headlines_path, out_path, manifest_path):
    """Tokenize, tag and parse headline records into CoNLL-U."""
    try:
        lines = Path(headlines_path).read_text().splitlines()
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    conllu, manifest = preprocess(lines)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(conllu)
    target = Path(manifest_path) if manifest_path else out.with_suffix(out.suffix + ".manifest.json")
    target.write_text(manifest.to_json())
    click.echo(
        f"records_in={manifest.records_in} records_out={manifest.records_out} "
        f"failures={len(manifest.failures)} tokens={manifest.tokens}"
    )


if __name__ == "__main__":
    main()
