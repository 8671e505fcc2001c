"""mc-plot: regenerate experiment figures from harness CSVs."""

from __future__ import annotations

import sys

import click

from .figures import KINDS, FigureSpec, SchemaError, render


@click.command()
@click.option("--csv", "csv_path", required=True, type=click.Path(exists=True),
              help="harness results CSV")
@click.option("--kind", required=True, type=click.Choice(KINDS))
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="output image path (png/pdf/svg by extension)")
@click.option("--metric", type=click.Choice(["weighted", "unweighted"]),
              default="weighted", show_default=True)
@click.option("--title", default=None)
@click.option("--log-x/--no-log-x", default=False, show_default=True)
@click.option("--log-y/--no-log-y", default=False, show_default=True)
@click.option("--m-value", type=float, default=None,
              help="weight_entries: which m to draw (default: largest in the CSV)")
def main(csv_path, kind, out_path, metric, title, log_x, log_y, m_value):
    """Render one figure kind from a results CSV."""
    spec = FigureSpec(
        csv_path=csv_path, kind=kind, out_path=out_path, metric=metric,
        title=title, log_x=log_x, log_y=log_y, m_value=m_value,
    )
    try:
        render(spec)
    except SchemaError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
