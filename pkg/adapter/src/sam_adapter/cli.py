"""Command-line interface mirroring AdapterConfig."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from .adapter import AdapterConfig, run


@click.command()
@click.option("--model", required=True, help="Model identifier or local checkpoint path.")
@click.option("--challenge", type=click.Path(exists=True, path_type=Path), required=True,
              help="Challenge JSON file or directory containing challenge.json.")
@click.option("--out", "output", type=click.Path(path_type=Path), required=True)
@click.option("--max-length", type=int, default=384, show_default=True)
@click.option("--batch-size", type=int, default=16, show_default=True)
@click.option("--device", default="cpu", show_default=True)
def cli(model, challenge, output, max_length, batch_size, device):
    """Predict answers for every instance of a generated challenge set."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    if challenge.is_dir():
        challenge = challenge / "challenge.json"
    config = AdapterConfig(
        model=model,
        challenge=challenge,
        output=output,
        max_length=max_length,
        batch_size=batch_size,
        device=device,
    )
    predictions = run(config)
    click.echo(f"wrote {len(predictions)} predictions to {output}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1
    except Exception as exc:  # model load / IO failures
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
