from pathlib import Path

import click

from dscf.config import settings
from dscf.dataset.convert import convert_mat_to_tsv
from dscf.utils.logger import setup_logging


@click.command(name="convert")
@click.option("--ratings-mat", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--trust-mat", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def command(ratings_mat, trust_mat, out):
    """
    Turn the distributed rating.mat / trustnetwork.mat pair into ratings.tsv and trust.tsv.
    """
    Path(out).mkdir(parents=True, exist_ok=True)
    setup_logging(str(Path(out) / Path(settings.log_file).name))
    ratings_path, trust_path = convert_mat_to_tsv(ratings_mat, trust_mat, out)
    click.echo(f"{ratings_path}\n{trust_path}")
