import click

from dscf import data
from dscf.commands.common import open_run, resolve_config, run_options
from dscf.schema.schemas import PMFConfig
from dscf.training.baselines import grid_search_pmf, neumf_baseline, train_pmf_baseline

MODULE_NAME = "baseline"


@click.command(name="baseline")
@run_options
@click.option("--model", "model_name", type=click.Choice(["pmf", "neumf"]), default="pmf")
@click.option("--rank", type=int, default=None, help="PMF rank.")
@click.option("--reg", type=float, default=None, help="PMF regularization weight.")
@click.option("--epochs", type=int, default=None, help="PMF epochs.")
@click.option("--grid/--no-grid", default=False, help="Grid-search PMF rank and reg on validation first.")
def command(config_file, model_name, rank, reg, epochs, grid, **flags):
    """
    Train a rating-matrix-only baseline and report it on the test partition.
    """
    config = resolve_config(config_file, **flags)
    store = open_run(MODULE_NAME, config)
    dataset = store.load_dataset()

    if model_name == "neumf":
        report = neumf_baseline(dataset, config.neumf_config())
    else:
        overrides = {"rank": rank, "reg": reg, "epochs": epochs, "seed": config.seed}
        pmf = PMFConfig(**{key: value for key, value in overrides.items() if value is not None})
        if grid:
            pmf, _ = grid_search_pmf(dataset, pmf)
        report = train_pmf_baseline(dataset, pmf)

    path = store.path(data.BASELINE_FILE.format(model=model_name))
    path.write_text(report.json() + "\n", encoding="utf-8")
    click.echo(report.json())
