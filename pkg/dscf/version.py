import click
from dscf.commands import prepare_cmd
from dscf.commands import pretrain_cmd
from dscf.commands import walks_cmd
from dscf.commands import train_cmd
from dscf.commands import evaluate_cmd
from dscf.commands import ablate_cmd
from dscf.commands import sweep_cmd
from dscf.commands import baseline_cmd
from dscf.commands import convert_cmd


@click.group(help="Deep social collaborative filtering: item-aware social sequences for rating prediction.")
def cli():
    pass

def version_one():
    """
    Version one of the command set.

    Mounts the pipeline commands (prepare, pretrain, walks, train, evaluate),
    the studies (ablate, sweep) and the helpers (baseline, convert).
    """
    cli.add_command(prepare_cmd.command)
    cli.add_command(pretrain_cmd.command)
    cli.add_command(walks_cmd.command)
    cli.add_command(train_cmd.command)
    cli.add_command(evaluate_cmd.command)
    cli.add_command(ablate_cmd.command)
    cli.add_command(sweep_cmd.command)
    cli.add_command(baseline_cmd.command)
    cli.add_command(convert_cmd.command)


version_one()
