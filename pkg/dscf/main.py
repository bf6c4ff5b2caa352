import logging
import sys

import click

from dscf.exceptions import DSCFException
from dscf.utils.logger import log, logger
from dscf.version import cli

MODULE_NAME = "main"


def main(args=None) -> int:
    """
    Run one command and map failures to a one-line diagnostic on stderr.

    Args:
        args (list): Command line arguments, defaults to `sys.argv[1:]`.

    Returns:
        int: 0 on success, the exception's exit code otherwise.
    """
    try:
        cli.main(args=args, prog_name="dscf", standalone_mode=False)
    except DSCFException as error:
        if logger.handlers:
            log(MODULE_NAME, f"{type(error).__name__}: {error.detail}", level=logging.ERROR)
        click.echo(f"dscf: error: {error.detail}", err=True)
        return error.exit_code
    except click.ClickException as error:
        error.show()
        return error.exit_code
    except click.exceptions.Abort:
        click.echo("dscf: aborted", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
