from typing import Optional, Sequence

from dscf import data


class DSCFException(Exception):
    """
    Base error of the pipeline.

    Carries a one-line `detail` for the command-line diagnostic and the process
    exit code the CLI should return.
    """
    exit_code = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class ParseError(DSCFException):
    """
    A record in an input file could not be parsed.
    """
    exit_code = 2

    def __init__(self, path, line: int, reason: str):
        super().__init__(f"{path}:{line}: {reason}")
        self.path = path
        self.line = line


class ValidationError(DSCFException):
    exit_code = 2


class ConfigurationError(DSCFException):
    exit_code = 3


class DomainError(DSCFException):
    exit_code = 4


class DimensionError(DomainError):
    """
    Operand shapes are incompatible for an operation.
    """

    def __init__(self, op: str, left: Sequence[int], right: Sequence[int]):
        super().__init__(f"{op}: incompatible shapes {tuple(left)} and {tuple(right)}")
        self.left = tuple(left)
        self.right = tuple(right)


class StateError(DSCFException):
    exit_code = 5


class TrainingError(DSCFException):
    exit_code = 6


class MissingArtifactError(DSCFException):
    exit_code = 7

    def __init__(self, path, command: str):
        super().__init__(data.MESSAGE_MISSING_ARTIFACT.format(path=path, command=command))
        self.path = path
        self.command = command


class MissingSequenceError(DSCFException):
    exit_code = 8

    def __init__(self, user: int, item: int):
        super().__init__(data.MESSAGE_MISSING_SEQUENCES.format(user=user, item=item))
        self.pair = (user, item)
