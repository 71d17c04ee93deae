""" Exceptions raised by wavemask. The command line maps each of them to an exit code:
usage errors exit with 2, FormatError and operating system file errors with 3, and the numeric or
domain errors below with 4.
"""
from typing import Optional


class InvalidArgumentError(ValueError):
    """ A shape, range or divisibility requirement of an operation was violated. """


class FormatError(Exception):
    """ A tensor or image file could not be decoded. """

    def __init__(self, msg: str, path: Optional[str] = None, offset: Optional[int] = None):
        self.path = path
        self.offset = offset
        where = []
        if path is not None:
            where.append(str(path))
        if offset is not None:
            where.append(f"byte {offset}")
        if where:
            msg = f"{msg} ({', '.join(where)})"
        super().__init__(msg)


class UndefinedMetricError(ArithmeticError):
    """ The metric has no defined value for this input, eg. an image with no energy. """


class TrainingDivergedError(FloatingPointError):
    """ A loss or a parameter stopped being finite during training. """
