"""
Exception hierarchy for sfcov. Each error carries the process exit code the CLI reports.
"""
from .constants import (
    EXIT_MATRIX_FORMAT,
    EXIT_NO_ORACLES,
    EXIT_PARSE_FAILURE,
    EXIT_ROOT_NOT_FOUND,
    EXIT_USAGE,
)


class SfcovError(Exception):
    exit_code = EXIT_PARSE_FAILURE


class ParseFailure(SfcovError, ValueError):
    """No class declaration could be recovered from the input files."""

    def __init__(self, message: str, diagnostics: list | None = None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])


class MethodNotFound(SfcovError, LookupError):
    def __init__(self, class_name: str, name: str, arity: int):
        super().__init__(f"No method {name}/{arity} in {class_name} or its superclasses")
        self.class_name = class_name
        self.name = name
        self.arity = arity


class RootNotFound(SfcovError, LookupError):
    exit_code = EXIT_ROOT_NOT_FOUND

    def __init__(self, root: str):
        super().__init__(f"Root class {root!r} is not declared in the corpus")
        self.root = root


class NoOraclesFound(SfcovError, LookupError):
    exit_code = EXIT_NO_ORACLES


class FormatError(SfcovError, ValueError):
    exit_code = EXIT_MATRIX_FORMAT

    def __init__(self, path: str, line: int, reason: str):
        super().__init__(f"{path}:{line}: {reason}")
        self.path = path
        self.line = line
        self.reason = reason


class UnknownOutcomeCode(FormatError):
    pass


class UnknownTestId(SfcovError, LookupError):
    exit_code = EXIT_MATRIX_FORMAT

    def __init__(self, test_id: str):
        super().__init__(f"Test {test_id!r} does not appear in the kill matrix")
        self.test_id = test_id


class NoDetectableFaults(SfcovError, ValueError):
    exit_code = EXIT_MATRIX_FORMAT


class UnknownFixture(SfcovError, LookupError):
    def __init__(self, name: str):
        super().__init__(f"No fixture named {name!r}")
        self.name = name


class ConfigError(SfcovError, ValueError):
    exit_code = EXIT_USAGE
