"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: data problems (parsing, vocabularies,
task construction, contract violations) exit 3, LLM backend failures exit
4, and numeric failures (NaN gradients, broken oracles) exit 5.
"""


class LowresKGError(Exception):
    """Base class for all package errors."""


class ContractError(LowresKGError):
    """A caller violated a documented precondition."""


class ParseError(LowresKGError):
    """Malformed input text (triple files, task manifests, LLM output)."""


class VocabularyError(LowresKGError):
    """A name was not found in a frozen vocabulary."""


class TaskError(LowresKGError):
    """A K-shot task cannot be constructed as requested."""


class RenderError(LowresKGError):
    """A prompt cannot be rendered from the available relation info."""


class BackendError(LowresKGError):
    """The LLM backend failed (transport trouble or non-success status)."""


class NumericError(LowresKGError):
    """A numeric computation produced NaN/inf; carries the offending op."""

    def __init__(self, message: str, op: str | None = None):
        super().__init__(message)
        self.op = op


class OracleError(LowresKGError):
    """A test oracle detected that its own preconditions do not hold."""
