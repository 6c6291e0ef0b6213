from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from ..errors import ParseError

COMMANDS = ("snf", "pi", "homology", "resolve", "derived", "longseq", "check", "table")
FORMATS = ("text", "records")

# commands that read exactly one input file
_FILE_COMMANDS = {"snf", "pi", "homology", "resolve", "derived", "longseq", "check"}
_REQUIRED = {
    "homology": ("degree",),
    "derived": ("functor", "degree"),
    "longseq": ("functor",),
    "table": ("functor",),
}


@dataclass(frozen=True)
class Job:
    """One CLI invocation; options are validated before anything is computed."""
    command: str
    inputs: Tuple[str, ...] = ()
    options: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if self.command not in COMMANDS:
            raise ParseError(f"unknown command {self.command!r}")
        if self.command in _FILE_COMMANDS and len(self.inputs) != 1:
            raise ParseError(f"{self.command} takes exactly one input file")
        for name in _REQUIRED.get(self.command, ()):
            if self.options.get(name) is None:
                raise ParseError(f"{self.command} needs --{name}")
        for name in ("degree", "length", "jobs"):
            value = self.options.get(name)
            if value is not None and value < 0:
                raise ParseError(f"--{name} must be non-negative")
        if self.options.get("format", "text") not in FORMATS:
            raise ParseError(f"unknown output format {self.options['format']!r}")

    def option(self, name: str, default: Any = None) -> Any:
        value = self.options.get(name)
        return default if value is None else value


@dataclass(frozen=True)
class CacheEntry:
    """A cached resolution (or derived value): its text and the certificate lines computed with it."""
    key: str
    value: str
    certificates: List[Dict[str, Any]] = field(default_factory=list)
    meta: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"key": self.key, "value": self.value, "certificates": self.certificates, "meta": self.meta}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CacheEntry":
        return cls(data["key"], data["value"], list(data["certificates"]), data.get("meta"))
