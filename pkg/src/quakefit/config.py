"""Flat key = value run configuration.

One setting per line, `#` starts a comment, later command-line flags
override file values. The formatter writes keys sorted with floats in
repr form, so a resolved configuration always serializes to the same
bytes for the same values.
"""

from __future__ import annotations

from .errors import ConfigError, InputOutputError, ParseError

_TRUE_WORDS = {"true", "yes", "on", "1"}
_FALSE_WORDS = {"false", "no", "off", "0"}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Returns raw string values keyed by setting name."""
    values = {}
    for line_num, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{source}:{line_num}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ParseError(f"{source}:{line_num}: missing key before '='")
        if key in values:
            raise ParseError(f"{source}:{line_num}: duplicate key {key!r}")
        values[key] = value
    return values


def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputOutputError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(v) for v in value)
    return str(value)


def format_config(values: dict) -> str:
    lines = [f"{key} = {format_value(values[key])}" for key in sorted(values)]
    return "\n".join(lines) + "\n"


def write_config(values: dict, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_config(values))


def coerce_int(key: str, text) -> int:
    if isinstance(text, bool):
        raise ConfigError(f"{key}: expected an integer, got a flag")
    if isinstance(text, int):
        return text
    try:
        return int(str(text).strip())
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def coerce_float(key: str, text) -> float:
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    try:
        return float(str(text).strip())
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None


def coerce_bool(key: str, text) -> bool:
    if isinstance(text, bool):
        return text
    word = str(text).strip().lower()
    if word in _TRUE_WORDS:
        return True
    if word in _FALSE_WORDS:
        return False
    raise ConfigError(f"{key}: expected true/false, got {text!r}")


def coerce_int_tuple(key: str, text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(coerce_int(key, v) for v in text)
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"{key}: expected a comma-separated list of integers, got {text!r}")
    return tuple(coerce_int(key, p) for p in parts)


def coerce_float_pair(key: str, text) -> tuple:
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if len(parts) != 2:
        raise ConfigError(f"{key}: expected 'low,high', got {text!r}")
    low = coerce_float(key, parts[0])
    high = coerce_float(key, parts[1])
    return (low, high)


def coerce_choice(key: str, text, choices) -> str:
    word = str(text).strip()
    if word not in choices:
        raise ConfigError(f"{key}: expected one of {sorted(choices)}, got {text!r}")
    return word
