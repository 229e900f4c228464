"""Flat key-value config files for the experiment runners.

The format is one `key: value` pair per line, where the value is parsed as
JSON when possible and kept as a bare string otherwise.  Lines starting with
# and blank lines are ignored.  Every file must carry a schema_version key
so stale configs fail loudly instead of silently running with reinterpreted
keys.
"""

from __future__ import annotations

import json

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


def parse_config(text):
    """Parse config text into an insertion-ordered dict."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key: value', got {raw!r}")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        value = value.strip()
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    if "schema_version" not in out:
        raise ConfigError("config is missing the required schema_version key")
    if out["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {out['schema_version']!r}; "
            f"this build reads version {SCHEMA_VERSION}"
        )
    return out


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def format_config(mapping):
    """Serialize a mapping to config text, schema_version first."""
    items = dict(mapping)
    items.setdefault("schema_version", SCHEMA_VERSION)
    lines = [f"schema_version: {json.dumps(items.pop('schema_version'))}"]
    for key, value in items.items():
        lines.append(f"{key}: {json.dumps(value)}")
    return "\n".join(lines) + "\n"


def save_config(mapping, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_config(mapping))
