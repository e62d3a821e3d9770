"""JSON schemas for the command-line outputs, one file per subcommand."""
from __future__ import annotations

import json
from importlib import resources

NAMES = ("analyze", "enumerate", "tail", "expand", "roots", "verify")


def load_schema(name: str) -> dict:
    """Return the parsed schema for subcommand ``name``."""
    if name not in NAMES:
        raise KeyError(f"no schema for {name!r}")
    text = resources.files(__name__).joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)
