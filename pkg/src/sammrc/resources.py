"""Location of the bundled data files, overridable via SAM_DATA_DIR."""

from __future__ import annotations

import os
from pathlib import Path

_BUNDLED = Path(__file__).parent / "data"

TEMPLATE_FILE = "templates.txt"
GRAMMAR_FILE = "grammar.txt"
VERB_FILE = "verbs.txt"
SAM_LEXICON_FILE = "sam_lexicon.txt"
NAME_FILE = "names.txt"


def data_dir() -> Path:
    override = os.environ.get("SAM_DATA_DIR")
    return Path(override) if override else _BUNDLED


def data_path(filename: str) -> Path:
    path = data_dir() / filename
    if not path.is_file():
        raise FileNotFoundError(f"data file {path} not found (SAM_DATA_DIR={os.environ.get('SAM_DATA_DIR')})")
    return path
