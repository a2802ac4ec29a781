"""
Path Utilities - locate bundled resources.

Resources (the defaults table in resources/config/) live beside the source
tree, so every resource path is resolved against the project root rather
than the current directory.

See also:
    - config.py: reads resources/config/config.json through this module
"""

import os
from pathlib import Path

# src/util/path_util.py -> project root
PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent


def get_packaged_path(path: str) -> str:
    """
    Resolve a path relative to the project root.

    WHY: mutgen is run as `python -m src.main` from anywhere; a path relative
    to the working directory would miss the defaults table and every run
    would quietly fall back to the built-in values.

    Args:
        path: relative path, e.g. "resources/config/config.json"

    Returns:
        str: absolute path; existence is the caller's concern
    """
    return os.path.join(str(PROJECT_ROOT), path)
