from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError

from .enums import MeshFormat


def validate_mesh_source(value):
    """Accept an existing STL/OBJ path or a builtin mesh reference."""
    if isinstance(value, str) and value.startswith("builtin:"):
        return
    path = Path(value)
    if not path.exists():
        raise ValidationError(f"Mesh file '{value}' does not exist.")
    try:
        MeshFormat.from_path(path)
    except ValueError as exc:
        raise ValidationError(str(exc))


def validate_print_space(value):
    space = np.asarray(value, dtype=float)
    if space.shape != (3,) or np.any(space <= 0):
        raise ValidationError("Print space must be three positive lengths (mm).")
