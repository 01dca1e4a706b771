from django.core.exceptions import ValidationError

from .domain import MaterialParams
from .exceptions import EnergyModelError


def validate_material(value):
    """Accept a material dict that builds a valid MaterialParams."""
    if not isinstance(value, dict):
        raise ValidationError("Material must be a JSON object.")
    try:
        MaterialParams.from_dict(value)
    except (EnergyModelError, TypeError, ValueError) as exc:
        raise ValidationError(str(exc))


def validate_infill_rate(value):
    if not 0 < value <= 1:
        raise ValidationError("Infill rate must lie in (0, 1].")


def validate_velocity(value):
    if not value > 0:
        raise ValidationError("Print velocity must be positive.")
