import math

from django.core.exceptions import ValidationError

from .enums import InfillPattern


def validate_layer_thickness(value, z_b=None):
    if not value > 0:
        raise ValidationError("Layer thickness must be positive.")
    if z_b is not None and value > z_b:
        raise ValidationError(
            f"Layer thickness {value:g} mm exceeds the model height {z_b:g} mm."
        )


def validate_mask_resolution(value):
    if int(value) != value or value < 8:
        raise ValidationError("Mask resolution must be an integer of at least 8.")


def validate_infill_pattern(value):
    if value not in InfillPattern.values:
        raise ValidationError(
            f"Unknown infill pattern '{value}'. "
            f"Choose from: {', '.join(InfillPattern.values)}"
        )


def validate_spacing(value):
    if not value > 0:
        raise ValidationError("Infill spacing must be positive.")


def validate_overhang_threshold(value):
    if not 0 <= value <= math.pi / 2:
        raise ValidationError("Overhang threshold must lie in [0, pi/2] radians.")
