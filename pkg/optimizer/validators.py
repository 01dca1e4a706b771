from django.core.exceptions import ValidationError

from .enums import ProcessVariable


def validate_process_bounds(bounds):
    """Every process variable needs a [lower, upper] pair with lower <= upper."""
    errors = []
    for name in ProcessVariable.values:
        pair = bounds.get(name)
        if pair is None:
            errors.append(f"bounds.{name} is missing.")
        elif len(pair) != 2 or pair[0] > pair[1]:
            errors.append(f"bounds.{name} must be [lower, upper] with lower <= upper.")
    for name in sorted(set(bounds) - set(ProcessVariable.values)):
        errors.append(f"bounds.{name} is not a process variable.")
    if bounds.get("layer_thickness") and bounds["layer_thickness"][0] <= 0:
        errors.append("bounds.layer_thickness must stay positive.")
    if bounds.get("print_velocity") and bounds["print_velocity"][0] <= 0:
        errors.append("bounds.print_velocity must stay positive.")
    if errors:
        raise ValidationError(errors)


def validate_population(value):
    if int(value) != value or value < 4 or value % 2:
        raise ValidationError("Population must be an even integer of at least 4.")
