from django.core.exceptions import ValidationError


def validate_training_options(options):
    """Collect every problem with a training-options dict."""
    errors = []
    for key in ("hidden", "epochs", "batch_size"):
        value = options.get(key)
        if value is not None and (int(value) != value or value < 1):
            errors.append(f"training.{key} must be a positive integer.")
    blocks = options.get("blocks")
    if blocks is not None and (int(blocks) != blocks or blocks < 0):
        errors.append("training.blocks must be a non-negative integer.")
    rate = options.get("learning_rate")
    if rate is not None and rate < 0:
        errors.append("training.learning_rate must be non-negative.")
    weight = options.get("pseudo_weight")
    if weight is not None and not 0 <= weight <= 1:
        errors.append("training.pseudo_weight must lie in [0, 1].")
    if errors:
        raise ValidationError(errors)
