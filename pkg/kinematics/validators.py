import numpy as np
from django.core.exceptions import ValidationError


def validate_schedule_columns(schedule, hand):
    """Every schedule column must name a joint of the hand."""
    unknown = sorted(set(schedule.columns) - set(hand.joint_names))
    if unknown:
        raise ValidationError(
            f"Schedule '{schedule.name}' names unknown joints: {', '.join(unknown)}"
        )


def validate_schedule_times(schedule):
    if np.any(np.diff(schedule.times) <= 0):
        raise ValidationError(
            f"Schedule '{schedule.name}' timestamps must be strictly increasing."
        )
