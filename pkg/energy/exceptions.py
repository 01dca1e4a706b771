class EnergyError(ValueError):
    """Base class for energy-model failures."""


class PowerLogError(EnergyError):
    """A power log sample is out of order or invalid; ``index`` names it."""

    def __init__(self, index, reason):
        self.index = int(index)
        self.reason = reason
        super().__init__(f"Power log sample {self.index}: {reason}")


class EnergyModelError(EnergyError):
    pass
