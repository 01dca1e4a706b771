class OptimizerError(ValueError):
    """Base class for optimizer failures."""


class AllInfeasibleError(OptimizerError):
    def __init__(self, population, smallest_violation):
        self.population = int(population)
        self.smallest_violation = float(smallest_violation)
        super().__init__(
            f"All {self.population} initial candidates violate the constraints "
            f"(smallest violation {self.smallest_violation:.4g}); review the "
            f"decision bounds."
        )
