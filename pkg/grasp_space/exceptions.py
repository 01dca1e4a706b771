class DegeneratePointsError(ValueError):
    """Point set spans fewer than three dimensions (e.g. coplanar)."""

    def __init__(self, rank, count):
        self.rank = int(rank)
        self.count = int(count)
        super().__init__(
            f"Enclosing ellipsoid needs 4 affinely independent points; "
            f"{self.count} point(s) span only rank {self.rank}."
        )


class EllipsoidConvergenceError(ValueError):
    def __init__(self, residual, iterations):
        self.residual = float(residual)
        self.iterations = int(iterations)
        super().__init__(
            f"MVEE did not converge after {self.iterations} iterations "
            f"(residual {self.residual:.3e})."
        )
