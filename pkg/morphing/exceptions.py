class MorphError(ValueError):
    """Base class for morphing failures."""


class IsolatedVertexError(MorphError):
    def __init__(self, vertex):
        self.vertex = int(vertex)
        super().__init__(f"Vertex {self.vertex} has no neighbours (card(N_i) = 0).")


class ConstraintConflictError(MorphError):
    """A vertex was declared both anchor and control."""

    def __init__(self, vertices):
        self.vertices = sorted(int(v) for v in vertices)
        super().__init__(
            f"Vertices cannot be both anchor and control: {self.vertices[:20]}"
        )


class SingularSystemError(MorphError):
    def __init__(self, reason):
        self.reason = reason
        super().__init__(f"Morph system is singular: {reason}")


class MorphConvergenceError(MorphError):
    def __init__(self, residual, tolerance):
        self.residual = float(residual)
        self.tolerance = float(tolerance)
        super().__init__(
            f"Morph solve residual {self.residual:.3e} exceeds "
            f"tolerance {self.tolerance:.1e}."
        )


class GraspSpaceViolationError(MorphError):
    """A control target lies outside every ellipsoid of the grasp space."""

    def __init__(self, vertex, quadratic_form):
        self.vertex = int(vertex)
        self.quadratic_form = float(quadratic_form)
        super().__init__(
            f"Target for vertex {self.vertex} is outside the grasp space "
            f"(min quadratic form {self.quadratic_form:.4g} > 1)."
        )
