class MeshError(ValueError):
    """Base class for mesh loading and validation failures."""


class MeshParseError(MeshError):
    def __init__(self, path, reason):
        self.path = str(path)
        self.reason = str(reason)
        super().__init__(f"Could not parse mesh '{self.path}': {self.reason}")


class NonManifoldError(MeshError):
    """Raised when edges are not shared by exactly two faces."""

    def __init__(self, edges, counts):
        self.edges = [tuple(int(v) for v in edge) for edge in edges]
        self.counts = [int(c) for c in counts]
        preview = ", ".join(
            f"{a}-{b} (x{c})" for (a, b), c in zip(self.edges[:10], self.counts[:10])
        )
        more = "" if len(self.edges) <= 10 else f" and {len(self.edges) - 10} more"
        super().__init__(
            f"Mesh is not a closed manifold: {len(self.edges)} bad edge(s): "
            f"{preview}{more}"
        )


class OpenMeshError(MeshError):
    """Raised when a closed-mesh quantity (volume, centroid) is requested."""

    def __init__(self, boundary_edges):
        self.boundary_edges = [tuple(int(v) for v in edge) for edge in boundary_edges]
        super().__init__(
            "Volume requires a closed mesh; open boundary edges: "
            + ", ".join(f"{a}-{b}" for a, b in self.boundary_edges[:10])
        )
