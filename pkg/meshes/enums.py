from django.db import models


class MeshFormat(models.TextChoices):
    STL_BINARY = "stl-binary", "STL (binary)"
    STL_ASCII = "stl-ascii", "STL (ASCII)"
    OBJ = "obj", "Wavefront OBJ"

    @classmethod
    def from_path(cls, path):
        """Guess the format from a file extension; STL is read as either flavour."""
        suffix = str(path).lower().rsplit(".", 1)[-1]
        if suffix == "obj":
            return cls.OBJ
        if suffix == "stl":
            return cls.STL_BINARY
        raise ValueError(f"Cannot infer mesh format from '{path}'.")

    @property
    def trimesh_type(self):
        return {
            MeshFormat.STL_BINARY: "stl",
            MeshFormat.STL_ASCII: "stl_ascii",
            MeshFormat.OBJ: "obj",
        }[self]
