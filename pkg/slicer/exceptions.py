class SelfIntersectionError(ValueError):
    """Polygon edges ``first`` and ``second`` cross each other."""

    def __init__(self, first, second):
        self.first = int(first)
        self.second = int(second)
        super().__init__(
            f"Polygon is not simple: edge {self.first} crosses edge {self.second}."
        )
