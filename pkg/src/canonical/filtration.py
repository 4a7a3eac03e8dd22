"""Block structure of R^h shared by every canonical-type map."""
from dataclasses import dataclass
from itertools import accumulate

from common.errors import DimensionError


@dataclass(frozen=True)
class Filtration:
    """Levels 1..n with ``block_dims[i-1]`` coordinates each.

    Level 1 is the top factor; a level-i output may only read the
    coordinates of levels <= i.
    """

    block_dims: tuple

    def __post_init__(self):
        dims = tuple(int(k) for k in self.block_dims)
        if not dims or any(k <= 0 for k in dims):
            raise DimensionError(f"block dimensions must be positive, got {self.block_dims}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def levels(self):
        return len(self.block_dims)

    @property
    def dimension(self):
        return sum(self.block_dims)

    @property
    def offsets(self):
        """Cumulative ``K_0 = 0, K_1, ..., K_n``."""
        return (0,) + tuple(accumulate(self.block_dims))

    def span(self, level):
        """Coordinate indices of ``level`` (1-based) as a ``range``."""
        self._check_level(level)
        offsets = self.offsets
        return range(offsets[level - 1], offsets[level])

    def lower(self, level):
        """Number of coordinates strictly above ``level`` in the filtration, K_{level-1}."""
        self._check_level(level)
        return self.offsets[level - 1]

    def level_of(self, index):
        for level in range(1, self.levels + 1):
            if index in self.span(level):
                return level
        raise DimensionError(f"coordinate {index} outside dimension {self.dimension}")

    def split(self, vector):
        """Cut a length-h vector into per-level tuples."""
        if len(vector) != self.dimension:
            raise DimensionError(f"vector of length {len(vector)} for dimension {self.dimension}")
        return [tuple(vector[i] for i in self.span(level)) for level in range(1, self.levels + 1)]

    def _check_level(self, level):
        if not 1 <= level <= self.levels:
            raise DimensionError(f"level {level} outside 1..{self.levels}")
