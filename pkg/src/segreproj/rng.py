"""Counter-based deterministic random streams.

Every random draw in the package comes from a :class:`Stream` keyed by the
run seed plus a path of integers (trial index, sample index, ...).  Streams
are Philox generators, so a draw is identified by ``(seed, path, draw)``
and results never depend on how work is split across workers.
"""
import numpy as np


def _key(seed, path):
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(x) & 0xFFFFFFFF for x in path]
    return np.random.SeedSequence(words).generate_state(2, np.uint64)


class Stream:
    __slots__ = ("seed", "path", "draws", "_gen")

    def __init__(self, seed, *path):
        self.seed = int(seed)
        self.path = tuple(int(x) for x in path)
        self.draws = 0
        self._gen = np.random.Generator(np.random.Philox(key=_key(self.seed, self.path)))

    def child(self, *path):
        return Stream(self.seed, *(self.path + tuple(path)))

    def integers(self, low, high, size=None):
        """Uniform integers in ``[low, high)``."""
        self.draws += 1 if size is None else int(np.prod(size))
        out = self._gen.integers(low, high, size=size, dtype=np.int64)
        return int(out) if size is None else out

    def choice_index(self, n):
        return self.integers(0, n)

    def where(self):
        """Attribution of the next draw, used in failure reports."""
        return {"seed": self.seed, "path": list(self.path), "draw": self.draws}

    def __repr__(self):
        return f"Stream(seed={self.seed}, path={self.path}, draws={self.draws})"
