"""Symbolic base spaces: subshifts of finite type and cylinder functions.

Everything downstream only ever inspects finitely many symbol coordinates, so
admissible finite words are the universal currency here; infinite sequences
never materialize.  Words are plain tuples of symbol indices, ordered
lexicographically whenever a depth is enumerated, and that ordering fixes the
indexing of every vector and matrix in the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

Word = tuple[int, ...]

__all__ = [
    "Word",
    "SubshiftSpec",
    "CylinderFunction",
    "admissible_words",
    "preimage_symbols",
    "promote",
    "d_theta",
    "constant_function",
    "indicator_cylinder",
]


class SubshiftSpec:
    """A primitive subshift of finite type together with its metric parameter.

    Parameters
    ----------
    alphabet_size : int
        Number of symbols; symbols are 0 .. alphabet_size - 1.
    transition : array-like
        0/1 matrix, either shape (A, A) or a flat row-major sequence of
        length A*A.  transition[a][b] == 1 means symbol b may follow a.
    theta : float
        Metric parameter in (0, 1); two sequences at symbolic distance
        theta**j share exactly a length-j prefix.

    The transition matrix must be primitive: some power is entrywise
    positive.  By the Wielandt bound it suffices to inspect powers up to
    alphabet_size**2, and construction fails if none of them is positive.
    """

    def __init__(self, alphabet_size: int, transition, theta: float):
        if alphabet_size < 1:
            raise ValueError("alphabet_size must be at least 1")
        T = np.asarray(transition)
        if T.ndim == 1:
            if T.size != alphabet_size * alphabet_size:
                raise ValueError(
                    f"flat transition needs {alphabet_size**2} entries, got {T.size}"
                )
            T = T.reshape(alphabet_size, alphabet_size)
        if T.shape != (alphabet_size, alphabet_size):
            raise ValueError(f"transition shape {T.shape} does not match alphabet")
        T = T.astype(np.int8)
        if not np.isin(T, (0, 1)).all():
            raise ValueError("transition entries must be 0 or 1")
        theta = float(theta)
        if not 0.0 < theta < 1.0:
            raise ValueError("theta must lie strictly between 0 and 1")

        B = T > 0
        P = B.copy()
        primitive = False
        for _ in range(alphabet_size * alphabet_size):
            if P.all():
                primitive = True
                break
            P = P @ B
        if not primitive:
            raise ValueError("transition matrix is not primitive")

        T.setflags(write=False)
        self._alphabet_size = alphabet_size
        self._transition = T
        self._theta = theta
        self._word_cache: dict[int, tuple[Word, ...]] = {}
        self._index_cache: dict[int, dict[Word, int]] = {}

    @property
    def alphabet_size(self) -> int:
        return self._alphabet_size

    @property
    def transition(self) -> np.ndarray:
        return self._transition

    @property
    def theta(self) -> float:
        return self._theta

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubshiftSpec):
            return NotImplemented
        return (
            self._alphabet_size == other._alphabet_size
            and self._theta == other._theta
            and np.array_equal(self._transition, other._transition)
        )

    def __hash__(self) -> int:
        return hash((self._alphabet_size, self._theta, self._transition.tobytes()))

    def __repr__(self) -> str:
        return (
            f"SubshiftSpec(alphabet_size={self._alphabet_size}, "
            f"theta={self._theta!r})"
        )

    def allows(self, a: int, b: int) -> bool:
        """True when symbol b may follow symbol a."""
        return bool(self._transition[a, b])

    def words(self, depth: int) -> tuple[Word, ...]:
        """All admissible words of the given length, lexicographic order."""
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        cached = self._word_cache.get(depth)
        if cached is not None:
            return cached
        if depth == 0:
            out: tuple[Word, ...] = ((),)
        else:
            level: list[Word] = [(a,) for a in range(self._alphabet_size)]
            T = self._transition
            for _ in range(depth - 1):
                level = [
                    w + (b,)
                    for w in level
                    for b in range(self._alphabet_size)
                    if T[w[-1], b]
                ]
            out = tuple(level)
        self._word_cache[depth] = out
        return out

    def word_index(self, depth: int) -> dict[Word, int]:
        """Word -> position map for the lexicographic enumeration at a depth."""
        cached = self._index_cache.get(depth)
        if cached is not None:
            return cached
        idx = {w: i for i, w in enumerate(self.words(depth))}
        self._index_cache[depth] = idx
        return idx

    def word_count(self, depth: int) -> int:
        """Exact admissible word count, computed without enumeration."""
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        if depth == 0:
            return 1
        T = self._transition.astype(object)
        v = np.ones(self._alphabet_size, dtype=object)
        for _ in range(depth - 1):
            v = T @ v
        return int(v.sum())

    def is_admissible(self, word: Word) -> bool:
        T = self._transition
        A = self._alphabet_size
        if any(not 0 <= s < A for s in word):
            return False
        return all(T[word[i], word[i + 1]] for i in range(len(word) - 1))


def admissible_words(spec: SubshiftSpec, depth: int) -> tuple[Word, ...]:
    """Lexicographically ordered admissible words of a given length."""
    return spec.words(depth)


def preimage_symbols(spec: SubshiftSpec, word: Word) -> tuple[int, ...]:
    """Symbols a such that a followed by word is admissible.

    For the empty word every symbol qualifies.
    """
    if not word:
        return tuple(range(spec.alphabet_size))
    first = word[0]
    T = spec.transition
    return tuple(a for a in range(spec.alphabet_size) if T[a, first])


def d_theta(spec: SubshiftSpec, x: Word, y: Word) -> float:
    """Symbolic metric theta**(length of the common prefix).

    Both words must have equal length; identical words sit at the resolution
    floor theta**len rather than at zero, since longer agreement is not
    observable from the data given.
    """
    if len(x) != len(y):
        raise ValueError("d_theta requires words of equal length")
    j = 0
    for a, b in zip(x, y):
        if a != b:
            break
        j += 1
    return spec.theta**j


@dataclass(frozen=True)
class CylinderFunction:
    """A function on the shift space depending on the first `depth` symbols.

    values[i] is the value on the cylinder of the i-th admissible word of
    length `depth` in lexicographic order.  Values are stored complex; real
    data simply has zero imaginary parts.
    """

    spec: SubshiftSpec
    depth: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be nonnegative")
        vals = np.asarray(self.values, dtype=np.complex128).ravel().copy()
        expected = len(self.spec.words(self.depth))
        if vals.size != expected:
            raise ValueError(
                f"depth {self.depth} needs {expected} values, got {vals.size}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def evaluate(self, word: Word) -> complex:
        """Value on any admissible word extending this function's depth."""
        if len(word) < self.depth:
            raise ValueError(
                f"word of length {len(word)} is too short for depth {self.depth}"
            )
        key = tuple(word[: self.depth])
        idx = self.spec.word_index(self.depth)
        try:
            return complex(self.values[idx[key]])
        except KeyError:
            raise ValueError(f"word prefix {key} is not admissible") from None

    @property
    def is_real(self) -> bool:
        return bool(np.allclose(self.values.imag, 0.0, atol=1e-14))

    def real_values(self) -> np.ndarray:
        if not self.is_real:
            raise ValueError("cylinder function has nonreal values")
        return self.values.real.copy()

    def conjugate(self) -> "CylinderFunction":
        return CylinderFunction(self.spec, self.depth, np.conj(self.values))

    def max_abs(self) -> float:
        return float(np.abs(self.values).max())

    def _aligned(self, other: "CylinderFunction"):
        if self.spec != other.spec:
            raise ValueError("cylinder functions live on different subshifts")
        d = max(self.depth, other.depth)
        return promote(self, d), promote(other, d)

    def __add__(self, other):
        if isinstance(other, CylinderFunction):
            a, b = self._aligned(other)
            return CylinderFunction(a.spec, a.depth, a.values + b.values)
        return CylinderFunction(self.spec, self.depth, self.values + complex(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, CylinderFunction):
            a, b = self._aligned(other)
            return CylinderFunction(a.spec, a.depth, a.values - b.values)
        return CylinderFunction(self.spec, self.depth, self.values - complex(other))

    def __mul__(self, other):
        if isinstance(other, CylinderFunction):
            a, b = self._aligned(other)
            return CylinderFunction(a.spec, a.depth, a.values * b.values)
        return CylinderFunction(self.spec, self.depth, self.values * complex(other))

    __rmul__ = __mul__

    def __neg__(self):
        return CylinderFunction(self.spec, self.depth, -self.values)


def promote(funcn: CylinderFunction, new_depth: int) -> CylinderFunction:
    """Re-express a cylinder function at a finer depth.

    The promoted function takes on each longer word the value of the original
    on its prefix; promotion to a coarser depth has no meaning and errors.
    """
    if new_depth < funcn.depth:
        raise ValueError(
            f"cannot promote depth {funcn.depth} function to coarser depth {new_depth}"
        )
    if new_depth == funcn.depth:
        return funcn
    spec = funcn.spec
    idx = spec.word_index(funcn.depth)
    vals = np.array(
        [funcn.values[idx[w[: funcn.depth]]] for w in spec.words(new_depth)],
        dtype=np.complex128,
    )
    return CylinderFunction(spec, new_depth, vals)


def constant_function(spec: SubshiftSpec, value: complex) -> CylinderFunction:
    return CylinderFunction(spec, 0, np.array([value], dtype=np.complex128))


def indicator_cylinder(spec: SubshiftSpec, word: Word) -> CylinderFunction:
    """Indicator of the cylinder set of an admissible word."""
    if not spec.is_admissible(word):
        raise ValueError(f"word {word} is not admissible")
    depth = len(word)
    vals = np.zeros(len(spec.words(depth)), dtype=np.complex128)
    vals[spec.word_index(depth)[tuple(word)]] = 1.0
    return CylinderFunction(spec, depth, vals)
