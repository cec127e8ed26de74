"""Finite mechanisms over product database spaces.

A database has ``n`` entries, entry ``i`` taking values in ``range(k_i)``.
Instances are stored flat in mixed-radix order with the last entry varying
fastest, so a mechanism is a ``prod(k_i) x |Y|`` row-stochastic matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, NamedTuple, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .prob_core import SUM_TOL, DimensionError, DomainError

DEFAULT_CAP = 2**20


class CapExceededError(ValueError):
    """Database space larger than the enumeration cap."""


class SchemaMismatchError(ValueError):
    pass


class OverlapError(ValueError):
    pass


class MechFormatError(ValueError):
    """Malformed MECH v1 file; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class DatabaseSchema:
    entry_sizes: tuple[int, ...]
    cap: int = field(default=DEFAULT_CAP, compare=False)

    def __post_init__(self):
        sizes = tuple(int(k) for k in self.entry_sizes)
        if len(sizes) == 0:
            raise DomainError("a database needs at least one entry")
        if any(k < 1 for k in sizes):
            raise DomainError(f"entry alphabet sizes must be >= 1, got {sizes}")
        if math.prod(sizes) > self.cap:
            raise CapExceededError(f"database space {math.prod(sizes)} exceeds cap {self.cap}")
        object.__setattr__(self, "entry_sizes", sizes)

    @property
    def n(self) -> int:
        return len(self.entry_sizes)

    @property
    def size(self) -> int:
        return math.prod(self.entry_sizes)

    def encode(self, values: Sequence[int]) -> int:
        if len(values) != self.n:
            raise IndexError(f"expected {self.n} entry values, got {len(values)}")
        idx = 0
        for v, k in zip(values, self.entry_sizes):
            if not 0 <= v < k:
                raise IndexError(f"value {v} out of range for alphabet of size {k}")
            idx = idx * k + int(v)
        return idx

    def decode(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.size:
            raise IndexError(f"database index {index} out of range [0, {self.size})")
        out = []
        for k in reversed(self.entry_sizes):
            index, r = divmod(index, k)
            out.append(r)
        return tuple(reversed(out))

    def digits(self) -> np.ndarray:
        """``(size, n)`` array whose row ``a`` is ``decode(a)``."""
        grids = np.indices(self.entry_sizes).reshape(self.n, -1)
        return grids.T.copy()


class NeighborPair(NamedTuple):
    a: int
    b: int
    entry: int


def neighbor_arrays(schema: DatabaseSchema) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All unordered Hamming-1 pairs as index arrays ``(a, b, entry)`` with ``a < b``."""
    idx = np.arange(schema.size).reshape(schema.entry_sizes)
    a_parts, b_parts, e_parts = [], [], []
    for i, k in enumerate(schema.entry_sizes):
        moved = np.moveaxis(idx, i, -1).reshape(-1, k)
        for u in range(k):
            for v in range(u + 1, k):
                a_parts.append(moved[:, u])
                b_parts.append(moved[:, v])
                e_parts.append(np.full(moved.shape[0], i))
    if not a_parts:
        empty = np.zeros(0, dtype=int)
        return empty, empty, empty
    return np.concatenate(a_parts), np.concatenate(b_parts), np.concatenate(e_parts)


def neighbors(schema: DatabaseSchema) -> Iterator[NeighborPair]:
    """Yield every unordered pair of instances at Hamming distance one, once."""
    a, b, e = neighbor_arrays(schema)
    for ai, bi, ei in zip(a.tolist(), b.tolist(), e.tolist()):
        yield NeighborPair(ai, bi, ei)


def neighbor_count(schema: DatabaseSchema) -> int:
    return schema.size * sum(k - 1 for k in schema.entry_sizes) // 2


@dataclass(frozen=True, eq=False)
class Mechanism:
    """Row-stochastic matrix P(y | x^n) with rows in flat schema order."""

    schema: DatabaseSchema
    matrix: np.ndarray

    def __post_init__(self):
        w = np.array(self.matrix, dtype=float)
        if w.ndim != 2:
            raise DimensionError(f"mechanism matrix must be 2-D, got shape {w.shape}")
        if w.shape[0] != self.schema.size:
            raise DimensionError(f"schema has {self.schema.size} instances but matrix has {w.shape[0]} rows")
        if w.shape[1] < 1:
            raise DimensionError("output alphabet must be non-empty")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("mechanism has negative or non-finite entries")
        sums = w.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > SUM_TOL)
        if bad.size:
            raise ValueError(f"row {bad[0]} sums to {sums[bad[0]]!r}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, "matrix", w)

    @property
    def output_size(self) -> int:
        return self.matrix.shape[1]

    @property
    def n(self) -> int:
        return self.schema.n

    def row(self, values: Sequence[int]) -> np.ndarray:
        return self.matrix[self.schema.encode(values)]

    def tensor(self) -> np.ndarray:
        """The matrix viewed as an array of shape ``(*entry_sizes, |Y|)``."""
        return self.matrix.reshape(*self.schema.entry_sizes, self.output_size)

    def __eq__(self, other):
        if not isinstance(other, Mechanism):
            return NotImplemented
        return self.schema == other.schema and np.array_equal(self.matrix, other.matrix)

    __hash__ = None


def slices(m: Mechanism, i: int) -> tuple[np.ndarray, np.ndarray]:
    """All sub-channels for entry ``i`` at once.

    Returns ``(rest, stack)`` where ``stack[r]`` is the ``|X_i| x |Y|`` channel
    obtained by fixing the other entries to ``rest[r]``.
    """
    if not 0 <= i < m.n:
        raise IndexError(f"entry index {i} out of range for n={m.n}")
    t = np.moveaxis(m.tensor(), i, -2)
    k = m.schema.entry_sizes[i]
    stack = t.reshape(-1, k, m.output_size)
    other = [s for j, s in enumerate(m.schema.entry_sizes) if j != i]
    if other:
        rest = np.indices(other).reshape(len(other), -1).T
    else:
        rest = np.zeros((1, 0), dtype=int)
    return rest, stack


def subchannel(m: Mechanism, i: int, x_rest: Sequence[int]) -> np.ndarray:
    """Channel from entry ``i`` to the output with the other entries fixed to ``x_rest``."""
    if not 0 <= i < m.n:
        raise IndexError(f"entry index {i} out of range for n={m.n}")
    x_rest = list(x_rest)
    if len(x_rest) != m.n - 1:
        raise IndexError(f"x_rest needs {m.n - 1} values, got {len(x_rest)}")
    k = m.schema.entry_sizes[i]
    rows = [m.schema.encode(x_rest[:i] + [v] + x_rest[i:]) for v in range(k)]
    return m.matrix[rows].copy()


# -- constructors -------------------------------------------------------------

def constant_mechanism(schema: DatabaseSchema, output: ArrayLike) -> Mechanism:
    out = np.asarray(output, dtype=float)
    return Mechanism(schema, np.tile(out, (schema.size, 1)))


def make_randomized_response(n: int, flip_p: float) -> Mechanism:
    """Each of ``n`` binary entries is released with probability ``flip_p`` of being flipped.

    The output is the full flipped-bit vector, encoded in the same mixed-radix
    order as the database (``2**n`` symbols).
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not 0 < flip_p < 0.5:
        raise DomainError(f"flip_p must lie in (0, 0.5), got {flip_p}")
    bit = np.array([[1 - flip_p, flip_p], [flip_p, 1 - flip_p]])
    w = np.ones((1, 1))
    for _ in range(n):
        w = np.kron(w, bit)
    return Mechanism(DatabaseSchema((2,) * n), w)


def make_erasure(N: int, pass_p: float) -> Mechanism:
    """Erasure channel on a single entry: output 0 is the erasure, output ``x + 1`` reveals ``x``."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if not 0 <= pass_p <= 1:
        raise DomainError(f"pass_p must lie in [0, 1], got {pass_p}")
    w = np.zeros((N, N + 1))
    w[:, 0] = 1 - pass_p
    w[np.arange(N), np.arange(N) + 1] = pass_p
    return Mechanism(DatabaseSchema((N,)), w)


def make_group_example(eps_p: float, alphabet: int) -> Mechanism:
    """Two entries over a common alphabet; leaks only whether they agree, plus the value when they do.

    Outputs ``0..alphabet-1`` are the value itself, ``alphabet`` is ``e1``
    (the erasure) and ``alphabet + 1`` is ``e2`` (the entries differ). When the
    entries agree the value is shown with probability ``eps_p``; otherwise
    ``e2`` is shown with probability ``eps_p``. ``e1`` takes the rest.
    """
    if alphabet < 2:
        raise DomainError(f"alphabet must be >= 2, got {alphabet}")
    if not 0 <= eps_p <= 1:
        raise DomainError(f"eps_p must lie in [0, 1], got {eps_p}")
    schema = DatabaseSchema((alphabet, alphabet))
    e1, e2 = alphabet, alphabet + 1
    w = np.zeros((schema.size, alphabet + 2))
    for x1 in range(alphabet):
        for x2 in range(alphabet):
            r = schema.encode((x1, x2))
            w[r, e1] = 1 - eps_p
            w[r, x1 if x1 == x2 else e2] = eps_p
    return Mechanism(schema, w)


def noisy_count_support(n: int, noise_alpha: float) -> np.ndarray:
    """Output labels of :func:`make_noisy_count`: integers ``-K .. n + K``."""
    K = math.ceil(math.log(1e6) / math.log(1 / noise_alpha))
    return np.arange(-K, n + K + 1)


def make_noisy_count(n: int, noise_alpha: float) -> Mechanism:
    """Sum of ``n`` binary entries plus two-sided geometric noise.

    ``P(Z = k)`` is proportional to ``noise_alpha**|k|``. The output range is
    cut to ``[-K, n + K]`` with ``K = ceil(ln 1e6 / ln(1/noise_alpha))``, and the
    tail mass beyond each end is folded onto that end. Folding, rather than
    dropping and renormalizing, keeps every row on the same support so the
    likelihood ratio between neighbors stays exactly ``1/noise_alpha``.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not 0 < noise_alpha < 1:
        raise DomainError(f"noise_alpha must lie in (0, 1), got {noise_alpha}")
    ys = noisy_count_support(n, noise_alpha)
    lo, hi = ys[0], ys[-1]
    c = (1 - noise_alpha) / (1 + noise_alpha)
    schema = DatabaseSchema((2,) * n)
    counts = schema.digits().sum(axis=1)
    sums = np.arange(n + 1)
    table = c * noise_alpha ** np.abs(ys[None, :] - sums[:, None])
    # P(s + Z <= lo) and P(s + Z >= hi); s - lo >= 1 and hi - s >= 1 always
    table[:, 0] = c * noise_alpha ** (sums - lo) / (1 - noise_alpha)
    table[:, -1] = c * noise_alpha ** (hi - sums) / (1 - noise_alpha)
    table /= table.sum(axis=1, keepdims=True)
    return Mechanism(schema, table[counts])


# -- composition --------------------------------------------------------------

def compose_parallel(m1: Mechanism, m2: Mechanism) -> Mechanism:
    """Release both outputs, drawn independently given the database.

    The joint output index is ``y1 * |Y2| + y2``.
    """
    if m1.schema != m2.schema:
        raise SchemaMismatchError(f"schemas differ: {m1.schema.entry_sizes} vs {m2.schema.entry_sizes}")
    w = (m1.matrix[:, :, None] * m2.matrix[:, None, :]).reshape(m1.schema.size, -1)
    return Mechanism(m1.schema, w)


def compose_sequential(first: Mechanism, followups: Sequence[Mechanism]) -> Mechanism:
    """Joint mechanism of ``Y1 ~ first`` then ``Y2 ~ followups[y1]``.

    ``followups[y1]`` is the conditional ``P(y2 | x^n, y1)``; all of them must
    share ``first``'s schema and a common output size.
    """
    if len(followups) != first.output_size:
        raise SchemaMismatchError(f"need one follow-up per first output ({first.output_size}), got {len(followups)}")
    sizes = {f.output_size for f in followups}
    if len(sizes) != 1:
        raise SchemaMismatchError("follow-up mechanisms must share an output size")
    if any(f.schema != first.schema for f in followups):
        raise SchemaMismatchError("follow-up mechanisms must share the database schema")
    stack = np.stack([f.matrix for f in followups], axis=1)  # (X, Y1, Y2)
    w = (first.matrix[:, :, None] * stack).reshape(first.schema.size, -1)
    return Mechanism(first.schema, w)


def compose_disjoint(
    m1: Mechanism,
    entries1: Sequence[int],
    m2: Mechanism,
    entries2: Sequence[int],
    schema: DatabaseSchema,
) -> Mechanism:
    """Joint release of two mechanisms reading disjoint sets of entries.

    ``m1`` sees entries ``entries1`` of ``schema`` (in that order) and ``m2``
    sees ``entries2``; their outputs are conditionally independent.
    """
    entries1, entries2 = list(entries1), list(entries2)
    if set(entries1) & set(entries2):
        raise OverlapError(f"entry sets overlap: {sorted(set(entries1) & set(entries2))}")
    for m, ents in ((m1, entries1), (m2, entries2)):
        if len(set(ents)) != len(ents) or any(not 0 <= e < schema.n for e in ents):
            raise IndexError(f"invalid entry list {ents} for n={schema.n}")
        sub = tuple(schema.entry_sizes[e] for e in ents)
        if m.schema.entry_sizes != sub:
            raise SchemaMismatchError(f"sub-mechanism schema {m.schema.entry_sizes} does not match entries {ents} -> {sub}")
    digits = schema.digits()

    def flat(m, ents):
        idx = np.zeros(schema.size, dtype=int)
        for e in ents:
            idx = idx * schema.entry_sizes[e] + digits[:, e]
        return m.matrix[idx]

    r1, r2 = flat(m1, entries1), flat(m2, entries2)
    w = (r1[:, :, None] * r2[:, None, :]).reshape(schema.size, -1)
    return Mechanism(schema, w)


# -- MECH v1 files ------------------------------------------------------------

def format_mechanism(m: Mechanism) -> str:
    lines = ["MECH 1", "schema " + " ".join(map(str, m.schema.entry_sizes)), f"outputs {m.output_size}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in m.matrix]
    return "\n".join(lines) + "\n"


def save_mechanism(m: Mechanism, path) -> None:
    Path(path).write_text(format_mechanism(m))


def parse_mechanism(text: str, cap: int = DEFAULT_CAP) -> Mechanism:
    """Parse MECH v1 text; errors carry the 1-based line number."""
    content = [
        (no, line.strip())
        for no, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if len(content) < 3:
        raise MechFormatError("file truncated before the header ends", content[-1][0] if content else None)
    (n1, magic), (n2, schema_line), (n3, out_line) = content[:3]
    if magic.split() != ["MECH", "1"]:
        raise MechFormatError(f"expected 'MECH 1', got {magic!r}", n1)
    parts = schema_line.split()
    if not parts or parts[0] != "schema" or len(parts) < 2:
        raise MechFormatError(f"expected 'schema k1 ... kn', got {schema_line!r}", n2)
    try:
        sizes = tuple(int(p) for p in parts[1:])
    except ValueError:
        raise MechFormatError(f"non-integer alphabet size in {schema_line!r}", n2) from None
    if any(k < 1 for k in sizes):
        raise MechFormatError("alphabet sizes must be >= 1", n2)
    if math.prod(sizes) > cap:
        raise CapExceededError(f"database space {math.prod(sizes)} exceeds cap {cap}")
    schema = DatabaseSchema(sizes, cap=cap)
    parts = out_line.split()
    if len(parts) != 2 or parts[0] != "outputs":
        raise MechFormatError(f"expected 'outputs m', got {out_line!r}", n3)
    try:
        m_out = int(parts[1])
    except ValueError:
        raise MechFormatError(f"non-integer output size {parts[1]!r}", n3) from None
    if m_out < 1:
        raise MechFormatError("output size must be >= 1", n3)
    body = content[3:]
    if len(body) != schema.size:
        where = body[schema.size][0] if len(body) > schema.size else (body[-1][0] if body else n3)
        raise MechFormatError(f"expected {schema.size} matrix rows, found {len(body)}", where)
    w = np.empty((schema.size, m_out))
    for r, (no, line) in enumerate(body):
        fields = line.split()
        if len(fields) != m_out:
            raise MechFormatError(f"row {r} has {len(fields)} entries, expected {m_out}", no)
        try:
            w[r] = [float(f) for f in fields]
        except ValueError:
            raise MechFormatError(f"row {r} contains a non-numeric entry", no) from None
        if not np.all(np.isfinite(w[r])) or np.any(w[r] < 0):
            raise MechFormatError(f"row {r} has negative or non-finite entries", no)
        s = w[r].sum()
        if abs(s - 1.0) > SUM_TOL:
            raise MechFormatError(f"row {r} sums to {s!r}, not 1", no)
    return Mechanism(schema, w)


def load_mechanism(path, cap: int = DEFAULT_CAP) -> Mechanism:
    return parse_mechanism(Path(path).read_text(), cap=cap)
