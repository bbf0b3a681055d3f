"""
Finite groups as dense multiplication tables.

Everything later in the pipeline (structure, automorphisms, theorem checks)
works on a GroupTable: elements are the integers 0..n-1, 0 is always the
identity, and product[a][b] is the index of a*b.

Conventions used throughout the package:
- conjugation: x^g = g^-1 x g
- commutator: [a, b] = a^-1 b^-1 a b
"""

import hashlib
import logging
import os
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.config import ASSOC_SAMPLES, FULL_CHECK_LIMIT, SEED, TABLE_CAP
from src.errors import (
    GroupAxiomError,
    GroupInputError,
    ResourceOverflowError,
    StructuralError,
    VerificationFailure,
)

logger = logging.getLogger(__name__)


# -----------------------------
# Group table
# -----------------------------

def _canonicalize(product: np.ndarray, labels: List[str]) -> Tuple[np.ndarray, List[str]]:
    """Relabel so that the identity sits at index 0 (swap it with whatever was there)."""
    n = product.shape[0]
    idx = np.arange(n)
    candidates = np.nonzero((product == idx[None, :]).all(axis=1) & (product.T == idx[None, :]).all(axis=1))[0]
    if len(candidates) == 0:
        raise GroupAxiomError("table has no two-sided identity element")
    e = int(candidates[0])
    if e == 0:
        return product, labels
    perm = idx.copy()
    perm[0], perm[e] = e, 0  # perm is an involution: old index <-> new index
    relabeled = perm[product[np.ix_(perm, perm)]]
    new_labels = [labels[int(i)] for i in perm]
    logger.debug("identity found at index %d, relabeled to 0", e)
    return relabeled, new_labels


def validate_group_axioms(product: np.ndarray) -> np.ndarray:
    """
    Check the group axioms on a square integer matrix and return the inverse vector.

    Associativity is checked on every triple up to FULL_CHECK_LIMIT and on a
    seeded random sample of ASSOC_SAMPLES triples above it.
    """
    n = product.shape[0]
    idx = np.arange(n)

    bad = np.argwhere((product < 0) | (product >= n))
    if len(bad):
        i, j = (int(v) for v in bad[0])
        raise GroupAxiomError(f"entry {int(product[i, j])} out of range [0, {n})", (i, j))

    if not np.array_equal(product[0], idx):
        j = int(np.nonzero(product[0] != idx)[0][0])
        raise GroupAxiomError("index 0 is not a left identity", (0, j))
    if not np.array_equal(product[:, 0], idx):
        i = int(np.nonzero(product[:, 0] != idx)[0][0])
        raise GroupAxiomError("index 0 is not a right identity", (i, 0))

    sorted_rows = np.sort(product, axis=1)
    bad_rows = np.nonzero((sorted_rows != idx[None, :]).any(axis=1))[0]
    if len(bad_rows):
        raise GroupAxiomError("row is not a permutation (Latin square violated)", (int(bad_rows[0]),))
    sorted_cols = np.sort(product, axis=0)
    bad_cols = np.nonzero((sorted_cols != idx[:, None]).any(axis=0))[0]
    if len(bad_cols):
        raise GroupAxiomError("column is not a permutation (Latin square violated)", (int(bad_cols[0]),))

    inverse = np.argmax(product == 0, axis=1)
    left = product[inverse, idx]
    if not (left == 0).all():
        i = int(np.nonzero(left != 0)[0][0])
        raise GroupAxiomError("right inverse is not a left inverse", (i, int(inverse[i])))

    if n <= FULL_CHECK_LIMIT:
        for i in range(n):
            lhs = product[product[i]]  # (i*j)*k over all (j, k)
            rhs = product[i][product]  # i*(j*k)
            if not np.array_equal(lhs, rhs):
                j, k = (int(v) for v in np.argwhere(lhs != rhs)[0])
                raise GroupAxiomError("associativity fails", (i, j, k))
    else:
        logger.warning("order %d above %d: sampling %d triples for associativity", n, FULL_CHECK_LIMIT, ASSOC_SAMPLES)
        rng = np.random.default_rng(SEED)
        a, b, c = rng.integers(0, n, size=(3, ASSOC_SAMPLES))
        lhs = product[product[a, b], c]
        rhs = product[a, product[b, c]]
        miss = np.nonzero(lhs != rhs)[0]
        if len(miss):
            m = int(miss[0])
            raise GroupAxiomError("associativity fails", (int(a[m]), int(b[m]), int(c[m])))
    return inverse


class GroupTable:
    """
    Immutable dense multiplication table.

    Holds the numpy table (`product`, `inverse`) for vectorized work and plain
    Python row lists (`rows`, `inv`) for per-element loops.
    """

    def __init__(
        self,
        product,
        labels: Optional[Sequence[str]] = None,
        generators: Optional[Dict[str, int]] = None,
        name: str = "",
        validate: bool = True,
    ):
        arr = np.array(product, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise GroupAxiomError("product table must be a non-empty square matrix")
        n = arr.shape[0]
        if n > TABLE_CAP:
            raise ResourceOverflowError(f"group order {n} exceeds table cap {TABLE_CAP}")
        if labels is None:
            labels = ["1"] + [f"g{i}" for i in range(1, n)]
        elif len(labels) != n:
            raise GroupInputError(f"expected {n} labels, got {len(labels)}")
        bad = np.argwhere((arr < 0) | (arr >= n))
        if len(bad):
            i, j = (int(v) for v in bad[0])
            raise GroupAxiomError(f"entry {int(arr[i, j])} out of range [0, {n})", (i, j))
        arr, labels = _canonicalize(arr, list(labels))
        if validate:
            inverse = validate_group_axioms(arr)
        else:
            inverse = np.argmax(arr == 0, axis=1)

        arr.setflags(write=False)
        inverse.setflags(write=False)
        self.order = n
        self.product = arr
        self.inverse = inverse
        self.rows: List[List[int]] = arr.tolist()
        self.inv: List[int] = inverse.tolist()
        self.labels: Tuple[str, ...] = tuple(labels)
        self.generators: Dict[str, int] = dict(generators or {})
        self.name = name

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"GroupTable(name={self.name!r}, order={self.order})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupTable) and np.array_equal(self.product, other.product)

    def __hash__(self) -> int:
        return hash(self.digest())

    def elements(self) -> range:
        return range(self.order)

    def label(self, x: int) -> str:
        return self.labels[x]

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.product, self.product.T))

    @cached_property
    def conjugation_matrix(self) -> np.ndarray:
        """K[x, g] = g^-1 x g."""
        idx = np.arange(self.order)
        left = self.product[self.inverse[None, :], idx[:, None]]
        k = self.product[left, idx[None, :]]
        k.setflags(write=False)
        return k

    @cached_property
    def commutator_matrix(self) -> np.ndarray:
        """C[a, b] = a^-1 b^-1 a b."""
        idx = np.arange(self.order)
        ab_inv = self.product[np.ix_(self.inverse, self.inverse)]
        c = self.product[self.product[ab_inv, idx[:, None]], idx[None, :]]
        c.setflags(write=False)
        return c

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        idx = np.arange(n)
        orders = np.zeros(n, dtype=np.int64)
        cur = idx.copy()
        k = 1
        while True:
            hit = (cur == 0) & (orders == 0)
            orders[hit] = k
            if (orders > 0).all():
                break
            cur = self.product[cur, idx]
            k += 1
        if (n % orders != 0).any():
            x = int(np.nonzero(n % orders != 0)[0][0])
            raise GroupAxiomError(f"element order {int(orders[x])} does not divide {n}", (x,))
        orders.setflags(write=False)
        return orders

    @cached_property
    def classes(self) -> "ConjugacyClasses":
        return _compute_conjugacy_classes(self)

    @cached_property
    def class_index(self) -> np.ndarray:
        """class_index[x] = position of x's conjugacy class."""
        arr = np.array(self.classes.class_of, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    def digest(self) -> str:
        """Content digest of the canonical table bytes (cache key)."""
        h = hashlib.sha256()
        h.update(b"pgroup-table-v1:")
        h.update(str(self.order).encode())
        h.update(self.product.astype("<u4").tobytes())
        return h.hexdigest()


# -----------------------------
# Subgroups and quotients
# -----------------------------

@dataclass(frozen=True)
class SubgroupSet:
    members: Tuple[int, ...]
    parent_order: int
    _lookup: FrozenSet[int] = field(default=frozenset(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_lookup", frozenset(self.members))

    @classmethod
    def of(cls, t: GroupTable, elements: Iterable[int]) -> "SubgroupSet":
        """Build a subgroup from its full element set, verifying closure."""
        members = tuple(sorted({int(x) for x in elements}))
        if not members or members[0] != 0:
            raise StructuralError("subgroup must contain the identity")
        if members[-1] >= t.order:
            raise GroupInputError(f"element {members[-1]} out of range for order {t.order}")
        sub = np.array(members, dtype=np.int64)
        mask = np.zeros(t.order, dtype=bool)
        mask[sub] = True
        if not mask[t.product[np.ix_(sub, sub)]].all():
            raise StructuralError("element set is not closed under the product")
        if not mask[t.inverse[sub]].all():
            raise StructuralError("element set is not closed under inverses")
        return cls(members, t.order)

    @classmethod
    def whole(cls, t: GroupTable) -> "SubgroupSet":
        return cls(tuple(range(t.order)), t.order)

    @classmethod
    def trivial(cls, t: GroupTable) -> "SubgroupSet":
        return cls((0,), t.order)

    def __contains__(self, x) -> bool:
        return x in self._lookup

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def index(self) -> int:
        return self.parent_order // len(self.members)

    def is_trivial(self) -> bool:
        return len(self.members) == 1

    def is_whole(self) -> bool:
        return len(self.members) == self.parent_order

    def issubset(self, other: "SubgroupSet") -> bool:
        return self._lookup <= other._lookup

    def intersection(self, other: "SubgroupSet") -> "SubgroupSet":
        return SubgroupSet(tuple(sorted(self._lookup & other._lookup)), self.parent_order)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent_order, dtype=bool)
        m[list(self.members)] = True
        return m

    def is_abelian(self, t: GroupTable) -> bool:
        sub = np.array(self.members, dtype=np.int64)
        block = t.product[np.ix_(sub, sub)]
        return bool(np.array_equal(block, block.T))


@dataclass(frozen=True)
class QuotientGroup:
    table: GroupTable
    projection: Tuple[int, ...]
    kernel: SubgroupSet

    def representative(self, q: int) -> int:
        return self.projection.index(q)


# -----------------------------
# Element arithmetic
# -----------------------------

def _check_index(t: GroupTable, *xs: int) -> None:
    for x in xs:
        if not (0 <= x < t.order):
            raise GroupInputError(f"element index {x} out of range [0, {t.order})")


def multiply(t: GroupTable, a: int, b: int) -> int:
    _check_index(t, a, b)
    return t.rows[a][b]


def inverse(t: GroupTable, x: int) -> int:
    _check_index(t, x)
    return t.inv[x]


def power(t: GroupTable, x: int, k: int) -> int:
    _check_index(t, x)
    if k < 0:
        x, k = t.inv[x], -k
    result = 0
    for _ in range(k):
        result = t.rows[result][x]
    return result


def commutator(t: GroupTable, a: int, b: int) -> int:
    """[a, b] = a^-1 b^-1 a b."""
    _check_index(t, a, b)
    r, inv = t.rows, t.inv
    return r[r[r[inv[a]][inv[b]]][a]][b]


def conjugate(t: GroupTable, x: int, g: int) -> int:
    """x^g = g^-1 x g."""
    _check_index(t, x, g)
    r = t.rows
    return r[r[t.inv[g]][x]][g]


def element_order(t: GroupTable, x: int) -> int:
    _check_index(t, x)
    k, y = 1, x
    while y != 0:
        y = t.rows[y][x]
        k += 1
    if t.order % k:
        raise GroupAxiomError(f"element order {k} does not divide {t.order}", (x,))
    return k


# -----------------------------
# Subgroup machinery
# -----------------------------

def closure(t: GroupTable, seed: Iterable[int]) -> SubgroupSet:
    """Smallest subgroup containing `seed` (worklist closure under right multiplication)."""
    gens = sorted({int(g) for g in seed})
    _check_index(t, *gens)
    gens = [g for g in gens if g != 0]
    rows = t.rows
    seen = bytearray(t.order)
    seen[0] = 1
    found = [0]
    queue = deque([0])
    while queue:
        x = queue.popleft()
        row = rows[x]
        for g in gens:
            y = row[g]
            if not seen[y]:
                seen[y] = 1
                found.append(y)
                queue.append(y)
    return SubgroupSet.of(t, found)


def centralizer(t: GroupTable, x: int) -> SubgroupSet:
    _check_index(t, x)
    members = np.nonzero(t.product[x, :] == t.product[:, x])[0]
    return SubgroupSet.of(t, members.tolist())


def is_normal(t: GroupTable, h: SubgroupSet) -> bool:
    sub = np.array(h.members, dtype=np.int64)
    conj = t.conjugation_matrix[sub, :]
    return bool(h.mask()[conj].all())


def quotient(t: GroupTable, n: SubgroupSet) -> QuotientGroup:
    """
    G/N with cosets numbered by their smallest element (identity coset = 0).
    The projection is re-checked to be a homomorphism up to FULL_CHECK_LIMIT.
    """
    if n.parent_order != t.order:
        raise GroupInputError("subgroup belongs to a different table")
    if not is_normal(t, n):
        raise StructuralError("cannot form a quotient by a non-normal subgroup")
    sub = np.array(n.members, dtype=np.int64)
    proj = np.full(t.order, -1, dtype=np.int64)
    reps: List[int] = []
    for x in range(t.order):
        if proj[x] < 0:
            proj[t.product[x, sub]] = len(reps)
            reps.append(x)
    rep_arr = np.array(reps, dtype=np.int64)
    qprod = proj[t.product[np.ix_(rep_arr, rep_arr)]]
    labels = [t.labels[r] for r in reps]
    qt = GroupTable(qprod, labels=labels, name=f"{t.name}/N" if t.name else "")

    if t.order <= FULL_CHECK_LIMIT:
        if not np.array_equal(proj[t.product], qt.product[proj[:, None], proj[None, :]]):
            raise VerificationFailure("coset projection is not a homomorphism")
    if not np.array_equal(np.nonzero(proj == 0)[0], sub):
        raise VerificationFailure("kernel of projection differs from the quotiented subgroup")
    return QuotientGroup(table=qt, projection=tuple(proj.tolist()), kernel=n)


@dataclass(frozen=True)
class ConjugacyClasses:
    classes: Tuple[Tuple[int, ...], ...]
    class_of: Tuple[int, ...]

    @property
    def representatives(self) -> Tuple[int, ...]:
        return tuple(c[0] for c in self.classes)

    def sizes(self) -> List[int]:
        return [len(c) for c in self.classes]

    def class_of_element(self, x: int) -> Tuple[int, ...]:
        return self.classes[self.class_of[x]]


def conjugacy_classes(t: GroupTable) -> ConjugacyClasses:
    """Partition of the elements into classes, ordered by smallest member."""
    return t.classes


def _compute_conjugacy_classes(t: GroupTable) -> ConjugacyClasses:
    conj = t.conjugation_matrix
    class_of = [-1] * t.order
    classes: List[Tuple[int, ...]] = []
    for x in range(t.order):
        if class_of[x] >= 0:
            continue
        members = tuple(np.unique(conj[x]).tolist())
        if t.order % len(members):
            raise VerificationFailure(f"class of {x} has size {len(members)} not dividing {t.order}")
        for y in members:
            class_of[y] = len(classes)
        classes.append(members)
    return ConjugacyClasses(classes=tuple(classes), class_of=tuple(class_of))


# -----------------------------
# Homomorphisms and products
# -----------------------------

def extend_homomorphism(
    src: GroupTable,
    gens: Sequence[int],
    images: Sequence[int],
    dst: GroupTable,
    partial: bool = False,
) -> Optional[List[int]]:
    """
    Extend gens -> images to a homomorphism src -> dst by BFS over the Cayley graph.

    Every edge x -> x*g of the explored part is checked, which is exactly the
    condition for the map to be a homomorphism on the subgroup generated by
    `gens`. Returns None on conflict. Without `partial`, also None when `gens`
    do not generate src; with it, unreached entries are -1.
    """
    img = [-1] * src.order
    img[0] = 0
    srows, drows = src.rows, dst.rows
    pairs = list(zip(gens, images))
    queue = deque([0])
    while queue:
        x = queue.popleft()
        ix = img[x]
        sx, dx = srows[x], drows[ix]
        for g, h in pairs:
            y = sx[g]
            w = dx[h]
            iy = img[y]
            if iy < 0:
                img[y] = w
                queue.append(y)
            elif iy != w:
                return None
    if not partial and -1 in img:
        return None
    return img


def greedy_generators(t: GroupTable) -> Tuple[int, ...]:
    """Generating tuple built by repeatedly adding the smallest element not yet reached."""
    gens: List[int] = []
    current = SubgroupSet.trivial(t)
    while not current.is_whole():
        x = next(x for x in range(t.order) if x not in current)
        gens.append(x)
        current = closure(t, gens)
    return tuple(gens)


def cyclic_table(m: int, name: str = "") -> GroupTable:
    idx = np.arange(m)
    labels = ["1", "x"] + [f"x^{k}" for k in range(2, m)]
    return GroupTable((idx[:, None] + idx[None, :]) % m, labels=labels[:m], name=name or f"C{m}")


def direct_product(a: GroupTable, b: GroupTable) -> GroupTable:
    """A x B with (i, j) stored at index i*|B| + j."""
    m = b.order
    block = a.product[:, None, :, None] * m + b.product[None, :, None, :]
    product = block.reshape(a.order * m, a.order * m)
    labels = []
    for la in a.labels:
        for lb in b.labels:
            if la == "1":
                labels.append(lb)
            elif lb == "1":
                labels.append(la)
            else:
                labels.append(f"{la}*{lb}")
    name = f"{a.name} x {b.name}" if a.name and b.name else ""
    return GroupTable(product, labels=labels, name=name)


# -----------------------------
# Table file format
# -----------------------------

def parse_table_text(text: str, name: str = "") -> GroupTable:
    """
    Parse the multiplication-table file format:

        n
        row 0
        ...
        row n-1
        # <index> <label>     (optional, any number)

    Index 0 must be the identity. Any axiom violation raises GroupAxiomError.
    """
    data: List[Tuple[int, str]] = []
    labels: Dict[int, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split(None, 1)
            if len(parts) == 2 and parts[0].isdigit():
                labels[int(parts[0])] = parts[1].strip()
            continue
        data.append((lineno, line))

    if not data:
        raise GroupInputError("empty table file")
    lineno, head = data[0]
    try:
        n = int(head)
    except ValueError as e:
        raise GroupInputError(f"line {lineno}: expected group order, got {head!r}") from e
    if n < 1:
        raise GroupInputError(f"line {lineno}: group order must be positive")
    if n > TABLE_CAP:
        raise ResourceOverflowError(f"group order {n} exceeds table cap {TABLE_CAP}")
    rows = data[1:]
    if len(rows) != n:
        raise GroupInputError(f"expected {n} table rows, found {len(rows)}")
    product = []
    for lineno, line in rows:
        try:
            row = [int(v) for v in line.split()]
        except ValueError as e:
            raise GroupInputError(f"line {lineno}: non-integer entry") from e
        if len(row) != n:
            raise GroupInputError(f"line {lineno}: expected {n} entries, found {len(row)}")
        product.append(row)

    # the file format pins the identity at 0, so no relabeling on this path
    arr = np.array(product, dtype=np.int64)
    idx = np.arange(n)
    if not np.array_equal(arr[0], idx):
        raise GroupAxiomError("index 0 must be the identity", (0, int(np.nonzero(arr[0] != idx)[0][0])))
    if not np.array_equal(arr[:, 0], idx):
        raise GroupAxiomError("index 0 must be the identity", (int(np.nonzero(arr[:, 0] != idx)[0][0]), 0))
    bad = [i for i in labels if not 0 <= i < n]
    if bad:
        raise GroupInputError(f"label for out-of-range index {bad[0]}")
    names = [labels.get(i, "1" if i == 0 else f"g{i}") for i in range(n)]
    return GroupTable(arr, labels=names, name=name)


def format_table(t: GroupTable) -> str:
    lines = [str(t.order)]
    lines.extend(" ".join(str(v) for v in row) for row in t.rows)
    lines.extend(f"# {i} {t.labels[i]}" for i in range(t.order))
    return "\n".join(lines) + "\n"


def load_table(path: str) -> GroupTable:
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return parse_table_text(text, name=os.path.splitext(os.path.basename(path))[0])
