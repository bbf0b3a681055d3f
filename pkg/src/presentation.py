"""
Finite presentations and Todd-Coxeter coset enumeration.

Grammar (whitespace insignificant, `#` starts a line comment):

    presentation := '<' gens '|' relators '>'
    gens         := ident (',' ident)*
    relators     := relator (',' relator)*
    relator      := word ('=' word)?          # w1 = w2 means w1 * w2^-1
    word         := factor ('*' factor)*
    factor       := ident ('^' int)?

An optional `name: <text>` line before the presentation names the group.
"""

import logging
import os
import re
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config import MAX_COSETS
from src.errors import GroupInputError, PresentationSyntaxError, ResourceOverflowError, StructuralError
from src.group_core import GroupTable

logger = logging.getLogger(__name__)

COMPLETE = "complete"
OVERFLOWED = "overflowed"


# -------- Words and presentations --------

@dataclass(frozen=True)
class Word:
    """Freely reduced word: (generator id, non-zero exponent) pairs."""

    letters: Tuple[Tuple[int, int], ...]

    @classmethod
    def normalized(cls, pairs: Sequence[Tuple[int, int]]) -> "Word":
        stack: List[Tuple[int, int]] = []
        for g, e in pairs:
            if e == 0:
                continue
            if stack and stack[-1][0] == g:
                merged = stack.pop()[1] + e
                if merged:
                    stack.append((g, merged))
            else:
                stack.append((g, e))
        return cls(tuple(stack))

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word.normalized(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def columns(self) -> List[int]:
        """Letters as coset-table columns: generator g -> 2g, its inverse -> 2g+1."""
        cols: List[int] = []
        for g, e in self.letters:
            cols.extend([2 * g if e > 0 else 2 * g + 1] * abs(e))
        return cols

    def format(self, names: Sequence[str]) -> str:
        if not self.letters:
            return "1"
        return "*".join(names[g] if e == 1 else f"{names[g]}^{e}" for g, e in self.letters)


@dataclass(frozen=True)
class Presentation:
    generators: Tuple[str, ...]
    relators: Tuple[Word, ...]
    name: str = ""

    def __post_init__(self):
        if not self.generators:
            raise GroupInputError("a presentation needs at least one generator")
        if len(set(self.generators)) != len(self.generators):
            raise GroupInputError("duplicate generator names")
        for w in self.relators:
            for g, _ in w.letters:
                if not 0 <= g < len(self.generators):
                    raise GroupInputError(f"relator uses undeclared generator id {g}")

    def format(self) -> str:
        rels = ", ".join(w.format(self.generators) for w in self.relators)
        return f"< {', '.join(self.generators)} | {rels} >"


# -------- Parser --------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<int>[+-]?\d+)
  | (?P<sym>[<>|,*^=])
  | (?P<bad>.)
    """,
    re.VERBOSE,
)
_NAME_HEADER = re.compile(r"^\s*name\s*:(.*)$")


@dataclass(frozen=True)
class _Token:
    kind: str
    value: str
    line: int
    column: int


def _tokenize(text: str) -> Tuple[List[_Token], str]:
    tokens: List[_Token] = []
    name = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        header = _NAME_HEADER.match(line)
        if header and not tokens:
            name = header.group(1).strip()
            continue
        for m in _TOKEN.finditer(line):
            kind = m.lastgroup
            if kind == "ws":
                continue
            if kind == "bad":
                raise PresentationSyntaxError(f"unexpected character {m.group()!r}", lineno, m.start() + 1)
            tokens.append(_Token(kind, m.group(), lineno, m.start() + 1))
    return tokens, name


class _Parser:
    def __init__(self, tokens: List[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.gen_ids: Dict[str, int] = {}

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _error(self, message: str, tok: Optional[_Token] = None) -> PresentationSyntaxError:
        tok = tok or self._peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("eof", "", 1, 1)
            return PresentationSyntaxError(f"{message} (end of input)", last.line, last.column + len(last.value))
        return PresentationSyntaxError(f"{message}, found {tok.value!r}", tok.line, tok.column)

    def _expect(self, value: str) -> _Token:
        tok = self._peek()
        if tok is None or tok.kind != "sym" or tok.value != value:
            raise self._error(f"expected {value!r}")
        self.pos += 1
        return tok

    def _accept(self, value: str) -> bool:
        tok = self._peek()
        if tok is not None and tok.kind == "sym" and tok.value == value:
            self.pos += 1
            return True
        return False

    def _ident(self) -> _Token:
        tok = self._peek()
        if tok is None or tok.kind != "ident":
            raise self._error("expected generator name")
        self.pos += 1
        return tok

    def parse(self, name: str) -> Presentation:
        self._expect("<")
        gens: List[str] = []
        while True:
            tok = self._ident()
            if tok.value in self.gen_ids:
                raise PresentationSyntaxError(f"duplicate generator {tok.value!r}", tok.line, tok.column)
            self.gen_ids[tok.value] = len(gens)
            gens.append(tok.value)
            if not self._accept(","):
                break
        self._expect("|")
        relators: List[Word] = []
        while True:
            relators.append(self._relator())
            if not self._accept(","):
                break
        self._expect(">")
        if self._peek() is not None:
            raise self._error("trailing input after presentation")
        return Presentation(tuple(gens), tuple(relators), name)

    def _relator(self) -> Word:
        start = self._peek()
        word = self._word()
        if self._accept("="):
            word = word * self._word().inverse()
        if not word.letters:
            raise self._error("empty relator", start)
        return word

    def _word(self) -> Word:
        pairs = [self._factor()]
        while self._accept("*"):
            pairs.append(self._factor())
        return Word.normalized(pairs)

    def _factor(self) -> Tuple[int, int]:
        tok = self._ident()
        if tok.value not in self.gen_ids:
            raise PresentationSyntaxError(f"undeclared generator {tok.value!r}", tok.line, tok.column)
        exp = 1
        if self._accept("^"):
            num = self._peek()
            if num is None or num.kind != "int":
                raise self._error("expected integer exponent")
            self.pos += 1
            exp = int(num.value)
        return self.gen_ids[tok.value], exp


def parse_presentation(text: str) -> Presentation:
    tokens, name = _tokenize(text)
    if not tokens:
        raise PresentationSyntaxError("empty presentation", 1, 1)
    return _Parser(tokens).parse(name)


def load_presentation(path: str) -> Presentation:
    with open(path, "r", encoding="utf-8") as f:
        pres = parse_presentation(f.read())
    if not pres.name:
        pres = Presentation(pres.generators, pres.relators, os.path.splitext(os.path.basename(path))[0])
    return pres


# -------- Coset enumeration --------

@dataclass(frozen=True)
class CosetTable:
    """
    Result of an enumeration. When complete, cosets are numbered by first
    appearance in a breadth-first sweep from coset 0, and `definitions[c]` is
    the (coset, column) pair that first reaches coset c.
    """

    generators: Tuple[str, ...]
    rows: Tuple[Tuple[int, ...], ...]
    status: str
    definitions: Tuple[Optional[Tuple[int, int]], ...] = ()
    subgroup_trivial: bool = True
    cosets_defined: int = 0

    @property
    def coset_count(self) -> int:
        return len(self.rows)

    @property
    def is_complete(self) -> bool:
        return self.status == COMPLETE


class _LimitReached(Exception):
    pass


class _Enumerator:
    """HLT coset enumeration with coincidence processing (Holt, Eick, O'Brien ch. 5)."""

    def __init__(self, ngens: int, relators: List[List[int]], subgroup: List[List[int]], max_cosets: int):
        self.ncols = 2 * ngens
        self.relators = [r for r in relators if r]
        self.subgroup = [w for w in subgroup if w]
        self.max_cosets = max_cosets
        self.table: List[List[int]] = [[-1] * self.ncols]
        self.parent: List[int] = [0]
        self.live = 1

    # union-find over cosets
    def _rep(self, k: int) -> int:
        p = self.parent
        root = k
        while p[root] != root:
            root = p[root]
        while p[k] != root:
            p[k], k = root, p[k]
        return root

    def _merge(self, a: int, b: int, queue: deque) -> None:
        ra, rb = self._rep(a), self._rep(b)
        if ra != rb:
            lo, hi = min(ra, rb), max(ra, rb)
            self.parent[hi] = lo
            self.live -= 1
            queue.append(hi)

    def _coincidence(self, a: int, b: int) -> None:
        table = self.table
        queue: deque = deque()
        self._merge(a, b, queue)
        while queue:
            gamma = queue.popleft()
            row = table[gamma]
            for x in range(self.ncols):
                delta = row[x]
                if delta < 0:
                    continue
                xi = x ^ 1
                table[delta][xi] = -1
                mu, nu = self._rep(gamma), self._rep(delta)
                if table[mu][x] >= 0:
                    self._merge(nu, table[mu][x], queue)
                elif table[nu][xi] >= 0:
                    self._merge(mu, table[nu][xi], queue)
                else:
                    table[mu][x] = nu
                    table[nu][xi] = mu

    def _define(self, alpha: int, x: int) -> None:
        if self.live >= self.max_cosets or len(self.table) >= 8 * self.max_cosets:
            raise _LimitReached
        beta = len(self.table)
        self.table.append([-1] * self.ncols)
        self.parent.append(beta)
        self.live += 1
        self.table[alpha][x] = beta
        self.table[beta][x ^ 1] = alpha

    def _scan(self, alpha: int, word: List[int], fill: bool) -> None:
        table = self.table
        f, b = alpha, alpha
        i, j = 0, len(word) - 1
        while True:
            while i <= j and table[f][word[i]] >= 0:
                f = table[f][word[i]]
                i += 1
            if i > j:
                if f != b:
                    self._coincidence(f, b)
                return
            while j >= i and table[b][word[j] ^ 1] >= 0:
                b = table[b][word[j] ^ 1]
                j -= 1
            if j < i:
                self._coincidence(f, b)
                return
            if i == j:
                # deduction
                table[f][word[i]] = b
                table[b][word[i] ^ 1] = f
                return
            if not fill:
                return
            self._define(f, word[i])

    def _alive(self, c: int) -> bool:
        return self.parent[c] == c

    def _process(self, alpha: int) -> None:
        if alpha == 0:
            for w in self.subgroup:
                self._scan(0, w, fill=True)
        for w in self.relators:
            self._scan(alpha, w, fill=True)
            if not self._alive(alpha):
                return
        for x in range(self.ncols):
            if not self._alive(alpha):
                return
            if self.table[alpha][x] < 0:
                self._define(alpha, x)

    def _lookahead(self) -> None:
        before = self.live
        for beta in range(len(self.table)):
            if not self._alive(beta):
                continue
            for w in self.relators:
                self._scan(beta, w, fill=False)
                if not self._alive(beta):
                    break
        logger.debug("lookahead: %d -> %d live cosets", before, self.live)

    def run(self) -> bool:
        alpha = 0
        while alpha < len(self.table):
            if self._alive(alpha):
                try:
                    self._process(alpha)
                except _LimitReached:
                    self._lookahead()
                    if self.live >= self.max_cosets or len(self.table) >= 8 * self.max_cosets:
                        return False
                    continue
            alpha += 1
        return True

    def standardized(self) -> Tuple[Tuple[Tuple[int, ...], ...], Tuple[Optional[Tuple[int, int]], ...]]:
        order = [0]
        number = {0: 0}
        definitions: List[Optional[Tuple[int, int]]] = [None]
        k = 0
        while k < len(order):
            c = order[k]
            for x in range(self.ncols):
                d = self.table[c][x]
                if d < 0:
                    raise StructuralError(f"coset {c} has an undefined entry after enumeration")
                d = self._rep(d)
                if d not in number:
                    number[d] = len(order)
                    order.append(d)
                    definitions.append((k, x))
            k += 1
        rows = tuple(tuple(number[self._rep(self.table[c][x])] for x in range(self.ncols)) for c in order)
        return rows, tuple(definitions)


def todd_coxeter(
    p: Presentation,
    subgroup_words: Sequence[Word] = (),
    max_cosets: int = MAX_COSETS,
) -> CosetTable:
    """
    Enumerate the cosets of <subgroup_words> in the presented group.

    Deterministic: cosets are defined in scan order and the final table is
    renumbered by first appearance. Exceeding `max_cosets` live cosets (after
    a lookahead pass) gives an OVERFLOWED table rather than an exception.
    """
    if max_cosets < 1:
        raise GroupInputError("max_cosets must be at least 1")
    enum = _Enumerator(
        len(p.generators),
        [w.columns() for w in p.relators],
        [w.columns() for w in subgroup_words],
        max_cosets,
    )
    if not enum.run():
        logger.info("coset enumeration of %s overflowed at %d cosets", p.name or "presentation", max_cosets)
        return CosetTable(p.generators, (), OVERFLOWED, cosets_defined=len(enum.table))
    rows, definitions = enum.standardized()
    logger.debug("enumerated %s: %d cosets (%d defined)", p.name or "presentation", len(rows), len(enum.table))
    return CosetTable(
        generators=p.generators,
        rows=rows,
        status=COMPLETE,
        definitions=definitions,
        subgroup_trivial=not any(w.letters for w in subgroup_words),
        cosets_defined=len(enum.table),
    )


def _label(letters: List[Tuple[int, int]], names: Sequence[str]) -> str:
    return Word.normalized(letters).format(names)


def table_from_cosets(ct: CosetTable, p: Presentation) -> GroupTable:
    """
    Turn a complete coset table over the trivial subgroup into the group's
    multiplication table. Element c is the coset reached by the BFS word w_c;
    column c of the product table is the right action of w_c on cosets.
    """
    if not ct.is_complete:
        raise StructuralError("coset table is not complete")
    if not ct.subgroup_trivial:
        raise StructuralError("coset table over a non-trivial subgroup does not give a group table")
    n = ct.coset_count
    action = np.array(ct.rows, dtype=np.int64)
    perms = np.empty((n, n), dtype=np.int64)
    perms[0] = np.arange(n)
    words: List[List[Tuple[int, int]]] = [[]]
    for c in range(1, n):
        parent, col = ct.definitions[c]
        perms[c] = action[perms[parent], col]
        words.append(words[parent] + [(col // 2, 1 if col % 2 == 0 else -1)])
    labels = [_label(w, p.generators) for w in words]
    generators = {name: int(action[0, 2 * g]) for g, name in enumerate(p.generators)}
    return GroupTable(perms.T, labels=labels, generators=generators, name=p.name)


def resolve_presentation(p: Presentation, max_cosets: int = MAX_COSETS) -> GroupTable:
    ct = todd_coxeter(p, max_cosets=max_cosets)
    if not ct.is_complete:
        raise ResourceOverflowError(
            f"coset enumeration of {p.name or 'presentation'} exceeded {max_cosets} cosets"
        )
    return table_from_cosets(ct, p)


def evaluate_word(t: GroupTable, p: Presentation, word: Word) -> int:
    """Value of `word` in `t` under the recorded generator images."""
    result = 0
    for g, e in word.letters:
        x = t.generators[p.generators[g]]
        if e < 0:
            x, e = t.inv[x], -e
        for _ in range(e):
            result = t.rows[result][x]
    return result
