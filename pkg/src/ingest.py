import logging
import os
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from src.config import MAX_COSETS
from src.errors import GroupInputError
from src.group_core import ConjugacyClasses, GroupTable, load_table
from src.presentation import load_presentation, resolve_presentation
from src.schemas import CacheEntry, StructureReport
from src.structure import build_structure_report

logger = logging.getLogger(__name__)

TABLE = "table"
PRESENTATION = "presentation"
FORMATS_BY_EXTENSION = {".tbl": TABLE, ".pres": PRESENTATION}


# -----------------------------
# Single files
# -----------------------------

def detect_format(path: str, fmt: str = "auto") -> str:
    """'table' or 'presentation'; `fmt` other than 'auto' wins over the extension."""
    if fmt in (TABLE, PRESENTATION):
        return fmt
    if fmt != "auto":
        raise GroupInputError(f"unknown format {fmt!r}; use table, presentation or auto")
    ext = os.path.splitext(path)[1].lower()
    if ext not in FORMATS_BY_EXTENSION:
        raise GroupInputError(f"Unsupported file type: {ext or '(none)'}. Use .tbl or .pres, or pass --format")
    return FORMATS_BY_EXTENSION[ext]


@dataclass(frozen=True)
class GroupEntry:
    name: str
    source: str
    kind: str  # table | presentation
    table: GroupTable


def load_group(path: str, fmt: str = "auto", max_cosets: int = MAX_COSETS) -> GroupEntry:
    """
    Load one group file and resolve it to a table.

    - .tbl  -> multiplication table, checked against the group axioms
    - .pres -> presentation, resolved by coset enumeration
    """
    if not os.path.isfile(path):
        raise GroupInputError(f"no such file: {path}")
    kind = detect_format(path, fmt)
    name = os.path.splitext(os.path.basename(path))[0]
    if kind == TABLE:
        table = load_table(path)
    else:
        table = resolve_presentation(load_presentation(path), max_cosets=max_cosets)
    logger.debug("loaded %s (%s) of order %d", name, kind, table.order)
    return GroupEntry(name=name, source=path, kind=kind, table=table)


# -----------------------------
# Databases
# -----------------------------

class GroupDatabase:
    """Named, fully resolved groups; names are unique."""

    def __init__(self, entries: Sequence[GroupEntry] = ()):
        self.entries: List[GroupEntry] = []
        self._by_name: Dict[str, GroupEntry] = {}
        for e in entries:
            self.add(e)

    def add(self, entry: GroupEntry) -> None:
        if entry.name in self._by_name:
            raise GroupInputError(
                f"duplicate group name {entry.name!r} ({self._by_name[entry.name].source} and {entry.source})"
            )
        self._by_name[entry.name] = entry
        self.entries.append(entry)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[GroupEntry]:
        return iter(self.entries)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def get(self, name: str) -> GroupEntry:
        if name not in self._by_name:
            raise GroupInputError(f"no group named {name!r}")
        return self._by_name[name]

    def names(self) -> List[str]:
        return [e.name for e in self.entries]

    def tables(self) -> List[Tuple[str, GroupTable]]:
        return [(e.name, e.table) for e in self.entries]

    def with_order(self, order: int) -> "GroupDatabase":
        return GroupDatabase([e for e in self.entries if e.table.order == order])

    @classmethod
    def from_directory(cls, directory: str, fmt: str = "auto", max_cosets: int = MAX_COSETS) -> "GroupDatabase":
        """
        Every .tbl / .pres file below `directory`, walked in sorted order.
        Files with other extensions are skipped.
        """
        if not os.path.isdir(directory):
            raise GroupInputError(f"not a directory: {directory}")
        paths = []
        for root, dirs, files in os.walk(directory):
            dirs.sort()
            for f in sorted(files):
                if fmt != "auto" or os.path.splitext(f)[1].lower() in FORMATS_BY_EXTENSION:
                    paths.append(os.path.join(root, f))
        db = cls()
        for path in sorted(paths):
            db.add(load_group(path, fmt=fmt, max_cosets=max_cosets))
        logger.info("loaded %d groups from %s", len(db), directory)
        return db


# -----------------------------
# Structure cache
# -----------------------------

class StructureCache:
    """
    JSON files keyed by table digest: <cache_dir>/<digest>.json.
    A disabled cache (empty directory) computes every time.
    """

    def __init__(self, cache_dir: str = ""):
        self.cache_dir = cache_dir
        if cache_dir:
            os.makedirs(cache_dir, exist_ok=True)

    @property
    def enabled(self) -> bool:
        return bool(self.cache_dir)

    def path(self, digest: str) -> str:
        return os.path.join(self.cache_dir, f"{digest}.json")

    def load(self, t: GroupTable) -> Optional[CacheEntry]:
        if not self.enabled:
            return None
        digest = t.digest()
        path = self.path(digest)
        if not os.path.exists(path):
            return None
        try:
            with open(path, "r", encoding="utf-8") as f:
                entry = CacheEntry.model_validate_json(f.read())
        except (OSError, ValidationError) as e:
            logger.warning("ignoring unreadable cache entry %s: %s", path, e)
            return None
        if entry.digest != digest or entry.structure.order != t.order:
            logger.warning("stale cache entry %s ignored", path)
            return None
        return entry

    def store(self, t: GroupTable, structure: StructureReport) -> None:
        if not self.enabled:
            return
        entry = CacheEntry(
            digest=t.digest(),
            structure=structure,
            classes=[list(c) for c in t.classes.classes],
        )
        with open(self.path(entry.digest), "w", encoding="utf-8") as f:
            f.write(entry.model_dump_json(indent=2))

    def structure(self, t: GroupTable) -> StructureReport:
        """Cached structure report; a warm hit also seeds the table's conjugacy classes."""
        entry = self.load(t)
        if entry is not None:
            logger.debug("cache hit %s", entry.digest[:12])
            if "classes" not in t.__dict__:
                class_of = [0] * t.order
                for i, members in enumerate(entry.classes):
                    for x in members:
                        class_of[x] = i
                t.__dict__["classes"] = ConjugacyClasses(
                    classes=tuple(tuple(c) for c in entry.classes),
                    class_of=tuple(class_of),
                )
            # the name is not part of the digest
            return entry.structure.model_copy(update={"name": t.name})
        report = build_structure_report(t)
        self.store(t, report)
        return report

    def warm(self, t: GroupTable) -> bool:
        """
        Seed `t`'s conjugacy classes from a cached entry; on a miss compute
        the structure report and store it for the next run. True on a hit.
        """
        hit = self.load(t) is not None
        self.structure(t)
        return hit
