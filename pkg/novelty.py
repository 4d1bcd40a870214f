# novelty.py
# Corpus-retrieval novelty factor N = 1 - mean(N_q) / N_m over a local document store.

import json
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, field_validator

from errors import (
    DuplicateDocId,
    EmptyInput,
    InvalidInput,
    MissingDocument,
    NoMarkerMatches,
    ParseError,
)

logger = logging.getLogger(__name__)

MIN_YEAR = 1800
MAX_YEAR = 2200

# Unicode letters and digits; "\w" minus the underscore.
TOKEN_PATTERN = re.compile(r"[^\W_]+")


class SliceMode(str, Enum):
    PER_YEAR = "per-year"
    CUMULATIVE = "cumulative"


def tokenize(text: str) -> List[str]:
    """Case-folded alphanumeric runs; no stemming, no stop-words."""
    return TOKEN_PATTERN.findall(text.casefold())


def normalize_terms(terms: Iterable[str]) -> FrozenSet[str]:
    tokens: Set[str] = set()
    for term in terms:
        tokens.update(tokenize(term))
    return frozenset(tokens)


# ----------------
# Documents and index
# ----------------
class DocumentMeta(BaseModel):
    """One manifest line: {"id": ..., "year": ..., "path": ...}."""
    doc_id: str = Field(..., min_length=1, alias="id")
    year: int = Field(..., ge=MIN_YEAR, le=MAX_YEAR)
    path: str = Field(..., min_length=1)

    model_config = {"populate_by_name": True, "frozen": True}


@dataclass(frozen=True)
class CorpusIndex:
    """Inverted index (token -> documents) with one partition per year."""
    postings: Dict[str, FrozenSet[str]] = field(hash=False)
    partitions: Dict[int, FrozenSet[str]] = field(hash=False)
    doc_years: Dict[str, int] = field(hash=False)

    @property
    def document_count(self) -> int:
        return len(self.doc_years)

    @property
    def years(self) -> List[int]:
        return sorted(self.partitions)

    def documents(
        self,
        year: Optional[int] = None,
        mode: SliceMode = SliceMode.PER_YEAR,
    ) -> Optional[FrozenSet[str]]:
        """Documents of a slice; None means the whole corpus."""
        if year is None:
            return None
        if SliceMode(mode) == SliceMode.CUMULATIVE:
            return frozenset(doc for doc, y in self.doc_years.items() if y <= year)
        return self.partitions.get(year, frozenset())


def index_documents(documents: Iterable[Tuple[str, int, str]]) -> CorpusIndex:
    """
    Build an index from (doc_id, year, text) triples.

    Raises:
        DuplicateDocId: a document id appears twice
    """
    postings: Dict[str, Set[str]] = {}
    partitions: Dict[int, Set[str]] = {}
    doc_years: Dict[str, int] = {}

    for doc_id, year, text in documents:
        if doc_id in doc_years:
            raise DuplicateDocId(f"document id '{doc_id}' appears more than once")
        doc_years[doc_id] = year
        partitions.setdefault(year, set()).add(doc_id)
        for token in set(tokenize(text)):
            postings.setdefault(token, set()).add(doc_id)

    return CorpusIndex(
        postings={t: frozenset(ids) for t, ids in postings.items()},
        partitions={y: frozenset(ids) for y, ids in partitions.items()},
        doc_years=doc_years,
    )


def load_manifest(manifest_path: Union[str, Path]) -> List[DocumentMeta]:
    """
    Read a JSON-lines manifest.

    Raises:
        ParseError: bad JSON or missing fields, with the line number
        DuplicateDocId: repeated document id
    """
    manifest_path = Path(manifest_path)
    entries: List[DocumentMeta] = []
    seen = set()
    try:
        lines = manifest_path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(str(manifest_path), f"cannot read manifest: {e}") from None

    for line_num, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            meta = DocumentMeta.model_validate(json.loads(line))
        except json.JSONDecodeError as e:
            raise ParseError(str(manifest_path), f"invalid JSON: {e.msg}", line=line_num) from None
        except ValidationError as e:
            error = e.errors()[0]
            field_name = ".".join(str(p) for p in error["loc"])
            raise ParseError(str(manifest_path), f"{field_name}: {error['msg']}", line=line_num) from None
        if meta.doc_id in seen:
            raise DuplicateDocId(f"{manifest_path}:{line_num}: document id '{meta.doc_id}' appears twice")
        seen.add(meta.doc_id)
        entries.append(meta)
    return entries


def read_document(meta: DocumentMeta, base_dir: Path) -> str:
    path = Path(meta.path)
    if not path.is_absolute():
        path = base_dir / path
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise MissingDocument(f"document '{meta.doc_id}': {path} does not exist") from None
    except (OSError, UnicodeDecodeError) as e:
        raise MissingDocument(f"document '{meta.doc_id}': cannot read {path}: {e}") from None


def build_index(manifest_path: Union[str, Path], workers: int = 1) -> CorpusIndex:
    """
    Index every document listed in a manifest. Paths resolve against the
    manifest's directory. With workers > 1 files are read in a thread pool;
    the index is merged in manifest order either way.
    """
    manifest_path = Path(manifest_path)
    entries = load_manifest(manifest_path)
    base_dir = manifest_path.parent

    if workers > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            texts = list(pool.map(lambda m: read_document(m, base_dir), entries))
    else:
        texts = [read_document(m, base_dir) for m in entries]

    index = index_documents((m.doc_id, m.year, text) for m, text in zip(entries, texts))
    logger.info(
        f"Indexed {index.document_count} documents, {len(index.postings)} tokens, "
        f"years {index.years[0] if index.years else '-'}..{index.years[-1] if index.years else '-'}"
    )
    return index


# ----------------
# Retrieval
# ----------------
@dataclass(frozen=True)
class RetrievalPattern:
    """Q conjunctive keyword queries plus the marker delimiting the application area."""
    queries: Tuple[FrozenSet[str], ...]
    marker: FrozenSet[str]
    label: str = ""

    def __post_init__(self):
        queries = tuple(normalize_terms(q) for q in self.queries)
        marker = normalize_terms(self.marker)
        if not queries:
            raise InvalidInput(f"pattern '{self.label}': at least one query is required")
        if any(not q for q in queries):
            raise InvalidInput(f"pattern '{self.label}': queries must not be empty")
        if not marker:
            raise InvalidInput(f"pattern '{self.label}': marker must not be empty")
        object.__setattr__(self, "queries", queries)
        object.__setattr__(self, "marker", marker)

    @classmethod
    def of(cls, queries: Sequence[Sequence[str]], marker: Sequence[str], label: str = "") -> "RetrievalPattern":
        return cls(tuple(frozenset(q) for q in queries), frozenset(marker), label)


@dataclass(frozen=True)
class NoveltyResult:
    raw: float
    clamped: float
    per_query_counts: Tuple[int, ...]
    marker_count: int
    slice: Optional[int] = None
    label: str = ""


@dataclass(frozen=True)
class SeriesEntry:
    """One year of a novelty series; result is None when the marker found nothing."""
    year: int
    result: Optional[NoveltyResult]
    marker_count: int = 0

    @property
    def is_gap(self) -> bool:
        return self.result is None


def count_matches(
    index: CorpusIndex,
    query: Iterable[str],
    year: Optional[int] = None,
    mode: SliceMode = SliceMode.PER_YEAR,
) -> int:
    """Documents of the slice containing every query term."""
    terms = sorted(normalize_terms(query))
    if not terms:
        raise InvalidInput("query must contain at least one term")

    matched: Optional[FrozenSet[str]] = None
    for term in terms:
        posting = index.postings.get(term, frozenset())
        matched = posting if matched is None else matched & posting
        if not matched:
            return 0

    scope = index.documents(year, mode)
    if scope is not None:
        matched = matched & scope
    return len(matched)


def novelty_factor(
    index: CorpusIndex,
    pattern: RetrievalPattern,
    year: Optional[int] = None,
    mode: SliceMode = SliceMode.PER_YEAR,
) -> NoveltyResult:
    """
    N = 1 - ((1/Q) * sum N_q) / N_m, with the raw value kept and a copy clamped into [0, 1].

    Raises:
        NoMarkerMatches: the marker finds no document in the slice
    """
    marker_count = count_matches(index, pattern.marker, year, mode)
    if marker_count == 0:
        where = f" in {year}" if year is not None else ""
        raise NoMarkerMatches(f"pattern '{pattern.label}': marker matches no document{where}")

    counts = tuple(count_matches(index, q, year, mode) for q in pattern.queries)
    raw = 1.0 - (sum(counts) / len(counts)) / marker_count
    return NoveltyResult(
        raw=raw,
        clamped=min(1.0, max(0.0, raw)),
        per_query_counts=counts,
        marker_count=marker_count,
        slice=year,
        label=pattern.label,
    )


def novelty_series(
    index: CorpusIndex,
    pattern: RetrievalPattern,
    years: Tuple[int, int],
    mode: SliceMode = SliceMode.PER_YEAR,
) -> List[SeriesEntry]:
    """One novelty evaluation per year of the inclusive range; empty slices become gaps."""
    first, last = years
    if first > last:
        raise InvalidInput(f"empty year range {first}..{last}")

    entries = []
    for year in range(first, last + 1):
        try:
            result = novelty_factor(index, pattern, year, mode)
        except NoMarkerMatches:
            logger.info(f"No marker matches for '{pattern.label}' in {year}, leaving a gap")
            entries.append(SeriesEntry(year, None))
            continue
        entries.append(SeriesEntry(year, result, result.marker_count))
    return entries


def group_mean(results: Sequence[NoveltyResult]) -> float:
    """Mean clamped novelty of a group of objects."""
    if not results:
        raise EmptyInput("group_mean needs at least one novelty result")
    return sum(r.clamped for r in results) / len(results)


# ----------------
# Pattern file
# ----------------
class PatternFile(BaseModel):
    """On-disk shape: {"label": ..., "queries": [[...], ...], "marker": [...]}."""
    label: str = ""
    queries: List[List[str]] = Field(..., min_length=1)
    marker: List[str] = Field(..., min_length=1)

    @field_validator("queries")
    @classmethod
    def validate_queries(cls, v):
        if any(not q for q in v):
            raise ValueError("queries must not be empty")
        return v


def parse_year_range(text: str) -> Tuple[int, int]:
    """'2008..2017' -> (2008, 2017)."""
    first, sep, last = text.partition("..")
    if not sep:
        raise InvalidInput(f"year range must look like 2008..2017, got '{text}'")
    try:
        return int(first), int(last)
    except ValueError:
        raise InvalidInput(f"year range must look like 2008..2017, got '{text}'") from None


def load_pattern(path: Union[str, Path]) -> RetrievalPattern:
    path = Path(path)
    try:
        model = PatternFile.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(str(path), f"cannot read pattern file: {e}") from None
    except json.JSONDecodeError as e:
        raise ParseError(str(path), f"invalid JSON: {e.msg}", line=e.lineno) from None
    except ValidationError as e:
        raise ParseError(str(path), f"not a pattern document: {e.errors()[0]['msg']}") from None
    return RetrievalPattern.of(model.queries, model.marker, model.label or path.stem)
