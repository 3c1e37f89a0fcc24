"""Document ingestion: MEDLINE XML and JSONL parsing, inclusion filters, metadata.

Documents are immutable once created and safe to share across threads.
"""

from __future__ import annotations

import gzip
import io
import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping, Sequence

from .errors import JsonlError, MalformedXmlError

GZIP_MAGIC = b"\x1f\x8b"

_YEAR_MIN = 1800
_YEAR_MAX = 2100


@dataclass(frozen=True)
class Document:
    """One abstract with its year and metadata; the unit of counting."""

    id: str
    year: int
    title: str = ""
    text: str = ""
    journal: str | None = None
    country: str | None = None
    fields: frozenset[str] = frozenset()
    extra: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise ValueError("document id must be non-empty")
        if not (_YEAR_MIN <= self.year <= _YEAR_MAX):
            raise ValueError(f"year {self.year} outside [{_YEAR_MIN}, {_YEAR_MAX}]")

    def with_text(self, text: str) -> "Document":
        return replace(self, text=text)


class RejectReason(Enum):
    TOO_SHORT = "TOO_SHORT"
    TOO_LONG = "TOO_LONG"
    WRONG_LANGUAGE = "WRONG_LANGUAGE"
    YEAR_OUT_OF_RANGE = "YEAR_OUT_OF_RANGE"
    CLEANED_TOO_SHORT = "CLEANED_TOO_SHORT"


@dataclass(frozen=True)
class FilterCriteria:
    """Inclusion filters applied to every ingested document.

    Character lengths are counted in Unicode scalar values, not bytes.
    """

    min_chars: int = 250
    max_chars: int = 4000
    language: str = "eng"
    year_range: tuple[int, int] = (2010, 2024)

    def __post_init__(self):
        if self.min_chars > self.max_chars:
            raise ValueError("min_chars must be <= max_chars")
        if self.year_range[0] > self.year_range[1]:
            raise ValueError("year_range lo must be <= hi")


def filter_document(doc: Document, criteria: FilterCriteria) -> RejectReason | None:
    """Decide acceptance of ``doc``. Returns None to accept, else the reject reason.

    The language check uses the record's declared language tag
    (``extra["language"]``) when present and passes otherwise.
    """
    n = len(doc.text)
    if n < criteria.min_chars:
        return RejectReason.TOO_SHORT
    if n > criteria.max_chars:
        return RejectReason.TOO_LONG
    declared = doc.extra.get("language")
    if declared is not None and declared != criteria.language:
        return RejectReason.WRONG_LANGUAGE
    lo, hi = criteria.year_range
    if not (lo <= doc.year <= hi):
        return RejectReason.YEAR_OUT_OF_RANGE
    return None


class SkipTally:
    """Counts skipped records by reason; serializable as a JSON report."""

    def __init__(self):
        self.counts: dict[str, int] = {}

    def add(self, reason: str, n: int = 1) -> None:
        self.counts[reason] = self.counts.get(reason, 0) + n

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_json(self) -> str:
        return json.dumps({"skipped": self.counts, "total_skipped": self.total},
                          sort_keys=True)


# ---------------------------------------------------------------------------
# Field rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldRule:
    """Assigns a field label to journals whose name contains a substring."""

    field_name: str
    journal_substring: str

    def __post_init__(self):
        if not self.journal_substring:
            raise ValueError("journal_substring must be non-empty")


def assign_fields(journal: str | None, rules: Sequence[FieldRule]) -> frozenset[str]:
    """Every field whose substring occurs case-insensitively in the journal name."""
    if not journal:
        return frozenset()
    lowered = journal.lower()
    return frozenset(r.field_name for r in rules if r.journal_substring.lower() in lowered)


def load_field_rules(path: str | Path | None = None) -> tuple[FieldRule, ...]:
    """Load field rules from a TSV file (``field<TAB>substring``, # comments).

    With no path, loads the starter rule set shipped with the package.
    """
    text = _read_data_text(path, "field_rules.tsv")
    rules = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"field_rules line {lineno}: expected 2 tab-separated columns")
        rules.append(FieldRule(field_name=parts[0], journal_substring=parts[1]))
    return tuple(rules)


# ---------------------------------------------------------------------------
# Country matching
# ---------------------------------------------------------------------------

class CountryTable:
    """Table-driven matcher from affiliation strings to country names.

    Aliases are matched case-insensitively at non-letter boundaries; when
    several aliases match, the one ending last in the string wins (affiliations
    normally end with the country), with longer aliases preferred on ties.
    """

    def __init__(self, alias_to_country: Mapping[str, str]):
        if not alias_to_country:
            raise ValueError("country table must not be empty")
        self.alias_to_country = dict(alias_to_country)
        aliases = sorted(self.alias_to_country, key=len, reverse=True)
        pattern = "|".join(re.escape(a) for a in aliases)
        self._regex = re.compile(rf"(?<![A-Za-z])(?:{pattern})(?![A-Za-z])", re.IGNORECASE)
        self._canonical = {a.lower(): c for a, c in self.alias_to_country.items()}

    def match(self, affiliation: str | None) -> str | None:
        if not affiliation:
            return None
        best: tuple[int, int] | None = None
        best_alias: str | None = None
        for m in self._regex.finditer(affiliation):
            key = (m.end(), m.end() - m.start())
            if best is None or key > best:
                best = key
                best_alias = m.group(0)
        if best_alias is None:
            return None
        return self._canonical[best_alias.lower()]


def load_country_table(path: str | Path | None = None) -> CountryTable:
    """Load an alias table from TSV (``alias<TAB>country``, # comments)."""
    text = _read_data_text(path, "countries.tsv")
    table: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"countries line {lineno}: expected 2 tab-separated columns")
        table[parts[0]] = parts[1]
    return CountryTable(table)


def _read_data_text(path: str | Path | None, default_name: str) -> str:
    if path is not None:
        return Path(path).read_text(encoding="utf-8")
    return resources.files("excessvocab.data").joinpath(default_name).read_text(encoding="utf-8")


# ---------------------------------------------------------------------------
# MEDLINE XML parsing
# ---------------------------------------------------------------------------

class _CountingReader(io.RawIOBase):
    """Wraps a binary stream and counts the bytes handed to the XML parser."""

    def __init__(self, raw: IO[bytes]):
        self._raw = raw
        self.bytes_read = 0

    def readable(self) -> bool:
        return True

    def read(self, size: int = -1) -> bytes:
        data = self._raw.read(size)
        self.bytes_read += len(data)
        return data

    def readinto(self, b) -> int:
        data = self._raw.read(len(b))
        n = len(data)
        b[:n] = data
        self.bytes_read += n
        return n


def _open_maybe_gzip(source: str | Path | IO[bytes]) -> IO[bytes]:
    if isinstance(source, (str, Path)):
        stream: IO[bytes] = open(source, "rb")
    else:
        stream = source
    if not hasattr(stream, "peek"):
        if stream.seekable():
            pos = stream.tell()
            head = stream.read(2)
            stream.seek(pos)
            return gzip.open(stream, "rb") if head == GZIP_MAGIC else stream
        stream = io.BufferedReader(_CountingReader(stream))
    head = stream.peek(2)
    if head[:2] == GZIP_MAGIC:
        return gzip.open(stream, "rb")
    return stream


def _itertext(elem: ET.Element | None) -> str:
    if elem is None:
        return ""
    return "".join(elem.itertext()).strip()


_FOUR_DIGITS = re.compile(r"\b(1[89]\d\d|20\d\d|2100)\b")


def _candidate_years(citation: ET.Element) -> list[int]:
    years = []
    for pubdate in citation.iter("PubDate"):
        y = _itertext(pubdate.find("Year"))
        if y.isdigit():
            years.append(int(y))
            continue
        m = _FOUR_DIGITS.search(_itertext(pubdate.find("MedlineDate")))
        if m:
            years.append(int(m.group(0)))
    for artdate in citation.iter("ArticleDate"):
        y = _itertext(artdate.find("Year"))
        if y.isdigit():
            years.append(int(y))
    return [y for y in years if _YEAR_MIN <= y <= _YEAR_MAX]


def _first_affiliation(citation: ET.Element) -> str | None:
    author = citation.find(".//AuthorList/Author")
    if author is None:
        return None
    aff = author.find("AffiliationInfo/Affiliation")
    if aff is None:
        aff = author.find("Affiliation")  # pre-2015 DTD layout
    text = _itertext(aff)
    return text or None


def parse_pubmed_xml(
    source: str | Path | IO[bytes],
    tally: SkipTally | None = None,
    field_rules: Sequence[FieldRule] | None = None,
    country_table: CountryTable | None = None,
) -> Iterator[Document]:
    """Stream Documents out of a MEDLINE citation set (.xml or .xml.gz).

    Yields one Document per citation that has an abstract; multi-part
    structured abstracts are concatenated with single spaces. The year is the
    earliest PubDate/ArticleDate year of the record. Citations without an
    abstract or a parseable year are skipped and tallied.
    """
    tally = tally if tally is not None else SkipTally()
    counter = _CountingReader(_open_maybe_gzip(source))
    stream = io.BufferedReader(counter)
    try:
        for _event, elem in ET.iterparse(stream, events=("end",)):
            if elem.tag != "MedlineCitation":
                continue
            doc = _citation_to_document(elem, tally, field_rules, country_table)
            elem.clear()
            if doc is not None:
                yield doc
    except ET.ParseError as exc:
        line, column = exc.position if exc.position else (None, None)
        raise MalformedXmlError(
            f"malformed XML: {exc.msg if hasattr(exc, 'msg') else exc}",
            byte_offset=counter.bytes_read, line=line, column=column,
        ) from exc


def _citation_to_document(
    citation: ET.Element,
    tally: SkipTally,
    field_rules: Sequence[FieldRule] | None,
    country_table: CountryTable | None,
) -> Document | None:
    pmid = _itertext(citation.find("PMID"))
    if not pmid:
        tally.add("no_pmid")
        return None
    parts = [_itertext(t) for t in citation.findall(".//Article/Abstract/AbstractText")]
    abstract = " ".join(p for p in parts if p)
    if not abstract:
        tally.add("no_abstract")
        return None
    years = _candidate_years(citation)
    if not years:
        tally.add("no_year")
        return None
    title = _itertext(citation.find(".//Article/ArticleTitle"))
    journal = _itertext(citation.find(".//Article/Journal/Title")) or None
    language = _itertext(citation.find(".//Article/Language")) or None
    affiliation = _first_affiliation(citation)

    extra: dict[str, str] = {}
    if language:
        extra["language"] = language
    if affiliation:
        extra["affiliation"] = affiliation
    country = country_table.match(affiliation) if country_table else None
    fields = assign_fields(journal, field_rules) if field_rules else frozenset()
    return Document(
        id=pmid, year=min(years), title=title, text=abstract,
        journal=journal, country=country, fields=fields, extra=extra,
    )


# ---------------------------------------------------------------------------
# JSONL canonical format
# ---------------------------------------------------------------------------

_KNOWN_KEYS = ("id", "year", "title", "text", "journal", "country", "fields", "extra")


def parse_jsonl(
    source: str | Path | IO[bytes] | IO[str] | Iterable[str],
    strict: bool = True,
    tally: SkipTally | None = None,
) -> Iterator[Document]:
    """Yield Documents from a JSONL stream, one object per line.

    Required keys: id, year, text. Unknown top-level keys are preserved in
    ``extra`` (values stringified). In strict mode a malformed line raises
    ``JsonlError``; in lenient mode it is skipped and tallied.
    """
    tally = tally if tally is not None else SkipTally()
    for lineno, line in enumerate(_iter_lines(source), 1):
        stripped = line.strip()
        if not stripped:
            continue
        try:
            yield _record_to_document(stripped, lineno)
        except JsonlError:
            if strict:
                raise
            tally.add("bad_line")


def _record_to_document(line: str, lineno: int) -> Document:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise JsonlError(lineno, "invalid JSON") from exc
    if not isinstance(obj, dict):
        raise JsonlError(lineno, "expected a JSON object")
    for key in ("id", "year", "text"):
        if key not in obj:
            raise JsonlError(lineno, f"missing key {key!r}")
    if not isinstance(obj["year"], int):
        raise JsonlError(lineno, "year must be an integer")
    extra = {str(k): str(v) for k, v in obj.get("extra", {}).items()}
    for key, value in obj.items():
        if key not in _KNOWN_KEYS:
            extra[str(key)] = value if isinstance(value, str) else json.dumps(value)
    try:
        return Document(
            id=str(obj["id"]),
            year=obj["year"],
            title=str(obj.get("title", "")),
            text=str(obj["text"]),
            journal=obj.get("journal"),
            country=obj.get("country"),
            fields=frozenset(obj.get("fields", ())),
            extra=extra,
        )
    except ValueError as exc:
        raise JsonlError(lineno, str(exc)) from exc


def _iter_lines(source) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        stream = _open_maybe_gzip(source)
        with io.TextIOWrapper(stream, encoding="utf-8") as text:
            yield from text
    elif isinstance(source, io.TextIOBase):
        yield from source
    elif hasattr(source, "read"):
        with io.TextIOWrapper(_open_maybe_gzip(source), encoding="utf-8") as text:
            yield from text
    else:
        yield from source


def document_to_record(doc: Document) -> dict:
    """Canonical JSON-serializable record for a Document (stable key order)."""
    record: dict = {"id": doc.id, "year": doc.year}
    if doc.title:
        record["title"] = doc.title
    record["text"] = doc.text
    if doc.journal is not None:
        record["journal"] = doc.journal
    if doc.country is not None:
        record["country"] = doc.country
    if doc.fields:
        record["fields"] = sorted(doc.fields)
    if doc.extra:
        record["extra"] = {k: doc.extra[k] for k in sorted(doc.extra)}
    return record


def write_jsonl(docs: Iterable[Document], target: str | Path | IO[str]) -> int:
    """Write Documents in the canonical JSONL format; returns the count.

    Paths ending in .gz are gzip-compressed with a zeroed mtime so identical
    corpora serialize to identical bytes.
    """
    n = 0
    own, handle = _open_text_sink(target)
    try:
        for doc in docs:
            handle.write(json.dumps(document_to_record(doc), ensure_ascii=False,
                                    separators=(",", ":")))
            handle.write("\n")
            n += 1
    finally:
        if own:
            handle.close()
    return n


def _open_text_sink(target: str | Path | IO[str]) -> tuple[bool, IO[str]]:
    if isinstance(target, (str, Path)):
        path = Path(target)
        if path.suffix == ".gz":
            raw = open(path, "wb")
            gz = gzip.GzipFile(fileobj=raw, mode="wb", mtime=0, filename="")
            return True, io.TextIOWrapper(gz, encoding="utf-8")
        return True, open(path, "w", encoding="utf-8")
    return False, target
