# corpus_db.py - simple SQLite document store for novelty corpora

import logging
import sqlite3
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, Field

from errors import InvalidInput, ParseError
from novelty import MAX_YEAR, MIN_YEAR, CorpusIndex, index_documents, load_manifest, read_document

logger = logging.getLogger(__name__)

DB_PATH = Path("corpus.db")

PathLike = Union[str, Path]


class DocumentRecord(BaseModel):
    doc_id: str = Field(..., min_length=1)
    year: int = Field(..., ge=MIN_YEAR, le=MAX_YEAR)
    path: str
    body: str


def get_connection(db_path: PathLike = DB_PATH) -> sqlite3.Connection:
    conn = sqlite3.connect(str(db_path))
    conn.row_factory = sqlite3.Row
    return conn


def init_db(db_path: PathLike = DB_PATH) -> None:
    """Create the documents table if it doesn't exist."""
    conn = get_connection(db_path)
    try:
        conn.execute(
            """
            CREATE TABLE IF NOT EXISTS documents (
                doc_id  TEXT PRIMARY KEY,
                year    INTEGER NOT NULL,
                path    TEXT NOT NULL,
                body    TEXT NOT NULL
            );
            """
        )
        conn.execute("CREATE INDEX IF NOT EXISTS documents_year ON documents (year);")
        conn.commit()
    finally:
        conn.close()


def upsert_document(record: DocumentRecord, db_path: PathLike = DB_PATH) -> None:
    """Insert or update a document in the store."""
    conn = get_connection(db_path)
    try:
        conn.execute(
            """
            INSERT INTO documents (doc_id, year, path, body)
            VALUES (?, ?, ?, ?)
            ON CONFLICT(doc_id) DO UPDATE SET
                year = excluded.year,
                path = excluded.path,
                body = excluded.body;
            """,
            (record.doc_id, record.year, record.path, record.body),
        )
        conn.commit()
    finally:
        conn.close()


def row_to_document(row: sqlite3.Row) -> DocumentRecord:
    return DocumentRecord(
        doc_id=row["doc_id"],
        year=row["year"],
        path=row["path"],
        body=row["body"],
    )


def get_document(doc_id: str, db_path: PathLike = DB_PATH) -> Optional[DocumentRecord]:
    conn = get_connection(db_path)
    try:
        cur = conn.execute("SELECT * FROM documents WHERE doc_id = ?;", (doc_id,))
        row = cur.fetchone()
        if row is None:
            return None
        return row_to_document(row)
    finally:
        conn.close()


def list_documents(year: Optional[int] = None, db_path: PathLike = DB_PATH) -> List[DocumentRecord]:
    conn = get_connection(db_path)
    try:
        query = "SELECT * FROM documents WHERE 1=1"
        params: list = []

        if year is not None:
            query += " AND year = ?"
            params.append(year)

        cur = conn.execute(query + " ORDER BY year, doc_id;", params)
        return [row_to_document(r) for r in cur.fetchall()]
    finally:
        conn.close()


def count_documents(db_path: PathLike = DB_PATH) -> int:
    conn = get_connection(db_path)
    try:
        cur = conn.execute("SELECT COUNT(*) AS c FROM documents;")
        return cur.fetchone()["c"]
    finally:
        conn.close()


def import_manifest(manifest_path: PathLike, db_path: PathLike = DB_PATH) -> int:
    """Copy every document of a manifest, text included, into the store."""
    manifest_path = Path(manifest_path)
    entries = load_manifest(manifest_path)
    init_db(db_path)

    imported_count = 0
    for meta in entries:
        record = DocumentRecord(
            doc_id=meta.doc_id,
            year=meta.year,
            path=meta.path,
            body=read_document(meta, manifest_path.parent),
        )
        upsert_document(record, db_path)
        imported_count += 1

    logger.info(f"Imported/updated {imported_count} documents from {manifest_path} into {db_path}")
    return imported_count


def index_from_db(db_path: PathLike = DB_PATH) -> CorpusIndex:
    """Index of every stored document, same as build_index over the original manifest."""
    if not Path(db_path).exists():
        raise InvalidInput(f"corpus database {db_path} does not exist")
    try:
        documents = list_documents(db_path=db_path)
    except sqlite3.Error as e:
        raise ParseError(str(db_path), f"cannot read corpus database: {e}") from None
    return index_documents((d.doc_id, d.year, d.body) for d in documents)
