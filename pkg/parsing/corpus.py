"""
Corpus loading: read Java sources, parse them with javalang, recover from syntax
errors at member boundaries and assemble a SourceCorpus.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import javalang

from models.errors import ParseFailure
from models.source import ClassDecl, Diagnostic, SourceCorpus

from .lowering import lower_compilation_unit

logger = logging.getLogger(__name__)

SourceText = Union[str, bytes, None]

MAX_RECOVERIES = 8


def read_source_tree(roots: Iterable[str]) -> List[Tuple[str, SourceText]]:
    """Collect `*.java` files under each root (a file or directory), sorted by path.

    Files that cannot be read are returned with text None so that parse_corpus
    reports them; undecodable bytes are passed through unchanged.
    """
    found: List[Tuple[str, SourceText]] = []
    for root in roots:
        base = Path(root)
        if not base.exists():
            logger.warning("Source root %s does not exist", root)
            continue
        paths = [base] if base.is_file() else sorted(base.rglob("*.java"))
        for path in paths:
            try:
                raw = path.read_bytes()
            except OSError as e:
                logger.warning("Cannot read %s: %s", path, e)
                found.append((str(path), None))
                continue
            try:
                found.append((str(path), raw.decode("utf-8")))
            except UnicodeDecodeError:
                found.append((str(path), raw))
    return found


# --- Syntax-error recovery ---

def _member_regions(text: str) -> List[Tuple[int, int]]:
    """Spans of members directly inside a top-level type body (brace depth 1).

    A member ends at a ';' at depth 1 or at the '}' that closes back to depth 1.
    String/char literals and comments are skipped.
    """
    regions: List[Tuple[int, int]] = []
    depth = 0
    start: Optional[int] = None
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "/" and i + 1 < n and text[i + 1] == "/":
            j = text.find("\n", i)
            i = n if j < 0 else j
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "*":
            j = text.find("*/", i + 2)
            i = n if j < 0 else j + 2
            continue
        if ch in "\"'":
            j = i + 1
            while j < n and text[j] != ch and text[j] != "\n":
                j += 2 if text[j] == "\\" else 1
            i = j + 1
            continue
        if ch == "{":
            depth += 1
            if depth == 1:
                start = i + 1
        elif ch == "}":
            depth -= 1
            if depth == 1 and start is not None:
                regions.append((start, i + 1))
                start = i + 1
            elif depth == 0:
                if start is not None and start < i:
                    regions.append((start, i))
                start = None
        elif ch == ";" and depth == 1 and start is not None:
            regions.append((start, i + 1))
            start = i + 1
        i += 1
    return regions


def _blank_member(text: str, line: int) -> Optional[str]:
    """Blank out the member containing `line`, keeping newlines so positions hold."""
    lines = text.split("\n")
    if not 1 <= line <= len(lines):
        return None
    line_start = sum(len(l) + 1 for l in lines[: line - 1])
    line_end = line_start + len(lines[line - 1])
    for start, end in _member_regions(text):
        if start <= line_end and end > line_start and text[start:end].strip():
            blanked = "".join(c if c == "\n" else " " for c in text[start:end])
            return text[:start] + blanked + text[end:]
    return None


def _error_line(err: Exception) -> int:
    at = getattr(err, "at", None)
    pos = getattr(at, "position", None) if at is not None else None
    if pos is None:
        return 0
    return int(getattr(pos, "line", None) or pos[0])


def _parse_file(path: str, raw: SourceText) -> Tuple[Optional[str], List[ClassDecl], List[Diagnostic]]:
    if raw is None:
        return None, [], [Diagnostic(path, 0, "file unreadable", "error", "file-unreadable")]
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            return None, [], [Diagnostic(path, 0, f"file unreadable: {e.reason}", "error", "file-unreadable")]

    text = raw
    diagnostics: List[Diagnostic] = []
    for _ in range(MAX_RECOVERIES + 1):
        try:
            unit = javalang.parse.parse(text)
        except javalang.parser.JavaSyntaxError as e:
            line = _error_line(e)
            diagnostics.append(Diagnostic(path, line, f"syntax error: {e.description}", "error", "syntax-error"))
        except javalang.tokenizer.LexerError as e:
            diagnostics.append(Diagnostic(path, 0, f"syntax error: {e}", "error", "syntax-error"))
            return raw, [], diagnostics
        except (IndexError, StopIteration, TypeError) as e:
            # javalang raises bare errors on some truncated inputs
            diagnostics.append(Diagnostic(path, 0, f"syntax error: {type(e).__name__}", "error", "syntax-error"))
            return raw, [], diagnostics
        else:
            return raw, lower_compilation_unit(path, raw, unit), diagnostics

        recovered = _blank_member(text, line) if line else None
        if recovered is None:
            return raw, [], diagnostics
        logger.debug("%s:%d: skipping member after syntax error", path, line)
        text = recovered
    return raw, [], diagnostics


def parse_corpus(files: Sequence[Tuple[str, SourceText]], workers: int = 1) -> SourceCorpus:
    """Parse (path, text) pairs into one corpus of classes keyed by qualified name.

    Text may be bytes (decoded as UTF-8) or None for an unreadable file; problems
    become per-file diagnostics. With workers > 1 files are parsed on a thread pool,
    merged in input order. Raises ParseFailure when no class could be recovered.
    """
    if not files:
        raise ParseFailure("No source files given")

    def parse_one(item: Tuple[str, SourceText]):
        return _parse_file(*item)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(parse_one, files))
    else:
        results = [parse_one(item) for item in files]

    corpus = SourceCorpus()
    for (path, _), (text, classes, diagnostics) in zip(files, results):
        if text is not None:
            corpus.files[path] = text
        corpus.diagnostics.extend(diagnostics)
        for cls in classes:
            if cls.qualified in corpus.classes:
                first = corpus.classes[cls.qualified].path
                corpus.diagnostics.append(Diagnostic(
                    path, cls.span.line if cls.span else 0,
                    f"duplicate class {cls.qualified} (first declared in {first}); ignored",
                    "warning", "duplicate-class",
                ))
                continue
            corpus.classes[cls.qualified] = cls

    if not corpus.classes:
        raise ParseFailure(
            f"No class declarations recovered from {len(files)} file(s)", corpus.diagnostics
        )
    logger.info("Parsed %d file(s): %d class(es), %d diagnostic(s)",
                len(files), len(corpus.classes), len(corpus.diagnostics))
    return corpus
