"""Plain-text serializers.

Matrix::

    rows cols f poly_mask
    e00 e01 ...
    ...

Element codes are integers ``0..q-1`` in the polynomial basis.  A matrix
list (used for generator files and subspace sets) is a sequence of matrix
blocks separated by blank lines.  A point set is::

    d q poly_mask count
    x0 x1 ... x(d-1)
    ...
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

from .field import FieldError, make_field
from .linalg import MatrixGF, Subspace, pack, unpack


class FormatError(ValueError):
    pass


def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError as exc:
        raise FormatError(f"line {lineno}: expected integers, got {line!r}") from exc


def format_matrix(m: MatrixGF) -> str:
    lines = [f"{m.nrows} {m.ncols} {m.field.f} {m.field.poly}"]
    lines += [" ".join(str(x) for x in row) for row in m.entries()]
    return "\n".join(lines) + "\n"


def _parse_block(lines: list[tuple[int, str]]) -> MatrixGF:
    lineno, header = lines[0]
    head = _ints(header, lineno)
    if len(head) != 4:
        raise FormatError(f"line {lineno}: matrix header needs 'rows cols f poly_mask'")
    nrows, ncols, f, poly = head
    try:
        field = make_field(f, poly)
    except FieldError as exc:
        raise FormatError(f"line {lineno}: {exc}") from exc
    body = lines[1:]
    if len(body) != nrows:
        raise FormatError(f"line {lineno}: header declares {nrows} rows, found {len(body)}")
    rows = []
    for ln, text in body:
        vals = _ints(text, ln)
        if len(vals) != ncols:
            raise FormatError(f"line {ln}: expected {ncols} entries, got {len(vals)}")
        try:
            rows.append(pack(vals, field))
        except ValueError as exc:
            raise FormatError(f"line {ln}: {exc}") from exc
    return MatrixGF(field, nrows, ncols, tuple(rows))


def _blocks(text: str) -> list[list[tuple[int, str]]]:
    blocks: list[list[tuple[int, str]]] = []
    cur: list[tuple[int, str]] = []
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            if cur:
                blocks.append(cur)
                cur = []
            continue
        cur.append((i, line))
    if cur:
        blocks.append(cur)
    return blocks


def parse_matrix(text: str) -> MatrixGF:
    blocks = _blocks(text)
    if len(blocks) != 1:
        raise FormatError(f"expected one matrix block, found {len(blocks)}")
    return _parse_block(blocks[0])


def parse_matrix_list(text: str) -> list[MatrixGF]:
    return [_parse_block(b) for b in _blocks(text)]


def format_matrix_list(ms: Iterable[MatrixGF]) -> str:
    return "\n".join(format_matrix(m) for m in ms)


def format_subspaces(subspaces: Iterable[Subspace]) -> str:
    return format_matrix_list(s.matrix for s in subspaces)


def parse_subspaces(text: str) -> list[Subspace]:
    return [Subspace.from_matrix(m) for m in parse_matrix_list(text)]


def format_points(points: Sequence[int], d: int, field) -> str:
    """Points are packed normalized coordinate vectors."""
    lines = [f"{d} {field.q} {field.poly} {len(points)}"]
    lines += [" ".join(str(x) for x in unpack(p, d, field)) for p in points]
    return "\n".join(lines) + "\n"


def parse_points(text: str):
    """Return ``(d, field, packed_points)``; points are not renormalized here."""
    blocks = _blocks(text)
    if len(blocks) != 1:
        raise FormatError("point-set file must be a single block")
    (lineno, header), *body = blocks[0]
    head = _ints(header, lineno)
    if len(head) != 4:
        raise FormatError(f"line {lineno}: point header needs 'd q poly_mask count'")
    d, q, poly, count = head
    if q < 2 or q & (q - 1):
        raise FormatError(f"line {lineno}: q={q} is not a power of two")
    try:
        field = make_field(q.bit_length() - 1, poly)
    except FieldError as exc:
        raise FormatError(f"line {lineno}: {exc}") from exc
    if len(body) != count:
        raise FormatError(f"line {lineno}: header declares {count} points, found {len(body)}")
    pts = []
    for ln, text_ in body:
        vals = _ints(text_, ln)
        if len(vals) != d:
            raise FormatError(f"line {ln}: expected {d} coordinates")
        try:
            v = pack(vals, field)
        except ValueError as exc:
            raise FormatError(f"line {ln}: {exc}") from exc
        if v == 0:
            raise FormatError(f"line {ln}: the zero vector is not a projective point")
        pts.append(v)
    return d, field, pts


def read_text(path: str | Path) -> str:
    return Path(path).read_text()
