"""Matrix Market (coordinate / array) reader and writer, plus plain-text vectors.

Hand-rolled rather than scipy.io.mmread so that parse errors can report the
offending line number.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import InputError

_FIELDS = {"real", "integer", "complex", "pattern", "double"}
_SYMM = {"general", "symmetric", "skew-symmetric", "hermitian"}


def _fail(msg, line=None, path=None):
    where = f"{path}:{line}: " if line is not None else (f"{path}: " if path else "")
    raise InputError(where + msg, line=line)


def _parse_value(tokens, fld, lineno, path):
    try:
        if fld == "pattern":
            if tokens:
                raise ValueError
            return 1.0
        if fld == "complex":
            if len(tokens) != 2:
                raise ValueError
            return complex(float(tokens[0]), float(tokens[1]))
        if len(tokens) != 1:
            raise ValueError
        return float(tokens[0])
    except ValueError:
        _fail(f"bad {fld} entry {' '.join(tokens)!r}", lineno, path)


def read_matrix(path) -> np.ndarray:
    """Dense ndarray from a Matrix Market file."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    if not lines:
        _fail("empty file", 1, path)
    head = lines[0].split()
    if len(head) != 5 or head[0].lower() != "%%matrixmarket" or head[1].lower() != "matrix":
        _fail("missing '%%MatrixMarket matrix <format> <field> <symmetry>' header", 1, path)
    fmt, fld, sym = (h.lower() for h in head[2:])
    if fmt not in {"coordinate", "array"} or fld not in _FIELDS or sym not in _SYMM:
        _fail(f"unsupported header {' '.join(head[2:])!r}", 1, path)
    if fmt == "array" and fld == "pattern":
        _fail("pattern field needs coordinate format", 1, path)
    body = [(i + 1, ln.split()) for i, ln in enumerate(lines) if i > 0 and ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        _fail("missing size line", len(lines), path)
    lineno, size = body[0]
    try:
        dims = [int(t) for t in size]
    except ValueError:
        _fail(f"bad size line {' '.join(size)!r}", lineno, path)
    if fmt == "coordinate" and len(dims) != 3 or fmt == "array" and len(dims) != 2 or min(dims) < 0:
        _fail(f"bad size line {' '.join(size)!r}", lineno, path)
    nr, nc = dims[0], dims[1]
    if sym != "general" and nr != nc:
        _fail(f"{sym} matrix must be square", lineno, path)
    dtype = complex if fld == "complex" else float
    A = np.zeros((nr, nc), dtype=dtype)
    entries = body[1:]

    def put(i, j, v):
        A[i, j] = v
        if i != j:
            if sym == "symmetric":
                A[j, i] = v
            elif sym == "skew-symmetric":
                A[j, i] = -v
            elif sym == "hermitian":
                A[j, i] = np.conj(v)

    if fmt == "coordinate":
        nnz = dims[2]
        if len(entries) != nnz:
            where = entries[nnz][0] if len(entries) > nnz else len(lines)
            _fail(f"expected {nnz} entries, found {len(entries)}", where, path)
        for ln, tok in entries:
            if len(tok) < 2:
                _fail("entry needs row and column indices", ln, path)
            try:
                i, j = int(tok[0]) - 1, int(tok[1]) - 1
            except ValueError:
                _fail(f"bad index in {' '.join(tok)!r}", ln, path)
            if not (0 <= i < nr and 0 <= j < nc):
                _fail(f"index ({i + 1}, {j + 1}) out of range", ln, path)
            if sym != "general" and i < j:
                _fail(f"{sym} storage expects the lower triangle", ln, path)
            put(i, j, _parse_value(tok[2:], fld, ln, path))
    else:
        # column-major; symmetric variants store the lower triangle only
        cells = [(i, j) for j in range(nc) for i in range(nr)
                 if sym == "general" or i > j or (i == j and sym != "skew-symmetric")]
        if len(entries) != len(cells):
            where = entries[len(cells)][0] if len(entries) > len(cells) else len(lines)
            _fail(f"expected {len(cells)} values, found {len(entries)}", where, path)
        for (i, j), (ln, tok) in zip(cells, entries):
            put(i, j, _parse_value(tok, fld, ln, path))
    if not np.all(np.isfinite(A)):
        _fail("non-finite entry", None, path)
    return A


def write_matrix(path, A, fmt: str = "coordinate", comment: str | None = None) -> None:
    """Write a general real/complex matrix with round-trip precision."""
    A = np.atleast_2d(np.asarray(A))
    cplx = np.iscomplexobj(A)
    fld = "complex" if cplx else "real"

    def val(v):
        return f"{v.real:.17g} {v.imag:.17g}" if cplx else f"{float(v):.17g}"

    out = [f"%%MatrixMarket matrix {fmt} {fld} general"]
    if comment:
        out += [f"% {c}" for c in comment.splitlines()]
    nr, nc = A.shape
    if fmt == "coordinate":
        nz = np.argwhere(A != 0)
        nz = nz[np.lexsort((nz[:, 0], nz[:, 1]))]
        out.append(f"{nr} {nc} {len(nz)}")
        out += [f"{i + 1} {j + 1} {val(A[i, j])}" for i, j in nz]
    elif fmt == "array":
        out.append(f"{nr} {nc}")
        out += [val(A[i, j]) for j in range(nc) for i in range(nr)]
    else:
        raise ValueError(f"unknown format {fmt!r}")
    Path(path).write_text("\n".join(out) + "\n")


def read_vector(path) -> np.ndarray:
    """Whitespace-separated numbers (complex literals like 1+2j allowed); a .mtx file also works."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    if text.lstrip().lower().startswith("%%matrixmarket"):
        M = read_matrix(path)
        if min(M.shape) != 1:
            _fail(f"expected a vector, got shape {M.shape}", None, path)
        return M.ravel()
    vals = []
    cplx = False
    for lineno, ln in enumerate(text.splitlines(), 1):
        ln = ln.split("#", 1)[0]
        for tok in ln.split():
            try:
                vals.append(float(tok))
            except ValueError:
                try:
                    vals.append(complex(tok))
                    cplx = True
                except ValueError:
                    _fail(f"bad number {tok!r}", lineno, path)
    if not vals:
        _fail("empty vector", None, path)
    v = np.array(vals, dtype=complex if cplx else float)
    if not np.all(np.isfinite(v)):
        _fail("non-finite entry", None, path)
    return v


def write_vector(path, v) -> None:
    v = np.asarray(v)
    if np.iscomplexobj(v):
        lines = [repr(complex(x)).strip("()") for x in v]
    else:
        lines = [f"{float(x):.17g}" for x in v]
    Path(path).write_text("\n".join(lines) + "\n")
