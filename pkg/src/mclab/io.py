"""Plain-text file formats.

Matrix::

    # n1 n2
    <n1 lines of n2 floats>

Factorization::

    # n1 n2 r
    <n1 lines of U>
    <blank>
    <r singular values>
    <blank>
    <n2 lines of V>

Observations (0-based indices, one line per distinct cell)::

    # n1 n2 m model seed
    a b multiplicity [value]
"""

import numpy as np

from .errors import InvalidArgument
from .model import LowRankFactorization
from .sampling import ObservationSet


def _fmt(x):
    return repr(float(x))


def _header(line, n):
    if not line.startswith("#"):
        raise InvalidArgument(f"expected a '#' header line, got {line!r}")
    parts = line[1:].split()
    if len(parts) < n:
        raise InvalidArgument(f"header needs {n} fields: {line!r}")
    return parts


def _rows(lines, ncols):
    out = []
    for ln in lines:
        vals = [float(t) for t in ln.split()]
        if len(vals) != ncols:
            raise InvalidArgument(f"expected {ncols} values per row, got {len(vals)}")
        out.append(vals)
    return np.array(out, dtype=float).reshape(len(out), ncols)


def format_matrix(X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    lines = [f"# {X.shape[0]} {X.shape[1]}"]
    lines += [" ".join(_fmt(x) for x in row) for row in X]
    return "\n".join(lines) + "\n"


def parse_matrix(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n1, n2 = (int(t) for t in _header(lines[0], 2)[:2])
    X = _rows(lines[1:], n2)
    if X.shape[0] != n1:
        raise InvalidArgument(f"expected {n1} rows, got {X.shape[0]}")
    return X


def write_matrix(path, X):
    with open(path, "w") as fh:
        fh.write(format_matrix(X))


def read_matrix(path):
    with open(path) as fh:
        return parse_matrix(fh.read())


def format_factorization(f):
    lines = [f"# {f.n1} {f.n2} {f.r}"]
    lines += [" ".join(_fmt(x) for x in row) for row in f.U]
    lines.append("")
    lines.append(" ".join(_fmt(s) for s in f.S))
    lines.append("")
    lines += [" ".join(_fmt(x) for x in row) for row in f.V]
    return "\n".join(lines) + "\n"


def parse_factorization(text):
    lines = text.splitlines()
    n1, n2, r = (int(t) for t in _header(lines[0], 3)[:3])
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != n1 + 1 + n2:
        raise InvalidArgument(f"expected {n1 + 1 + n2} data lines, got {len(body)}")
    U = _rows(body[:n1], r)
    S = _rows(body[n1:n1 + 1], r)[0]
    V = _rows(body[n1 + 1:], r)
    return LowRankFactorization(U, S, V)


def write_factorization(path, f):
    with open(path, "w") as fh:
        fh.write(format_factorization(f))


def read_factorization(path):
    with open(path) as fh:
        return parse_factorization(fh.read())


def format_observations(obs):
    seed = "none" if obs.seed is None else str(obs.seed)
    lines = [f"# {obs.n1} {obs.n2} {obs.m} {obs.model} {seed}"]
    vals = obs.cell_values() if obs.values is not None else None
    for k, (a, b, c) in enumerate(zip(obs.rows, obs.cols, obs.counts)):
        row = f"{a} {b} {c}"
        if vals is not None:
            row += f" {_fmt(vals[k])}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def parse_observations(text):
    """Read an observation file.

    Draw order is not stored in the file; draws are rebuilt cell by cell in
    file order.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = _header(lines[0], 5)
    n1, n2, m = int(head[0]), int(head[1]), int(head[2])
    model = head[3]
    seed = None if head[4] == "none" else int(head[4])
    draws, values = [], []
    has_values = None
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) not in (3, 4):
            raise InvalidArgument(f"bad observation line {ln!r}")
        if has_values is None:
            has_values = len(parts) == 4
        elif has_values != (len(parts) == 4):
            raise InvalidArgument("value column must be present on all lines or none")
        a, b, c = int(parts[0]), int(parts[1]), int(parts[2])
        if c < 1:
            raise InvalidArgument(f"multiplicity must be positive in {ln!r}")
        draws += [(a, b)] * c
        if has_values:
            values += [float(parts[3])] * c
    if len(draws) != m:
        raise InvalidArgument(f"header says m={m} but multiplicities sum to {len(draws)}")
    return ObservationSet(n1, n2, np.array(draws, dtype=np.int64).reshape(-1, 2), model, seed,
                          np.array(values) if has_values else None)


def write_observations(path, obs):
    with open(path, "w") as fh:
        fh.write(format_observations(obs))


def read_observations(path):
    with open(path) as fh:
        return parse_observations(fh.read())
