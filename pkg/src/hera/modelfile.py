"""Text format for fitted models.

::

    PLLMODEL 1
    d q n
    <d lines: q reals>       weights W, row by row
    <q lines: n reals>       confidences P, row by row
    HYPERPARAMS
    <name value>             one line per hyperparameter
"""

from __future__ import annotations

from dataclasses import fields

import numpy as np

from .core import Hyperparams, ModelState
from .data import IoError, ParseError

MAGIC = "PLLMODEL 1"


def dumps_model(W: ModelState, P, hp: Hyperparams) -> str:
    weights = W.weights if isinstance(W, ModelState) else np.asarray(W)
    d, q = weights.shape
    n = P.shape[1]
    lines = [MAGIC, f"{d} {q} {n}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in weights]
    lines += [" ".join(repr(float(v)) for v in row) for row in P]
    lines.append("HYPERPARAMS")
    lines += [f"{name} {value!r}" for name, value in hp.as_dict().items()]
    return "\n".join(lines) + "\n"


def loads_model(text: str):
    """Parse a model file into ``(ModelState, P, Hyperparams)``."""
    lines = [ln for ln in text.splitlines()]
    if not lines or lines[0].strip() != MAGIC:
        raise ParseError(1, f"expected header {MAGIC!r}")
    try:
        d, q, n = (int(t) for t in lines[1].split())
    except (ValueError, IndexError):
        raise ParseError(2, "expected 'd q n'") from None

    def block(start, rows, cols):
        out = np.empty((rows, cols))
        for i in range(rows):
            lineno = start + i + 1
            if start + i >= len(lines):
                raise ParseError(lineno, "file ends inside a matrix block")
            toks = lines[start + i].split()
            if len(toks) != cols:
                raise ParseError(lineno, f"expected {cols} values, found {len(toks)}")
            try:
                out[i] = [float(t) for t in toks]
            except ValueError:
                raise ParseError(lineno, "non-numeric value") from None
        return out

    W = block(2, d, q)
    P = block(2 + d, q, n)
    pos = 2 + d + q
    if pos >= len(lines) or lines[pos].strip() != "HYPERPARAMS":
        raise ParseError(pos + 1, "expected HYPERPARAMS block")
    types = {f.name: f.type for f in fields(Hyperparams)}
    values = {}
    for i, line in enumerate(lines[pos + 1:], start=pos + 2):
        if not line.strip():
            continue
        name, _, raw = line.partition(" ")
        if name not in types:
            raise ParseError(i, f"unknown hyperparameter {name!r}")
        try:
            values[name] = int(raw) if types[name] in (int, "int") else float(raw)
        except ValueError:
            raise ParseError(i, f"bad value for {name}") from None
    return ModelState(W), P, Hyperparams(**values)


def save_model(path, W, P, hp) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps_model(W, P, hp))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_model(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return loads_model(fh.read())
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
