"""CSV ingestion of data matrices and serialization of test outcomes."""

import csv
import json
import math
import platform
from pathlib import Path

import numpy as np
import scipy
import sklearn

from . import __version__
from .exceptions import EmptyInputError, ParseError


def read_matrix(path, delimiter=",", has_header=False):
    """Read an ``(n, p)`` matrix from delimited text, rows = observations."""
    path = Path(path)
    rows = []
    width = None
    with path.open(newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        for lineno, fields in enumerate(reader, start=1):
            if lineno == 1 and has_header:
                continue
            if not fields or all(not f.strip() for f in fields):
                continue
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise ParseError(
                    f"{path}: line {lineno} has {len(fields)} fields, expected {width}",
                    line=lineno,
                )
            row = []
            for col, text in enumerate(fields, start=1):
                try:
                    v = float(text)
                except ValueError:
                    raise ParseError(
                        f"{path}: line {lineno}, column {col}: not a number: {text!r}",
                        line=lineno,
                        column=col,
                    ) from None
                if not math.isfinite(v):
                    raise ParseError(
                        f"{path}: line {lineno}, column {col}: non-finite value {text!r}",
                        line=lineno,
                        column=col,
                    )
                row.append(v)
            rows.append(row)
    if not rows:
        raise EmptyInputError(f"{path}: no data rows")
    return np.array(rows, dtype=float)


def write_matrix(path, x, delimiter=","):
    """Write with 17 significant digits so every double round-trips exactly."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    with Path(path).open("w") as fh:
        for row in x:
            fh.write(delimiter.join(format(v, ".17g") for v in row) + "\n")


def versions():
    return {
        "hybridcov": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "scikit-learn": sklearn.__version__,
        "python": platform.python_version(),
    }


def outcome_dict(outcome, seed=None):
    eig_key = "t2" if outcome.m == 1 else "t2m"
    return {
        "t1": outcome.frob.t1,
        "p1": outcome.frob.p1,
        "b1": outcome.frob.b1,
        "b2": outcome.frob.b2,
        "c": outcome.frob.c,
        "sigma1_hat": outcome.frob.sigma1_hat,
        eig_key: outcome.eigen.statistic,
        "p2": outcome.eigen.p2,
        "mc_draws": outcome.eigen.mc_draws,
        "t_fc": outcome.t_fc,
        "q": outcome.q,
        "alpha": outcome.alpha,
        "m": outcome.m,
        "reject": outcome.reject,
        "diagnostics": list(outcome.diagnostics),
        "versions": versions(),
        "seed": seed,
    }


def write_outcome(outcome, fmt="json", seed=None):
    """Serialize a ``TestOutcome`` as JSON or as a text summary."""
    d = outcome_dict(outcome, seed)
    if fmt == "json":
        return json.dumps(d, indent=2)
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    eig_key = "t2" if outcome.m == 1 else "t2m"
    lines = [
        "Hybrid two-sample covariance test",
        f"  Frobenius statistic  T1 = {d['t1']:.6g}   p1 = {d['p1']:.6g}",
        f"  Eigenvalue statistic {eig_key} = {d[eig_key]:.6g}   p2 = {d['p2']:.6g}   (m = {d['m']})",
        f"  Fisher statistic   T_FC = {d['t_fc']:.6g}   critical value = {d['q']:.6g} (alpha = {d['alpha']:g})",
        "  Decision: " + ("REJECT H0" if d["reject"] else "FAIL TO REJECT H0"),
    ]
    if d["diagnostics"]:
        lines.append("  Diagnostics:")
        lines.extend(f"    - {msg}" for msg in d["diagnostics"])
    if seed is not None:
        lines.append(f"  Seed: {seed}")
    return "\n".join(lines) + "\n"


def parse_outcome(text):
    return json.loads(text)
