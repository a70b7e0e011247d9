"""
Textual LP file writer (CPLEX LP format).

Output is deterministic: rows and variables keep their build order and
coefficients are written with their shortest exact decimal form.
"""

import logging
import re
import threading
from pathlib import Path
from typing import Iterable, List, Tuple

import numpy as np

from src.core.entities.linear_program import LinearProgram, Relation
from src.core.interfaces.report_repository import ReportWriteError

logger = logging.getLogger(__name__)

LINE_WIDTH = 255


def _number(value: float) -> str:
    return repr(float(value))


def _terms(pairs: Iterable[Tuple[float, str]]) -> List[str]:
    terms = []
    for coef, name in pairs:
        sign = "-" if coef < 0 else "+"
        terms.append(f"{sign} {_number(abs(coef))} {name}")
    return terms


def _wrap(head: str, terms: List[str], tail: str = "") -> List[str]:
    lines = []
    current = head
    for term in terms + ([tail] if tail else []):
        if len(current) + 1 + len(term) > LINE_WIDTH and current.strip():
            lines.append(current)
            current = "   " + term
        else:
            current = f"{current} {term}" if current else term
    lines.append(current)
    return lines


def format_lp(lp: LinearProgram) -> str:
    """
    Render ``lp`` as LP-format text.

    Zero objectives and empty rows are written with an explicit zero term on
    the first variable so every section stays parseable.
    """
    names = lp.var_names
    if not names:
        raise ValueError(f"{lp.name}: cannot export a program without variables")
    filler = [f"+ 0.0 {names[0]}"]

    lines = [f"\\* {lp.name} *\\", "Minimize"]
    objective = lp.objective
    nonzero = np.flatnonzero(objective)
    obj_terms = _terms((objective[c], names[c]) for c in nonzero) or filler
    lines += _wrap(" obj:", obj_terms)

    lines.append("Subject To")
    for row_name, cols, coefs, relation, rhs in lp.rows():
        terms = _terms((coef, names[col]) for col, coef in zip(cols, coefs) if coef != 0.0) or filler
        operator = "<=" if relation == Relation.LE else "="
        lines += _wrap(f" {row_name}:", terms, f"{operator} {_number(rhs)}")

    lines.append("Bounds")
    for name, low, high in zip(names, lp.var_low, lp.var_high):
        if low == high:
            lines.append(f" {name} = {_number(low)}")
        else:
            lines.append(f" {_number(low)} <= {name} <= {_number(high)}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def export_lp(lp: LinearProgram, path: Path) -> None:
    """
    Write ``lp`` to ``path`` in LP format.

    Raises:
        ReportWriteError: If the file cannot be written
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(format_lp(lp), encoding="utf-8")
    except OSError as e:
        raise ReportWriteError(f"Failed to export LP to {path}: {e}", cause=e)
    logger.debug(f"Exported {lp!r} to {path}")


class LpExporter:
    """
    Callable sink writing every program it receives into one directory.

    Files are numbered in arrival order, ``000001_<lp name>.lp`` and so on.
    Safe to share between worker threads.
    """

    def __init__(self, directory: Path):
        self._directory = Path(directory)
        self._count = 0
        self._lock = threading.Lock()

    @property
    def count(self) -> int:
        return self._count

    def __call__(self, lp: LinearProgram) -> None:
        with self._lock:
            self._count += 1
            index = self._count
        safe = re.sub(r"[^A-Za-z0-9_.-]", "_", lp.name)
        export_lp(lp, self._directory / f"{index:06d}_{safe}.lp")
