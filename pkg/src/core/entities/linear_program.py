"""
LinearProgram entity - a bounded-variable LP in minimize form.

Variables always carry finite bounds. Constraints are sparse rows with a
relation of ``<=`` or ``=``. Builders add variable blocks and rows
incrementally; the solver reads the assembled CSR matrix.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sps

from ..exceptions import NumericError, ShapeError


class Relation(Enum):
    """Row relation."""
    LE = "<="
    EQ = "="


class ProblemVariant(Enum):
    """Which program ``build_joint_lp`` emits."""
    JOINT_MARGIN = "margin"
    JOINT_PURE_IMPLICATION = "pure"
    INDEPENDENT_NET1 = "independent_net1"
    INDEPENDENT_NET2 = "independent_net2"


class NetworkRole(Enum):
    """Owner of an LP variable block."""
    NET1 = "n1"
    NET2 = "n2"
    SHARED_INPUT = "in"


class Stage(Enum):
    PRE = "pre"
    POST = "post"


@dataclass(frozen=True)
class VarRef:
    """
    Reference to one neuron value in a built program.

    For activation layers ``PRE`` is the layer input; for every other layer
    ``PRE`` and ``POST`` name the same column.
    """

    network: NetworkRole
    layer: int
    neuron: int
    stage: Stage = Stage.POST


class LinearProgram:
    """Sparse minimization problem with finite variable bounds."""

    def __init__(self, name: str = "lp"):
        self.name = name
        self._names: List[str] = []
        self._low: List[np.ndarray] = []
        self._high: List[np.ndarray] = []
        self._num_vars = 0

        self._row_cols: List[np.ndarray] = []
        self._row_coefs: List[np.ndarray] = []
        self._relations: List[Relation] = []
        self._rhs: List[float] = []
        self._row_names: List[str] = []

        self._objective = np.zeros(0)
        self._cache: Optional[Tuple[sps.csr_matrix, np.ndarray, np.ndarray, np.ndarray]] = None

        # (role, layer) -> column indices; (role, layer) -> is activation layer
        self.layout: Dict[Tuple[NetworkRole, int], np.ndarray] = {}
        self.activation_layers: Dict[Tuple[NetworkRole, int], bool] = {}
        self.variant: Optional[ProblemVariant] = None

    # Building

    def add_variables(self, names: Sequence[str], low, high) -> np.ndarray:
        """
        Append a block of variables.

        Returns:
            Column indices of the new block

        Raises:
            NumericError: If a bound is not finite
            ShapeError: If a lower bound exceeds its upper bound
        """
        count = len(names)
        low = np.broadcast_to(np.asarray(low, dtype=np.float64), (count,)).copy()
        high = np.broadcast_to(np.asarray(high, dtype=np.float64), (count,)).copy()
        if not (np.all(np.isfinite(low)) and np.all(np.isfinite(high))):
            raise NumericError(f"Variables {names[:1]}... need finite bounds")
        if np.any(low > high):
            raise ShapeError(f"Empty variable range in block starting at {names[0]}")
        start = self._num_vars
        self._names.extend(names)
        self._low.append(low)
        self._high.append(high)
        self._num_vars += count
        self._objective = np.concatenate([self._objective, np.zeros(count)])
        self._cache = None
        return np.arange(start, start + count)

    def add_constraint(self, cols, coefs, relation: Relation, rhs: float, name: Optional[str] = None) -> int:
        """Append one row ``coefs . x[cols] (relation) rhs`` and return its index."""
        cols = np.asarray(cols, dtype=np.int64)
        coefs = np.asarray(coefs, dtype=np.float64)
        if cols.shape != coefs.shape:
            raise ShapeError("Row columns and coefficients differ in length")
        if cols.size and (cols.min() < 0 or cols.max() >= self._num_vars):
            raise ShapeError(f"Row references an unknown column (have {self._num_vars})")
        if not (np.all(np.isfinite(coefs)) and np.isfinite(rhs)):
            raise NumericError("Row coefficients must be finite")
        index = len(self._rhs)
        self._row_cols.append(cols)
        self._row_coefs.append(coefs)
        self._relations.append(relation)
        self._rhs.append(float(rhs))
        self._row_names.append(name or f"c{index}")
        self._cache = None
        return index

    def add_constraints(self, matrix: sps.spmatrix, relation: Relation, rhs, prefix: str = "c") -> None:
        """Append every row of a sparse matrix over all current columns."""
        matrix = sps.csr_matrix(matrix)
        rhs = np.broadcast_to(np.asarray(rhs, dtype=np.float64), (matrix.shape[0],))
        for row in range(matrix.shape[0]):
            start, end = matrix.indptr[row], matrix.indptr[row + 1]
            self.add_constraint(
                matrix.indices[start:end], matrix.data[start:end], relation, rhs[row],
                name=f"{prefix}_{row}",
            )

    def set_objective(self, cols, coefs) -> None:
        """Replace the objective with ``sum coefs * x[cols]``."""
        objective = np.zeros(self._num_vars)
        np.add.at(objective, np.asarray(cols, dtype=np.int64), np.asarray(coefs, dtype=np.float64))
        self._objective = objective

    # Reading

    @property
    def num_vars(self) -> int:
        return self._num_vars

    @property
    def num_constraints(self) -> int:
        return len(self._rhs)

    @property
    def var_names(self) -> List[str]:
        return list(self._names)

    @property
    def row_names(self) -> List[str]:
        return list(self._row_names)

    @property
    def var_low(self) -> np.ndarray:
        return np.concatenate(self._low) if self._low else np.zeros(0)

    @property
    def var_high(self) -> np.ndarray:
        return np.concatenate(self._high) if self._high else np.zeros(0)

    @property
    def objective(self) -> np.ndarray:
        return self._objective.copy()

    @property
    def relations(self) -> List[Relation]:
        return list(self._relations)

    def rows(self) -> List[Tuple[str, np.ndarray, np.ndarray, Relation, float]]:
        """Every row as (name, columns, coefficients, relation, rhs)."""
        return list(zip(self._row_names, self._row_cols, self._row_coefs, self._relations, self._rhs))

    def constraint_matrix(self) -> Tuple[sps.csr_matrix, np.ndarray, np.ndarray]:
        """
        Assembled rows.

        Returns:
            (A, rhs, is_equality) with A of shape (num_constraints, num_vars)
        """
        if self._cache is None:
            counts = [cols.size for cols in self._row_cols]
            row_index = np.repeat(np.arange(len(counts)), counts)
            cols = np.concatenate(self._row_cols) if counts else np.zeros(0, dtype=np.int64)
            coefs = np.concatenate(self._row_coefs) if counts else np.zeros(0)
            matrix = sps.csr_matrix((coefs, (row_index, cols)), shape=(len(counts), self._num_vars))
            is_eq = np.array([rel == Relation.EQ for rel in self._relations], dtype=bool)
            self._cache = (matrix, np.array(self._rhs, dtype=np.float64), is_eq)
        matrix, rhs, is_eq = self._cache
        return matrix, rhs, is_eq

    def column(self, ref: VarRef) -> int:
        """
        Resolve a variable reference to its column.

        Raises:
            ShapeError: If the network block or neuron does not exist
        """
        if ref.network == NetworkRole.SHARED_INPUT:
            key = (NetworkRole.SHARED_INPUT, 0)
        else:
            layer = ref.layer
            if ref.stage == Stage.PRE and self.activation_layers.get((ref.network, layer), False):
                layer -= 1
            key = (ref.network, layer)
            if layer == 0:
                key = (NetworkRole.SHARED_INPUT, 0)
        if key not in self.layout:
            raise ShapeError(f"No variable block for {ref}")
        block = self.layout[key]
        if not 0 <= ref.neuron < block.size:
            raise ShapeError(f"Neuron {ref.neuron} out of range for {ref}")
        return int(block[ref.neuron])

    def evaluate(self, point: np.ndarray) -> float:
        """Objective value at ``point``."""
        return float(self._objective @ np.asarray(point, dtype=np.float64))

    def max_violation(self, point: np.ndarray) -> float:
        """
        Largest row or bound violation at ``point`` (0 when feasible).
        """
        point = np.asarray(point, dtype=np.float64)
        if point.shape != (self._num_vars,):
            raise ShapeError(f"Point has shape {point.shape}, expected ({self._num_vars},)")
        worst = 0.0
        if self._num_vars:
            worst = max(
                worst,
                float(np.max(self.var_low - point, initial=0.0)),
                float(np.max(point - self.var_high, initial=0.0)),
            )
        if self.num_constraints:
            matrix, rhs, is_eq = self.constraint_matrix()
            residual = matrix @ point - rhs
            eq_violation = np.abs(residual[is_eq])
            le_violation = np.maximum(residual[~is_eq], 0.0)
            worst = max(worst, float(np.max(eq_violation, initial=0.0)), float(np.max(le_violation, initial=0.0)))
        return worst

    def __repr__(self) -> str:
        return f"LinearProgram(name='{self.name}', vars={self._num_vars}, rows={self.num_constraints})"
