"""
Bounded-variable revised simplex.

Every structural variable has finite bounds. ``<=`` rows get a bounded
slack; rows whose slack cannot start feasible get an artificial variable
and a phase-one pass drives those to zero. The basis is held as a dense LU
factorization plus product-form eta updates, refactorized periodically.
Pricing is Dantzig (largest reduced cost) until a run of degenerate pivots
switches the phase to Bland's rule, which cannot cycle.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.sparse as sps
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from src.core.entities.linear_program import LinearProgram
from src.core.entities.lp_solution import LpSolution, LpStatus
from src.core.interfaces.lp_solver import LpSolverInterface, SolverError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverOptions:
    """
    Solver tolerances and limits.

    Attributes:
        feas_tol: Largest accepted row or bound residual of a returned point
        opt_tol: Reduced-cost tolerance for optimality
        max_iters: Iteration cap over both phases (bound flips included)
        refactor_every: Pivots between fresh LU factorizations
        bland_after: Consecutive degenerate pivots before Bland's rule engages
        pivot_tol: Smallest pivot magnitude accepted in the ratio test
    """

    feas_tol: float = 1e-9
    opt_tol: float = 1e-9
    max_iters: int = 50000
    refactor_every: int = 50
    bland_after: int = 200
    pivot_tol: float = 1e-11


class _Basis:
    """LU factorization of the basis matrix with product-form updates."""

    def __init__(self, matrix: sps.csc_matrix, basis: np.ndarray):
        dense = matrix[:, basis].toarray()
        with warnings.catch_warnings():
            warnings.simplefilter("error", LinAlgWarning)
            try:
                self._lu = lu_factor(dense, check_finite=False)
            except (LinAlgWarning, ValueError) as e:
                raise np.linalg.LinAlgError("Singular basis") from e
        diagonal = np.abs(np.diag(self._lu[0]))
        if diagonal.size and diagonal.min() <= 1e-13 * max(1.0, diagonal.max()):
            raise np.linalg.LinAlgError("Singular basis")
        self._etas: List[Tuple[int, np.ndarray]] = []

    @property
    def updates(self) -> int:
        return len(self._etas)

    def ftran(self, vector: np.ndarray) -> np.ndarray:
        result = lu_solve(self._lu, vector, check_finite=False)
        for position, column in self._etas:
            pivot = result[position] / column[position]
            result -= pivot * column
            result[position] = pivot
        return result

    def btran(self, vector: np.ndarray) -> np.ndarray:
        result = np.array(vector, dtype=np.float64)
        for position, column in reversed(self._etas):
            value = result[position] - (column @ result - column[position] * result[position])
            result[position] = value / column[position]
        return lu_solve(self._lu, result, trans=1, check_finite=False)

    def update(self, position: int, column: np.ndarray) -> None:
        self._etas.append((position, column.copy()))


class _Tableau:
    """Standard-form state shared by both phases."""

    def __init__(self, lp: LinearProgram):
        matrix, rhs, is_eq = lp.constraint_matrix()
        self.num_struct = lp.num_vars
        self.num_rows = lp.num_constraints
        low = lp.var_low
        high = lp.var_high
        cost = lp.objective

        # slack upper bound: largest b - a.x over the variable box
        le_rows = np.flatnonzero(~is_eq)
        positive = matrix.maximum(0)
        negative = matrix.minimum(0)
        row_min = positive @ low + negative @ high
        slack_high = np.maximum(rhs[le_rows] - row_min[le_rows], 0.0)
        slack_block = sps.csr_matrix(
            (np.ones(le_rows.size), (le_rows, np.arange(le_rows.size))),
            shape=(self.num_rows, le_rows.size),
        )

        # start every structural at the bound favoured by its cost
        x_struct = np.where(cost < 0, high, low)
        residual = rhs - matrix @ x_struct

        slack_of_row = np.full(self.num_rows, -1)
        slack_of_row[le_rows] = self.num_struct + np.arange(le_rows.size)
        x_slack = np.zeros(le_rows.size)

        basis = np.empty(self.num_rows, dtype=np.int64)
        art_rows: List[int] = []
        art_signs: List[float] = []
        for row in range(self.num_rows):
            slack = slack_of_row[row]
            if slack >= 0 and residual[row] >= 0:
                basis[row] = slack
                offset = slack - self.num_struct
                x_slack[offset] = residual[row]
                slack_high[offset] = max(slack_high[offset], residual[row])
            else:
                art_rows.append(row)
                art_signs.append(1.0 if residual[row] >= 0 else -1.0)

        num_art = len(art_rows)
        first_art = self.num_struct + le_rows.size
        art_block = sps.csr_matrix(
            (np.array(art_signs), (np.array(art_rows, dtype=np.int64), np.arange(num_art))),
            shape=(self.num_rows, num_art),
        )
        for k, row in enumerate(art_rows):
            basis[row] = first_art + k
        x_art = np.abs(residual[art_rows]) if num_art else np.zeros(0)

        blocks = [block for block in (matrix, slack_block, art_block) if block.shape[1] > 0]
        self.matrix = sps.hstack(blocks, format="csc")
        self.rhs = rhs
        self.low = np.concatenate([low, np.zeros(le_rows.size), np.zeros(num_art)])
        self.high = np.concatenate([high, slack_high, x_art.copy()])
        self.x = np.concatenate([x_struct, x_slack, x_art])
        self.cost = np.concatenate([cost, np.zeros(le_rows.size + num_art)])
        self.first_art = first_art
        self.num_art = num_art
        self.basis = basis
        self.is_basic = np.zeros(self.matrix.shape[1], dtype=bool)
        self.is_basic[basis] = True

    @property
    def num_cols(self) -> int:
        return self.matrix.shape[1]

    def column(self, index: int) -> np.ndarray:
        start, end = self.matrix.indptr[index], self.matrix.indptr[index + 1]
        dense = np.zeros(self.num_rows)
        dense[self.matrix.indices[start:end]] = self.matrix.data[start:end]
        return dense

    def recompute_basic(self, factor: _Basis) -> None:
        nonbasic = ~self.is_basic
        rhs = self.rhs - self.matrix[:, nonbasic] @ self.x[nonbasic]
        self.x[self.basis] = factor.ftran(rhs)


class RevisedSimplexSolver(LpSolverInterface):
    """
    Deterministic revised simplex over the bounded-variable standard form.
    """

    def __init__(self, options: Optional[SolverOptions] = None):
        """
        Initialize the solver.

        Args:
            options: Tolerances and limits, defaults when omitted
        """
        self._options = options or SolverOptions()

    @property
    def options(self) -> SolverOptions:
        return self._options

    @property
    def feas_tol(self) -> float:
        return self._options.feas_tol

    def solve(self, lp: LinearProgram) -> LpSolution:
        """
        Minimize ``lp``.

        Returns:
            LpSolution with status OPTIMAL, INFEASIBLE, ITERATION_LIMIT or
            NUMERICAL_ERROR

        Raises:
            SolverError: If the program has a variable with an empty range
        """
        if np.any(lp.var_low > lp.var_high):
            raise SolverError(f"{lp.name}: variable with lower bound above upper bound")

        if lp.num_constraints == 0:
            primal = np.where(lp.objective < 0, lp.var_high, lp.var_low)
            return LpSolution(LpStatus.OPTIMAL, lp.evaluate(primal), primal, 0, 0.0)

        state = _Tableau(lp)
        iterations = 0
        try:
            factor = _Basis(state.matrix, state.basis)

            if state.num_art:
                phase_one_cost = np.zeros(state.num_cols)
                phase_one_cost[state.first_art:] = 1.0
                status, factor, iterations = self._run_phase(state, factor, phase_one_cost, iterations)
                if status != LpStatus.OPTIMAL:
                    return self._result(lp, state, status, iterations)
                factor = _Basis(state.matrix, state.basis)
                state.recompute_basic(factor)
                if np.max(state.x[state.first_art:]) > self._options.feas_tol:
                    logger.debug(f"{lp.name}: infeasible after phase one ({iterations} iterations)")
                    return self._result(lp, state, LpStatus.INFEASIBLE, iterations)
                state.high[state.first_art:] = 0.0
                state.x[state.first_art:] = 0.0
                state.recompute_basic(factor)

            status, factor, iterations = self._run_phase(state, factor, state.cost, iterations)
            if status != LpStatus.OPTIMAL:
                return self._result(lp, state, status, iterations)

            factor = _Basis(state.matrix, state.basis)
            state.recompute_basic(factor)
        except np.linalg.LinAlgError as e:
            logger.warning(f"{lp.name}: basis became singular ({e})")
            return self._result(lp, state, LpStatus.NUMERICAL_ERROR, iterations)

        return self._result(lp, state, LpStatus.OPTIMAL, iterations)

    def _result(self, lp: LinearProgram, state: _Tableau, status: LpStatus, iterations: int) -> LpSolution:
        primal = np.clip(state.x[: state.num_struct], lp.var_low, lp.var_high)
        violation = lp.max_violation(primal)
        if status == LpStatus.OPTIMAL and violation > self._options.feas_tol:
            logger.warning(
                f"{lp.name}: optimal basis misses feasibility by {violation:.3e}, reporting numerical error"
            )
            status = LpStatus.NUMERICAL_ERROR
        objective = lp.evaluate(primal) if status == LpStatus.OPTIMAL else float("nan")
        logger.debug(
            f"{lp.name}: {status.value} after {iterations} iterations "
            f"({lp.num_vars} vars, {lp.num_constraints} rows)"
        )
        return LpSolution(status, objective, primal, iterations, violation)

    def _run_phase(
        self, state: _Tableau, factor: _Basis, cost: np.ndarray, iterations: int
    ) -> Tuple[LpStatus, _Basis, int]:
        options = self._options
        fixed = state.high - state.low <= 0.0
        degenerate_run = 0
        use_bland = False

        while True:
            if iterations >= options.max_iters:
                return LpStatus.ITERATION_LIMIT, factor, iterations

            duals = factor.btran(cost[state.basis])
            reduced = cost - state.matrix.T @ duals
            at_upper = state.x >= state.high
            eligible = ~state.is_basic & ~fixed & (
                (~at_upper & (reduced < -options.opt_tol)) | (at_upper & (reduced > options.opt_tol))
            )
            candidates = np.flatnonzero(eligible)
            if candidates.size == 0:
                return LpStatus.OPTIMAL, factor, iterations

            if use_bland:
                entering = int(candidates[0])
            else:
                entering = int(candidates[np.argmax(np.abs(reduced[candidates]))])
            direction = -1.0 if at_upper[entering] else 1.0

            column = factor.ftran(state.column(entering))
            rate = -direction * column
            step, leaving = self._ratio_test(state, rate, column, use_bland)
            flip = state.high[entering] - state.low[entering]
            iterations += 1

            if flip <= step:
                step = flip
                leaving = -1

            state.x[entering] += direction * step
            state.x[state.basis] += rate * step

            if leaving >= 0:
                leaving_var = state.basis[leaving]
                state.x[leaving_var] = state.high[leaving_var] if rate[leaving] > 0 else state.low[leaving_var]
                state.basis[leaving] = entering
                state.is_basic[leaving_var] = False
                state.is_basic[entering] = True
                factor.update(leaving, column)
                if factor.updates >= options.refactor_every:
                    factor = _Basis(state.matrix, state.basis)
                    state.recompute_basic(factor)
            else:
                state.x[entering] = state.high[entering] if direction > 0 else state.low[entering]

            if step <= 1e-12:
                degenerate_run += 1
                if not use_bland and degenerate_run >= options.bland_after:
                    logger.debug(f"Switching to Bland's rule after {degenerate_run} degenerate pivots")
                    use_bland = True
            else:
                degenerate_run = 0

    def _ratio_test(
        self, state: _Tableau, rate: np.ndarray, column: np.ndarray, use_bland: bool
    ) -> Tuple[float, int]:
        pivot_tol = self._options.pivot_tol
        basic_x = state.x[state.basis]
        basic_low = state.low[state.basis]
        basic_high = state.high[state.basis]

        ratios = np.full(rate.size, np.inf)
        falling = rate < -pivot_tol
        rising = rate > pivot_tol
        ratios[falling] = (basic_x[falling] - basic_low[falling]) / -rate[falling]
        ratios[rising] = (basic_high[rising] - basic_x[rising]) / rate[rising]
        ratios = np.maximum(ratios, 0.0)

        best = ratios.min() if ratios.size else np.inf
        if not np.isfinite(best):
            return np.inf, -1
        ties = np.flatnonzero(ratios <= best + 1e-12 * (1.0 + best))
        if use_bland:
            leaving = int(ties[np.argmin(state.basis[ties])])
        else:
            leaving = int(ties[np.argmax(np.abs(column[ties]))])
        return float(ratios[leaving]), leaving
