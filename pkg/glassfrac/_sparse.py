# coding: utf-8

"""
Sparse assembly, constrained linear solves and the energy-backtracking Newton
driver shared by the section and beam problems
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import logging
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import Bounds, minimize

from ._errors import unwrap, AssemblyError, ConfigurationError, SolverError


logger = logging.getLogger(__name__)

_CHUNK = 8192

# Armijo constant and number of halvings of the backtracking line search
_ARMIJO = 1e-4
_MAX_HALVINGS = 30


def assembly_workers():
    """
    :raises:
        ConfigurationError - when GLASSFRAC_NUM_THREADS is not a positive integer

    :return:
        The number of threads used for element loops
    """

    value = os.environ.get('GLASSFRAC_NUM_THREADS')
    if value is None or value.strip() == '':
        return os.cpu_count() or 1
    try:
        count = int(value)
    except ValueError:
        count = 0
    if count < 1:
        raise ConfigurationError(unwrap(
            '''
            GLASSFRAC_NUM_THREADS must be a positive integer, not %r
            ''',
            value
        ))
    return count


def chunked_map(func, count, chunk=_CHUNK):
    """
    Applies func to consecutive slices covering range(count) and returns the
    results in slice order, so reductions stay deterministic

    :param func:
        A callable accepting a slice object

    :param count:
        The number of items

    :return:
        A list of func results
    """

    slices = [slice(i, min(i + chunk, count)) for i in range(0, count, chunk)]
    workers = min(assembly_workers(), len(slices))
    if workers <= 1:
        return [func(s) for s in slices]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, slices))


def assemble_matrix(size, dofs, local):
    """
    :param size:
        The global number of degrees of freedom

    :param dofs:
        An int numpy array of shape (m, k) of element degrees of freedom

    :param local:
        A numpy array of shape (m, k, k) of element matrices

    :return:
        A scipy.sparse.csr_matrix with duplicates summed
    """

    k = dofs.shape[1]
    rows = np.repeat(dofs, k, axis=1).ravel()
    cols = np.tile(dofs, (1, k)).ravel()
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(size, size)).tocsr()


def assemble_vector(size, dofs, local):
    """
    :param local:
        A numpy array of shape (m, k) of element vectors

    :return:
        A float64 numpy array of shape (size,)
    """

    return np.bincount(dofs.ravel(), weights=local.ravel(), minlength=size)


def _free_mask(size, fixed_dofs):
    free = np.ones(size, dtype=bool)
    free[fixed_dofs] = False
    return free


def _factorize(matrix, free):
    reduced = matrix[free][:, free].tocsc()
    diagonal = reduced.diagonal()
    bad = np.nonzero(~(diagonal > 0.0))[0]
    if bad.size:
        dof = int(np.nonzero(free)[0][bad[0]])
        error = AssemblyError('constrained matrix has a non-positive pivot at degree of freedom %d' % dof)
        error.dof = dof
        raise error
    try:
        return spla.factorized(reduced)
    except RuntimeError as e:
        raise AssemblyError('constrained matrix is singular: %s' % e)


def solve_constrained(matrix, rhs, fixed_dofs, fixed_values):
    """
    Solves K x = f with x[fixed_dofs] = fixed_values by eliminating the
    constrained rows and columns

    :param matrix:
        A symmetric scipy.sparse matrix

    :param rhs:
        A numpy array of external forces

    :param fixed_dofs:
        An int numpy array of constrained degrees of freedom

    :param fixed_values:
        A numpy array of prescribed values

    :raises:
        AssemblyError - when the constrained matrix is singular or indefinite

    :return:
        A 2-element tuple of (solution, reactions K x - f)
    """

    size = matrix.shape[0]
    free = _free_mask(size, fixed_dofs)
    x = np.zeros(size)
    x[fixed_dofs] = fixed_values
    if np.any(free):
        solve = _factorize(matrix, free)
        x[free] = solve(rhs[free] - matrix[free][:, ~free].dot(x[~free]))
    if not np.all(np.isfinite(x)):
        raise AssemblyError('constrained solve produced non-finite values')
    return x, matrix.dot(x) - rhs


class NewtonResult(object):
    """
    The converged state of a Newton solve

    .reason is one of "residual", "regime", "increment" or "line-search";
    .residuals lists the free residual norm of every iterate after the
    prescribed jump
    """

    def __init__(self, u, energy, internal_force, iterations, residual_norm, reason, residuals=()):
        self.u = u
        self.energy = energy
        self.internal_force = internal_force
        self.iterations = iterations
        self.residual_norm = residual_norm
        self.reason = reason
        self.residuals = list(residuals)


def newton(evaluate, u0, fixed_dofs, fixed_values, tolerance, max_iterations, regime=None):
    """
    Minimises a convex energy over displacements with Dirichlet constraints.
    The first iteration applies the jump in prescribed values; later
    iterations backtrack on the energy.

    :param evaluate:
        A callable u -> (energy, internal force, tangent csr matrix)

    :param u0:
        The starting displacement vector

    :param fixed_dofs:
        An int numpy array of constrained degrees of freedom

    :param fixed_values:
        A numpy array of prescribed values

    :param tolerance:
        Relative tolerance on the free residual against the internal force norm

    :param max_iterations:
        The iteration cap

    :param regime:
        None or a callable u -> numpy array (or None) labelling the quadratic
        piece of the energy containing u. An unchanged label across a full
        step means the step was exact.

    :raises:
        SolverError - when the iteration cap is hit or the search direction
        does not decrease the energy

    :return:
        A NewtonResult object
    """

    u = np.array(u0, dtype=np.float64)
    size = u.shape[0]
    free = _free_mask(size, fixed_dofs)
    jump = np.asarray(fixed_values, dtype=np.float64) - u[fixed_dofs]
    energy, force, tangent = evaluate(u)
    applied = not np.any(jump)
    history = []

    for iteration in range(1, max_iterations + 1):
        residual = force[free]
        residual_norm = float(np.linalg.norm(residual))
        force_norm = float(np.linalg.norm(force))
        if applied:
            history.append(residual_norm)
        if applied and residual_norm <= tolerance * force_norm:
            return NewtonResult(u, energy, force, iteration - 1, residual_norm, 'residual', history)

        solve = _factorize(tangent, free)
        step = np.zeros(size)
        if not applied:
            step[fixed_dofs] = jump
            step[free] = solve(-residual - tangent[free][:, ~free].dot(step[~free]))
        else:
            step[free] = solve(-residual)

        if not applied:
            u = u + step
            energy, force, tangent = evaluate(u)
            applied = True
            logger.debug('Newton %d: prescribed jump applied, energy %.12g', iteration, energy)
            continue

        label = regime(u) if regime is not None else None

        slope = float(np.dot(force, step))
        alpha = 1.0
        for _ in range(_MAX_HALVINGS):
            trial = u + alpha * step
            trial_energy, trial_force, trial_tangent = evaluate(trial)
            if trial_energy <= energy + _ARMIJO * alpha * slope + 1e-14 * abs(energy):
                break
            alpha *= 0.5
        else:
            # No decrease left to find
            if residual_norm <= np.sqrt(tolerance) * force_norm:
                return NewtonResult(u, energy, force, iteration, residual_norm, 'line-search', history)
            raise SolverError(
                'Newton line search failed to decrease the energy',
                diagnostics={'iteration': iteration, 'residual_norm': residual_norm}
            )

        u, energy, force, tangent = trial, trial_energy, trial_force, trial_tangent
        logger.debug(
            'Newton %d: |r| %.3e, step %.3g, energy %.12g',
            iteration,
            residual_norm,
            alpha,
            energy
        )

        if alpha == 1.0 and label is not None:
            new_label = regime(u)
            if new_label is not None and np.array_equal(label, new_label):
                final = float(np.linalg.norm(force[free]))
                return NewtonResult(u, energy, force, iteration, final, 'regime', history + [final])

        if np.linalg.norm(alpha * step) <= 1e-13 * max(np.linalg.norm(u), 1e-300):
            final = float(np.linalg.norm(force[free]))
            return NewtonResult(u, energy, force, iteration, final, 'increment', history + [final])

    raise SolverError(
        'Newton iteration did not converge in %d iterations' % max_iterations,
        diagnostics={
            'iterations': max_iterations,
            'residual_norm': float(np.linalg.norm(force[free])),
            'internal_force_norm': float(np.linalg.norm(force)),
        }
    )


def active_set(matrix, rhs, lower, upper, max_iterations):
    """
    Primal-dual active set iteration for min 1/2 x.A.x - b.x subject to
    lower <= x <= upper, with A symmetric positive definite

    :param matrix:
        A symmetric scipy.sparse matrix

    :param rhs:
        A numpy array b

    :param lower:
        A numpy array of lower bounds

    :param upper:
        A numpy array of upper bounds

    :param max_iterations:
        The iteration cap

    :raises:
        SolverError - when the active sets do not settle

    :return:
        A 2-element tuple of (x, number of iterations)
    """

    matrix = matrix.tocsr()
    diagonal = matrix.diagonal()
    x = np.clip(lower.copy(), lower, upper)
    multiplier = matrix.dot(x) - rhs
    at_lower = None
    at_upper = None
    seen = set()
    restarted = False

    for iteration in range(1, max_iterations + 1):
        trial = x - multiplier / diagonal
        new_lower = trial < lower
        new_upper = (trial > upper) & ~new_lower
        if at_lower is not None and np.array_equal(new_lower, at_lower) and np.array_equal(new_upper, at_upper):
            return np.clip(x, lower, upper), iteration - 1

        key = (new_lower.tobytes(), new_upper.tobytes())
        if key in seen:
            if restarted:
                break
            logger.debug('Active set cycled at iteration %d, restarting from a bounded quasi-Newton solve', iteration)
            x = _bounded_minimum(matrix, rhs, lower, upper, x)
            multiplier = matrix.dot(x) - rhs
            at_lower = at_upper = None
            seen = set()
            restarted = True
            continue
        seen.add(key)
        at_lower, at_upper = new_lower, new_upper

        x = np.where(at_lower, lower, np.where(at_upper, upper, x))
        free = ~(at_lower | at_upper)
        if np.any(free):
            reduced = matrix[free][:, free].tocsc()
            coupling = matrix[free][:, ~free].dot(x[~free])
            x[free] = spla.spsolve(reduced, rhs[free] - coupling)
        multiplier = matrix.dot(x) - rhs
        multiplier[free] = 0.0
        logger.debug(
            'Active set %d: %d at lower bound, %d at upper bound, %d free',
            iteration,
            int(at_lower.sum()),
            int(at_upper.sum()),
            int(free.sum())
        )

    raise SolverError(
        'active set iteration did not settle in %d iterations' % iteration,
        diagnostics={
            'iterations': iteration,
            'at_lower': 0 if at_lower is None else int(at_lower.sum()),
            'at_upper': 0 if at_upper is None else int(at_upper.sum()),
        }
    )


def _bounded_minimum(matrix, rhs, lower, upper, x):
    """
    Bound-constrained L-BFGS-B minimum of 1/2 x.A.x - b.x, the warm start
    after the active sets cycle
    """

    def objective(y):
        ay = matrix.dot(y)
        return 0.5 * y.dot(ay) - rhs.dot(y), ay - rhs

    result = minimize(
        objective,
        x,
        jac=True,
        method='L-BFGS-B',
        bounds=Bounds(lower, upper),
        options={'ftol': 0.0, 'gtol': 1e-12, 'maxiter': 20000}
    )
    return np.clip(result.x, lower, upper)
