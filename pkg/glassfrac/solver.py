# coding: utf-8

"""
Staggered (alternating minimisation) solution of the coupled displacement and
damage problems and the pseudo-time loop. Exports the following items:

 - StaggeredConfig()
 - SimulationState()
 - StepRecord()
 - SimulationResult()
 - staggered_step_anisotropic()
 - staggered_step_hybrid()
 - solve_bound_constrained()
 - run_quasistatic()
 - PROBE_COLUMNS
 - ENERGY_COLUMNS
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import logging
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ._errors import unwrap, AssemblyError, ConfigurationError, SolverError, StepFailure
from ._sparse import active_set, newton, solve_constrained
from ._types import type_name, check_real
from .fem2d import DamageSystem
from .materials import equivalent_elastic_constants
from .phasefield import Scheme


__all__ = [
    'ENERGY_COLUMNS',
    'PROBE_COLUMNS',
    'run_quasistatic',
    'SimulationResult',
    'SimulationState',
    'solve_bound_constrained',
    'staggered_step_anisotropic',
    'staggered_step_hybrid',
    'StaggeredConfig',
    'StepRecord',
]


logger = logging.getLogger(__name__)

PROBE_COLUMNS = ('t_s', 'w_bar_m', 'R_N', 'sigma_mid_Pa', 'sigma_quarter_top_Pa', 'max_d', 'staggered_iters')

ENERGY_COLUMNS = ('t_s', 'w_bar_m', 'midspan_deflection_m', 'elastic_J', 'dissipated_J', 'external_J', 'total_J')

# Energy increases below this are roundoff
_ENERGY_NOISE = 1e-12


def _check_schedule(schedule):
    problems = []
    pairs = []
    for entry in schedule:
        try:
            until, increment = entry
            pairs.append((float(until), float(increment)))
        except (TypeError, ValueError):
            problems.append('schedule entries must be (until, increment) pairs, got %r' % (entry,))
    if not pairs and not problems:
        problems.append('the time schedule is empty')
    last = 0.0
    for until, increment in pairs:
        if not increment > 0.0:
            problems.append('schedule increments must be positive, got %r' % increment)
        if not until > last:
            problems.append('schedule end times must increase, got %r after %r' % (until, last))
        last = max(last, until)
    if problems:
        raise ConfigurationError(problems)
    return tuple(pairs)


@dataclass(frozen=True)
class StaggeredConfig(object):
    """
    Tolerances, iteration caps and the pseudo-time schedule. schedule is a
    sequence of (until, increment) pairs in seconds: increment applies while
    t < until.

    scheme None follows the formulation of the problem being solved.
    """

    schedule: tuple = ((1.0, 0.1),)
    energy_tolerance: float = 1e-6
    newton_tolerance: float = 1e-11
    max_staggered_iterations: int = 500
    max_newton_iterations: int = 50
    max_active_set_iterations: int = 200
    scheme: Scheme = None
    max_damage_increment: float = 0.5
    min_increment: float = None
    localization_drop: float = 0.9

    def __post_init__(self):
        object.__setattr__(self, 'schedule', _check_schedule(self.schedule))
        problems = []
        for name in ('energy_tolerance', 'newton_tolerance'):
            if not getattr(self, name) > 0.0:
                problems.append('%s must be positive, got %r' % (name, getattr(self, name)))
        for name in ('max_staggered_iterations', 'max_newton_iterations', 'max_active_set_iterations'):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                problems.append('%s must be a positive integer, got %r' % (name, value))
        if self.scheme is not None and not isinstance(self.scheme, Scheme):
            problems.append('scheme must be a glassfrac.phasefield.Scheme member, not %s' % type_name(self.scheme))
        if not 0.0 < self.max_damage_increment <= 1.0:
            problems.append('max_damage_increment must lie in (0, 1], got %r' % (self.max_damage_increment,))
        if self.min_increment is not None and not self.min_increment > 0.0:
            problems.append('min_increment must be positive, got %r' % (self.min_increment,))
        if not 0.0 < self.localization_drop < 1.0:
            problems.append('localization_drop must lie in (0, 1), got %r' % (self.localization_drop,))
        if problems:
            raise ConfigurationError(problems)

    @property
    def smallest_increment(self):
        if self.min_increment is not None:
            return self.min_increment
        return min(increment for _, increment in self.schedule) / 16.0

    @property
    def end_time(self):
        return self.schedule[-1][0]

    def nominal_increment(self, t):
        """
        :return:
            None past the end of the schedule, otherwise a 2-element tuple of
            (end of the current segment, scheduled increment)
        """

        for until, increment in self.schedule:
            if t < until * (1.0 - 1e-12):
                return until, increment
        return None


@dataclass
class SimulationState(object):
    """
    A converged (or initial) state at pseudo-time t. energies holds the
    whole-specimen elastic, dissipated, external and total energy in J.
    """

    t: float
    w_bar: float
    u: np.ndarray
    d: np.ndarray
    internal_force: np.ndarray = None
    energies: dict = field(default_factory=dict)
    staggered_iterations: int = 0
    xi: float = 0.0
    energy_history: list = field(default_factory=list)


@dataclass(frozen=True)
class StepRecord(object):
    step: int
    t: float
    increment: float
    w_bar: float
    reaction: float
    sigma_mid: float
    sigma_quarter_top: float
    max_d: float
    staggered_iterations: int
    xi: float
    midspan_deflection: float
    elastic: float
    dissipated: float
    external: float
    total: float
    cutbacks: int
    interlayer_modulus: float = None

    def probe_row(self):
        return (
            self.t, self.w_bar, self.reaction, self.sigma_mid, self.sigma_quarter_top,
            self.max_d, self.staggered_iterations,
        )

    def energy_row(self):
        return (self.t, self.w_bar, self.midspan_deflection, self.elastic, self.dissipated, self.external, self.total)


class SimulationResult(object):
    """
    Accepted steps of a run, the final state and the termination reason, one
    of "schedule", "localization" or "failure"
    """

    def __init__(self, problem):
        self.problem = problem
        self.steps = []
        self.state = None
        self.termination = None
        self.wall_time = 0.0
        self.failure = None

    @property
    def peak_reaction(self):
        if not self.steps:
            return 0.0
        return max(step.reaction for step in self.steps)

    @property
    def failure_stress(self):
        """
        The largest midspan bottom-fibre stress reached, Pa
        """

        if not self.steps:
            return 0.0
        return max(step.sigma_mid for step in self.steps)

    @property
    def cutbacks(self):
        return sum(step.cutbacks for step in self.steps)

    def series(self, name):
        """
        :param name:
            A StepRecord field name

        :return:
            A numpy array with one value per accepted step
        """

        return np.array([getattr(step, name) for step in self.steps], dtype=np.float64)

    def probe_rows(self):
        return [step.probe_row() for step in self.steps]

    def energy_rows(self):
        return [step.energy_row() for step in self.steps]

    def __repr__(self):
        return '<SimulationResult %d steps, termination %s>' % (len(self.steps), self.termination)


def solve_bound_constrained(system, lower=None, upper=None, max_iterations=200):
    """
    Minimises 1/2 d.A.d - b.d subject to lower <= d <= upper

    :param system:
        A glassfrac.fem2d.DamageSystem, or a 2-element tuple of
        (scipy.sparse matrix, rhs)

    :param lower:
        A numpy array of lower bounds, the previous damage. Defaults to the
        bound carried by a DamageSystem.

    :param upper:
        A float or numpy array of upper bounds, default 1

    :param max_iterations:
        The active set iteration cap

    :raises:
        SolverError - when the active sets do not settle

    :return:
        A numpy array of nodal damage
    """

    if isinstance(system, DamageSystem):
        matrix, rhs = system.matrix, system.rhs
        if lower is None:
            lower = system.lower
        if upper is None:
            upper = system.upper
    elif isinstance(system, tuple) and len(system) == 2:
        matrix, rhs = system
    else:
        raise TypeError(unwrap(
            '''
            system must be a DamageSystem or a (matrix, rhs) tuple, not %s
            ''',
            type_name(system)
        ))
    if not sp.issparse(matrix):
        matrix = sp.csr_matrix(np.asarray(matrix, dtype=np.float64))
    rhs = np.asarray(rhs, dtype=np.float64)
    n = rhs.shape[0]
    if matrix.shape != (n, n):
        raise ValueError(unwrap(
            '''
            matrix shape %r does not match the right-hand side length %d
            ''',
            matrix.shape,
            n
        ))
    lower = np.zeros(n) if lower is None else np.broadcast_to(np.asarray(lower, dtype=np.float64), (n,)).copy()
    upper = np.ones(n) if upper is None else np.broadcast_to(np.asarray(upper, dtype=np.float64), (n,)).copy()
    if np.any(lower > upper):
        raise ValueError('lower bounds must not exceed upper bounds')
    if not np.all(matrix.diagonal() > 0.0):
        raise ValueError('the damage matrix must have a positive diagonal')
    x, _ = active_set(matrix, rhs, lower, upper, max_iterations)
    return x


def _scheme_of(problem, config):
    scheme = problem.formulation.scheme
    if config.scheme is not None and config.scheme is not scheme:
        raise ConfigurationError(unwrap(
            '''
            solver scheme %s does not match the formulation scheme %s
            ''',
            config.scheme.value,
            scheme.value
        ))
    return scheme


def _relative_change(energy, previous, tolerance):
    change = abs(energy - previous)
    if abs(energy) < 1e-20:
        return change, change <= tolerance
    xi = change / abs(energy)
    return xi, xi <= tolerance


def _internal_force(problem, u, d):
    if problem.formulation.scheme is Scheme.HYBRID:
        return problem.linear_stiffness(d).dot(u)
    return problem.internal(u, d)[1]


def _staggered(problem, previous, t, w_bar, config, displacement):
    constraints = problem.constraints()
    fixed_values = constraints.values(w_bar)
    lower = previous.d
    u = previous.u.copy()
    d = previous.d.copy()
    energy_prev = problem.energy(u, d)
    history = [energy_prev]
    xi = np.inf

    for iteration in range(1, config.max_staggered_iterations + 1):
        try:
            u, internal_force = displacement(u, d, constraints.dofs, fixed_values)
            d = solve_bound_constrained(
                problem.damage_system(u),
                lower,
                1.0,
                config.max_active_set_iterations
            )
        except AssemblyError as e:
            raise problem.locate(e)
        except SolverError as e:
            raise StepFailure(
                'step to t = %r failed in staggered iteration %d: %s' % (t, iteration, e),
                diagnostics=dict(e.diagnostics, staggered_iteration=iteration, t=t)
            )
        energy = problem.energy(u, d)
        history.append(energy)
        xi, converged = _relative_change(energy, energy_prev, config.energy_tolerance)
        logger.debug('Staggered %d at t = %.6g: energy %.12g, xi %.3e', iteration, t, energy, xi)
        if iteration > 1 and energy > energy_prev + _ENERGY_NOISE * max(1.0, abs(energy_prev)):
            logger.debug('Staggered %d: energy rose by %.3e', iteration, energy - energy_prev)
        energy_prev = energy
        if converged:
            if np.any(d < lower) or np.any(d > 1.0):
                raise SolverError('damage update left the admissible interval')
            return SimulationState(
                t=t,
                w_bar=w_bar,
                u=u,
                d=d,
                internal_force=_internal_force(problem, u, d),
                staggered_iterations=iteration,
                xi=float(xi),
                energy_history=history,
            )

    raise StepFailure(
        'staggered iteration did not converge in %d iterations at t = %r' % (config.max_staggered_iterations, t),
        diagnostics={'iterations': config.max_staggered_iterations, 'xi': float(xi), 't': t}
    )


def staggered_step_anisotropic(problem, previous, t, w_bar, config):
    """
    One pseudo-time step with the anisotropic scheme: alternates a Newton
    minimisation of the split energy over u and the bound-constrained damage
    update until the relative energy change drops below the tolerance

    :param problem:
        A PhaseFieldProblem (section, beam or bar)

    :param previous:
        The SimulationState of the previous step

    :param t:
        The pseudo-time of the new step

    :param w_bar:
        The prescribed load-point displacement in m

    :param config:
        A StaggeredConfig object

    :raises:
        StepFailure - when the staggered or Newton iterations do not converge

    :return:
        A SimulationState object (energies are filled in by run_quasistatic)
    """

    def displacement(u, d, fixed_dofs, fixed_values):
        result = newton(
            lambda v: problem.internal(v, d),
            u,
            fixed_dofs,
            fixed_values,
            config.newton_tolerance,
            config.max_newton_iterations,
            regime=lambda v: problem.regime(v, d)
        )
        logger.debug('Newton converged (%s) in %d iterations', result.reason, result.iterations)
        return result.u, result.internal_force

    return _staggered(problem, previous, t, w_bar, config, displacement)


def staggered_step_hybrid(problem, previous, t, w_bar, config):
    """
    One pseudo-time step with the hybrid scheme: the displacement update is
    a single linear solve with the isotropically degraded stiffness, while
    the damage is still driven by the split tensile energy

    Parameters and return value as staggered_step_anisotropic()
    """

    def displacement(u, d, fixed_dofs, fixed_values):
        matrix = problem.linear_stiffness(d)
        x, _ = solve_constrained(matrix, np.zeros(problem.n_dofs), fixed_dofs, fixed_values)
        return x, matrix.dot(x)

    return _staggered(problem, previous, t, w_bar, config, displacement)


def _probe(problem, probe, u, d):
    if probe is None:
        return float('nan')
    return problem.probe(u, d, probe.x, probe.fiber, probe.component)


def _interlayer_refresh(scenario, problem, t):
    model = getattr(scenario, 'interlayer', None)
    if model is None:
        return None
    young_modulus, poisson_ratio = equivalent_elastic_constants(model, t, scenario.temperature)
    problem.set_interlayer(young_modulus, poisson_ratio)
    return young_modulus / (2.0 * (1.0 + poisson_ratio))


def run_quasistatic(scenario, config, snapshot=None, snapshot_every=25):
    """
    Advances the load w_bar = rate * t over the pseudo-time schedule until the
    schedule ends or the reaction falls below (1 - localization_drop) times
    its peak

    :param scenario:
        A glassfrac.scenarios.FourPointScenario, or any object with .problem,
        .loading_rate, .temperature, .interlayer, .initial_damage and .probes

    :param config:
        A StaggeredConfig object

    :param snapshot:
        None or a callable (step index, SimulationState, final) invoked every
        snapshot_every accepted steps and for the final state

    :param snapshot_every:
        The snapshot cadence in accepted steps

    :raises:
        StepFailure - with the partial SimulationResult as .result

    :return:
        A SimulationResult object
    """

    if not isinstance(config, StaggeredConfig):
        raise TypeError(unwrap(
            '''
            config must be an instance of StaggeredConfig, not %s
            ''',
            type_name(config)
        ))
    check_real('loading_rate', scenario.loading_rate, 0.0, inclusive=(False, True))
    problem = scenario.problem
    step_function = staggered_step_hybrid if _scheme_of(problem, config) is Scheme.HYBRID else staggered_step_anisotropic
    probes = scenario.probes

    started = time.monotonic()
    result = SimulationResult(problem)
    d0 = np.array(scenario.initial_damage, dtype=np.float64)
    state = SimulationState(0.0, 0.0, np.zeros(problem.n_dofs), d0, np.zeros(problem.n_dofs))
    result.state = state
    external = 0.0
    reaction_prev = 0.0
    increment = None
    cutbacks = 0
    logger.info(
        'Run start: %d displacement dofs, %d damage nodes, schedule to t = %g s',
        problem.n_dofs,
        problem.n_damage,
        config.end_time
    )

    while True:
        segment = config.nominal_increment(state.t)
        if segment is None:
            result.termination = 'schedule'
            break
        until, nominal = segment
        increment = nominal if increment is None else min(increment, nominal)
        t = min(state.t + increment, until)
        if until - t < 1e-9 * increment:
            t = until
        w_bar = scenario.loading_rate * t
        modulus = _interlayer_refresh(scenario, problem, t)

        try:
            new = step_function(problem, state, t, w_bar, config)
            jump = float(np.max(new.d - state.d)) if new.d.size else 0.0
            if jump > config.max_damage_increment and increment / 2.0 >= config.smallest_increment:
                raise StepFailure('damage increment %.3g exceeds %.3g' % (jump, config.max_damage_increment))
        except StepFailure as e:
            if increment / 2.0 >= config.smallest_increment:
                increment /= 2.0
                cutbacks += 1
                logger.warning('Cutback to %.6g s at t = %.6g: %s', increment, state.t, e)
                continue
            result.termination = 'failure'
            result.failure = e
            result.wall_time = time.monotonic() - started
            e.result = result
            if snapshot is not None:
                snapshot(len(result.steps), state, True)
            raise

        reaction = problem.reaction(new.internal_force)
        external += 0.5 * (reaction + reaction_prev) * (w_bar - state.w_bar)
        reaction_prev = reaction
        energies = problem.energies(new.u, new.d)
        energies['external'] = external
        new.energies = energies
        sigma_mid = _probe(problem, probes.get('sigma_mid'), new.u, new.d)
        sigma_quarter = _probe(problem, probes.get('sigma_quarter_top'), new.u, new.d)
        max_d = float(np.max(new.d)) if new.d.size else 0.0

        record = StepRecord(
            step=len(result.steps) + 1,
            t=t,
            increment=t - state.t,
            w_bar=w_bar,
            reaction=reaction,
            sigma_mid=sigma_mid,
            sigma_quarter_top=sigma_quarter,
            max_d=max_d,
            staggered_iterations=new.staggered_iterations,
            xi=new.xi,
            midspan_deflection=problem.midspan_deflection(new.u),
            elastic=energies['elastic'],
            dissipated=energies['dissipated'],
            external=external,
            total=energies['total'],
            cutbacks=cutbacks,
            interlayer_modulus=modulus,
        )
        result.steps.append(record)
        state = new
        result.state = state
        cutbacks = 0
        increment = min(2.0 * increment, nominal)
        logger.info(
            't=%.6g w_bar=%.6g iters=%d xi=%.3e R=%.6g sigma=%.6g max_d=%.4f',
            t,
            w_bar,
            new.staggered_iterations,
            new.xi,
            reaction,
            sigma_mid,
            max_d
        )
        if snapshot is not None and record.step % snapshot_every == 0:
            snapshot(record.step, state, False)

        peak = result.peak_reaction
        if peak > 0.0 and reaction <= (1.0 - config.localization_drop) * peak:
            result.termination = 'localization'
            break

    result.wall_time = time.monotonic() - started
    if snapshot is not None:
        snapshot(len(result.steps), state, True)
    logger.info(
        'Run stop: %s after %d steps, peak reaction %.6g N, failure stress %.6g Pa',
        result.termination,
        len(result.steps),
        result.peak_reaction,
        result.failure_stress
    )
    return result
