# coding: utf-8

"""
Command line front end:

    glassfrac run <config.ini>
    glassfrac calibrate --kind pf-b --reduction plane-stress --lc 3mm
    glassfrac material-probe pvb 1e9 25
    glassfrac version

Exit codes are 0 for a completed schedule or a detected localization, 1 for
configuration errors and 2 for solver failures.
"""

from __future__ import unicode_literals, division, absolute_import, print_function

import argparse
import json
import logging
import os
import re
import sys

from ._errors import ConfigurationError, DomainError, GlassFracError, StepFailure
from .beam1d import BeamProblem
from .config import RunConfig
from .export import write_beam_csv, write_csv, write_manifest, write_vtk_fields, write_vtk_mesh, build_manifest
from .materials import (
    INTERLAYER_POISSON_RATIO,
    MaterialGlass,
    equivalent_elastic_constants,
    equivalent_shear_modulus,
    interlayer_model,
    wlf_shift_factor,
)
from .phasefield import Kind, Known, Reduction, calibrate, homogeneous_peak_stress
from .scenarios import build_scenario
from .solver import ENERGY_COLUMNS, PROBE_COLUMNS, run_quasistatic
from .version import __version__


__all__ = [
    'main',
    'parse_quantity',
]


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2

_UNITS = {
    'length': {'m': 1.0, 'cm': 1e-2, 'mm': 1e-3, 'um': 1e-6},
    'stress': {'pa': 1.0, 'kpa': 1e3, 'mpa': 1e6, 'gpa': 1e9},
    'energy': {'j/m2': 1.0, 'j/m^2': 1.0, 'n/m': 1.0, 'kj/m2': 1e3},
    'time': {'s': 1.0, 'ms': 1e-3, 'min': 60.0, 'h': 3600.0},
    'temperature': {'c': 1.0, 'degc': 1.0},
}

_QUANTITY = re.compile(r'^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/^0-9]*)\s*$')


def parse_quantity(text, dimension):
    """
    Parses a number with an optional unit suffix into SI

    :param text:
        A unicode string such as "3mm", "45MPa" or "0.003"

    :param dimension:
        One of "length", "stress", "energy", "time", "temperature"

    :raises:
        ValueError - for malformed numbers or units of another dimension

    :return:
        A float in SI units
    """

    match = _QUANTITY.match(text)
    if not match:
        raise ValueError('%r is not a number with an optional unit' % text)
    value = float(match.group(1))
    unit = match.group(2).lower()
    if not unit:
        return value
    factors = _UNITS[dimension]
    if unit not in factors:
        raise ValueError('unit %r is not a %s unit, expected one of %s' % (
            match.group(2),
            dimension,
            ', '.join(sorted(factors))
        ))
    return value * factors[unit]


def _quantity(dimension):
    def convert(text):
        try:
            return parse_quantity(text, dimension)
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e))
    convert.__name__ = dimension
    return convert


def _configure_logging(verbose, quiet):
    level = logging.INFO
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')


def _run(args):
    config = RunConfig.from_file(args.config)
    scenario = build_scenario(config.scenario)
    problem = scenario.problem
    directory = config.output.directory
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as e:
        raise ConfigurationError('output directory %s is not writable: %s' % (directory, e))
    files = set()
    beam = isinstance(problem, BeamProblem)

    if not beam:
        write_vtk_mesh(os.path.join(directory, 'mesh.vtk'), scenario.mesh)
        files.add('mesh.vtk')

    def snapshot(step, state, final):
        if not config.output.fields:
            return
        if beam:
            name = 'beam_%05d.csv' % step
            write_beam_csv(os.path.join(directory, name), problem, state.u, state.d)
        else:
            name = 'fields_%05d.vtk' % step
            point, cell = problem.field_data(state.u, state.d)
            write_vtk_fields(os.path.join(directory, name), scenario.mesh, point, cell)
        files.add(name)

    code = EXIT_OK
    message = None
    try:
        result = run_quasistatic(scenario, config.solver, snapshot, config.output.snapshot_every)
    except StepFailure as e:
        if e.result is None:
            raise
        logger.error('%s', e)
        result = e.result
        message = str(e)
        code = EXIT_SOLVER

    write_csv(os.path.join(directory, 'probes.csv'), PROBE_COLUMNS, result.probe_rows())
    write_csv(os.path.join(directory, 'energies.csv'), ENERGY_COLUMNS, result.energy_rows())
    files.update(['probes.csv', 'energies.csv'])
    manifest = build_manifest(config, scenario, result, sorted(files), message)
    write_manifest(os.path.join(directory, 'manifest.json'), manifest)
    logger.info('Results written to %s', directory)
    return code


def _calibrate(args):
    if (args.lc is None) == (args.gf is None):
        raise ConfigurationError('give exactly one of --lc and --gf')
    material = MaterialGlass(young_modulus=args.young_modulus, tensile_strength=args.tensile_strength)
    known, value = (Known.LC, args.lc) if args.lc is not None else (Known.GF, args.gf)
    kind = Kind(args.kind)
    reduction = Reduction(args.reduction)
    result = calibrate(kind, reduction, known, value, material)
    peak = homogeneous_peak_stress(kind, material.with_pair(result.length_scale, result.fracture_energy))
    if args.json:
        print(json.dumps({
            'kind': kind.value,
            'reduction': reduction.value,
            'lc': result.length_scale,
            'gf': result.fracture_energy,
            'peak_stress': peak,
            'heuristic': result.heuristic,
        }, sort_keys=True))
    else:
        print('kind          %s' % kind.value)
        print('reduction     %s' % reduction.value)
        print('l_c           %.6g m' % result.length_scale)
        print('G_f           %.6g J/m^2' % result.fracture_energy)
        print('peak stress   %.6g Pa' % peak)
        if result.heuristic:
            print('(heuristic calibration)')
    return EXIT_OK


def _material_probe(args):
    model = interlayer_model(args.interlayer, args.poisson_ratio)
    shift = wlf_shift_factor(model.wlf, args.temperature)
    shear = equivalent_shear_modulus(model, args.duration, args.temperature)
    young, _ = equivalent_elastic_constants(model, args.duration, args.temperature)
    print('interlayer    %s' % model.name)
    print('a_T           %.6g' % shift)
    print('G             %.6g Pa' % shear)
    print('E_eq          %.6g Pa' % young)
    return EXIT_OK


def _version(args):
    print(__version__)
    return EXIT_OK


def _parser():
    parser = argparse.ArgumentParser(prog='glassfrac', description='Phase-field fracture of glass in bending')
    parser.add_argument('-v', '--verbose', action='store_true', help='log debug output')
    parser.add_argument('-q', '--quiet', action='store_true', help='log warnings and errors only')
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    run = commands.add_parser('run', help='run a four-point bending simulation')
    run.add_argument('config', help='path to an INI run configuration')
    run.set_defaults(handler=_run)

    cal = commands.add_parser('calibrate', help='complete the (l_c, G_f) pair')
    cal.add_argument('--kind', choices=[k.value for k in Kind], default=Kind.PF_P.value)
    cal.add_argument('--reduction', choices=[r.value for r in Reduction], default=Reduction.PLANE_STRESS.value)
    cal.add_argument('--lc', type=_quantity('length'), help='length scale, e.g. 3mm')
    cal.add_argument('--gf', type=_quantity('energy'), help='fracture energy, e.g. 4J/m2')
    cal.add_argument('--young-modulus', type=_quantity('stress'), default=MaterialGlass().young_modulus)
    cal.add_argument('--tensile-strength', type=_quantity('stress'), default=MaterialGlass().tensile_strength)
    cal.add_argument('--json', action='store_true', help='print a JSON object')
    cal.set_defaults(handler=_calibrate)

    probe = commands.add_parser('material-probe', help='equivalent interlayer modulus')
    probe.add_argument('interlayer', help='eva, pvb or a Prony CSV path')
    probe.add_argument('duration', type=_quantity('time'), help='load duration, e.g. 10s')
    probe.add_argument('temperature', type=_quantity('temperature'), help='temperature in degrees C')
    probe.add_argument('--poisson-ratio', type=float, default=INTERLAYER_POISSON_RATIO)
    probe.set_defaults(handler=_material_probe)

    version = commands.add_parser('version', help='print the version')
    version.set_defaults(handler=_version)
    return parser


def main(argv=None):
    """
    :param argv:
        None for sys.argv[1:], or a list of unicode strings

    :return:
        The exit code
    """

    args = _parser().parse_args(argv)
    _configure_logging(args.verbose, args.quiet)
    try:
        return args.handler(args)
    except (ConfigurationError, DomainError) as e:
        logger.error('%s', e)
        return EXIT_CONFIG
    except GlassFracError as e:
        logger.error('%s', e)
        return EXIT_SOLVER
    except ValueError as e:
        logger.error('%s', e)
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
