"""
qubitline command line: validate | region | pc | capacity | order | sweep

Results go to stdout (or --out), diagnostics to stderr.
Exit codes: 0 success, 2 invalid input or non-CP channel, 1 internal error.
"""
import io
import csv
import json
import logging
import argparse
import warnings
from typing import Optional

import numpy as np

from . import accessor
from .capacity import capacity_of_region, optimize_capacity
from .channel import EXAMPLE_CHANNELS, AffineChannel, choi_cptp_check, diagonalize, sample_cptp_channel
from .configuration import configuration_map, ordered_map
from .detection import optimize_pc
from .errors import ChannelSpecError, NotCPTPError
from .ordering import TransitionMatrix, dominates, less_capable, stochastically_degraded
from .region import dump_border_csv, dump_region_csv, generate_region

logger = logging.getLogger(__name__)

SWEEP_CSV_HEADER = ('name', 'a', 'b', 'c', 'bx', 'by', 'bz', 'c_bin', 'pc_half', 'area')
SPEC_KEYS = {'T', 'diag', 'b', 'name'}


def parse_channel_spec(text: str, *, allow_noncp: bool = False, cp_tol: Optional[float] = None,
                       check_cp: bool = True) -> AffineChannel:
    """
    Channel from its JSON spec: {"T": [[...], [...], [...]] or "diag": [a, b, c], "b": [bx, by, bz], "name": ...}
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as error:
        raise ChannelSpecError(f'invalid JSON: {error.msg}', line=error.lineno) from None
    if not isinstance(document, dict):
        raise ChannelSpecError('channel spec have to be a JSON object', line=1)
    unknown = sorted(set(document) - SPEC_KEYS)
    if unknown:
        raise ChannelSpecError('unknown field', field=unknown[0], line=_line_of(text, unknown[0]))
    if ('T' in document) == ('diag' in document):
        raise ChannelSpecError('exactly one of "T" and "diag" have to be given', field='T')
    if 'b' not in document:
        raise ChannelSpecError('missing shift vector', field='b')

    if 'T' in document:
        rows = document['T']
        if not (isinstance(rows, list) and len(rows) == 3
                and all(isinstance(row, list) and len(row) == 3 for row in rows)):
            raise ChannelSpecError('have to be a 3x3 array', field='T', line=_line_of(text, 'T'))
        transform = np.array([[_real(value, text, 'T') for value in row] for row in rows])
    else:
        transform = np.diag(_real_triple(document['diag'], text, 'diag'))
    shift = _real_triple(document['b'], text, 'b')
    name = document.get('name')
    if name is not None and not isinstance(name, str):
        raise ChannelSpecError('have to be a string', field='name', line=_line_of(text, 'name'))

    channel = AffineChannel(transform, shift, name=name)
    if not check_cp:
        return channel
    tol = configuration_map.get_configuration().cp_tol if cp_tol is None else cp_tol
    report = choi_cptp_check(channel, tol)
    if not report.is_cp:
        if not allow_noncp:
            raise NotCPTPError(report)
        logger.warning('accepting non-CP channel %r (min Choi eigenvalue %r)', name, report.min_eigenvalue)
        warnings.warn(f'channel {name!r} is not completely positive', RuntimeWarning)
    return channel


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='qubitline',
        description='Binary classical communication over qubit channels.')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='more logging on stderr')
    commands = parser.add_subparsers(dest='command', required=True)

    channel_source = argparse.ArgumentParser(add_help=False)
    channel_source.add_argument('spec', nargs='?', help='channel spec file (local path or s3:// uri)')
    channel_source.add_argument('--example', choices=sorted(EXAMPLE_CHANNELS), help='use a built-in channel')
    channel_source.add_argument('--allow-noncp', action='store_true', help='accept channels failing the CP test')

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument('--out', metavar='PATH', help='write the result here instead of stdout')

    commands.add_parser('validate', parents=[channel_source, output], help='CP verdict and diagonal frame')

    region = commands.add_parser('region', parents=[channel_source], help='region samples and border')
    region.add_argument('--samples', type=int, help='k samples (default from settings)')
    region.add_argument('--out', metavar='PATH', required=True, help='region CSV, the border goes next to it')

    pc = commands.add_parser('pc', parents=[channel_source, output], help='optimal correct-decision probability')
    pc.add_argument('--p0', type=float, default=0.5, help='prior probability of 0')

    capacity = commands.add_parser('capacity', parents=[channel_source, output], help='binary capacity')
    capacity.add_argument('--samples', type=int, help='k samples (default from settings)')
    capacity.add_argument('--tol', type=float, help='golden-section refinement width')

    order = commands.add_parser('order', parents=[output], help='ordering predicates of two binary channels')
    order.add_argument('--a', required=True, metavar='FILE', help='JSON {"p11": ..., "p00": ...}')
    order.add_argument('--b', required=True, metavar='FILE', help='JSON {"p11": ..., "p00": ...}')
    order.add_argument('--grid', type=int, default=1001, help='priors checked for capability')

    sweep = commands.add_parser('sweep', help='Monte Carlo sweep over random CP channels')
    sweep.add_argument('--count', type=int, default=100)
    sweep.add_argument('--seed', type=int, default=0)
    sweep.add_argument('--samples', type=int, help='k samples per channel (default from settings)')
    sweep.add_argument('--tol', type=float, help='golden-section refinement width')
    sweep.add_argument('--out', metavar='PATH', required=True, help='sweep CSV')
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    arguments = parser.parse_args(argv)
    logging.basicConfig(level=max(logging.DEBUG, logging.WARNING - 10 * arguments.verbose),
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        return COMMANDS[arguments.command](arguments)
    except (ValueError, OSError) as error:
        logger.error('%s', error)
        return 2
    except Exception:
        logger.exception('internal error')
        return 1


def run_validate(arguments) -> int:
    channel = _load_channel(arguments)
    report = choi_cptp_check(channel, configuration_map.get_configuration().cp_tol)
    frame = diagonalize(channel)
    _emit(arguments, {
        'name': channel.name,
        'is_cp': report.is_cp,
        'min_eigenvalue': report.min_eigenvalue,
        'allow_noncp': arguments.allow_noncp,
        'singular_values': frame.s.tolist(),
        'U': frame.U.tolist(),
        'V': frame.V.tolist(),
        'xi': frame.xi.tolist(),
    })
    return 0 if report.is_cp or arguments.allow_noncp else 2


def run_region(arguments) -> int:
    channel = _load_channel(arguments)
    region = generate_region(channel, arguments.samples)
    region_text, border_text = io.StringIO(), io.StringIO()
    dump_region_csv(region, region_text)
    dump_border_csv(region, border_text)
    border_out = accessor.border_uri(arguments.out)
    accessor.write_text(arguments.out, region_text.getvalue())
    accessor.write_text(border_out, border_text.getvalue())
    _print_json({
        'samples': len(region.samples),
        'maximal': len(region.maximal),
        'area': region.area(),
        'region': str(arguments.out),
        'border': border_out,
    })
    return 0


def run_pc(arguments) -> int:
    channel = _load_channel(arguments)
    _emit(arguments, optimize_pc(channel, arguments.p0).as_dict())
    return 0


def run_capacity(arguments) -> int:
    channel = _load_channel(arguments)
    _emit(arguments, optimize_capacity(channel, arguments.samples, arguments.tol).as_dict())
    return 0


def run_order(arguments) -> int:
    a = _load_point(arguments.a)
    b = _load_point(arguments.b)
    degradation = stochastically_degraded(b, a)
    _emit(arguments, {
        'a': {'p11': a.point.p11, 'p00': a.point.p00},
        'b': {'p11': b.point.p11, 'p00': b.point.p00},
        'a_dominates_b': dominates(a.point, b.point),
        'b_degraded_from_a': degradation.degraded,
        'witness': None if degradation.witness is None else degradation.witness.matrix.tolist(),
        'b_less_capable_than_a': less_capable(b, a, arguments.grid),
    })
    return 0


def run_sweep(arguments) -> int:
    if arguments.count < 1:
        raise ValueError(f'count have to be at least 1. got {arguments.count}')
    rng = np.random.default_rng(arguments.seed)
    channels = [sample_cptp_channel(rng, name=f'sweep-{index:04d}') for index in range(arguments.count)]

    def row(channel):
        region = generate_region(channel, arguments.samples, parallel=False)
        capacity = capacity_of_region(region, arguments.tol)
        pc_half = optimize_pc(channel, 0.5).pc
        return [channel.name, *region.frame.s, *channel.b, capacity.c_bin, pc_half, region.area()]

    rows = ordered_map(row, channels)
    text = io.StringIO()
    writer = csv.writer(text, lineterminator='\n')
    writer.writerow(SWEEP_CSV_HEADER)
    for values in rows:
        writer.writerow([values[0]] + [format(float(value), '.17g') for value in values[1:]])
    accessor.write_text(arguments.out, text.getvalue())
    logger.info('sweep of %d channels written to %s', len(rows), arguments.out)
    return 0


COMMANDS = {
    'validate': run_validate,
    'region': run_region,
    'pc': run_pc,
    'capacity': run_capacity,
    'order': run_order,
    'sweep': run_sweep,
}


def _load_channel(arguments) -> AffineChannel:
    if arguments.example and arguments.spec:
        raise ChannelSpecError('give either a spec file or --example, not both')
    if arguments.example:
        return EXAMPLE_CHANNELS[arguments.example]
    if not arguments.spec:
        raise ChannelSpecError('a channel spec file or --example is required')
    return parse_channel_spec(accessor.read_text(arguments.spec), allow_noncp=arguments.allow_noncp,
                              check_cp=arguments.command != 'validate')


def _load_point(uri) -> TransitionMatrix:
    text = accessor.read_text(uri)
    try:
        document = json.loads(text)
    except json.JSONDecodeError as error:
        raise ChannelSpecError(f'invalid JSON: {error.msg}', line=error.lineno) from None
    if not isinstance(document, dict):
        raise ChannelSpecError('binary channel have to be a JSON object', line=1)
    for key in ('p11', 'p00'):
        if key not in document:
            raise ChannelSpecError('missing probability', field=key)
    return TransitionMatrix.from_point((_real(document['p11'], text, 'p11'), _real(document['p00'], text, 'p00')))


def _emit(arguments, payload: dict):
    if getattr(arguments, 'out', None):
        accessor.write_text(arguments.out, json.dumps(payload, indent=2) + '\n')
    else:
        _print_json(payload)


def _print_json(payload: dict):
    print(json.dumps(payload, indent=2))


def _real(value, text: str, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ChannelSpecError(f'expected a real number. got {value!r}', field=field, line=_line_of(text, field))
    return float(value)


def _real_triple(values, text: str, field: str):
    if not (isinstance(values, list) and len(values) == 3):
        raise ChannelSpecError('have to be an array of 3 reals', field=field, line=_line_of(text, field))
    return [_real(value, text, field) for value in values]


def _line_of(text: str, field: str) -> Optional[int]:
    for number, line in enumerate(text.splitlines(), start=1):
        if f'"{field}"' in line:
            return number
    return None
