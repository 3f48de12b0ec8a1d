#!/usr/bin/env python3
# -*- mode:python; coding:utf-8; -*-

"""infomgf command-line interface."""

import json
import os
import sys
from argparse import ArgumentParser
from typing import List, Optional

import pydantic
import torch

from infomgf.cli import commands
from infomgf.shared.constants import (
    EXIT_INPUT_ERROR,
    EXIT_NUMERIC_ERROR,
    EXIT_OK,
    THREADS_ENV_VAR,
)
from infomgf.shared.exceptions import (
    CheckpointError,
    ConfigNotFoundError,
    ContractError,
    DatasetError,
    DimensionError,
    NumericalError,
)
from infomgf.shared.utils.log_utils import get_logger

INPUT_ERRORS = (
    CheckpointError,
    ConfigNotFoundError,
    ContractError,
    DatasetError,
    DimensionError,
    pydantic.ValidationError,
)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog='infomgf',
        description='Unsupervised multiplex graph structure learning',
    )
    verbs = parser.add_subparsers(dest='verb', required=True)

    train = verbs.add_parser('train', help='Train and write run artifacts')
    source = train.add_mutually_exclusive_group(required=True)
    source.add_argument('-c', '--config', help='Path to a train config')
    source.add_argument('-m', '--manifest',
                        help='Re-run the config recorded in a manifest')
    train.add_argument('-o', '--out', help='Override the output directory')
    train.add_argument('-s', '--seed', type=int, help='Override the seed')

    evaluate = verbs.add_parser('eval', help='Evaluate a trained run')
    evaluate.add_argument('-m', '--manifest', required=True)
    evaluate.add_argument('-t', '--task', choices=('cluster', 'classify'),
                          default='cluster')
    evaluate.add_argument('--raw', action='store_true',
                          help='Cluster raw features instead of Z')
    evaluate.add_argument('-s', '--seed', type=int, action='append',
                          help='Evaluation seed, may be repeated')

    synth = verbs.add_parser('synth', help='Generate a multiplex SBM bundle')
    synth.add_argument('-c', '--config', required=True,
                       help='Path to an SBM spec')
    synth.add_argument('-o', '--out', required=True)

    perturb = verbs.add_parser('perturb', help='Write a perturbed bundle')
    perturb.add_argument('bundle')
    perturb.add_argument('-r', '--rate', type=float, required=True)
    perturb.add_argument('--mode', choices=('add', 'delete', 'feature'),
                         required=True)
    perturb.add_argument('-s', '--seed', type=int, default=0)
    perturb.add_argument('-o', '--out', required=True)

    stats = verbs.add_parser('stats', help='Print dataset statistics')
    stats.add_argument('bundle')

    sweep = verbs.add_parser('sweep', help='Hyperparameter sensitivity sweep')
    sweep.add_argument('-c', '--config', required=True,
                       help='Path to a sweep spec')

    dump = verbs.add_parser('dump', help='Dump matrices as CSV for plotting')
    dump.add_argument('-m', '--manifest', required=True)
    dump.add_argument('-o', '--out', required=True)
    return parser


def run(args) -> object:
    if args.verb == 'train':
        return commands.cmd_train(
            config_path=args.config,
            manifest_path=args.manifest,
            out=args.out,
            seed=args.seed,
        )
    if args.verb == 'eval':
        report = commands.cmd_eval(
            args.manifest, task=args.task, raw=args.raw, seeds=args.seed,
        )
        return report.model_dump(mode='json')
    if args.verb == 'synth':
        return commands.cmd_synth(args.config, args.out)
    if args.verb == 'perturb':
        return commands.cmd_perturb(
            args.bundle, args.rate, args.mode, args.seed, args.out,
        )
    if args.verb == 'stats':
        return commands.cmd_stats(args.bundle)
    if args.verb == 'sweep':
        return commands.cmd_sweep(args.config)
    return commands.cmd_dump(args.manifest, args.out)


def _limit_threads():
    value = os.environ.get(THREADS_ENV_VAR)
    if not value:
        return
    try:
        threads = int(value)
    except ValueError as exc:
        raise ContractError(
            f'{THREADS_ENV_VAR} must be an integer, got {value!r}'
        ) from exc
    if threads < 1:
        raise ContractError(f'{THREADS_ENV_VAR} must be >= 1, got {threads}')
    torch.set_num_threads(threads)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parses arguments and runs one verb.

    Returns
    -------
    int
        0 on success, 2 on invalid input, 3 on numerical failure.
    """
    args = build_parser().parse_args(argv)
    logger = get_logger('cli')
    try:
        _limit_threads()
        result = run(args)
    except NumericalError as exc:
        logger.error('Numerical failure: %s', exc)
        return EXIT_NUMERIC_ERROR
    except pydantic.ValidationError as exc:
        for error in exc.errors():
            field = '.'.join(str(part) for part in error['loc']) or '<root>'
            logger.error('Invalid value for %s: %s', field, error['msg'])
        return EXIT_INPUT_ERROR
    except INPUT_ERRORS as exc:
        logger.error('%s', exc)
        return EXIT_INPUT_ERROR
    if isinstance(result, (dict, list)):
        print(json.dumps(result, indent=2, sort_keys=True))
    else:
        print(result)
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
