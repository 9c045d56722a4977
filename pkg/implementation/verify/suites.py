"""
Named suites of checks and the scheduler that runs them. Checks are independent jobs; reports
are merged by name so the output does not depend on completion order.
"""
import logging
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor

from base.base_report import EstimateReport
from utils import ConfigError, HypothesisError, LipschitzDNError

from .dn import AdjointRelationCheck, DNConsistencyCheck, GreenIdentityCheck
from .domain import DomainEquivalenceCheck
from .ensembles import BandLimitedEnsemble
from .factorization import FactorizationBoundaryCheck, FactorizationStripCheck
from .kernel import KernelDecayCheck
from .oracle import OracleConvergenceCheck
from .phi import PhiClosureCheck
from .quadratic import PrincipalPartCheck, QuadraticEstimateCheck
from .remainder import ModeSweepCheck, RemainderBoundsCheck, U1EstimateCheck
from .semigroup import DNSemigroupCheck

logger = logging.getLogger(__name__)

SUITES = OrderedDict([
    ('factorization', [FactorizationBoundaryCheck, FactorizationStripCheck]),
    ('dn', [DNConsistencyCheck, GreenIdentityCheck, AdjointRelationCheck]),
    ('domain', [DomainEquivalenceCheck]),
    ('remainder', [RemainderBoundsCheck, ModeSweepCheck, U1EstimateCheck]),
    ('kernel', [KernelDecayCheck]),
    ('quadratic', [QuadraticEstimateCheck, PrincipalPartCheck]),
    ('phi', [PhiClosureCheck]),
    ('semigroup', [DNSemigroupCheck]),
    ('oracle', [OracleConvergenceCheck]),
])

# checks that draw from the larger ensemble of the domain study
LARGE_ENSEMBLE = (DomainEquivalenceCheck,)


def resolve_suites(names):
    names = [names] if isinstance(names, str) else list(names)
    if 'all' in names:
        return list(SUITES)
    unknown = [name for name in names if name not in SUITES]
    if unknown:
        raise ConfigError('unknown suite(s) {}; expected one of {}'.format(unknown, ['all'] + list(SUITES)))
    return list(OrderedDict.fromkeys(names))


def build_ensembles(config, grid):
    """ The default ensemble and the larger one of the domain study, both from the run seed. """
    cfg = config['ensemble']
    band = cfg['band'] or grid.points // 8
    common = dict(dimension=grid.dimension, seed=config['seed'], band=band, decay=cfg['decay'])
    return {'default': BandLimitedEnsemble(size=cfg['size'], **common),
            'large': BandLimitedEnsemble(size=cfg['domain_size'], name='band-limited-large', **common)}


def build_checks(field, config, suites=('all',), writer=None):
    """ Instantiated checks of the selected suites; configuration problems surface here. """
    ensembles = build_ensembles(config, field.grid)
    checks = []
    for suite in resolve_suites(suites):
        for check_cls in SUITES[suite]:
            ensemble = ensembles['large'] if check_cls in LARGE_ENSEMBLE else ensembles['default']
            checks.append(check_cls(field, config, ensemble=ensemble, writer=writer))
    return checks


def _run_one(check):
    try:
        return check.run()
    except HypothesisError:
        raise
    except LipschitzDNError as err:
        logger.error('%s aborted: %s', check.name, err)
        report = EstimateReport(name=check.name, statement=check.statement,
                                notes=['aborted: {}: {}'.format(type(err).__name__, err)])
        report.require('completed', 0.0, '>', 0.5)
        return report


def run_suites(field, config, suites=('all',), writer=None):
    """
    Run every check of the selected suites with `n_jobs` workers and return the reports sorted
    by name. The comet writer is only handed to the checks when they run sequentially.
    """
    n_jobs = max(1, int(config['n_jobs']))
    checks = build_checks(field, config, suites, writer if n_jobs == 1 else None)
    logger.info('running %d checks on %d worker(s)', len(checks), n_jobs)
    if n_jobs == 1:
        reports = [_run_one(check) for check in checks]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            reports = list(pool.map(_run_one, checks))
        if writer is not None:
            for report in reports:
                writer.add_report(report)
    return sorted(reports, key=lambda report: report.name)
