import json

import numpy as np
import pytest

from base import EstimateReport
from base.base_check import BaseCheck
from grid import TorusGrid, has_zero_mean, sobolev_norm
from utils import ConfigError, GridError, HypothesisError, SolverError
from verify import (SUITES, AdjointRelationCheck, BandLimitedEnsemble, DNConsistencyCheck, DNSemigroupCheck,
                    DomainEquivalenceCheck, FactorizationBoundaryCheck, FactorizationStripCheck, GreenIdentityCheck,
                    KernelDecayCheck, ModeEnsemble, ModeSweepCheck, OracleConvergenceCheck, PhiClosureCheck,
                    PrincipalPartCheck, QuadraticEstimateCheck, RemainderBoundsCheck, U1EstimateCheck, build_checks,
                    dyadic_modes, even_modes, gaussian_profile, resolve_suites, run_suites)
from verify.suites import _run_one

IDENTITY = {'type': 'ConstantFamily', 'args': {'matrix': [[1, 0], [0, 1]]}}


class RecordingWriter:
    def __init__(self):
        self.steps, self.scalars, self.reports = [], [], []

    def set_step(self, step, mode):
        self.steps.append((step, mode))

    def add_scalar(self, values):
        self.scalars.append(values)

    def add_report(self, report):
        self.reports.append(report.name)


class PointsCheck(BaseCheck):
    name = 'points'
    statement = 'records the grid size'

    def _check_resolution(self, field, level):
        return {'value': float(field.grid.points), 'spectrum': [1.0, 2.0]}

    def _report(self, series):
        report = self.new_report(refinement=series)
        report.require('finest grid', series[-1]['value'], '>=', 64)
        return report


class FailingCheck(PointsCheck):
    name = 'failing'

    def __init__(self, field, config, error):
        super().__init__(field, config)
        self.error = error

    def _check_resolution(self, field, level):
        raise self.error


@pytest.fixture
def running_config(make_config):
    return make_config()


def test_report_verdict():
    report = EstimateReport('r', 'statement')
    assert not report.passed
    report.require('a', 0.1, '<', 1.0).require('b', 2.0, 'in', [1.0, 3.0])
    assert report.passed and report.verdict == 'pass'
    report.require('c', float('nan'), '<', 1.0)
    assert report.verdict == 'fail'
    out = report.to_dict()
    assert out['verdict'] == 'fail'
    assert out['criteria'][2]['value'] == 'nan' and not out['criteria'][2]['holds']


def test_run_records_refinement_series(make_config):
    config = make_config(verify={'refinement_levels': 2, 'verbosity': 0})
    writer = RecordingWriter()
    check = PointsCheck(config.build_field(), config, writer=writer)
    report = check.run()
    assert [s['points'] for s in report.refinement] == [32, 64]
    assert report.passed
    assert report.grid['points'] == 32 and report.grid['strip']['levels'] == 128
    assert writer.steps == [(0, 'points'), (1, 'points')]
    # only scalars are forwarded
    assert 'spectrum' not in writer.scalars[0]
    assert writer.reports == ['points']


@pytest.mark.parametrize('values, passed', [
    ([1e-2, 2e-3], True),
    ([1e-2, 9e-3], False),
    ([1e-12, 1e-13], True),
])
def test_require_halving(running_config, values, passed):
    check = PointsCheck(running_config.build_field(), running_config)
    report = EstimateReport('r', '')
    check.require_halving(report, 'error', values)
    assert report.passed is passed


def test_single_resolution_adds_note(running_config):
    check = PointsCheck(running_config.build_field(), running_config)
    report = EstimateReport('r', '')
    check.require_halving(report, 'error', [1e-2])
    check.require_stable(report, 'constant', [1.0])
    assert not report.criteria and len(report.notes) == 2


@pytest.mark.parametrize('values, passed', [([1.0, 1.1], True), ([1.0, 2.0], False), ([0.0, 1e-12], True)])
def test_require_stable(running_config, values, passed):
    check = PointsCheck(running_config.build_field(), running_config)
    report = EstimateReport('r', '')
    check.require_stable(report, 'constant', values)
    assert report.passed is passed


def test_require_no_growth(running_config):
    check = PointsCheck(running_config.build_field(), running_config)
    modes = [2, 4, 8, 16]
    growing = EstimateReport('r', '')
    check.require_no_growth(growing, 'ratio', modes, [float(k) for k in modes])
    assert not growing.passed
    assert growing.constants['ratio slope'] == pytest.approx(1.0)

    flat = EstimateReport('r', '')
    check.require_no_growth(flat, 'ratio', modes, [1.0, 1.0, 1.0, 1.0])
    assert flat.passed

    # the trend decides, however small the slope
    slow = EstimateReport('r', '')
    check.require_no_growth(slow, 'ratio', modes, [1.0, 1.01, 1.02, 1.03])
    assert not slow.passed
    assert slow.constants['ratio slope'] < 0.02

    mixed = EstimateReport('r', '')
    check.require_no_growth(mixed, 'ratio', modes, [1.0, 1.2, 0.9, 1.1])
    assert mixed.passed
    assert mixed.constants['ratio tau'] == pytest.approx(0.0)


def test_require_halving_with_rounding_floor(running_config):
    check = PointsCheck(running_config.build_field(), running_config)
    report = EstimateReport('r', '')
    check.require_halving(report, 'gap', [3e-12, 4e-12], floor=running_config['tolerance']['rounding'])
    assert report.passed
    assert report.criteria[0].label == 'gap below floor'


def test_aborted_check_yields_failed_report(running_config):
    field = running_config.build_field()
    report = _run_one(FailingCheck(field, running_config, SolverError('singular strip matrix')))
    assert report.verdict == 'fail'
    assert report.criteria[0].label == 'completed'
    assert 'SolverError' in report.notes[0]
    with pytest.raises(HypothesisError):
        _run_one(FailingCheck(field, running_config, HypothesisError('untagged weight')))


def test_resolve_suites():
    assert resolve_suites('all') == list(SUITES)
    assert resolve_suites(['phi', 'dn', 'phi']) == ['phi', 'dn']
    with pytest.raises(ConfigError):
        resolve_suites(['phi', 'bogus'])


def test_build_checks(running_config):
    checks = build_checks(running_config.build_field(), running_config, ['all'])
    names = [check.name for check in checks]
    assert len(names) == len(set(names)) == sum(len(v) for v in SUITES.values())
    domain = next(check for check in checks if check.name == 'domain-equivalence')
    assert len(domain.ensemble) == 64


def test_parallel_run_is_sorted_and_reports_after_merge(make_config):
    config = make_config(n_jobs=2, kernel={'points': 128, 'period': '8*pi', 'weights': ['unit'], 'times': [0.5]},
                         grid={'points': 16})
    writer = RecordingWriter()
    reports = run_suites(config.build_field(), config, ['phi', 'kernel'], writer=writer)
    assert [r.name for r in reports] == ['kernel-decay', 'phi-closure']
    assert sorted(writer.reports) == ['kernel-decay', 'phi-closure']
    assert writer.steps == []


def test_band_limited_members_are_grid_independent(grid32, grid64):
    ensemble = BandLimitedEnsemble(size=3, seed=5, band=4)
    for index in range(3):
        assert np.allclose(ensemble.member(grid64, index).values[::2], ensemble.member(grid32, index).values)
    assert ensemble.max_wavenumber <= 4
    assert len(ensemble.pairs(grid32)) == 1
    with pytest.raises(GridError):
        BandLimitedEnsemble(band=8).member(TorusGrid(1, 2 * np.pi, 16), 0)


def test_ensemble_normalization(grid32):
    ensemble = BandLimitedEnsemble(size=2, seed=1, band=3, sobolev=0.5, zero_mean=True)
    for f in ensemble.members(grid32):
        assert sobolev_norm(f, 0.5) == pytest.approx(1.0)
        assert has_zero_mean(f)


def test_mode_sweeps():
    assert dyadic_modes(64) == [2, 4, 8, 16]
    assert even_modes(32) == [2, 4, 6, 8]
    with pytest.raises(GridError):
        ModeEnsemble(modes=(0, 2))


def test_gaussian_profile():
    g, dg, d2g = gaussian_profile(24.0)
    t = np.linspace(0.0, 12.0, 4001)
    assert g(6.0) == pytest.approx(1.0)
    assert np.allclose(dg(t), np.gradient(g(t), t), atol=1e-4)
    assert np.allclose(d2g(t), np.gradient(dg(t), t), atol=1e-3)


def test_phi_closure_running_example(make_config):
    config = make_config(grid={'points': 16})
    report = PhiClosureCheck(config.build_field(), config).run()
    assert report.passed
    assert report.constants['lambda_residual'] < 1e-10
    assert report.constants['j_gap'] < 1e-8


def test_kernel_decay_identity(make_config):
    config = make_config(coefficient=IDENTITY,
                         kernel={'points': 256, 'period': '8*pi', 'weights': ['unit'],
                                 'times': [0.25, 0.5]})
    report = KernelDecayCheck(config.build_field(), config).run()
    assert report.passed
    assert report.constants['unit t=0.25 slope'] <= -1.5
    assert report.constants['unit t=0.5 mass'] == pytest.approx(1.0, rel=1e-2)


def test_quadratic_estimate_identity(make_config):
    config = make_config(coefficient=IDENTITY, quadratic={'weights': ['t-xi']})
    report = QuadraticEstimateCheck(config.build_field(), config).run()
    assert report.passed
    assert report.constants['t-xi deviation'] < 1e-3
    assert report.constants['u0 energy'] <= 0.5


def test_quadratic_estimate_refuses_unit_weight(make_config):
    config = make_config(quadratic={'weights': ['t-xi', 'unit']})
    with pytest.raises(HypothesisError):
        QuadraticEstimateCheck(config.build_field(), config)


def test_dn_consistency_running_example(make_config):
    config = make_config(grid={'points': 64})
    check = DNConsistencyCheck(config.build_field(), config, ensemble=BandLimitedEnsemble(size=4, band=2))
    report = check.run()
    assert report.passed
    assert report.constants['median_gap'] < 5e-2


def test_semigroup_identity(make_config):
    config = make_config(coefficient=IDENTITY, grid={'points': 16}, semigroup={'points': 32})
    check = DNSemigroupCheck(config.build_field(), config, ensemble=BandLimitedEnsemble(size=2, band=2))
    assert check.field.grid.points == 32
    report = check.run()
    assert report.passed
    assert report.constants['Lambda_sector_degrees'] < 1.0
    assert report.constants['analyticity'] <= np.exp(-1.0) + 1e-2


def test_oracle_convergence_identity(make_config):
    config = make_config(coefficient=IDENTITY, grid={'points': 64})
    check = OracleConvergenceCheck(config.build_field(), config)
    assert check.levels == 2
    report = check.run()
    assert report.passed
    assert report.constants['ansatz_error order'] >= 1.8


@pytest.mark.parametrize('check_cls', [FactorizationBoundaryCheck, FactorizationStripCheck, GreenIdentityCheck,
                                       AdjointRelationCheck, DomainEquivalenceCheck, RemainderBoundsCheck,
                                       ModeSweepCheck, U1EstimateCheck, PrincipalPartCheck])
def test_checks_produce_serializable_reports(make_config, check_cls):
    config = make_config()
    check = check_cls(config.build_field(), config, ensemble=BandLimitedEnsemble(size=2, band=2))
    report = check.run()
    assert report.name == check_cls.name
    assert report.criteria
    assert report.grid['field']
    out = json.loads(json.dumps(report.to_dict()))
    assert out['verdict'] in ('pass', 'fail')
    assert out['refinement'][0]['points'] == 32


LIPSCHITZ = {'type': 'LipschitzFamily', 'args': {'amplitude': 0.5, 'skew_amplitude': 0.4, 'seed': 13}}
IDENTITY_CHECKS = [FactorizationBoundaryCheck, FactorizationStripCheck, GreenIdentityCheck, AdjointRelationCheck,
                   DomainEquivalenceCheck, PrincipalPartCheck]
REMAINDER_CHECKS = [RemainderBoundsCheck, ModeSweepCheck, U1EstimateCheck]


def _refined_config(make_config, coefficient=None):
    # dt = h / 2 on every level
    sections = {'grid': {'points': 64}, 'strip': {'levels': 512}, 'verify': {'refinement_levels': 2, 'verbosity': 0}}
    if coefficient is not None:
        sections['coefficient'] = coefficient
    return make_config(**sections)


def _build(check_cls, config):
    kwargs = {'modes': [2, 4, 8]} if check_cls in REMAINDER_CHECKS else {}
    return check_cls(config.build_field(), config, ensemble=BandLimitedEnsemble(size=4, band=2), **kwargs)


@pytest.mark.parametrize('check_cls', IDENTITY_CHECKS + REMAINDER_CHECKS)
def test_checks_pass_on_running_example(make_config, check_cls):
    report = _build(check_cls, _refined_config(make_config)).run()
    failed = [c.label for c in report.criteria if not c.holds()]
    assert report.passed, failed
    assert [s['points'] for s in report.refinement] == [64, 128]


@pytest.mark.parametrize('check_cls', IDENTITY_CHECKS)
def test_checks_pass_on_lipschitz_field(make_config, check_cls):
    report = _build(check_cls, _refined_config(make_config, LIPSCHITZ)).run()
    failed = [c.label for c in report.criteria if not c.holds()]
    assert report.passed, failed


@pytest.mark.parametrize('check_cls', REMAINDER_CHECKS)
def test_remainder_checks_on_lipschitz_field(make_config, check_cls):
    check = _build(check_cls, _refined_config(make_config, LIPSCHITZ))
    report = check.run()
    # every swept mode is measured at every resolution
    assert all(len(level['root_modulus']) == len(check.modes) for level in report.refinement)
    assert max(report.constants['root_modulus']) < 1.0
    trends = [c for c in report.criteria if c.label.endswith('growth trend tau')]
    assert trends
    bounded = [c.label for c in report.criteria if c not in trends and not c.holds()]
    assert not bounded, bounded
    assert report.passed == all(c.holds() for c in trends)


def test_dn_identities_hold_to_rounding_on_lipschitz_field(make_config):
    config = _refined_config(make_config, LIPSCHITZ)
    for check_cls in (DNConsistencyCheck, GreenIdentityCheck, AdjointRelationCheck):
        report = check_cls(config.build_field(), config, ensemble=BandLimitedEnsemble(size=4, band=2)).run()
        assert report.passed
        assert max(s['max_gap'] for s in report.refinement) < 1e-8


def test_unresolved_roots_fail_the_sweep(make_config):
    config = make_config(grid={'points': 32})
    check = ModeSweepCheck(config.build_field(), config, ensemble=BandLimitedEnsemble(size=2, band=2))
    report = check.new_report()
    series = [{'root_modulus': [0.5, 0.9], 'symbol_gap': [0.01, 0.1]},
              {'root_modulus': [0.5, 1.0 + 1e-6], 'symbol_gap': [0.01, 0.1]}]
    check.require_decaying_roots(report, series)
    assert not report.passed
    assert report.constants['root_modulus'] == [0.5, 0.9]
