import csv
import json
from collections import OrderedDict
from datetime import datetime
from pathlib import Path

import numpy as np
from scipy import stats

from .errors import ConfigError


def read_json(fname):
    fname = Path(fname)
    with fname.open('rt') as handle:
        try:
            return json.load(handle, object_hook=OrderedDict)
        except json.JSONDecodeError as err:
            raise ConfigError('{}: {}'.format(fname, err.msg), line=err.lineno, column=err.colno) from err


def _to_builtin(value):
    if isinstance(value, np.complexfloating):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Path):
        return str(value)
    raise TypeError('Object of type {} is not JSON serializable'.format(type(value).__name__))


def write_json(content, fname):
    fname = Path(fname)
    with fname.open('wt') as handle:
        json.dump(content, handle, indent=4, sort_keys=False, default=_to_builtin)


def write_csv(rows, header, fname):
    """ rows of plain numbers, written with a header row, UTF-8, period decimal separator. """
    fname = Path(fname)
    with fname.open('w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])


def _format_cell(cell):
    if isinstance(cell, (float, np.floating)):
        return repr(float(cell))
    if isinstance(cell, np.integer):
        return int(cell)
    return cell


class Timer:
    def __init__(self):
        self.cache = datetime.now()

    def check(self):
        now = datetime.now()
        duration = now - self.cache
        self.cache = now
        return duration.total_seconds()

    def reset(self):
        self.cache = datetime.now()


def smooth_cutoff(t):
    """
    C^infinity cut-off: 1 on [0, 1], 0 on [2, inf), monotone in between,
    built from psi(s) = exp(-1/s).
    """
    t = np.asarray(t, dtype=float)
    left = _psi(2.0 - t)
    right = _psi(t - 1.0)
    return left / (left + right)


def smooth_cutoff_derivative(t):
    t = np.asarray(t, dtype=float)
    left, dleft = _psi(2.0 - t), -_dpsi(2.0 - t)
    right, dright = _psi(t - 1.0), _dpsi(t - 1.0)
    total = left + right
    return (dleft * total - left * (dleft + dright)) / total ** 2


def _psi(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    positive = s > 0
    out[positive] = np.exp(-1.0 / s[positive])
    return out


def _dpsi(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    positive = s > 0
    out[positive] = np.exp(-1.0 / s[positive] - 2.0 * np.log(s[positive]))
    return out


def trend_tau(values):
    """ Kendall tau of a sequence against its position; 0 for flat or too-short input. """
    values = np.asarray(values, dtype=float)
    finite = np.isfinite(values)
    if finite.sum() < 3 or np.ptp(values[finite]) == 0:
        return 0.0
    tau, _ = stats.kendalltau(np.arange(values.size)[finite], values[finite])
    return 0.0 if np.isnan(tau) else float(tau)


def loglog_slope(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0) & np.isfinite(y)
    if keep.sum() < 2:
        return float('nan')
    slope, _ = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
    return float(slope)


def observed_order(errors, factor=2.0):
    """ Convergence orders between consecutive refinement levels. """
    errors = np.asarray(errors, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.log(errors[:-1] / errors[1:]) / np.log(factor)


def summarize(values):
    values = np.asarray(values, dtype=float)
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return OrderedDict(min=float('nan'), max=float('nan'), median=float('nan'))
    return OrderedDict(min=float(finite.min()), max=float(finite.max()), median=float(np.median(finite)))


def parse_number(value, kind=float):
    """
    JSON numbers pass through; strings such as '2*pi' or '0.5 + 0.2*I' are evaluated with sympy,
    [re, im] pairs become complex. Results are double precision.
    """
    import sympy

    if isinstance(value, (list, tuple)) and len(value) == 2:
        value = complex(parse_number(value[0]), parse_number(value[1]))
    elif isinstance(value, str):
        try:
            value = complex(sympy.sympify(value, locals={'I': sympy.I, 'pi': sympy.pi}).evalf())
        except (sympy.SympifyError, TypeError) as err:
            raise ConfigError('cannot parse numeric literal {!r}'.format(value)) from err
    if kind is complex:
        return complex(value)
    if isinstance(value, complex):
        if value.imag != 0:
            raise ConfigError('expected a real number, got {}'.format(value))
        value = value.real
    return kind(value)
