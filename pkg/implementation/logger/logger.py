import logging
import logging.config
from pathlib import Path

from utils import ConfigError, read_json

DEFAULT_LOG_CONFIG = Path(__file__).with_name('logger_config.json')
VERBOSITY_LEVELS = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG}


def setup_logging(save_dir, log_config=None, verbosity=None):
    """
    Load the dictConfig of `log_config` (verify.log_config; the bundled logger_config.json when
    empty) with its file handlers redirected into the run directory. `verbosity` as in the
    verify section sets the root level.
    """
    log_config = Path(log_config) if log_config else DEFAULT_LOG_CONFIG
    if not log_config.is_file():
        raise ConfigError('logging configuration {} does not exist'.format(log_config))
    if verbosity is not None and verbosity not in VERBOSITY_LEVELS:
        raise ConfigError('verbosity must be one of {}, got {!r}'.format(sorted(VERBOSITY_LEVELS), verbosity))

    config = read_json(log_config)
    for handler in config.get('handlers', {}).values():
        if 'filename' in handler:
            handler['filename'] = str(Path(save_dir) / handler['filename'])
    if verbosity is not None:
        config.setdefault('root', {})['level'] = logging.getLevelName(VERBOSITY_LEVELS[verbosity])
    logging.config.dictConfig(config)
    # font discovery is chatty at DEBUG
    for name in ('matplotlib', 'PIL'):
        logging.getLogger(name).setLevel(logging.WARNING)
