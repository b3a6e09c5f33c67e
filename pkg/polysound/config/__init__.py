from polysound.config.vars import (
    PYPI_NAMES,
    DEFAULT_ARGS,
    LOG_ENV_KEYS,
    CONFIG_ENV_VAR,
    ENV_PREFIX,
    EXIT_CODES,
    CSV_SCHEMAS,
    WIDTH_XTOL,
    WIDTH_MAXITER,
)
