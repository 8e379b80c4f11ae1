# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause
"""
The package logger. Solvers and estimators log here: DEBUG per iteration and
per budget, INFO at the end of a run, WARNING when a safeguard engages.
Library use stays silent until :func:`bose_core.setting.setup_logger` adds a
handler, which the CLI does from the settings.
"""

import logging

from bose_core.setting import setup_logger

PACKAGE_LOGGER = "bose_core"

logger: logging.Logger = setup_logger(name=PACKAGE_LOGGER, level=logging.INFO, enable_console=False)
