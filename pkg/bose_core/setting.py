# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause
import logging

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def parse_level(level: int | str) -> int:
    """
    將 "DEBUG" / "info" 之類的字串轉成 logging 級別，整數直接返回。

    :raises ValueError: 未知的級別名稱
    """
    if isinstance(level, int):
        return level
    value = logging.getLevelName(level.upper())
    if not isinstance(value, int):
        raise ValueError(f"Unknown log level: {level}")
    return value


def setup_logger(
    name: str | None = None,
    level: int | str = logging.INFO,
    filename: str | None = None,
    enable_console: bool = False,
) -> logging.Logger:
    """
    設定並返回一個 logger。

    :param name: Logger 的名稱，默認為 None（根 logger）。
    :param level: 日誌級別，可以是 logging 常量或名稱字串。
    :param filename: 如果提供，日誌將寫入該文件。
    :param enable_console: 如果為 True，日誌將輸出到控制台。
    :return: 配置好的 logger。
    """
    logger = logging.getLogger(name)
    level = parse_level(level)
    logger.setLevel(level)

    formatter = logging.Formatter(LOG_FORMAT, datefmt=LOG_DATE_FORMAT)

    # 同名 logger 重複設定時不重複添加處理器
    has_console = any(
        type(h) is logging.StreamHandler for h in logger.handlers
    )
    file_targets = {
        getattr(h, "baseFilename", None)
        for h in logger.handlers
        if isinstance(h, logging.FileHandler)
    }

    # 添加控制台處理器
    if enable_console and not has_console:
        console_handler = logging.StreamHandler()
        console_handler.setLevel(level)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    # 添加文件處理器
    if filename:
        file_handler = logging.FileHandler(filename, encoding="utf-8")
        if file_handler.baseFilename in file_targets:
            file_handler.close()
        else:
            file_handler.setLevel(level)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

    for handler in logger.handlers:
        handler.setLevel(level)

    return logger
