# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause
"""
load_solver_config reads and writes ``bose_sdp.toml``. Values come from three
layers, highest first: ``BOSE_SDP_*`` environment variables, the TOML file, the
defaults below.

Example:

.. code:: python

    settings = await ConfigManager("bose_sdp.toml").load_config()
    print(settings.shot_constant, settings.optimizer_fields()["max_halvings"])
"""

import os
from pathlib import Path
from typing import Any, Optional, Union

# Python 3.10 沒有 tomllib
try:
    import tomllib
except ImportError:
    import tomli as tomllib

import aiofiles
import tomli_w
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..logging_utils import logger
from ..setting import parse_level

ENV_PREFIX = "BOSE_SDP_"
DEFAULT_CONFIG_FILE = "bose_sdp.toml"

# SolverSettings 欄位 -> OptimizerConfig 欄位
_OPTIMIZER_FIELDS = {
    "shot_constant": "shot_constant",
    "precision_constant": "precision_constant",
    "max_halvings": "max_halvings",
    "phase1_max_iters": "phase1_max_iters",
    "newton_shift_cap": "shift_cap",
    "record_wall_time": "record_wall_time",
}


class SolverSettings(BaseSettings):
    """Numerical tolerances, optimizer safeguards and estimator constants"""

    model_config = SettingsConfigDict(
        env_prefix=ENV_PREFIX,
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="forbid",
        validate_assignment=True,
    )

    # 數值容差
    hermitian_rtol: float = Field(default=1e-12, gt=0.0, description="Hermitian 對稱化容差")
    psd_clip_rtol: float = Field(default=1e-12, gt=0.0, description="半正定本徵值截斷容差")
    support_rtol: float = Field(default=1e-14, gt=0.0, description="散度支撐判定容差")
    grouping_rtol: float = Field(default=1e-8, gt=0.0, description="簡併分組相對容差")

    # 優化器保護措施
    max_halvings: int = Field(default=60, ge=1, le=200, description="可行性回溯減半上限")
    phase1_max_iters: int = Field(default=2000, ge=1, description="嚴格可行點搜索的迭代上限")
    newton_shift_cap: float = Field(default=1e6, gt=0.0, description="隨機 Newton 的平移上限")

    # 估計器常數
    shot_constant: float = Field(default=9.0, gt=0.0, description="Hoeffding 射擊數常數")
    precision_constant: float = Field(default=1.0, gt=0.0, description="每步精度常數 C")

    seed: int = Field(default=0, ge=0, description="默認主種子")
    record_wall_time: bool = Field(default=False, description="在軌跡中記錄牆鐘時間")
    slater_asserted: bool = Field(default=True, description="用戶斷言 Slater 條件成立")

    log_level: str = Field(default="INFO", description="日誌級別")
    log_file: Optional[str] = Field(default=None, description="日誌文件路徑")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        parse_level(v)
        return v.upper()

    def optimizer_fields(self) -> dict[str, Any]:
        """The settings an OptimizerConfig takes, under its field names"""
        return {target: getattr(self, source) for source, target in _OPTIMIZER_FIELDS.items()}


def _env_overridden() -> set[str]:
    """Settings fields that have a BOSE_SDP_* variable set"""
    present = {name.upper() for name in os.environ}
    return {field for field in SolverSettings.model_fields if f"{ENV_PREFIX}{field}".upper() in present}


class ConfigManager:
    """Loads, caches and saves the settings file"""

    def __init__(self, config_path: Union[str, os.PathLike] = DEFAULT_CONFIG_FILE):
        self.config_path = Path(config_path)
        self._config: Optional[SolverSettings] = None

    async def _read_file(self) -> dict[str, Any]:
        if not self.config_path.exists():
            return {}
        async with aiofiles.open(self.config_path, mode="r", encoding="utf-8") as f:
            return tomllib.loads(await f.read())

    async def load_config(self, reload: bool = False) -> SolverSettings:
        """
        Returns the cached settings, reading the file on first use or when
        ``reload`` is set. A missing file means defaults plus environment.

        :raises pydantic.ValidationError: The file has an unknown key or a bad value
        """
        if self._config is not None and not reload:
            return self._config
        file_values = await self._read_file()
        # 初始化參數的優先級高於環境變量，所以被環境覆寫的鍵不能傳入
        skipped = _env_overridden()
        self._config = SolverSettings(**{k: v for k, v in file_values.items() if k not in skipped})
        logger.debug(
            f"settings loaded from {self.config_path} ({len(file_values)} keys, env overrides: {sorted(skipped)})"
        )
        return self._config

    async def save_config(self, config: Optional[SolverSettings] = None) -> None:
        """
        Writes ``config``, or the loaded settings, as TOML

        :raises ValueError: Nothing was loaded and no config was given
        """
        config = config or self._config
        if config is None:
            raise ValueError("no settings to save; load or pass a SolverSettings first")
        # TOML 沒有 null
        text = tomli_w.dumps(config.model_dump(exclude_none=True))
        self.config_path.parent.mkdir(parents=True, exist_ok=True)
        async with aiofiles.open(self.config_path, mode="w", encoding="utf-8") as f:
            await f.write(text)

    async def update_config(self, **changes: Any) -> SolverSettings:
        """
        Applies ``changes`` with validation, saves and returns the new settings

        :raises pydantic.ValidationError: Unknown key or invalid value
        """
        current = await self.load_config()
        self._config = SolverSettings(**{**current.model_dump(), **changes})
        await self.save_config()
        return self._config

    def get_config(self) -> Optional[SolverSettings]:
        return self._config


async def create_default_config(
    config_path: Union[str, os.PathLike] = DEFAULT_CONFIG_FILE,
) -> SolverSettings:
    """Writes a settings file holding the defaults"""
    config = SolverSettings()
    await ConfigManager(config_path).save_config(config)
    return config


def get_config_from_env() -> SolverSettings:
    """Defaults plus environment, without touching any file"""
    return SolverSettings()
