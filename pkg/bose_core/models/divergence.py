"""
Bose-Einstein 相對熵相關模型

This file is part of bose-sdp-core
SPDX-License-Identifier: BSD-2-Clause
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class AffineChannelParams(BaseModel):
    """
    The map Z -> aZ + bI. Named bosonic channels act this way on occupations.

    Example:

    .. code:: python

        params = AffineChannelParams.attenuator(0.5, 0.0)
        print(params.a, params.b, params.monotone)  # 0.5 0.0 True
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    a: float = Field(..., ge=0.0, description="乘法係數 a")
    b: float = Field(..., ge=0.0, description="加法係數 b")
    label: Literal["attenuator", "amplifier", "additive_noise", "raw"] = Field(
        default="raw", description="通道種類"
    )
    parameters: dict[str, float] = Field(default_factory=dict, description="通道參數")

    @property
    def monotone(self) -> bool:
        """True when 2b + 1 >= a, the sufficient condition for contraction"""
        return 2.0 * self.b + 1.0 >= self.a

    @classmethod
    def attenuator(cls, eta: float, noise: float = 0.0) -> "AffineChannelParams":
        """Transmissivity eta in [0, 1] with thermal noise N"""
        if not 0.0 <= eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if noise < 0.0:
            raise ValueError("noise must be non-negative")
        return cls(
            a=eta,
            b=(1.0 - eta) * noise,
            label="attenuator",
            parameters={"eta": eta, "N": noise},
        )

    @classmethod
    def amplifier(cls, gain: float, noise: float = 0.0) -> "AffineChannelParams":
        """Gain G >= 1 with thermal noise N"""
        if gain < 1.0:
            raise ValueError("gain must be at least 1")
        if noise < 0.0:
            raise ValueError("noise must be non-negative")
        return cls(
            a=gain,
            b=(gain - 1.0) * (noise + 1.0),
            label="amplifier",
            parameters={"G": gain, "N": noise},
        )

    @classmethod
    def additive_noise(cls, noise: float) -> "AffineChannelParams":
        if noise < 0.0:
            raise ValueError("noise must be non-negative")
        return cls(a=1.0, b=noise, label="additive_noise", parameters={"N": noise})

    @classmethod
    def raw(cls, a: float, b: float) -> "AffineChannelParams":
        return cls(a=a, b=b, label="raw", parameters={"a": a, "b": b})


class MonotonicityCheck(BaseModel):
    """Both sides of D_BE(X||Y) >= D_BE(aX+bI || aY+bI)"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lhs: float = Field(..., description="D_BE(X||Y)")
    rhs: float = Field(..., description="D_BE(aX+bI||aY+bI)")
    holds: bool = Field(..., description="lhs >= rhs - 1e-10")
    params: AffineChannelParams = Field(..., description="通道參數")
