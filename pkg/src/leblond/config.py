"""Run configuration: one JSON document per run, validated before anything executes."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import gauge as gg
from . import hamiltonians as hf
from .lattice import Grid


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# -- gauges (CustomPair only) -----------------------------------------------------


class ZeroGaugeCfg(_Strict):
    kind: Literal["Zero"]

    def build(self):
        return gg.ZeroGauge()


class ConstantImaginaryCfg(_Strict):
    kind: Literal["ConstantImaginary"]
    alpha: tuple[float, float, float]
    sign: Literal[-1, 1] = -1

    def build(self):
        return gg.ConstantImaginary(self.alpha, self.sign)


class SpinMatrixConstantCfg(_Strict):
    kind: Literal["SpinMatrixConstant"]
    re: list[list[list[float]]]
    im: Optional[list[list[list[float]]]] = None

    def build(self):
        re = np.array(self.re, dtype=float)
        im = np.zeros_like(re) if self.im is None else np.array(self.im, dtype=float)
        if re.shape != im.shape:
            raise ValueError("re and im parts must have the same shape")
        return gg.SpinMatrixConstant(tuple(re + 1j * im))


class RadialScalarCfg(_Strict):
    kind: Literal["RadialScalar"]
    alpha: float
    profile: Literal["1/r", "1/r^2", "r", "r^2"] = "r"
    sign: Literal[-1, 1] = 1

    def build(self):
        return gg.RadialScalar(self.alpha, self.profile, self.sign)


class SusyLinearCfg(_Strict):
    kind: Literal["SusyLinear"]
    omega: float = Field(gt=0)
    sign: Literal[-1, 1] = 1

    def build(self):
        return gg.SusyLinear(self.omega, self.sign)


GaugeCfg = Annotated[Union[ZeroGaugeCfg, ConstantImaginaryCfg, SpinMatrixConstantCfg, RadialScalarCfg,
                           SusyLinearCfg], Field(discriminator="kind")]


# -- models -----------------------------------------------------------------------


class FreeParticleCfg(_Strict):
    variant: Literal["FreeParticle"]

    def build(self):
        return hf.FreeParticle()


class RashbaCfg(_Strict):
    variant: Literal["Rashba"]
    alpha: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def build(self):
        return hf.Rashba(self.alpha)


class DresselhausCfg(_Strict):
    variant: Literal["Dresselhaus"]
    alpha: float = 1.0

    def build(self):
        return hf.Dresselhaus(self.alpha)


class RadialInverseCfg(_Strict):
    variant: Literal["RadialInverse"]
    alpha: float

    def build(self):
        return hf.RadialInverse(self.alpha)


class RadialOscillatorCfg(_Strict):
    variant: Literal["RadialOscillator"]
    alpha: float

    def build(self):
        return hf.RadialOscillator(self.alpha)


class Susy1DCfg(_Strict):
    variant: Literal["Susy1D"]
    omega: float = Field(default=1.0, gt=0)

    def build(self):
        return hf.Susy1D(self.omega)


class CustomPairCfg(_Strict):
    variant: Literal["CustomPair"]
    gauge_a: GaugeCfg
    gauge_b: GaugeCfg

    def build(self):
        return hf.CustomPair(self.gauge_a.build(), self.gauge_b.build())


ModelCfg = Annotated[Union[FreeParticleCfg, RashbaCfg, DresselhausCfg, RadialInverseCfg, RadialOscillatorCfg,
                           Susy1DCfg, CustomPairCfg], Field(discriminator="variant")]


# -- run ----------------------------------------------------------------------------


class GridCfg(_Strict):
    dims: Literal[1, 3]
    n: int = Field(ge=2)
    half_width: float = Field(gt=0)
    offset: Optional[bool] = None
    boundary: Literal["dirichlet", "periodic"] = "dirichlet"
    order: int = Field(default=2, ge=2)

    def build(self) -> Grid:
        return Grid(self.dims, self.n, self.half_width, self.offset, self.boundary, self.order)


class SolverCfg(_Strict):
    method: Literal["auto", "dense", "iterative", "shift-invert"] = "auto"
    m_levels: int = Field(default=10, ge=1)
    tol: float = Field(default=1e-10, gt=0)
    pair_tol: float = Field(default=1e-8, gt=0)
    susy_tol: float = Field(default=1e-6, gt=0)
    equivalence_tol: float = Field(default=1e-10, gt=0)
    kernel_threshold: Optional[float] = Field(default=None, gt=0)
    probes: int = Field(default=8, ge=1)
    filter_doublers: bool = True
    shift: float = -0.5
    dense_cap: int = Field(default=8192, ge=1)
    maxiter: Optional[int] = Field(default=None, ge=1)


class OutputCfg(_Strict):
    path: Optional[str] = None
    format: Literal["csv", "json"] = "json"


class DispersionCfg(_Strict):
    start: tuple[float, float, float] = (0.0, 0.0, 0.0)
    stop: tuple[float, float, float] = (2.0, 0.0, 0.0)
    samples: int = Field(default=51, ge=1)


class ChannelsCfg(_Strict):
    l_max: int = Field(default=2, ge=0)
    n_points: int = Field(default=4000, ge=10)
    r_max: float = Field(default=12.0, gt=0)
    m_levels: int = Field(default=2, ge=1)
    level_tol: float = Field(default=1e-3, gt=0)


class RunConfig(_Strict):
    model: Optional[ModelCfg] = None
    grid: Optional[GridCfg] = None
    solver: SolverCfg = SolverCfg()
    seed: int = 0
    output: OutputCfg = OutputCfg()
    dispersion: DispersionCfg = DispersionCfg()
    channels: ChannelsCfg = ChannelsCfg()

    @model_validator(mode="after")
    def _model_fits_grid(self):
        if self.model is not None:
            model = self.model.build()
            if self.grid is not None:
                grid = self.grid.build()
                hf.check_model_grid(model, grid)
                if isinstance(model, hf.CustomPair):
                    gg.check_compatible(model.gauge_a, grid)
                    gg.check_compatible(model.gauge_b, grid)
        elif self.grid is not None:
            self.grid.build()
        return self

    def model_spec(self):
        if self.model is None:
            raise ValueError("this command needs a 'model' section")
        return self.model.build()

    def grid_spec(self) -> Grid:
        if self.grid is None:
            raise ValueError("this command needs a 'grid' section")
        return self.grid.build()


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    return RunConfig.model_validate(json.loads(Path(path).read_text()))
