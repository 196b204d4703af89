"""Pydantic schemas for body, function and gauge JSON files."""

from pathlib import Path
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, Field, TypeAdapter, field_validator

from .bounds import ConvexGauge, ExpMinusOne, ExpSquareMinusOne, PiecewiseLinearConvex, Power
from .center import Affine, ConcaveFunction, MinAffine
from .errors import InputError
from .geometry import ConvexBody, Polygon2, Polytope3, ProfileBody
from .symmetrize import Profile


class Polygon2Spec(BaseModel):
    """Convex polygon, vertices counterclockwise."""
    type: Literal["polygon2"]
    vertices: List[Annotated[List[float], Field(min_length=2, max_length=2)]] = Field(..., min_length=3)

    def to_domain(self) -> Polygon2:
        return Polygon2(self.vertices)


class Polytope3Spec(BaseModel):
    """Convex polytope, hull of the listed points."""
    type: Literal["polytope3"]
    vertices: List[Annotated[List[float], Field(min_length=3, max_length=3)]] = Field(..., min_length=4)

    def to_domain(self) -> Polytope3:
        return Polytope3(self.vertices)


class ProfileSpec(BaseModel):
    """Rotationally symmetric body about the first axis."""
    type: Literal["profile"]
    dim: int = Field(..., ge=2)
    t0: Optional[float] = None
    t1: Optional[float] = None
    knots: List[Annotated[List[float], Field(min_length=2, max_length=2)]] = Field(..., min_length=2)

    def to_domain(self) -> ProfileBody:
        t = [k[0] for k in self.knots]
        v = [k[1] for k in self.knots]
        if self.t0 is not None and self.t0 != t[0]:
            raise InputError(f"t0={self.t0} does not match the first knot {t[0]}")
        if self.t1 is not None and self.t1 != t[-1]:
            raise InputError(f"t1={self.t1} does not match the last knot {t[-1]}")
        return ProfileBody(Profile(t, v, self.dim))


BodySpec = Annotated[Union[Polygon2Spec, Polytope3Spec, ProfileSpec], Field(discriminator="type")]


class AffineSpec(BaseModel):
    type: Literal["affine"] = "affine"
    gradient: List[float] = Field(..., min_length=1)
    offset: float = 0.0

    def to_domain(self) -> Affine:
        return Affine(self.gradient, self.offset)


class MinAffineSpec(BaseModel):
    type: Literal["min-affine"]
    pieces: List[AffineSpec] = Field(..., min_length=1)

    def to_domain(self) -> MinAffine:
        return MinAffine(tuple(p.to_domain() for p in self.pieces))


FunctionSpec = Annotated[Union[AffineSpec, MinAffineSpec], Field(discriminator="type")]


class PowerSpec(BaseModel):
    type: Literal["power"]
    alpha: float = Field(default=1.0, ge=1.0)

    def to_domain(self) -> Power:
        return Power(self.alpha)


class ExpSpec(BaseModel):
    type: Literal["exp"]

    def to_domain(self) -> ExpMinusOne:
        return ExpMinusOne()


class ExpSquareSpec(BaseModel):
    type: Literal["exp-square"]

    def to_domain(self) -> ExpSquareMinusOne:
        return ExpSquareMinusOne()


class PiecewiseLinearSpec(BaseModel):
    type: Literal["pwl-convex"]
    knots: List[Annotated[List[float], Field(min_length=2, max_length=2)]] = Field(..., min_length=2)

    @field_validator("knots")
    @classmethod
    def starts_at_origin(cls, knots):
        if knots[0] != [0.0, 0.0]:
            raise ValueError("the first knot must be [0, 0]")
        return knots

    def to_domain(self) -> PiecewiseLinearConvex:
        return PiecewiseLinearConvex(tuple(tuple(k) for k in self.knots))


GaugeSpec = Annotated[
    Union[PowerSpec, ExpSpec, ExpSquareSpec, PiecewiseLinearSpec], Field(discriminator="type")
]

_body_adapter = TypeAdapter(BodySpec)
_function_adapter = TypeAdapter(FunctionSpec)
_gauge_adapter = TypeAdapter(GaugeSpec)


def parse_body(text: str) -> ConvexBody:
    """Body from JSON text; raises pydantic ValidationError on schema errors."""
    return _body_adapter.validate_json(text).to_domain()


def parse_function(text: str) -> ConcaveFunction:
    return _function_adapter.validate_json(text).to_domain()


def parse_gauge(text: str) -> ConvexGauge:
    return _gauge_adapter.validate_json(text).to_domain()


def load_body(path: Path) -> ConvexBody:
    return parse_body(Path(path).read_text(encoding="utf-8"))


def load_function(path: Path) -> ConcaveFunction:
    return parse_function(Path(path).read_text(encoding="utf-8"))


def load_gauge(path: Path) -> ConvexGauge:
    return parse_gauge(Path(path).read_text(encoding="utf-8"))
