"""Plot layout model."""

from typing import Literal

from pydantic import BaseModel, Field, model_validator

Ramp = Literal["mean", "std", "none"]


class PlotSpec(BaseModel):
    """Canvas geometry, title and colour ramp of one SVG figure."""

    width: int = Field(800, gt=0)
    height: int = Field(500, gt=0)
    margin_left: float = Field(50, ge=0)
    margin_right: float = Field(20, ge=0)
    margin_top: float = Field(40, ge=0)
    margin_bottom: float = Field(40, ge=0)
    title: str = ""
    ramp: Ramp = "none"
    source: str = Field("", description="Input data reference, written as an SVG comment")
    marker_radius: float = Field(2.0, gt=0)
    marker_opacity: float = Field(0.6, gt=0, le=1)

    @property
    def plot_width(self) -> float:
        return self.width - self.margin_left - self.margin_right

    @property
    def plot_height(self) -> float:
        return self.height - self.margin_top - self.margin_bottom

    @model_validator(mode="after")
    def check_plot_area(self) -> "PlotSpec":
        if self.plot_width <= 0 or self.plot_height <= 0:
            raise ValueError("margins leave no room for the plot area")
        return self
