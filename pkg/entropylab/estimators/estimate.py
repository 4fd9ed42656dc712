"""Result records shared by the estimators."""

from __future__ import annotations

from typing import List, Literal, Optional, Union

from pydantic import BaseModel, Field, model_validator

EstimateMethod = Literal["analytic", "plugin_mc", "knn", "convolution_mc"]


class EntropyEstimate(BaseModel):
    """An entropy (or entropy difference) in nats with its standard error."""

    value: float
    std_error: float = Field(default=0.0, ge=0.0)
    method: EstimateMethod
    sample_size: int = 0
    bias_note: Optional[str] = None

    @model_validator(mode="after")
    def analytic_is_exact(self) -> "EntropyEstimate":
        if self.method == "analytic" and self.std_error != 0.0:
            raise ValueError("analytic estimates carry no standard error")
        return self

    @classmethod
    def analytic(cls, value: float, note: Optional[str] = None) -> "EntropyEstimate":
        return cls(value=float(value), std_error=0.0, method="analytic", bias_note=note)

    def shifted(self, delta: float) -> "EntropyEstimate":
        """Same estimate moved by an exact amount (e.g. a log-determinant)."""
        return self.model_copy(update={"value": self.value + float(delta)})


class DensityEstimate(BaseModel):
    """MC density value(s) p̂(x) at one point or a batch of points."""

    value: Union[float, List[float]]
    std_error: Union[float, List[float]]
    log_value: Union[float, List[float]]
    m_inner: int


def combined_se(*errors: float) -> float:
    """Standard error of a sum of independent estimates."""
    return float(sum(e * e for e in errors) ** 0.5)
