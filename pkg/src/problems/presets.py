"""
Problem presets "bsb" and "bsb-osc", selectable from run configs.
"""

from src.problems.bsb import BsbParams, OscBsbParams, make_bsb, make_osc_bsb
from src.problems.definition import ProblemDefinition
from src.registry.preset_metadata import PresetKind
from src.registry.preset_registry import register_preset


BSB_DEFAULTS = {"d": 100, "T": 1.0, "r": 0.05, "sigma": 0.4}


@register_preset(
    preset_id="bsb",
    name="Black-Scholes-Barenblatt",
    description="Quadratic terminal data, driver r(u - Du.x), closed-form solution",
    kind=PresetKind.PROBLEM,
    defaults=BSB_DEFAULTS,
    tags=["benchmark", "closed_form"]
)
def bsb_preset(d: int, T: float, r: float, sigma: float) -> ProblemDefinition:
    return make_bsb(BsbParams(d=d, T=T, r=r, sigma_scalar=sigma))


@register_preset(
    preset_id="bsb-osc",
    name="Oscillatory Black-Scholes-Barenblatt",
    description="BSB with a time-oscillatory factor in the terminal data and driver",
    kind=PresetKind.PROBLEM,
    defaults={**BSB_DEFAULTS, "alpha": 0.025, "beta": 0.25, "gamma": 32.0},
    tags=["benchmark", "closed_form", "oscillatory"]
)
def osc_bsb_preset(
        d: int, T: float, r: float, sigma: float,
        alpha: float, beta: float, gamma: float
) -> ProblemDefinition:
    return make_osc_bsb(OscBsbParams(
        d=d, T=T, r=r, sigma_scalar=sigma, alpha=alpha, beta=beta, gamma=gamma
    ))
