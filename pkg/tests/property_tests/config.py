from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from syssynth.gen import GenSpec


def configure_hypothesis():
    # reproducible examples; solving is slow enough to trip the deadline
    settings.register_profile(
        "syssynth",
        derandomize=True,
        deadline=None,
        max_examples=100,
        suppress_health_check=[HealthCheck.too_slow],
    )
    settings.load_profile("syssynth")


@st.composite
def tiny_specs(draw, context_dims: int = 1) -> GenSpec:
    """
    Generator specs small enough for the exhaustive oracle: at most three
    devices, so that routes can take two hops, and two tasks over one
    dimension of each kind. That stays within 23 structure variables.
    """
    devices = draw(st.integers(1, 3))
    tasks = draw(st.integers(0, 2))
    return GenSpec(
        seed=draw(st.integers(0, 2**32 - 1)),
        devices=devices,
        tasks=tasks,
        modules=draw(st.integers(1, devices + tasks)),
        resources=1,
        transports=1,
        context_dims=context_dims,
        function_dims=1,
        message_types=1,
        semantic_dims=1,
        port_match_probability=draw(st.sampled_from([0.0, 0.5, 1.0])),
        compatibility_probability=draw(st.sampled_from([0.5, 0.8, 1.0])),
        context_probability=draw(st.sampled_from([0.0, 0.5])),
        module_size_distribution=draw(st.sampled_from(["uniform", "geometric"])),
        tightness=draw(st.sampled_from([0.0, 0.3, 0.7, 1.0])),
    )
