import pytest

from dtasim import (
    RangeSpec,
    ResourcePool,
    Scenario,
    TraceModel,
    TrafficClass,
    TrafficKind,
    TrafficObservation,
    load_default_scenario,
)


def make_class(
    id=0,
    name=None,
    priority=0.5,
    demanded_bandwidth=10.0,
    latency_sensitivity=2.0,
    max_latency=50.0,
    max_jitter=5.0,
    max_packet_loss=0.05,
):
    return TrafficClass(
        id=id,
        name=name or f"class{id}",
        kind=TrafficKind.CUSTOM,
        priority=priority,
        demanded_bandwidth=demanded_bandwidth,
        latency_sensitivity=latency_sensitivity,
        max_latency=max_latency,
        max_jitter=max_jitter,
        max_packet_loss=max_packet_loss,
    )


def make_obs(
    class_id=0,
    offered_bandwidth=10.0,
    latency=30.0,
    jitter=2.0,
    packet_loss=0.0,
    demand=10.0,
    load=0.5,
):
    return TrafficObservation(
        class_id=class_id,
        offered_bandwidth=offered_bandwidth,
        latency=latency,
        jitter=jitter,
        packet_loss=packet_loss,
        demand=demand,
        load=load,
    )


def make_symmetric(n, pool_total=50.0, **kwargs):
    classes = [make_class(id=i, **kwargs) for i in range(n)]
    observations = [make_obs(class_id=i) for i in range(n)]
    pool = ResourcePool(total=pool_total, n_classes=n)
    return classes, observations, pool


def make_scenario(
    n=2,
    pool_total=20.0,
    epochs=30,
    seed=11,
    trace_model=TraceModel.UNIFORM_SAMPLE,
    ranges=None,
    initial_load=None,
    walk_step_fraction=0.05,
    priorities=None,
    **class_kwargs,
):
    class_kwargs.setdefault("demanded_bandwidth", 5.0)
    classes = tuple(
        make_class(
            id=i,
            priority=priorities[i] if priorities else 0.5,
            **class_kwargs,
        )
        for i in range(n)
    )
    spec = {
        "bandwidth": RangeSpec(5.0, 15.0, 50),
        "latency": RangeSpec(10.0, 100.0, 50),
        "jitter": RangeSpec(0.1, 10.0, 50),
        "packet_loss": RangeSpec(0.0, 0.05, 50),
        "demand": RangeSpec(5.0, 15.0, 50),
    }
    if ranges:
        spec.update(ranges)
    return Scenario(
        classes=classes,
        pool_total=pool_total,
        epochs=epochs,
        seed=seed,
        trace_model=trace_model,
        ranges=spec,
        initial_load=tuple(initial_load) if initial_load else (0.5,) * n,
        walk_step_fraction=walk_step_fraction,
    )


@pytest.fixture(scope="session")
def default_scenario():
    return load_default_scenario()
