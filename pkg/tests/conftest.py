import random

import pytest

from rbline.core import GENERIC, Instance, Meta, Request


def make_instance(sites, n_sites=None, start=0, step_per_arrival=False):
    """Ad-hoc instance from a list of sites, all generic requests."""
    if n_sites is None:
        n_sites = max(sites, default=1) + 1
    arrivals = tuple(
        Request(id=i, site=s, step=i if step_per_arrival else 0, kind=GENERIC)
        for i, s in enumerate(sites)
    )
    return Instance(n_sites=n_sites, arrivals=arrivals, meta=Meta(start_site=start))


def take_prefix(instance, k):
    """First k arrivals; phase metadata is dropped (the prefix breaks it)."""
    meta = Meta(beta=instance.meta.beta, start_site=instance.meta.start_site)
    return Instance(n_sites=instance.n_sites, arrivals=instance.arrivals[:k], meta=meta)


def random_corpus(count, max_requests=9, max_sites=6, seed=20240817):
    """Seeded random instances for oracle comparison tests."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randrange(1, max_requests + 1)
        sites = [rng.randrange(max_sites) for _ in range(n)]
        out.append(make_instance(sites, n_sites=max_sites, start=rng.randrange(max_sites)))
    return out


@pytest.fixture(scope="session")
def ell2_phase():
    from rbline.genesis import build_instance

    return build_instance(2, 1, 1)


@pytest.fixture(scope="session")
def ell2_two_phases():
    from rbline.genesis import build_instance

    return build_instance(2, 2, 1)
