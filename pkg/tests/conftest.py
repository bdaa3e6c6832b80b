import numpy as np
import pytest

from gridfactor import Country, PowerSystemSpec, Technology, TimeSeriesSet, synthesize_system
from gridfactor.model import HOURS_PER_YEAR


def wind_only_spec(load, cf, overnight=1182.0, lifetime=25.0):
    """Single country, single expandable wind technology, nothing else."""
    load = np.asarray(load, dtype=float)
    cf = np.asarray(cf, dtype=float)
    horizon = load.size
    tech = Technology(
        id="wind",
        kind="variable-renewable",
        overnight_cost_power=overnight,
        lifetime=lifetime,
        factor_group="wind",
    )
    country = Country(
        code="AA", yearly_load_total=float(load.sum()) * HOURS_PER_YEAR / horizon
    )
    return PowerSystemSpec(
        countries=(country,),
        technologies=(tech,),
        time_series=TimeSeriesSet(
            horizon=horizon,
            capacity_factors={("AA", "wind"): cf},
            load={"AA": load},
        ),
        interconnectors=(),
        interconnection_enabled=False,
    )


@pytest.fixture
def small_spec():
    return synthesize_system(seed=5, n_countries=2, horizon=48, correlation=-0.8)


@pytest.fixture
def three_country_spec():
    return synthesize_system(seed=11, n_countries=3, horizon=72, correlation=-0.5)


@pytest.fixture
def system_dir(tmp_path, small_spec):
    from gridfactor import write_system

    return write_system(small_spec, tmp_path / "system")
