import pytest

from surfising.fixtures import (
    BUNDLED,
    load_fixture,
    make_figure_eight,
    make_five_parallel,
    make_flower,
    make_square_patch,
    make_torus_grid,
    make_two_squares,
    validate_canonical,
)


@pytest.fixture(scope="session")
def triangle():
    return load_fixture("triangle")


@pytest.fixture(scope="session")
def k4():
    return load_fixture("k4")


@pytest.fixture(scope="session")
def theta():
    return load_fixture("theta")


@pytest.fixture(scope="session")
def two_squares():
    return load_fixture("two_squares")


@pytest.fixture(scope="session")
def torus22():
    return load_fixture("torus_2x2")


@pytest.fixture(scope="session")
def torus22_names():
    doc = make_torus_grid(2, 2)
    return {tuple(k.split(",")): v for k, v in doc["edge_names"].items()}


@pytest.fixture(scope="session")
def torus33():
    return load_fixture("torus_3x3")


@pytest.fixture(scope="session")
def bouquet():
    return load_fixture("genus2_bouquet")


@pytest.fixture(scope="session")
def patch33():
    return validate_canonical(make_square_patch(3, 3))


@pytest.fixture(scope="session")
def patch44():
    return validate_canonical(make_square_patch(4, 4))


@pytest.fixture(scope="session")
def figure_eight():
    return validate_canonical(make_figure_eight())


@pytest.fixture(scope="session")
def flower():
    return validate_canonical(make_flower())


@pytest.fixture(scope="session")
def five_parallel():
    return validate_canonical(make_five_parallel(), freeform_turning=True)
