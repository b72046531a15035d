import pytest

from palettelab.graphcore import Family, GeneratorSpec, build_graph, gen_disjoint_cliques
from palettelab.harness.config import ExperimentConfig
from palettelab.harness.sweep import Sweeper
from palettelab.palette import PaletteMode, make_palette


def pytest_addoption(parser):
    parser.addoption(
        "--acceptance-seeds",
        type=int,
        action="store",
        default=50,
        help="trial count scale of slow acceptance runs",
    )


@pytest.fixture
def acceptance_seeds(request):
    return request.config.getoption("--acceptance-seeds")


@pytest.fixture
def triangle():
    return build_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def cycle5():
    return build_graph(5, [(i, (i + 1) % 5) for i in range(5)])


@pytest.fixture
def cliques():
    """Four disjoint copies of ``K_5``."""
    return gen_disjoint_cliques(4, 4)


@pytest.fixture
def cliques_palette(cliques):
    return make_palette(cliques, PaletteMode.IDENTICAL, cliques.D + 1)


@pytest.fixture
def clique_config():
    return ExperimentConfig(
        graph=GeneratorSpec(Family.DISJOINT_CLIQUES, m=4, D=4),
        grid=Sweeper((1.0, 3.0)),
        trials=2,
        seed=11,
    )
