import pytest

from artmap_seq.ensemble import PipelineConfig, build_ensemble
from artmap_seq.ga_selection import GaConfig
from artmap_seq.sequence_io import split_datasets
from artmap_seq.synthetic import generate_families

SMALL = PipelineConfig(population_size=8, candidate_pool=6, ga=GaConfig(generations=10), seed=4)


def small_split(seed=0, families=3, per_db=(6, 3, 4, 4, 4), separation=0.3):
    """Tiny corpus: D1, Dv, D2, D3, Dt with ``per_db`` sequences per family."""
    names = ["D1", "Dv", "D2", "D3", "Dt"]
    fams = {f"Fam{k}": sum(per_db) for k in range(families)}
    seqs = generate_families(fams, seed=seed, separation=separation, mean_length=120,
                             length_sd=20, subfamilies=4)
    counts = {f: dict(zip(names, per_db)) for f in fams}
    return split_datasets(seqs, counts, seed)


@pytest.fixture(scope="session")
def partition():
    return small_split()


@pytest.fixture(scope="session")
def built(partition):
    return build_ensemble(partition.train_databases[0], partition.validation, SMALL)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
