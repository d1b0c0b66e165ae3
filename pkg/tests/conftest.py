import shutil

import pytest

from themetrek.synthdata import SMALL_PROFILE, generate, write_dataset


@pytest.fixture(scope="session")
def small_workspace_dir(tmp_path_factory):
    """One small synthetic workspace shared by workspace/CLI/service tests."""
    out = tmp_path_factory.mktemp("workspace")
    write_dataset(generate(SMALL_PROFILE, seed=7), out)
    return out


@pytest.fixture()
def workspace_copy(small_workspace_dir, tmp_path):
    """A private copy for tests that mutate files or need a cold cache."""
    dst = tmp_path / "ws"
    shutil.copytree(small_workspace_dir, dst)
    cache = dst / "cache"
    if cache.exists():
        shutil.rmtree(cache)
    return dst
