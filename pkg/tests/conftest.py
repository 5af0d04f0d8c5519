import numpy as np
import pytest

from ewp_scs import config as config_module
from ewp_scs.config import ConfigManager
from ewp_scs.panel import ReturnPanel

from oracles import random_panel_returns


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Keep every test away from ~/.ewp_scs and the working directory."""
    for var in ("EWP_SCS_THREADS", "EWP_SCS_OUT_DIR", "EWP_SCS_VERBOSE", "NO_COLOR"):
        monkeypatch.delenv(var, raising=False)
    manager = ConfigManager(
        user_file=tmp_path / "home" / "settings.json",
        local_file=tmp_path / "project" / ".ewp_scs.json",
    )
    manager.load()
    manager.set("execution.threads", 1)
    manager.set("execution.out_dir", str(tmp_path / "out"))
    monkeypatch.setattr(config_module, "_config", manager)
    return manager


@pytest.fixture
def make_panel():
    def _make(seed: int = 0, T: int = 50, N: int = 4) -> ReturnPanel:
        returns = random_panel_returns(seed, T, N)
        return ReturnPanel(returns, [f"A{j}" for j in range(N)])
    return _make


@pytest.fixture
def panel(make_panel):
    return make_panel(seed=7, T=60, N=5)


@pytest.fixture
def returns_csv(tmp_path, panel):
    path = tmp_path / "returns.csv"
    lines = [",".join(panel.asset_labels)]
    lines += [",".join(repr(float(v)) for v in row) for row in np.asarray(panel.returns)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
