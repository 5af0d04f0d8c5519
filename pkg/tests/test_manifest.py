import hashlib
import json

import pytest

from ewp_scs import __version__
from ewp_scs.errors import InputError, InvariantError
from ewp_scs.manifest import MANIFEST_NAME, OutputDirError, RunManifest, file_digest, load_manifest


def test_file_digest(tmp_path):
    path = tmp_path / "data.csv"
    path.write_bytes(b"A,B\n1,2\n")
    assert file_digest(path) == hashlib.sha256(b"A,B\n1,2\n").hexdigest()


def test_write_and_load(tmp_path):
    source = tmp_path / "in.csv"
    source.write_text("A\n1\n2\n")
    manifest = RunManifest(command="scs", parameters={"alpha": 0.05}, seeds={"master": 42})
    manifest.add_input(source)
    path = manifest.write(tmp_path / "out")
    assert path.name == MANIFEST_NAME

    data = json.loads(path.read_text())
    assert data["version"] == __version__
    assert data["inputs"][str(source)] == file_digest(source)
    assert data["duration_seconds"] >= 0

    loaded = load_manifest(path)
    assert loaded.reproducible_view() == manifest.reproducible_view()


def test_reproducible_view_ignores_timestamps():
    a = RunManifest(command="theory", parameters={"T": [250]})
    b = RunManifest(command="theory", parameters={"T": [250]}, started_at="2000-01-01T00:00:00+00:00")
    a.complete()
    assert a.reproducible_view() == b.reproducible_view()
    assert "started_at" not in a.reproducible_view()


def test_one_command_per_directory(tmp_path):
    RunManifest(command="scs").write(tmp_path)
    RunManifest(command="scs").write(tmp_path)
    with pytest.raises(InvariantError, match="belongs to command 'scs'"):
        RunManifest(command="metrics").write(tmp_path)


def test_claim_before_writing(tmp_path):
    RunManifest(command="scs").claim(tmp_path / "fresh")
    assert not (tmp_path / "fresh").exists()

    RunManifest(command="scs").write(tmp_path)
    RunManifest(command="scs").claim(tmp_path)
    with pytest.raises(OutputDirError, match="belongs to command 'scs'") as info:
        RunManifest(command="metrics").claim(tmp_path)
    assert isinstance(info.value, InputError)
    assert info.value.exit_code == 2


def test_claim_rejects_foreign_manifest_file(tmp_path):
    (tmp_path / MANIFEST_NAME).write_text("[1, 2]")
    with pytest.raises(OutputDirError, match="not an EWP-SCS manifest"):
        RunManifest(command="scs").claim(tmp_path)


def test_rerun_is_logged_as_reproduced(tmp_path, caplog):
    RunManifest(command="theory", parameters={"T": 250}).write(tmp_path)
    with caplog.at_level("INFO", logger="ewp_scs.manifest"):
        RunManifest(command="theory", parameters={"T": 250}).write(tmp_path)
        RunManifest(command="theory", parameters={"T": 1000}).write(tmp_path)
    assert "Run reproduces" in caplog.text
    assert "Replacing the previous theory run" in caplog.text
