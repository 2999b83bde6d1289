import pytest

from primechaos.config import CONFIG_ENV, Config
from primechaos.errors import ParseError


def test_defaults():
    cfg = Config()
    assert cfg.bin_width == 0.1 and cfg.window_step == 0.25 and cfg.segment_size == 1 << 20


def test_parse_values_and_comments():
    cfg = Config.parse("# comment\nbin_width = 0.2\nsegment-size = 65536  # inline\n"
                       "workers=3\nseed = 1e3\nmethod = li\n")
    assert cfg.bin_width == 0.2
    assert cfg.segment_size == 65536
    assert cfg.workers == 3 and isinstance(cfg.workers, int)
    assert cfg.seed == 1000
    assert cfg.method == "li"


def test_parse_errors_name_line():
    with pytest.raises(ParseError, match="c.cfg:2:"):
        Config.parse("bin_width = 0.2\nnonsense = 1\n", path="c.cfg")
    with pytest.raises(ParseError, match=":1:"):
        Config.parse("workers = many\n", path="c.cfg")
    with pytest.raises(ParseError):
        Config.parse("just a line\n")


def test_load_from_env(tmp_path, monkeypatch):
    p = tmp_path / "pc.cfg"
    p.write_text("window_step = 0.5\n")
    monkeypatch.setenv(CONFIG_ENV, str(p))
    assert Config.load().window_step == 0.5
    monkeypatch.setenv(CONFIG_ENV, str(tmp_path / "missing.cfg"))
    with pytest.raises(ParseError):
        Config.load()
    monkeypatch.delenv(CONFIG_ENV)
    assert Config.load() == Config()


def test_override_and_describe():
    cfg = Config().override(workers=4, seed=None)
    assert cfg.workers == 4 and cfg.seed == Config().seed
    text = cfg.describe()
    assert "workers=4" in text and "bin_width=0.1" in text
