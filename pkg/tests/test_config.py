import json
import logging

import pytest

from src.config import ConfigLoader
from src.config.config_loader import DEFAULT_IC_OPT_LIMIT, DEFAULT_LP_TOL, DEFAULT_STRUCTURED_LIMIT
from src.utils import LoggingManager


def test_defaults():
    loader = ConfigLoader(search=False)
    assert loader.config_file is None
    assert loader.get_tolerance_config()['lp'] == DEFAULT_LP_TOL
    assert loader.get_limits_config()['structured_tasks'] == DEFAULT_STRUCTURED_LIMIT
    assert loader.get_bench_config()['ic_opt_max_n'] == DEFAULT_IC_OPT_LIMIT
    assert loader.get_logging_config()['level'] == 'INFO'
    assert loader.get_config('missing') == {}


def test_environment_override(monkeypatch):
    monkeypatch.setenv('KSS_JOBS', '4')
    monkeypatch.setenv('KSS_EVAL_TOL', '1e-6')
    loader = ConfigLoader(search=False)
    assert loader.get_bench_config()['jobs'] == 4
    assert loader.get_tolerance_config()['eval'] == 1e-6


def test_bad_environment_value_is_ignored(monkeypatch, caplog):
    monkeypatch.setenv('KSS_STRUCTURED_LIMIT', 'many')
    with caplog.at_level(logging.WARNING):
        loader = ConfigLoader(search=False)
    assert loader.get_limits_config()['structured_tasks'] == DEFAULT_STRUCTURED_LIMIT
    assert 'KSS_STRUCTURED_LIMIT' in caplog.text


def test_json_file_is_merged(tmp_path, monkeypatch):
    path = tmp_path / 'custom.json'
    path.write_text(json.dumps({'limits': {'tabular_tasks': 2}, 'simulation': {'seed': 9}}))
    monkeypatch.setenv('KSS_TABULAR_LIMIT', '1')
    loader = ConfigLoader(str(path))
    limits = loader.get_limits_config()
    assert limits['tabular_tasks'] == 2
    assert limits['ic_opt_tasks'] == DEFAULT_IC_OPT_LIMIT
    assert loader.get_simulation_config()['seed'] == 9


def test_env_file(tmp_path):
    path = tmp_path / '.env'
    path.write_text('# local overrides\nKSS_LOG_LEVEL="DEBUG"\nKSS_MC_PATHS=500\nUNRELATED=1\n')
    loader = ConfigLoader(str(path))
    assert loader.get_logging_config()['level'] == 'DEBUG'
    assert loader.get_simulation_config()['paths'] == 500


def test_finds_config_in_working_directory(tmp_path):
    (tmp_path / 'config.json').write_text(json.dumps({'bench': {'timing': True}}))
    loader = ConfigLoader()
    assert loader.config_file.endswith('config.json')
    assert loader.get_bench_config()['timing'] is True


def test_broken_file_keeps_defaults(tmp_path, caplog):
    path = tmp_path / 'broken.json'
    path.write_text('{not json')
    with caplog.at_level(logging.ERROR):
        loader = ConfigLoader(str(path))
    assert loader.get_limits_config()['structured_tasks'] == DEFAULT_STRUCTURED_LIMIT
    assert 'Error loading config file' in caplog.text


def test_logging_goes_to_stderr_and_a_stamped_run_file(tmp_path, capsys):
    log_file = tmp_path / 'logs' / 'run.log'
    logger = LoggingManager.setup_logging({'level': 'DEBUG'}, log_file=str(log_file))
    try:
        assert logger.name == 'kss'
        logging.getLogger('src.agent.oracle').info("oracle message")
        captured = capsys.readouterr()
    finally:
        root = logging.getLogger()
        for handler in root.handlers[:]:
            handler.close()
            root.removeHandler(handler)
    assert captured.out == ''
    assert 'oracle message' in captured.err
    written = list((tmp_path / 'logs').glob('run_*.log'))
    assert len(written) == 1


def test_execution_time_is_logged_on_failure(caplog):
    @LoggingManager.log_execution_time
    def failing_oracle():
        raise ValueError("no witness")

    with caplog.at_level(logging.INFO):
        with pytest.raises(ValueError):
            failing_oracle()
    assert 'Failed failing_oracle after' in caplog.text
