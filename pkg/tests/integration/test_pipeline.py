#!/usr/bin/env python3
"""
End-to-end pipeline tests on a synthetic corpus with the oracle backend.

These run every stage (prep through report) in a temporary run directory.
"""

import json

import pytest
import yaml

from intentgen.config import reset_config
from intentgen.constants import SPLITS_META_FILE, SplitName
from intentgen.corpus import ingest, load_splits
from intentgen.harness import RunDirectory, run_pipeline
from intentgen.harness.reports import read_results
from intentgen.settings import load_settings
from intentgen.utils.errors import ConfigurationError, StageError
from intentgen.utils.logging import reset_logging


def _write_config(tmp_path, name="pipeline.yaml", **sections):
    config = {
        'seed': 7,
        'corpus': {
            'format': 'synthetic',
            'name': 'tiny',
            'synthetic_intents': 6,
            'synthetic_windows': 120,
            'sizes': [50, 30, 15, 20],
        },
        'tasks': {
            'tasks': ['intent', 'gen3', 'reorder', 'escalation', 'repetition'],
            'intent_k': 3,
            'reorder_ratio': 0.1,
        },
        'weak': {'backend_a': 'logreg', 'backend_b': 'nb'},
        'backend': {'kind': 'oracle'},
        'training': {'regimes': ['SUC', 'PART_SDC', 'ALL_SDC']},
        'inference': {'scenarios': ['u1', 'u2', 'u3', 'gen3', 'gen5x', 'rnd3']},
        'conflicts': {'modes': ['threshold', 'conflict-oracle']},
        'harness': {'run_dir': str(tmp_path / 'runs' / 'default')},
    }
    for section, values in sections.items():
        if isinstance(values, dict):
            config.setdefault(section, {}).update(values)
        else:
            config[section] = values
    path = tmp_path / name
    path.write_text(yaml.safe_dump(config), encoding='utf-8')
    return path


@pytest.fixture
def config_path(tmp_path):
    return _write_config(tmp_path)


class TestFullRun:
    """Every stage runs and leaves its artifacts in the run directory."""

    def test_all_stages_complete(self, config_path, tmp_path):
        """Test the manifest records every enabled stage."""
        directory = run_pipeline(config_path, tmp_path / 'run')

        manifest = directory.load_manifest()
        assert manifest['completed'] == ['prep', 'build-tasks', 'weaklabel', 'train',
                                         'eval', 'conflicts', 'report']
        assert manifest['seed'] == 7
        assert set(manifest['regimes']) == {'SUC', 'PART_SDC', 'ALL_SDC'}

    def test_artifacts_written(self, config_path, tmp_path):
        """Test splits, checkpoints, predictions and reports exist."""
        directory = run_pipeline(config_path, tmp_path / 'run')

        assert (directory.splits_dir / SPLITS_META_FILE).exists()
        assert (directory.splits_dir / 'dialogues.jsonl').exists()
        assert (directory.examples_dir / 'tasks.jsonl').exists()
        assert directory.config_path.exists()
        for model in ('SUC', 'PART_SDC', 'ALL_SDC'):
            assert (directory.checkpoint(model) / 'backend.json').exists()
            assert (directory.predictions_dir / f'{model}.jsonl').exists()
        for name in ('results.jsonl', 'main_table.md', 'main_table_delta.md', 'lookahead_table.md',
                     'conflicts_table.md', 'conflicts.jsonl', 'weak_label.json', 'accuracy_grid.csv'):
            assert directory.report(name).exists(), name
        assert not directory.report('error.json').exists()

    def test_dialogue_file_holds_training_side_only(self, config_path, tmp_path):
        """Test dialogues.jsonl keeps unsupervised and supervised dialogues, never dev or test."""
        directory = run_pipeline(config_path, tmp_path / 'run', stop_after='prep')

        splits = load_splits(directory.splits_dir)
        written = {d.id for d in ingest(directory.splits_dir / 'dialogues.jsonl', 'canonical')}
        training_side = (set(splits.dialogue_ids(SplitName.UNSUPERVISED))
                         | set(splits.dialogue_ids(SplitName.SUPERVISED)))
        held_out = set(splits.dialogue_ids(SplitName.DEV)) | set(splits.dialogue_ids(SplitName.TEST))
        assert written == training_side
        assert not written & held_out

    def test_run_log_written(self, config_path, tmp_path, monkeypatch):
        """Test stage progress is logged to run.log in the run directory."""
        monkeypatch.setenv('INTENTGEN_LOG_LEVEL', 'INFO')
        reset_config()
        reset_logging()

        directory = run_pipeline(config_path, tmp_path / 'run', stop_after='build-tasks')

        log = (directory.root / 'run.log').read_text(encoding='utf-8')
        assert "Stage prep: starting" in log
        assert "Stopping after build-tasks" in log
        assert "Stage train" not in log

    def test_saved_config_reloads_to_same_hash(self, config_path, tmp_path):
        """Test config.yaml in the run directory is the effective configuration."""
        directory = run_pipeline(config_path, tmp_path / 'run')

        assert load_settings(directory.config_path).hash == load_settings(config_path).hash
        assert directory.load_manifest()['config_hash'] == load_settings(config_path).hash

    def test_scenario_results(self, config_path, tmp_path):
        """Test SUC is scored on u1 only and the rest on every scenario."""
        directory = run_pipeline(config_path, tmp_path / 'run')
        results = read_results(directory.report('results.jsonl'))

        suc = [r for r in results if r.model == 'SUC']
        assert [r.scenario for r in suc] == ['u1']
        for model in ('PART_SDC', 'ALL_SDC'):
            scenarios = {r.scenario for r in results if r.model == model}
            assert scenarios == {'u1', 'u2', 'u3', 'gen3', 'gen5x', 'rnd3'}
        for result in results:
            assert result.d == 20
            assert 0 <= result.t <= result.d

    def test_deltas_against_suc_u1(self, config_path, tmp_path):
        """Test deltas are measured from the SUC u1 cell."""
        directory = run_pipeline(config_path, tmp_path / 'run')
        results = read_results(directory.report('results.jsonl'))

        baseline = next(r for r in results if r.model == 'SUC' and r.scenario == 'u1')
        assert baseline.delta_vs_baseline == pytest.approx(0.0)
        for result in results:
            assert result.delta_vs_baseline == pytest.approx(result.accuracy - baseline.accuracy)

    def test_weak_split_added(self, config_path, tmp_path):
        """Test weak labeling adds agreed windows drawn from the unsupervised split."""
        directory = run_pipeline(config_path, tmp_path / 'run')

        report = json.loads(directory.report('weak_label.json').read_text(encoding='utf-8'))
        assert report['total_unlabeled'] == 50
        assert 0 <= report['agreed'] <= 50
        meta = json.loads((directory.splits_dir / SPLITS_META_FILE).read_text(encoding='utf-8'))
        assert meta['weak'] == {'agreed': report['agreed'], 'total_unlabeled': 50}

    def test_main_table_layout(self, config_path, tmp_path):
        """Test the main table has one row per regime in regime order."""
        directory = run_pipeline(config_path, tmp_path / 'run')

        lines = directory.report('main_table.md').read_text(encoding='utf-8').splitlines()
        assert lines[0] == "| Model | 1-u | 2-u | 3-u | 3-5xg |"
        assert [line.split('|')[1].strip() for line in lines[2:]] == ['SUC', 'PART-SDC', 'ALL-SDC']
        # SUC has only the first-utterance column
        assert lines[2].endswith("| - | - | - |")

    def test_conflict_reports(self, config_path, tmp_path):
        """Test one conflict report per configured mode."""
        directory = run_pipeline(config_path, tmp_path / 'run')

        records = [json.loads(line) for line in
                   directory.report('conflicts.jsonl').read_text(encoding='utf-8').splitlines()]
        assert [r['mode'] for r in records] == ['threshold', 'conflict_oracle']
        for record in records:
            assert record['mistakes_after'] == record['mistakes_before'] - record['fixed'] + record['broken']


class TestDeterminism:
    """Equal configurations give identical results."""

    def test_two_runs_identical(self, config_path, tmp_path):
        """Test reports and predictions match byte for byte across run directories."""
        first = run_pipeline(config_path, tmp_path / 'first')
        second = run_pipeline(config_path, tmp_path / 'second')

        for name in ('results.jsonl', 'main_table.md', 'lookahead_table.md', 'conflicts.jsonl'):
            assert first.report(name).read_bytes() == second.report(name).read_bytes(), name
        for model in ('SUC', 'PART_SDC', 'ALL_SDC'):
            assert ((first.predictions_dir / f'{model}.jsonl').read_bytes()
                    == (second.predictions_dir / f'{model}.jsonl').read_bytes())

    def test_resume_after_train(self, config_path, tmp_path):
        """Test an interrupted run resumes to the same results as an uninterrupted one."""
        partial = run_pipeline(config_path, tmp_path / 'resumed', stop_after='train')
        manifest = partial.load_manifest()
        assert manifest['completed'] == ['prep', 'build-tasks', 'weaklabel', 'train']
        assert not partial.report('results.jsonl').exists()

        resumed = run_pipeline(config_path, tmp_path / 'resumed')
        fresh = run_pipeline(config_path, tmp_path / 'fresh')

        assert resumed.load_manifest()['completed'][-1] == 'report'
        assert (resumed.report('results.jsonl').read_bytes()
                == fresh.report('results.jsonl').read_bytes())

    def test_rerun_of_finished_run_is_a_no_op(self, config_path, tmp_path):
        """Test re-running a complete run leaves its results untouched."""
        directory = run_pipeline(config_path, tmp_path / 'run')
        before = directory.report('results.jsonl').read_bytes()

        run_pipeline(config_path, tmp_path / 'run')

        assert directory.report('results.jsonl').read_bytes() == before


class TestFailures:
    """Configuration errors stop the run early; stage errors are recorded."""

    def test_invalid_config_rejected_before_work(self, tmp_path):
        """Test an unknown key fails validation without creating the run directory."""
        path = _write_config(tmp_path, corpus={'colour': 'blue'})

        with pytest.raises(ConfigurationError):
            run_pipeline(path, tmp_path / 'run')

        assert not (tmp_path / 'run').exists()

    def test_unknown_stop_stage(self, config_path, tmp_path):
        """Test an unknown --stop-after stage is a configuration error."""
        with pytest.raises(ConfigurationError, match="unknown stage"):
            run_pipeline(config_path, tmp_path / 'run', stop_after='deploy')

        assert not (tmp_path / 'run').exists()

    def test_other_config_in_same_directory(self, config_path, tmp_path):
        """Test a run directory refuses a different configuration."""
        run_pipeline(config_path, tmp_path / 'run', stop_after='prep')
        other = _write_config(tmp_path, name='other.yaml', seed=8)

        with pytest.raises(ConfigurationError, match="fresh run directory"):
            run_pipeline(other, tmp_path / 'run')

    def test_stage_failure_writes_error_record(self, tmp_path):
        """Test a failing stage raises StageError and leaves reports/error.json."""
        path = _write_config(tmp_path, corpus={'format': 'canonical',
                                               'path': str(tmp_path / 'missing.jsonl')})

        with pytest.raises(StageError) as exc_info:
            run_pipeline(path, tmp_path / 'run')

        assert exc_info.value.stage == 'prep'
        directory = RunDirectory(tmp_path / 'run')
        record = json.loads(directory.report('error.json').read_text(encoding='utf-8'))
        assert record['stage'] == 'prep'
        assert record['error_type'] == 'UsageError'
        assert 'missing.jsonl' in record['message']
        assert directory.load_manifest()['completed'] == []
        assert "stage 'prep' failed" in (directory.root / 'run.log').read_text(encoding='utf-8')

    def test_stale_error_cleared_on_success(self, config_path, tmp_path):
        """Test a successful rerun removes an old error record."""
        directory = RunDirectory(tmp_path / 'run')
        run_pipeline(config_path, directory.root, stop_after='prep')
        directory.write_error({'stage': 'train', 'error_type': 'TrainingError', 'message': 'boom'})

        run_pipeline(config_path, directory.root)

        assert not directory.report('error.json').exists()


class TestSweep:
    """The reordering-ratio sweep stage."""

    def test_sweep_reports(self, tmp_path):
        """Test sweep points and the plot are written when ratios are configured."""
        path = _write_config(tmp_path, harness={'sweep_ratios': [0.0, 0.5]},
                             training={'regimes': ['SUC', 'PART_SDC']},
                             conflicts={'enabled': False})

        directory = run_pipeline(path, tmp_path / 'run', stop_after='sweep')

        lines = directory.report('sweep.jsonl').read_text(encoding='utf-8').splitlines()
        points = [json.loads(line) for line in lines]
        assert [p['reorder_ratio'] for p in points] == [0.0, 0.5]
        assert all(p['regime'] == 'PART_SDC' for p in points)
        assert all(0.0 <= p['dev_accuracy_u3'] <= 1.0 for p in points)
        assert directory.report('sweep.png').exists()


class TestAblation:
    """The auxiliary-task importance stage."""

    def test_ablation_stage(self, tmp_path):
        """Test one record per task plus all tasks, with deltas from the eval baseline."""
        path = _write_config(tmp_path, harness={'ablation_tasks': ['gen3', 'reorder', 'escalation']},
                             training={'regimes': ['SUC', 'PART_SDC']},
                             conflicts={'enabled': False})

        directory = run_pipeline(path, tmp_path / 'run')

        completed = directory.load_manifest()['completed']
        assert completed.index('eval') < completed.index('ablation') < completed.index('report')
        results = read_results(directory.report('ablation.jsonl'))
        assert [r.model for r in results] == ['gen3', 'reorder', 'escalation', 'all']
        assert all(r.scenario == 'u3' and r.d == 20 for r in results)
        assert all(r.delta_vs_baseline is not None for r in results)
        lines = directory.report('ablation_table.md').read_text(encoding='utf-8').splitlines()
        assert lines[0] == "| Tasks | 3-u | Δ |"
        assert [line.split('|')[1].strip() for line in lines[2:]] == [
            'Utterance generation', 'Reordering', 'Escalation', 'All tasks']

    def test_disabled_by_default(self, config_path, tmp_path):
        directory = run_pipeline(config_path, tmp_path / 'run')

        assert 'ablation' not in directory.load_manifest()['completed']
        assert not directory.report('ablation.jsonl').exists()
