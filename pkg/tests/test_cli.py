import json

import pytest

from barriercover.cli import main
from barriercover.instance_io import InstanceIO
from tests.conftest import MIDDLE_Y, make_instance


@pytest.fixture
def worked_path(data_dir):
    return str(data_dir / 'worked.json')


@pytest.fixture
def twelfth_path(tmp_path):
    instance = make_instance(
        13, 140 / 12,
        [(18 / 12, 10 / 12), (78 / 12, MIDDLE_Y / 12), (138 / 12, 10 / 12)])
    path = tmp_path / 'twelfth.json'
    path.write_text(InstanceIO.write_instance(instance), encoding='utf-8')
    return str(path)


def test_solve_worked_example(capsys, worked_path):
    assert main(['solve', '--instance', worked_path]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document['algorithm'] == 'A2'
    assert document['feasible'] is True
    assert document['objective'] == pytest.approx(419.163, abs=1e-3)
    assert [s['b'] for s in document['segments']] == [68.0, 88.0, 156.0]


def test_solve_unbounded_with_a1(capsys, worked_path):
    assert main(['solve', '--instance', worked_path, '--algorithm', 'a1']) == 0
    document = json.loads(capsys.readouterr().out)
    assert document['algorithm'] == 'A1'
    assert document['drones_used'] == 4


def test_solve_writes_files(tmp_path, worked_path):
    out = tmp_path / 'cover.json'
    svg = tmp_path / 'cover.svg'
    assert main(['solve', '--instance', worked_path, '--out', str(out), '--svg', str(svg)]) == 0
    assert json.loads(out.read_text())['parts'] == 3
    assert svg.read_text().count('<polygon') == 3


def test_a2_without_a_cap_is_a_usage_error(capsys, data_dir):
    status = main(['solve', '--instance', str(data_dir / 'small.json'), '--algorithm', 'a2'])
    assert status == 1
    assert 'usage error' in capsys.readouterr().err


def test_gap_is_infeasible(capsys, data_dir):
    assert main(['solve', '--instance', str(data_dir / 'gap.json')]) == 2
    document = json.loads(capsys.readouterr().out)
    assert document['feasible'] is False
    assert document['diagnostics']['gap'] == [0.0, 10.0]


def test_cap_below_minimum_is_infeasible(capsys, worked_path):
    assert main(['solve', '--instance', worked_path, '--max-drones', '2']) == 2
    document = json.loads(capsys.readouterr().out)
    assert document['diagnostics']['n_min'] == 3


def test_grid_scale(capsys, tmp_path):
    path = tmp_path / 'single.json'
    path.write_text(InstanceIO.write_instance(make_instance(4, 10, [(0, 0)])))
    assert main(['solve', '--instance', str(path), '--scale', '2']) == 0
    document = json.loads(capsys.readouterr().out)
    assert document['objective'] == pytest.approx(8.0)
    assert document['diagnostics']['grid_scale'] == 2


def test_missing_file(capsys, tmp_path):
    assert main(['solve', '--instance', str(tmp_path / 'absent.json')]) == 1
    assert 'error' in capsys.readouterr().err


def test_bad_document(capsys, tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text('{"barrier_length": 4, "path_budget": -1, "depots": []}')
    assert main(['solve', '--instance', str(path)]) == 1
    assert 'path_budget' in capsys.readouterr().err


def test_tables_for_one_depot(capsys, worked_path):
    assert main(['tables', '--instance', worked_path, '--depot', '2']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'depot,a,b,n_i,f_i'
    assert '2,68,88,1,140.000000000' in lines
    assert '2,0,156,inf,inf' in lines


def test_tables_unknown_depot(worked_path):
    assert main(['tables', '--instance', worked_path, '--depot', '9']) == 1


def test_bad_thread_setting(monkeypatch, worked_path):
    monkeypatch.setenv('BRS_THREADS', 'many')
    assert main(['tables', '--instance', worked_path]) == 1


def test_oracle_compare(capsys, twelfth_path):
    assert main(['oracle', '--instance', twelfth_path, '--compare']) == 0
    report = json.loads(capsys.readouterr().out)
    assert report['feasible'] is True
    assert report['agree'] is True
    assert report['objective'] == pytest.approx(report['solver_objective'], abs=1e-6)
    assert report['partition'][0] == 0 and report['partition'][-1] == 13


def test_oracle_refuses_long_barriers(worked_path):
    assert main(['oracle', '--instance', worked_path]) == 1


def test_render(capsys, tmp_path, worked_path):
    out = tmp_path / 'cover.json'
    assert main(['solve', '--instance', worked_path, '--out', str(out)]) == 0
    assert main(['render', '--instance', worked_path, '--solution', str(out)]) == 0
    assert capsys.readouterr().out.count('<polygon') == 3


def test_render_rejects_an_infeasible_document(capsys, tmp_path, data_dir):
    out = tmp_path / 'gap.json'
    gap = str(data_dir / 'gap.json')
    assert main(['solve', '--instance', gap, '--out', str(out)]) == 2
    assert main(['render', '--instance', gap, '--solution', str(out)]) == 1


def test_bench(capsys):
    assert main(['bench', '--sizes', '16', '32', '--depots', '2', '--cap', '6']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'L,m,n,strategy,build_time_s,query_count,solve_time_s,objective'
    assert len(lines) == 5


def test_subcommand_is_required():
    with pytest.raises(SystemExit):
        main([])
