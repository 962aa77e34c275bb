import json

import pytest

from fourier_minors import IndexSet, minor_record, ring_new, scan_all, witness_sweep
from fourier_minors.cli import (main, minor_record_payload, parse_minor_record,
                                parse_run_record, parse_scan_report,
                                parse_search_outcome, parse_theorem1,
                                parse_witness_plans, scan_report_payload,
                                search_outcome_payload, witness_plans_payload)
from fourier_minors.search import SearchConfig, find_good_permutation
from fourier_minors.theorems import verify_theorem1


def run(args):
    return main(args)


def read_record(path):
    return parse_run_record(path.read_text().strip())


def strip_wall_time(doc):
    doc = json.loads(json.dumps(doc))

    def scrub(node):
        if isinstance(node, dict):
            node.pop("wall_time", None)
            for v in node.values():
                scrub(v)
        elif isinstance(node, list):
            for v in node:
                scrub(v)
    scrub(doc)
    return doc


def test_det_singular_and_record(tmp_path, capsys):
    out = tmp_path / "det.jsonl"
    assert run(["det", "--n", "4", "--set", "0,2", "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "singular" in stdout and "totient=2" in stdout
    record = read_record(out)
    assert record.command == "det"
    rec = parse_minor_record(record.payload)
    assert rec.singular and rec.index_set.members == (0, 2)
    direct = minor_record(ring_new(4), IndexSet.of(4, [0, 2]))
    assert rec == direct


def test_det_nonsingular():
    assert run(["det", "--n", "4", "--set", "0,1,2"]) == 0


def test_det_bad_indices_is_usage_error(capsys):
    assert run(["det", "--n", "4", "--set", "0,9"]) == 1
    assert run(["det", "--n", "4", "--set", "a,b"]) == 1
    assert run(["det", "--n", "4", "--set", ""]) == 1
    capsys.readouterr()


def test_unknown_flag_is_usage_error(capsys):
    assert run(["det", "--n", "4"]) == 1
    assert run(["nonsense"]) == 1
    capsys.readouterr()


def test_scan_record_round_trip(tmp_path, capsys):
    out = tmp_path / "scan.jsonl"
    assert run(["scan", "--n", "9", "--out", str(out)]) == 0
    record = read_record(out)
    report = parse_scan_report(record.payload)
    direct = scan_all(9)
    assert report.counts == direct.counts
    assert report.exemplars == direct.exemplars
    assert record.exact_mode
    capsys.readouterr()


def test_scan_prefilter_flag(tmp_path, capsys):
    out = tmp_path / "scan.jsonl"
    assert run(["scan", "--n", "15", "--prefilter", "--out", str(out)]) == 0
    record = read_record(out)
    assert not record.exact_mode
    assert parse_scan_report(record.payload).prefilter_hits > 0
    capsys.readouterr()


def test_scan_ceiling_precondition(capsys):
    assert run(["scan", "--n", "23"]) == 2
    capsys.readouterr()


def test_scan_determinism_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert run(["scan", "--n", "12", "--out", str(a)]) == 0
    assert run(["scan", "--n", "12", "--out", str(b)]) == 0
    da = strip_wall_time(json.loads(a.read_text()))
    db = strip_wall_time(json.loads(b.read_text()))
    assert json.dumps(da, sort_keys=True) == json.dumps(db, sort_keys=True)
    capsys.readouterr()


def test_witness_single_and_all(tmp_path, capsys):
    out = tmp_path / "w.jsonl"
    assert run(["witness", "--n", "9", "--r", "3", "--out", str(out)]) == 0
    plans = parse_witness_plans(read_record(out).payload)
    assert len(plans) == 1 and plans[0].index_set.members == (0, 3, 6)
    assert run(["witness", "--n", "8", "--all", "--out", str(out)]) == 0
    plans = parse_witness_plans(read_record(out).payload)
    assert plans == witness_sweep(8)
    capsys.readouterr()


def test_witness_requires_r_or_all(capsys):
    assert run(["witness", "--n", "8"]) == 1
    capsys.readouterr()


def test_witness_square_free_precondition(capsys):
    assert run(["witness", "--n", "10", "--r", "2"]) == 2
    capsys.readouterr()


def test_theorem1_single_and_range(tmp_path, capsys):
    out = tmp_path / "t.jsonl"
    assert run(["theorem1", "--n", "6", "--out", str(out)]) == 0
    reports = parse_theorem1(read_record(out).payload)
    direct = verify_theorem1(6)
    assert reports[0].passed and reports[0].certified_sizes == direct.certified_sizes
    assert run(["theorem1", "--range", "5..12", "--out", str(out)]) == 0
    record = read_record(out)
    moduli = [r["modulus"] for r in record.payload["reports"]]
    assert moduli == [5, 6, 7, 10, 11]
    assert record.payload["skipped_not_square_free"] == [8, 9, 12]
    stdout = capsys.readouterr().out
    assert "skipped (not square-free)" in stdout


def test_theorem1_non_square_free_precondition(capsys):
    assert run(["theorem1", "--n", "12"]) == 2
    capsys.readouterr()


def test_perm_search_found(tmp_path, capsys):
    out = tmp_path / "s.jsonl"
    assert run(["perm-search", "--n", "4", "--out", str(out)]) == 0
    outcome = parse_search_outcome(read_record(out).payload)
    direct = find_good_permutation(SearchConfig(4))
    assert outcome.found == direct.found
    capsys.readouterr()


def test_perm_search_budget_inconclusive(tmp_path, capsys):
    out = tmp_path / "s.jsonl"
    code = run(["perm-search", "--n", "16", "--budget", "0.2", "--out", str(out)])
    assert code == 3
    outcome = parse_search_outcome(read_record(out).payload)
    assert outcome.found is None and not outcome.exhausted
    assert "INCONCLUSIVE" in capsys.readouterr().out


def test_perm_search_resume_flag(tmp_path, capsys):
    ckpt = tmp_path / "c.jsonl"
    assert run(["perm-search", "--n", "6", "--resume", str(ckpt)]) == 0
    assert ckpt.exists()
    assert run(["perm-search", "--n", "6", "--resume", str(ckpt)]) == 0
    capsys.readouterr()


def test_run_record_round_trip_equality(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    for args in (["det", "--n", "9", "--set", "0,3,6"],
                 ["scan", "--n", "8"],
                 ["witness", "--n", "12", "--all"],
                 ["theorem1", "--n", "10"],
                 ["perm-search", "--n", "5"]):
        assert run(args + ["--out", str(out)]) == 0
        record = read_record(out)
        assert parse_run_record(record.to_json_line()) == record
    capsys.readouterr()


def test_payload_kind_mismatch_rejected():
    from fourier_minors.cli import RunRecord
    with pytest.raises(ValueError):
        RunRecord(command="scan", version="0", params={}, config={},
                  payload={"kind": "minor_record"}, exact_mode=True, wall_time=0.0)


def test_payload_builders_invert():
    rec = minor_record(ring_new(9), IndexSet.of(9, [0, 3, 6]))
    assert parse_minor_record(minor_record_payload(rec)) == rec
    rep = scan_all(6)
    assert parse_scan_report(scan_report_payload(rep)) == rep
    plans = witness_sweep(9)
    assert parse_witness_plans(witness_plans_payload(plans)) == plans
    outcome = find_good_permutation(SearchConfig(5))
    assert parse_search_outcome(search_outcome_payload(outcome)) == outcome
