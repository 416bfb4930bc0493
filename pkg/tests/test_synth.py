import numpy as np
import pytest

from vcnet import ingest, network, synth


def test_output_survives_ingest(tmp_path):
    inv, ex = synth.generate_synthetic_eventlog(60, 150, 3, 0.5, 0.4, 3, tmp_path)
    log = ingest.load_event_log(inv, ex)
    assert not log.rejected_counts
    assert len(log.firms) == 60 and len(log.companies) == 150
    invested = {(e.vc_id, e.company_id) for e in log.investments}
    assert all((e.vc_id, e.company_id) in invested for e in log.exits)
    assert all(e.exit_amount >= 0 and e.book_return >= 0 for e in log.exits)


def test_seed_determinism(tmp_path):
    a = synth.generate_synthetic_eventlog(30, 40, 2, 0.5, 0.5, 11, tmp_path / "a")
    b = synth.generate_synthetic_eventlog(30, 40, 2, 0.5, 0.5, 11, tmp_path / "b")
    for pa, pb in zip(a, b):
        assert open(pa, "rb").read() == open(pb, "rb").read()
    c = synth.synthesize(30, 40, 2, 0.5, 0.5, 12)
    assert c != synth.synthesize(30, 40, 2, 0.5, 0.5, 11)


def test_no_syndication_means_no_edges():
    inv, ex = synth.synthesize(20, 50, 3, 0.0, 0.3, 1)
    log = ingest.build_event_log(inv, ex)
    for mode in network.Mode:
        assert network.project(network.build_bipartite(log, mode)).n_edges == 0


def test_bad_arguments():
    with pytest.raises(ValueError):
        synth.synthesize(0, 5, 1, 0.5, 0.5, 0)
    with pytest.raises(ValueError):
        synth.synthesize(5, 5, 1, 1.5, 0.5, 0)


@pytest.mark.slow
def test_large_log_cardinalities():
    inv, ex = synth.synthesize(4985, 21421, 2, 0.6, 0.2, 2024)
    log = ingest.build_event_log(inv, ex)
    rows = dict(ingest.sample_report(log))
    assert rows["VC firms"] == "4,985"
    assert rows["Enterprises with VC investment"] == "21,421"
    g = network.remove_isolates(network.project(network.build_bipartite(log, "same-round")))
    assert 0 < g.n <= 4985
