import pytest

from shapbn.discrete import DiscreteBayesNet
from shapbn.errors import InputError
from shapbn.gaussian import LinearGaussianSem
from shapbn.prevalence import (
    SimConfig,
    evaluate_network,
    generate_random_network,
    run_prevalence,
)


def small_config(**overrides):
    base = dict(
        n_vars=5,
        edge_probability=0.4,
        parameterization="discrete",
        n_networks=20,
        seed=123,
    )
    base.update(overrides)
    return SimConfig(**base)


class TestSimConfig:
    def test_defaults(self):
        cfg = SimConfig()
        assert cfg.n_vars == 6
        assert cfg.parameterization == "discrete"

    def test_json_roundtrip(self):
        import json

        cfg = small_config(parameterization="gaussian")
        again = SimConfig.from_json(json.dumps(cfg.to_dict()))
        assert again == cfg

    @pytest.mark.parametrize(
        "overrides",
        [
            {"n_vars": 1},
            {"n_vars": 13},
            {"edge_probability": 1.5},
            {"parameterization": "boolean"},
            {"min_cpt_prob": 0.0},
            {"min_cpt_prob": 0.5},
            {"n_networks": 0},
            {"coefficient_range": (2.0, 1.0)},
        ],
    )
    def test_invalid_rejected(self, overrides):
        with pytest.raises(InputError):
            small_config(**overrides)

    def test_unknown_json_field_rejected(self):
        with pytest.raises(InputError, match="unknown"):
            SimConfig.from_json('{"n_vars": 4, "depth": 2}')

    def test_malformed_json_rejected(self):
        with pytest.raises(InputError, match="JSON"):
            SimConfig.from_json("{not json")


class TestGeneration:
    def test_deterministic_per_index(self):
        cfg = small_config()
        a = generate_random_network(cfg, 3)
        b = generate_random_network(cfg, 3)
        assert a.graph == b.graph
        assert all(
            (ca.table == cb.table).all() for ca, cb in zip(a.cpts, b.cpts)
        )

    def test_indices_differ(self):
        cfg = small_config()
        nets = [generate_random_network(cfg, i) for i in range(6)]
        assert len({n.graph.edges for n in nets}) > 1

    def test_parameterization_switch(self):
        assert isinstance(
            generate_random_network(small_config(), 0), DiscreteBayesNet
        )
        assert isinstance(
            generate_random_network(small_config(parameterization="gaussian"), 0),
            LinearGaussianSem,
        )

    def test_cpt_floor_respected(self):
        cfg = small_config(min_cpt_prob=0.2)
        for i in range(5):
            net = generate_random_network(cfg, i)
            for cpt in net.cpts:
                assert (cpt.table >= 0.2 - 1e-12).all()

    def test_gaussian_coefficients_in_range(self):
        cfg = small_config(
            parameterization="gaussian", coefficient_range=(-0.8, 0.8)
        )
        for i in range(5):
            sem = generate_random_network(cfg, i)
            for w in sem.coefficients.values():
                assert 0.05 <= abs(w) <= 0.8

    def test_edgeless_when_probability_zero(self):
        cfg = small_config(edge_probability=0.0)
        for i in range(3):
            assert generate_random_network(cfg, i).graph.edges == frozenset()


class TestEvaluateNetwork:
    def test_redundant_proxy_flags(self, proxy_sem):
        record = evaluate_network(proxy_sem)
        assert record.e1
        assert record.e3
        assert not record.e2
        assert record.axioms_ok

    def test_confounded_flags(self, confounded_net):
        # Under the quadratic-posterior game the common cause still outranks
        # each direct parent individually, but not the two combined.
        record = evaluate_network(confounded_net)
        assert record.e1
        assert not record.e2
        assert record.e3
        assert record.max_non_mb_phi > record.min_mb_phi
        assert record.axioms_ok

    def test_empty_boundary_has_no_events(self):
        cfg = small_config(edge_probability=0.0)
        record = evaluate_network(generate_random_network(cfg, 0))
        assert record.mb_size == 0
        assert not (record.e1 or record.e2)


@pytest.fixture(scope="module")
def report():
    return run_prevalence(small_config())


class TestRunPrevalence:
    def test_record_count(self, report):
        assert len(report.records) == 20

    def test_deterministic(self, report):
        again = run_prevalence(small_config())
        assert again.records == report.records
        assert again.frequencies == report.frequencies

    def test_e2_implies_e1(self, report):
        for r in report.records:
            assert not (r.e2 and not r.e1)

    def test_axioms_hold_everywhere(self, report):
        assert all(r.axioms_ok for r in report.records)

    def test_frequencies_match_records(self, report):
        for event in ("e1", "e2", "e3"):
            freq, lo, hi = report.frequencies[event]
            count = sum(1 for r in report.records if getattr(r, event))
            assert freq == pytest.approx(count / 20)
            assert 0.0 <= lo <= freq <= hi <= 1.0

    def test_all_false_on_edgeless_networks(self):
        report = run_prevalence(small_config(edge_probability=0.0, n_networks=5))
        assert report.frequencies["e1"][0] == 0.0
        assert report.frequencies["e2"][0] == 0.0

    def test_gaussian_run(self):
        report = run_prevalence(
            small_config(parameterization="gaussian", n_networks=10)
        )
        assert len(report.records) == 10
        assert all(r.axioms_ok for r in report.records)
