import numpy as np
import pytest

from moead import AlgorithmConfig, ConfigError, RunError, make_problem, preset, preset_names, run_moead
from moead.problems import ProblemDefinition
from moead.registry import Registry
from moead.variation import gaussmut_component

SMALL = {"decomposition": {"name": "sld", "h": 9}, "neighborhood": {"name": "lambda", "T": 4, "delta_p": 1.0}}


def small(name="original", iters=5, seed=1, **kw):
    return preset(name, **{**SMALL, "stop": [{"name": "max_iter", "value": iters}], "seed": seed, **kw})


def test_eval_accounting():
    r = run_moead(make_problem("zdt1", n_v=5), small(iters=7))
    assert r.eval_count == 10 * 8 and r.iterations == 7
    assert r.summary["evaluations"] == 80 and r.stop_reason == "max_iter"
    assert [row["evaluations"] for row in r.trace] == [10 * (t + 1) for t in range(8)]


def test_zero_iterations():
    r = run_moead(make_problem("zdt1", n_v=5), small(iters=0))
    assert r.eval_count == 10 and r.iterations == 0


def test_max_time_zero_stops_before_first_iteration():
    r = run_moead(make_problem("zdt1", n_v=5), small(stop=[{"name": "max_time", "value": 0}]))
    assert r.iterations == 0 and r.stop_reason == "max_time"


def test_max_eval_overshoot_bounded():
    r = run_moead(make_problem("zdt1", n_v=5), small(stop=[{"name": "max_eval", "value": 35}]))
    assert 35 <= r.eval_count < 35 + 10


def test_deterministic_given_seed():
    p = make_problem("zdt1", n_v=5)
    a, b = run_moead(p, small(seed=3)), run_moead(p, small(seed=3))
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(a.Y, b.Y)
    assert not np.array_equal(a.X, run_moead(p, small(seed=4)).X)


def test_moead_de_deterministic():
    p = make_problem("dtlz2", n_f=3)
    cfg = small("moead-de", decomposition={"name": "sld", "h": 5})
    np.testing.assert_array_equal(run_moead(p, cfg).Y, run_moead(p, cfg).Y)


def test_no_variation_only_recombines_incumbents():
    p = make_problem("zdt1", n_v=5)
    cfg = small(variation=[{"name": "sbx", "eta_x": 20, "p_x": 0.0},
                           {"name": "polymut", "eta_m": 20, "p_m": 0.0}, {"name": "truncate"}], iters=10)
    start = run_moead(p, cfg.with_overrides(stop=[{"name": "max_iter", "value": 0}]))
    end = run_moead(p, cfg)
    # no new point is ever created; copies may still migrate to neighbors they serve better
    initial = {tuple(row) for row in start.X_unit}
    assert all(tuple(row) in initial for row in end.X_unit)
    np.testing.assert_array_equal(start.z_hat, end.z_hat)
    means = [row["mean_utility"] for row in end.trace]
    assert all(b <= a for a, b in zip(means, means[1:]))


def test_own_candidate_never_displaces_equal_incumbent():
    p = make_problem("zdt1", n_v=5)
    cfg = small(neighborhood={"name": "lambda", "T": 1, "delta_p": 1.0},
                variation=[{"name": "sbx", "eta_x": 20, "p_x": 0.0},
                           {"name": "polymut", "eta_m": 20, "p_m": 0.0}], iters=5)
    start = run_moead(p, cfg.with_overrides(stop=[{"name": "max_iter", "value": 0}]))
    np.testing.assert_array_equal(start.X, run_moead(p, cfg).X)


def test_decoding_to_original_space():
    p = make_problem("sphere-rastrigin", n_v=4)
    r = run_moead(p, small())
    np.testing.assert_allclose(r.X, -1 + 2 * r.X_unit)
    np.testing.assert_allclose(p.encode(r.X), r.X_unit, atol=1e-12)
    assert np.all(r.X >= -1) and np.all(r.X <= 1)


def test_reference_points_bound_population():
    r = run_moead(make_problem("zdt1", n_v=5), small(iters=10))
    assert np.all(r.z_hat <= r.Y.min(axis=0))
    assert np.all(r.z_tilde >= r.Y.max(axis=0))


def test_non_finite_objectives():
    def fn(X):
        Y = np.column_stack([X[:, 0], X[:, 1]])
        Y[X[:, 0] > 0.5, 0] = np.nan
        return Y

    p = ProblemDefinition("nanny", 2, 2, 0, 1, fn)
    with pytest.raises(RunError, match="nanny"):
        run_moead(p, small())


def test_constrained_problem_with_vbr_keeps_archive():
    def g(X):
        return (0.3 - X[:, 0])[:, None]

    p = ProblemDefinition("c", 3, 2, 0, 1, lambda X: X[:, :2] + X[:, 2:], constraint_fn=g)
    r = run_moead(p, small(constraint={"name": "vbr", "type": "ts"}, iters=10))
    assert r.archive is not None
    filled = r.archive["filled"]
    assert filled.any()
    assert np.all(r.archive["X"][filled, 0] >= 0.3)


def test_penalty_runs():
    p = ProblemDefinition("c", 3, 2, 0, 1, lambda X: X[:, :2], constraint_fn=lambda X: (0.5 - X[:, :1]))
    r = run_moead(p, small(constraint={"name": "penalty", "beta_v": 10.0}, iters=10))
    assert r.archive is None and r.summary["feasible_count"] >= 1


@pytest.mark.parametrize("scal", [{"name": "ws"}, {"name": "awt"}, {"name": "pbi", "theta": 5},
                                  {"name": "ipbi", "theta": 5}])
@pytest.mark.parametrize("upd", [{"name": "restricted", "n_r": 2}, {"name": "best", "n_r": 2, "T_r": 4}])
def test_component_combinations(scal, upd):
    r = run_moead(make_problem("zdt1", n_v=5),
                  small(scalarization=scal, update=upd, scaling={"name": "simple"}, iters=3))
    assert r.eval_count == 40


@pytest.mark.parametrize("ls", [{"name": "localsearch", "type": "tpqa", "tau_ls": 2},
                                {"name": "localsearch", "type": "dvls", "gamma_ls": 0.5}])
def test_local_search_counts_extra_evaluations(ls):
    cfg = small(variation=[{"name": "sbx", "eta_x": 20, "p_x": 1.0}, {"name": "polymut", "eta_m": 20},
                           {"name": "truncate"}, ls], iters=4)
    r = run_moead(make_problem("zdt1", n_v=5), cfg)
    assert r.eval_count >= 50
    assert np.all(r.z_hat <= r.Y.min(axis=0))


def test_neighborhood_by_x():
    cfg = small(neighborhood={"name": "x", "T": 4, "delta_p": 0.8})
    assert run_moead(make_problem("zdt1", n_v=5), cfg).iterations == 5


def test_user_component_in_private_registry():
    reg = Registry.with_builtins()
    reg.register("variation", "gaussmut", gaussmut_component)
    cfg = small(variation=[{"name": "gaussmut", "p": 0.5}, {"name": "truncate"}])
    r = run_moead(make_problem("zdt1", n_v=5), cfg, registry=reg)
    assert r.iterations == 5
    with pytest.raises(ConfigError, match="gaussmut"):
        run_moead(make_problem("zdt1", n_v=5), cfg)


def test_dict_config_accepted():
    r = run_moead(make_problem("zdt1", n_v=5), small().to_dict())
    assert r.iterations == 5


class TestConfig:
    def test_presets(self):
        assert preset_names() == ["moead-de", "original"]
        o = preset("original")
        assert o.decomposition == {"name": "sld", "h": 99}
        assert [v["name"] for v in o.variation] == ["sbx", "polymut", "truncate"]
        d = preset("moead-de")
        assert d.update == {"name": "restricted", "n_r": 2}
        assert d.neighborhood["delta_p"] == 0.9
        assert [v["name"] for v in d.variation] == ["diffmut", "binrec", "polymut", "truncate"]

    def test_unknown_preset(self):
        with pytest.raises(ValueError, match="nonexistent"):
            preset("nonexistent")

    def test_presets_are_fresh_copies(self):
        a = preset("original")
        a.variation[0]["eta_x"] = 1
        assert preset("original").variation[0]["eta_x"] == 20

    def test_override_replaces_whole_component(self):
        cfg = preset("original", decomposition={"name": "sld", "h": 8})
        assert cfg.decomposition == {"name": "sld", "h": 8}
        assert cfg.scalarization == {"name": "wt"}

    def test_preset_size(self):
        r = run_moead(make_problem("dtlz2", n_v=20, n_f=5),
                      preset("original", decomposition={"name": "sld", "h": 8},
                             stop=[{"name": "max_iter", "value": 0}], seed=0))
        assert r.summary["population_size"] == 495

    @pytest.mark.parametrize(
        "override,key",
        [
            ({"scalarization": {"name": "chebyshev"}}, "scalarization"),
            ({"variation": [{"name": "sbx"}, {"name": "bogus"}]}, "variation[1]"),
            ({"stop": []}, "stop"),
            ({"stop": [{"name": "max_iter", "value": -1}]}, "stop[0].value"),
            ({"neighborhood": {"name": "lambda", "T": 20, "delta_p": 1.5}}, "neighborhood.delta_p"),
            ({"variation": [{"name": "localsearch", "type": "tpqa"}]}, "variation[0]"),
            ({"variation": [{"name": "localsearch", "type": "zz", "tau_ls": 2}]}, "variation[0].type"),
        ],
    )
    def test_validation_names_key(self, override, key):
        with pytest.raises(ConfigError) as err:
            preset("original", **override).validate()
        assert err.value.key == key

    @pytest.mark.parametrize(
        "override,key",
        [
            ({"neighborhood": {"name": "lambda", "T": 11}}, "neighborhood.T"),
            ({"neighborhood": {"name": "lambda", "T": 10, "delta_p": 0.9}}, "neighborhood.delta_p"),
            ({"update": {"name": "restricted", "n_r": 0}}, "update.n_r"),
            ({"update": {"name": "best", "T_r": 11}}, "update.T_r"),
        ],
    )
    def test_validation_against_population_size(self, override, key):
        cfg = small(**override)
        with pytest.raises(ConfigError) as err:
            run_moead(make_problem("zdt1", n_v=5), cfg)
        assert err.value.key == key

    def test_unknown_and_missing_keys(self):
        with pytest.raises(ConfigError, match="colour"):
            AlgorithmConfig.from_dict({**preset("original").to_dict(), "colour": 1})
        data = preset("original").to_dict()
        del data["update"]
        with pytest.raises(ConfigError, match="update"):
            AlgorithmConfig.from_dict(data)

    def test_archive_rule(self):
        assert not preset("original").use_archive()
        assert preset("original", constraint={"name": "vbr"}).use_archive()
        assert not preset("original", constraint={"name": "vbr"}, archive=False).use_archive()
        assert preset("original", archive=True).use_archive()
