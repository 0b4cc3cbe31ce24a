#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "cldyn/data_model.hpp"
#include "cldyn/errors.hpp"
#include "cldyn/expectations.hpp"
#include "cldyn/kernels.hpp"
#include "cldyn/model.hpp"
#include "cldyn/ode.hpp"
#include "cldyn/rng.hpp"
#include "cldyn/sgd.hpp"

using namespace cldyn;

namespace {

ModelParams sim_params(const HiddenLaw& law, double tau = 0.1, int m = 10)
{
    ModelParams p;
    p.activation = Activation::quadratic();
    p.tau = tau;
    p.m = m;
    p.laws = {law};
    return p;
}

} // namespace

TEST_SUITE("sgd")
{
    TEST_CASE("normalize rescales onto the sphere of squared radius n")
    {
        std::vector<double> w = {3.0, 4.0};
        normalize_to_sphere(w);
        CHECK(dot(w.data(), w.data(), 2) == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(w[1] / w[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));

        // already normalized: a second pass is (numerically) the identity
        std::vector<double> again = w;
        normalize_to_sphere(again);
        CHECK(again[0] == doctest::Approx(w[0]).epsilon(1e-15));
        CHECK(again[1] == doctest::Approx(w[1]).epsilon(1e-15));

        // scale invariance of the direction
        std::vector<double> scaled = {300.0, 400.0};
        normalize_to_sphere(scaled);
        CHECK(scaled[0] == doctest::Approx(w[0]).epsilon(1e-14));
        CHECK(scaled[1] == doctest::Approx(w[1]).epsilon(1e-14));

        std::vector<double> zero = {0.0, 0.0, 0.0};
        CHECK_THROWS_AS(normalize_to_sphere(zero), numeric_error);
        std::vector<double> bad = {1.0, std::nan("")};
        CHECK_THROWS_AS(normalize_to_sphere(bad), numeric_error);
    }

    TEST_CASE("gradient step reproduces a hand-computed batch")
    {
        // n = 2, one sample, both views (1, 0), quadratic activation,
        // w = (1, 1): z = 1/sqrt(2), f12 = f21 = -4 z^3 = -sqrt(2), and the
        // update adds tau/(2 sqrt(2)) * 2 sqrt(2) = tau along the view.
        auto params = sim_params(HiddenLaw::gaussian(1.0), 0.1, 1);
        ViewPair views;
        views.m = 1;
        views.n = 2;
        views.x1 = {1.0, 0.0};
        views.x2 = {1.0, 0.0};
        const std::vector<double> w = {1.0, 1.0};

        const auto next = gradient_step(w, views, params, 0.0, 0.0);
        REQUIRE(next.size() == 2);
        CHECK(next[0] == doctest::Approx(1.1).epsilon(1e-14));
        CHECK(next[1] == 1.0);

        // a pure shrinkage prior with a zero view: only the prior acts
        auto prior_params = sim_params(HiddenLaw::gaussian(1.0), 0.1, 1);
        prior_params.prior = Prior::l2(0.5);
        ViewPair null_views;
        null_views.m = 1;
        null_views.n = 2;
        null_views.x1 = {0.0, 0.0};
        null_views.x2 = {0.0, 0.0};
        const std::vector<double> w2 = {2.0, -1.0};
        const auto shrunk = gradient_step(w2, null_views, prior_params, 0.0, 0.0);
        const double factor = 1.0 - 0.1 / 2.0 * 0.5;
        CHECK(shrunk[0] == doctest::Approx(2.0 * factor).epsilon(1e-15));
        CHECK(shrunk[1] == doctest::Approx(-1.0 * factor).epsilon(1e-15));
    }

    TEST_CASE("gradient step validates shapes and passes an empty batch through")
    {
        auto params = sim_params(HiddenLaw::gaussian(1.0), 0.1, 1);
        ViewPair views;
        views.m = 1;
        views.n = 2;
        views.x1 = {1.0, 0.0};
        views.x2 = {1.0, 0.0};
        CHECK_THROWS_AS(gradient_step({1.0, 1.0, 1.0}, views, params, 0.0, 0.0), config_error);

        ViewPair two = views;
        two.m = 2; // params.m stays 1
        two.x1 = {1.0, 0.0, 0.0, 1.0};
        two.x2 = two.x1;
        CHECK_THROWS_AS(gradient_step({1.0, 1.0}, two, params, 0.0, 0.0), config_error);

        auto empty_params = sim_params(HiddenLaw::gaussian(1.0), 0.1, 1);
        empty_params.m = 0;
        ViewPair none;
        none.m = 0;
        none.n = 2;
        const std::vector<double> w = {0.25, -0.5};
        const auto out = gradient_step(w, none, empty_params, 0.0, 0.0);
        CHECK(out[0] == w[0]);
        CHECK(out[1] == w[1]);
    }

    TEST_CASE("directed initialization hits the requested overlaps exactly")
    {
        ModelParams params;
        params.activation = Activation::quadratic();
        params.tau = 0.1;
        params.m = 5;
        params.laws = {HiddenLaw::gaussian(1.2), HiddenLaw::three_point(5.0, 0.2)};

        SimConfig cfg;
        cfg.n = 1000;
        cfg.t_max = 0.01;
        cfg.seed = 42;
        cfg.init.kind = SimInit::Kind::directed;
        cfg.init.Q0 = {0.25, 0.16};

        const auto trace = run_training(params, cfg);
        REQUIRE(!trace.q.empty());
        CHECK(trace.q.front()[0] == doctest::Approx(std::sqrt(0.25)).epsilon(1e-10));
        CHECK(trace.q.front()[1] == doctest::Approx(std::sqrt(0.16)).epsilon(1e-10));

        SimConfig bad = cfg;
        bad.init.Q0 = {0.25};
        CHECK_THROWS_AS(run_training(params, bad), config_error);
        bad = cfg;
        bad.init.Q0 = {-0.1, 0.2};
        CHECK_THROWS_AS(run_training(params, bad), config_error);
        bad = cfg;
        bad.init.Q0 = {0.7, 0.6};
        CHECK_THROWS_AS(run_training(params, bad), config_error);
    }

    TEST_CASE("weights stay on the sphere at every snapshot")
    {
        SimConfig cfg;
        cfg.n = 2000;
        cfg.t_max = 2.0;
        cfg.seed = 7;
        const auto trace = run_training(sim_params(HiddenLaw::gaussian(1.2)), cfg);

        const double bound = 1e-10 * std::sqrt(static_cast<double>(cfg.n));
        for (double e : trace.norm_error) CHECK(e <= bound);

        REQUIRE(trace.t.size() == trace.q.size());
        REQUIRE(trace.t.size() == trace.r.size());
        REQUIRE(trace.t.size() == trace.norm_error.size());
        CHECK(trace.t.front() == 0.0);
        CHECK(trace.t.back() == doctest::Approx(cfg.t_max).epsilon(1e-12));
        for (std::size_t i = 1; i < trace.t.size(); ++i) CHECK(trace.t[i] > trace.t[i - 1]);
        for (double r : trace.r) CHECK(r == 0.0); // no prior configured
    }

    TEST_CASE("record stride controls the snapshot grid")
    {
        SimConfig cfg;
        cfg.n = 100;
        cfg.t_max = 0.5;
        cfg.record_stride = 7;
        cfg.seed = 3;
        const auto trace = run_training(sim_params(HiddenLaw::gaussian(1.0), 0.1, 2), cfg);
        // snapshots at steps 0, 7, ..., 49 plus the final state at step 50
        REQUIRE(trace.t.size() == 9);
        for (int i = 0; i < 8; ++i)
            CHECK(trace.t[i] == doctest::Approx(7.0 * i / 100.0).epsilon(1e-12));
        CHECK(trace.t.back() == doctest::Approx(0.5).epsilon(1e-12));

        SimConfig bad = cfg;
        bad.record_stride = -1;
        CHECK_THROWS_AS(run_training(sim_params(HiddenLaw::gaussian(1.0)), bad), config_error);
        bad = cfg;
        bad.t_max = 0.0;
        CHECK_THROWS_AS(run_training(sim_params(HiddenLaw::gaussian(1.0)), bad), config_error);
        bad = cfg;
        bad.n = 1;
        CHECK_THROWS_AS(run_training(sim_params(HiddenLaw::gaussian(1.0)), bad), config_error);
    }

    TEST_CASE("same seed gives a byte-identical trajectory, a new seed differs")
    {
        SimConfig cfg;
        cfg.n = 400;
        cfg.t_max = 0.3;
        cfg.seed = 11;
        const auto params = sim_params(HiddenLaw::three_point(5.0, 0.2), 0.1, 5);
        const auto a = run_training(params, cfg);
        const auto b = run_training(params, cfg);
        REQUIRE(a.t.size() == b.t.size());
        for (std::size_t i = 0; i < a.t.size(); ++i) {
            CHECK(a.t[i] == b.t[i]);
            CHECK(a.q[i][0] == b.q[i][0]);
            CHECK(a.r[i] == b.r[i]);
            CHECK(a.norm_error[i] == b.norm_error[i]);
        }

        cfg.seed = 12;
        const auto c = run_training(params, cfg);
        bool any_diff = false;
        for (std::size_t i = 0; i < a.t.size() && !any_diff; ++i)
            any_diff = a.q[i][0] != c.q[i][0];
        CHECK(any_diff);
    }

    TEST_CASE("vanishing learning rate freezes the order parameters")
    {
        SimConfig cfg;
        cfg.n = 300;
        cfg.t_max = 0.2;
        cfg.seed = 5;
        const auto trace = run_training(sim_params(HiddenLaw::gaussian(1.2), 1e-300, 5), cfg);
        for (const auto& q : trace.q) CHECK(q[0] == trace.q.front()[0]);
    }

    TEST_CASE("empirical order parameters read off the planted basis")
    {
        Rng rng(99);
        const auto basis = make_feature_basis(500, 2, rng);
        std::vector<double> w(basis.col(0), basis.col(0) + basis.n);

        const auto op = empirical_order_params(w, basis, Prior::none());
        REQUIRE(op.q.size() == 2);
        CHECK(op.q[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(op.q[1]) <= 1e-12);
        CHECK(op.r == 0.0);

        const auto with_prior =
            empirical_order_params(w, basis, Prior::custom([](double v) { return v; }));
        CHECK(with_prior.r == doctest::Approx(1.0).epsilon(1e-12));

        std::vector<double> wrong(basis.n + 1, 0.0);
        CHECK_THROWS_AS(empirical_order_params(wrong, basis, Prior::none()), config_error);
    }

    TEST_CASE("fast path agrees with a literal transcription of the update")
    {
        const int n = 400, d1 = 1, m = 5;
        const double t_max = 0.25;
        const std::uint64_t seed = 17;
        const auto params = sim_params(HiddenLaw::gaussian(1.2), 0.1, m);

        SimConfig cfg;
        cfg.n = n;
        cfg.t_max = t_max;
        cfg.seed = seed;
        const auto fast = run_training(params, cfg);

        // Replay the identical draw sequence through the textbook update:
        // build each input explicitly, evaluate both kernels, apply the two
        // rank-one corrections, re-project. Only the floating-point grouping
        // differs from the production path.
        Rng rng(seed);
        const auto basis = make_feature_basis(n, d1, rng);
        std::vector<double> w(n);
        rng.fill_normals(w.data(), w.size());
        normalize_to_sphere(w);
        normalize_to_sphere(w);

        const long steps = std::lround(t_max * n);
        const long stride = std::max(1, n / 100);
        const double inv_root_n = 1.0 / std::sqrt(static_cast<double>(n));
        const double coef = params.tau / (2.0 * m) * inv_root_n;

        std::vector<std::vector<double>> q_replay;
        auto record = [&] { q_replay.push_back({dot(basis.col(0), w.data(), n) / n}); };

        std::vector<double> xb(n), c(d1), z(m);
        std::vector<std::vector<double>> batch(m, std::vector<double>(n));
        for (long k = 0; k < steps; ++k) {
            if (k % stride == 0) record();
            for (int b = 0; b < m; ++b) {
                for (int j = 0; j < d1; ++j) c[j] = params.laws[j].sample(rng);
                rng.fill_normals(batch[b].data(), batch[b].size());
                for (int j = 0; j < d1; ++j) {
                    const double* uj = basis.col(j);
                    const double proj = dot(uj, batch[b].data(), n);
                    axpy(c[j] * inv_root_n - proj / n, uj, batch[b].data(), n);
                }
                z[b] = dot(w.data(), batch[b].data(), n) * inv_root_n;
            }
            for (int b = 0; b < m; ++b) {
                const KernelPair f = contrast_kernels(params.activation, z[b], z[b], 0.0, 0.0);
                axpy(-coef * f.f12, batch[b].data(), w.data(), n);
                axpy(-coef * f.f21, batch[b].data(), w.data(), n);
            }
            normalize_to_sphere(w);
        }
        record();

        REQUIRE(fast.q.size() == q_replay.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < q_replay.size(); ++i)
            worst = std::max(worst, std::abs(fast.q[i][0] - q_replay[i][0]));
        CHECK(worst <= 1e-7);
    }

    TEST_CASE("trajectory tracks the limit equation loosely")
    {
        const auto params = sim_params(HiddenLaw::three_point(5.5, 0.2));
        const QuadratureSpec quad;

        SimConfig cfg;
        cfg.n = 2000;
        cfg.t_max = 10.0;
        cfg.seed = 2024;
        cfg.init.kind = SimInit::Kind::directed;
        cfg.init.Q0 = {0.1};
        const auto sim = run_training(params, cfg);

        OdeOptions opts;
        opts.t_max = cfg.t_max;
        opts.dt = 1e-3;
        opts.record_dt = 0.01; // matches the simulator snapshot spacing
        opts.clamp = clamp_unit_ball();
        const auto ode = integrate_rk4(
            [&](double, const std::vector<double>& x, std::vector<double>& dx) {
                dx = overlap_rhs(x, params, quad);
            },
            {std::sqrt(0.1)}, opts);

        // compare at the simulator's snapshot times by nearest ODE sample
        double worst = 0.0;
        for (std::size_t i = 0; i < sim.t.size(); ++i) {
            const double t = sim.t[i];
            const auto it = std::lower_bound(ode.t.begin(), ode.t.end(), t - 1e-9);
            REQUIRE(it != ode.t.end());
            const std::size_t j = static_cast<std::size_t>(it - ode.t.begin());
            worst = std::max(worst, std::abs(sim.q[i][0] - ode.x[j][0]));
        }
        CHECK(worst <= 0.15);
        CHECK(sim.q.back()[0] > 0.6); // the planted direction is recovered
        CHECK(std::abs(sim.q.back()[0] - ode.x.back()[0]) <= 0.05);
    }

    TEST_CASE("population centering keeps the run healthy")
    {
        auto params = sim_params(HiddenLaw::gaussian(1.0), 0.1, 5);
        params.centering = Centering::population;
        SimConfig cfg;
        cfg.n = 500;
        cfg.t_max = 0.5;
        cfg.seed = 21;
        const auto trace = run_training(params, cfg);
        const double bound = 1e-10 * std::sqrt(static_cast<double>(cfg.n));
        for (double e : trace.norm_error) CHECK(e <= bound);
        for (const auto& q : trace.q) CHECK(std::abs(q[0]) <= 1.0 + 1e-12);
    }
}
