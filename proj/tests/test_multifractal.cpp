#include <doctest.h>

#include <cmath>
#include <random>

#include "dicke/errors.hpp"
#include "dicke/multifractal.hpp"
#include "dicke/oracles.hpp"

using namespace dicke;

namespace {

EigenExpansion from_weights(std::vector<double> w) {
    EigenExpansion e;
    e.coeffs_sq = std::move(w);
    for (std::size_t k = 0; k < e.coeffs_sq.size(); ++k) {
        e.scaled_energies.push_back(-2.0 + 0.01 * static_cast<double>(k));
        e.level_converged.push_back(1);
        e.norm += e.coeffs_sq[k];
        e.mean_energy += e.coeffs_sq[k] * e.scaled_energies.back();
    }
    e.converged = true;
    e.two_j = 20;
    return e;
}

MassExponentCurve curve_from(const std::vector<double>& q, const std::function<double(double)>& tau) {
    MassExponentCurve c;
    c.q_grid = q;
    for (double v : q) {
        c.tau.push_back(tau(v));
        c.stderr_.push_back(0.0);
    }
    c.trusted.assign(q.size(), 1);
    c.trusted_range = {q.front(), q.back()};
    return c;
}

}  // namespace

TEST_CASE("ipr_q") {
    const std::vector<double> uniform(4, 0.25);
    CHECK(ipr_q(uniform, 2.0) == doctest::Approx(0.25));
    const std::vector<double> delta{0.0, 1.0, 0.0};
    for (double q : {0.3, 1.0, 2.5}) CHECK(ipr_q(delta, q) == doctest::Approx(1.0));
    CHECK_THROWS_AS(ipr_q(uniform, 0.0), std::invalid_argument);

    std::mt19937_64 rng(3);
    std::exponential_distribution<double> d(1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> w(37);
        double s = 0.0;
        for (auto& x : w) s += (x = d(rng));
        for (auto& x : w) x /= s;
        CHECK(std::abs(ipr_q(w, 1.0) - 1.0) <= 1e-10);
        for (double q : {1.5, 2.0, 3.0}) CHECK(ipr_q(w, q) >= std::pow(37.0, 1.0 - q));
        CHECK(ipr_q(w, 2.0) < ipr_q(w, 1.5));
    }
}

TEST_CASE("effective dimension and q grid") {
    CHECK(effective_dim(100.0) == doctest::Approx(1000.0));
    CHECK(effective_dim(4.0) == doctest::Approx(8.0));
    CHECK(effective_dim(25.0) == doctest::Approx(125.0));
    const auto g = make_q_grid();
    CHECK(g.size() == 79);
    CHECK(g.front() == 0.1);
    CHECK(g.back() == 4.0);
    CHECK(g[18] == 1.0);
}

TEST_CASE("mass exponents from exact power laws") {
    const auto q = make_q_grid();
    const std::vector<double> js{5, 10, 15, 20, 25, 30, 35, 40};
    IPRSeries s(q, js);
    IPRSeries flat(q, js);
    for (std::size_t i = 0; i < q.size(); ++i) {
        for (std::size_t k = 0; k < js.size(); ++k) {
            s.ipr[i][k] = std::pow(effective_dim(js[k]), -(q[i] - 1.0));
            s.converged[i][k] = 1;
            flat.ipr[i][k] = 0.37;
            flat.converged[i][k] = 1;
        }
    }
    const auto c = mass_exponents(s);
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(c.tau[i] == doctest::Approx(q[i] - 1.0).epsilon(1e-12));
        CHECK(c.stderr_[i] <= 1e-10);
    }
    const auto f = mass_exponents(flat);
    for (double t : f.tau) CHECK(std::abs(t) <= 1e-12);

    SUBCASE("unconverged cells are dropped") {
        s.converged[3][7] = 0;
        CHECK_NOTHROW(mass_exponents(s));
        for (std::size_t k = 4; k < js.size(); ++k) s.converged[3][k] = 0;
        CHECK_THROWS_AS(mass_exponents(s), InsufficientDataError);
    }
    SUBCASE("too few sizes") {
        MassExponentOptions o;
        o.j_exclude_below = 30.0;
        CHECK_THROWS_AS(mass_exponents(s, o), InsufficientDataError);
    }
}

TEST_CASE("sequence oracle slope") {
    const auto q = make_q_grid();
    std::vector<double> js;
    for (int j = 10; j <= 120; j += 10) js.push_back(j);
    IPRSeries s(q, js);
    for (std::size_t k = 0; k < js.size(); ++k) s.set_column(k, synth_sequence_state(js[k]).expansion);
    MassExponentOptions o;
    o.j_exclude_below = 0.0;
    const auto c = mass_exponents(s, o);
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] < 1.0 || q[i] > 2.0) continue;
        CHECK(std::abs(c.tau[i] - (q[i] - 1.0) / 3.0) <= std::max(2.0 * c.stderr_[i], 1e-6));
    }
    const auto fit = fit_tau(c, {1.0, 2.0}, FitModel::linear);
    const auto a = anomalous_exponent(c, fit.d1);
    for (std::size_t i = 0; i < a.q.size(); ++i) {
        if (a.q[i] > 1.0) CHECK(std::abs(a.delta[i]) < 1e-6);
    }
}

TEST_CASE("curvature scan") {
    const auto q = make_q_grid();
    std::vector<double> concave;
    for (double v : q) concave.push_back(0.8 * (v - 1.0) - 0.05 * v * (v - 1.0));
    auto r = curvature_scan(q, concave);
    CHECK(r.first == q.front());
    CHECK(r.second == q.back());

    // Upturn below q = 0.3.
    std::vector<double> upturn = concave;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] < 0.3) upturn[i] += 4.0 * (0.3 - q[i]) * (0.3 - q[i]);
    }
    r = curvature_scan(q, upturn);
    CHECK(r.first == doctest::Approx(0.3).epsilon(0.2));
    CHECK(r.second == q.back());

    CHECK_THROWS_AS(curvature_scan(std::vector<double>{1.0, 2.0}, std::vector<double>{0.0, 1.0}),
                    InsufficientDataError);
}

TEST_CASE("fit_tau") {
    const auto q = make_q_grid();
    const auto c = curve_from(q, [](double v) { return 0.1 + 0.5 * (v - 1.0) - 0.02 * v * v; });
    const auto f = fit_tau(c, {0.1, 4.0}, FitModel::parabolic);
    CHECK(f.d0 == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(std::abs(f.d1 - 0.5) < 1e-10);
    CHECK(std::abs(f.d2 + 0.02) < 1e-10);
    CHECK(f.rms < 1e-12);

    const auto s = curve_from(q, [](double v) { return -0.2 + 0.7 * (v - 1.0) + 0.15 * std::sqrt(v); });
    const auto fs = fit_tau(s, {0.3, 1.0}, FitModel::sqrt);
    CHECK(std::abs(fs.d2 - 0.15) < 1e-9);

    CHECK_THROWS_AS(fit_tau(c, {1.0, 1.04}, FitModel::linear), InsufficientDataError);
    CHECK(fit_model_from_string("sqrt") == FitModel::sqrt);
    CHECK_THROWS(fit_model_from_string("cubic"));

    // Untrusted points are left out of the fit.
    auto part = c;
    for (std::size_t i = 0; i < q.size(); ++i) part.trusted[i] = q[i] <= 2.0 ? 1 : 0;
    CHECK(fit_tau(part, {1.0, 4.0}, FitModel::linear).q_range.second == doctest::Approx(2.0));
}

TEST_CASE("classification") {
    CHECK(classify(FitModel::linear, 0.97, 0.0) == StateClass::ergodic);
    CHECK(classify(FitModel::linear, 0.36, 0.0) == StateClass::regular);
    CHECK(classify(FitModel::linear, 0.02, 0.0) == StateClass::localized);
    CHECK(classify(FitModel::linear, 0.6, 0.0) == StateClass::intermediate);
    CHECK(classify(FitModel::parabolic, 0.97, 0.02) == StateClass::discard);
    CHECK(classify(FitModel::parabolic, 0.97, 0.004) == StateClass::ergodic);
    CHECK(classify(FitModel::parabolic, 0.97, -0.2) == StateClass::ergodic);
    CHECK(to_string(StateClass::discard) == "discard");
}

TEST_CASE("anomalous exponent") {
    const auto q = make_q_grid();
    const auto lin = anomalous_exponent(curve_from(q, [](double v) { return 0.6 * (v - 1.0); }), 0.6);
    for (double d : lin.delta) CHECK(std::abs(d) < 1e-14);

    const auto weak = anomalous_exponent(curve_from(q, [](double v) { return (v - 1.0) - 0.05 * v * (v - 1.0); }), 1.0);
    REQUIRE(weak.weak_delta.has_value());
    CHECK(*weak.weak_delta == doctest::Approx(0.05));
    for (std::size_t i = 0; i < weak.q.size(); ++i) {
        CHECK(weak.delta[i] == doctest::Approx(0.05 * weak.q[i] * (1.0 - weak.q[i])));
    }
    REQUIRE(weak.reciprocity_residual.has_value());
    CHECK(*weak.reciprocity_residual < 1e-12);
}

TEST_CASE("pdos") {
    auto delta = from_weights({0.0, 0.0, 1.0, 0.0, 0.0});
    const auto h = pdos_q(delta, 0.5, 10);
    int nonzero = 0;
    for (double m : h.mass) nonzero += m > 0.0 ? 1 : 0;
    CHECK(nonzero == 1);

    std::vector<double> w(300);
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) s += (w[k] = 1.0 + std::sin(0.1 * k) * 0.5);
    for (auto& x : w) x /= s;
    const auto e = from_weights(w);
    const auto h1 = pdos_q(e, 1.0, 200);
    CHECK(h1.total() == doctest::Approx(1.0).epsilon(1e-12));
    for (double m : h1.mass) CHECK(m >= 0.0);
    CHECK(h1.bin_edges.size() == 201);

    // Gaussian profile: mean within one bin of the centre.
    const auto g = synth_sequence_state(30.0, {1.0, 0.05, -40.0, 12.0});
    const auto hg = pdos_q(g.expansion, 1.0, 200);
    double mean = 0.0;
    for (std::size_t k = 0; k < hg.mass.size(); ++k) mean += hg.mass[k] * 0.5 * (hg.bin_edges[k] + hg.bin_edges[k + 1]);
    const double width = hg.bin_edges[1] - hg.bin_edges[0];
    CHECK(std::abs(mean - (-40.0 / 30.0)) <= width);
}

TEST_CASE("linear regression") {
    const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    const auto r = linear_regression(x, y);
    CHECK(r.slope == doctest::Approx(2.0));
    CHECK(r.intercept == doctest::Approx(1.0));
    CHECK(r.r_squared == doctest::Approx(1.0));
    CHECK_THROWS_AS(linear_regression(std::vector<double>{1.0}, std::vector<double>{1.0}), InsufficientDataError);
}
