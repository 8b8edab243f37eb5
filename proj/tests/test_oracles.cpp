#include <doctest.h>

#include <cmath>

#include "dicke/multifractal.hpp"
#include "dicke/oracles.hpp"

using namespace dicke;

TEST_CASE("closed form ingredients") {
    CHECK(weight_moment(WeightDistribution::exponential, 2.0) == doctest::Approx(2.0));
    CHECK(weight_moment(WeightDistribution::unit, 3.0) == 1.0);
    CHECK(gaussian_ipr_closed_form(2.0, 100.0) == doctest::Approx(1.0 / (2.0 * std::sqrt(M_PI) * 100.0)));
    CHECK(gaussian_ipr_closed_form(1.0, 123.0) == doctest::Approx(1.0));
}

TEST_CASE("random oracle") {
    RandomGaussianOracle unit;
    unit.weights = WeightDistribution::unit;
    for (double j : {3.0, 10.0, 40.0}) {
        const auto s = synth_random_gaussian(j, unit);
        CHECK(s.sigma * s.nu >= 50.0);
        CHECK(ipr_q(s.expansion, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
        for (double q : {0.5, 2.0, 4.0}) {
            CHECK(std::abs(ipr_q(s.expansion, q) / s.predicted_ipr(q) - 1.0) <= 0.01);
        }
    }
    const auto a = synth_random_gaussian(20.0);
    const auto b = synth_random_gaussian(20.0);
    CHECK(a.expansion.coeffs_sq == b.expansion.coeffs_sq);
    RandomGaussianOracle other;
    other.seed = 99;
    CHECK(synth_random_gaussian(20.0, other).expansion.coeffs_sq != a.expansion.coeffs_sq);
    CHECK(ipr_q(a.expansion, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sequence oracle") {
    const auto s = synth_sequence_state(16.0);
    CHECK(ipr_q(s.expansion, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(ipr_q(s.expansion, 2.0) / s.predicted_ipr(2.0) - 1.0) <= 0.01);

    // Doubling the spacing halves nu and scales IPR_q by 2^(q-1).
    SequenceOracle wide;
    wide.omega_cl = 0.1;
    const auto w = synth_sequence_state(16.0, wide);
    for (double q : {0.5, 2.0, 3.0}) {
        CHECK(ipr_q(w.expansion, q) / ipr_q(s.expansion, q) == doctest::Approx(std::pow(2.0, q - 1.0)).epsilon(1e-3));
    }
}

TEST_CASE("random oracle slope") {
    const auto q = make_q_grid();
    std::vector<double> js;
    for (int j = 10; j <= 120; j += 10) js.push_back(j);
    IPRSeries s(q, js);
    for (std::size_t k = 0; k < js.size(); ++k) s.set_column(k, synth_random_gaussian(js[k]).expansion);
    MassExponentOptions o;
    o.j_exclude_below = 0.0;
    const auto c = mass_exponents(s, o);
    const auto fit = fit_tau(c, {1.0, 2.0}, FitModel::linear);
    CHECK(std::abs(fit.d1 - 1.0) <= 0.03);
}
