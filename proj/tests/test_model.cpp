#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dicke/errors.hpp"
#include "dicke/model.hpp"
#include "dicke/multifractal.hpp"

using namespace dicke;

namespace {

ModelParams params(double j, int n_max, double coupling = 2.0) { return make_params(1.0, 1.0, coupling, j, n_max); }

}  // namespace

TEST_CASE("params validation") {
    CHECK_THROWS_AS(make_params(0.0, 1.0, 2.0, 1.0, 4), ConfigError);
    CHECK_THROWS_AS(make_params(1.0, -1.0, 2.0, 1.0, 4), ConfigError);
    CHECK_THROWS_AS(make_params(1.0, 1.0, -0.1, 1.0, 4), ConfigError);
    CHECK_THROWS_AS(make_params(1.0, 1.0, 2.0, 0.3, 4), ConfigError);
    CHECK_THROWS_AS(make_params(1.0, 1.0, 2.0, 1.0, 0), ConfigError);
    CHECK(make_params(1.0, 4.0, 2.0, 1.5, 3).critical_coupling() == doctest::Approx(2.0));
}

TEST_CASE("basis enumeration") {
    const auto b = build_basis(params(0.5, 1), Parity::both);
    REQUIRE(b.size() == 4);
    CHECK(b[0].n == 0);
    CHECK(b[0].m == -0.5);
    CHECK(b[1].m == 0.5);
    CHECK(b[2].n == 1);
    CHECK(b[3].m == 0.5);
    CHECK(build_basis(params(1.0, 2), Parity::both).size() == 9);

    const auto pos = build_basis(params(0.5, 1), Parity::positive);
    REQUIRE(pos.size() == 2);
    CHECK((pos[0].n == 0 && pos[0].m == -0.5));
    CHECK((pos[1].n == 1 && pos[1].m == 0.5));

    // Bijection and parity labels over a larger space.
    const auto p = params(3.5, 7);
    const auto full = build_basis(p, Parity::both);
    CHECK(full.size() == 8u * 8u);
    std::set<std::pair<int, double>> seen;
    for (const auto& s : full.states()) {
        CHECK(full.find(s.n, s.m).value() == s.index);
        CHECK(std::abs(s.parity(p.j())) == 1);
        seen.insert({s.n, s.m});
    }
    CHECK(seen.size() == full.size());
    const auto a = build_basis(p, Parity::positive);
    const auto c = build_basis(p, Parity::negative);
    CHECK(a.size() + c.size() == full.size());
    for (const auto& s : a.states()) CHECK(s.parity(p.j()) == 1);
    for (const auto& s : c.states()) CHECK(s.parity(p.j()) == -1);
    CHECK_FALSE(a.find(0, -3.5 + 1).has_value());
}

TEST_CASE("hamiltonian examples") {
    const auto h0 = build_hamiltonian(params(0.5, 1, 0.0), Parity::both);
    CHECK(h0.isDiagonal());
    CHECK(h0(0, 0) == -0.5);
    CHECK(h0(1, 1) == 0.5);
    CHECK(h0(2, 2) == 0.5);
    CHECK(h0(3, 3) == 1.5);

    const auto h = build_hamiltonian(params(0.5, 1), Parity::both);
    const auto vals = eigenvalues_only(h);
    const double r2 = std::sqrt(2.0);
    CHECK(vals[0] == doctest::Approx(0.5 - r2).epsilon(1e-12));
    CHECK(vals[1] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(vals[2] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(vals[3] == doctest::Approx(0.5 + r2).epsilon(1e-12));
}

TEST_CASE("structural invariants") {
    for (double j : {0.5, 2.0, 3.5, 6.0}) {
        const auto p = params(j, 12);
        const auto basis = build_basis(p, Parity::both);
        const auto h = build_hamiltonian(basis);
        CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
        double off_block = 0.0;
        for (std::size_t a = 0; a < basis.size(); ++a) {
            for (std::size_t b = 0; b < basis.size(); ++b) {
                if (basis[a].parity(j) != basis[b].parity(j)) off_block = std::max(off_block, std::abs(h(a, b)));
            }
        }
        CHECK(off_block == 0.0);

        for (Parity blk : {Parity::positive, Parity::negative}) {
            const auto s = solve_block(p, blk, {0, 1e-8});
            CHECK(orthonormality_error(s.eigenvectors) <= 1e-10);
            CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
            const auto hb = build_hamiltonian(p, blk);
            const double resid = (hb * s.eigenvectors - s.eigenvectors * s.eigenvalues.asDiagonal())
                                     .cwiseAbs()
                                     .maxCoeff();
            CHECK(resid <= 1e-9 * hb.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("decoupled limit spectrum is exact") {
    const auto p = params(2.5, 9, 0.0);
    const auto basis = build_basis(p, Parity::both);
    std::vector<double> expected;
    for (const auto& s : basis.states()) expected.push_back(s.n + s.m);
    std::sort(expected.begin(), expected.end());
    const auto vals = eigenvalues_only(build_hamiltonian(basis));
    for (std::size_t k = 0; k < expected.size(); ++k) CHECK(std::abs(vals[k] - expected[k]) <= 1e-13);
    const auto s = solve_block(p, Parity::positive, {0, 1e-8});
    CHECK(ground_energy_intensive(s, p.j()) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("diagonalize trivial matrix") {
    Eigen::MatrixXd one(1, 1);
    one(0, 0) = 3.25;
    const auto sys = diagonalize(one);
    CHECK(sys.values[0] == 3.25);
    CHECK(std::abs(sys.vectors(0, 0)) == 1.0);
}

TEST_CASE("dimension guard") {
    CHECK_THROWS_AS(build_hamiltonian(params(10.0, 100), Parity::positive, 100), ConfigError);
}

TEST_CASE("converged_count") {
    const auto p = params(2.0, 30);
    auto a = solve_block(p, Parity::positive, {0, 1e-8});
    CHECK(converged_count(a, a, 0.0) == a.dim());

    auto lo_p = p;
    lo_p.n_max = 10;
    auto lo = solve_block(lo_p, Parity::positive, {0, 1e-8});
    const auto k6 = converged_count(lo, a, 1e-6);
    const auto k3 = converged_count(lo, a, 1e-3);
    CHECK(k6 <= k3);
    CHECK(k3 <= lo.dim());
    CHECK(converged_count(lo, a, 0.0) == 0);   // truncation shifts the ground state slightly

    auto other = solve_block(params(2.5, 30), Parity::positive, {0, 1e-8});
    CHECK_THROWS_AS(converged_count(lo, other, 1e-6), std::invalid_argument);
    auto neg = solve_block(p, Parity::negative, {0, 1e-8});
    CHECK_THROWS_AS(converged_count(lo, neg, 1e-6), std::invalid_argument);
}

TEST_CASE("converged_count reference at j = 10") {
    // Two full cutoffs diagonalized directly; solve_block must certify the same count.
    const auto hi_p = params(10.0, 80);
    auto lo_p = hi_p;
    lo_p.n_max = 60;
    SpectralData lo, hi;
    lo.params = lo_p;
    lo.params.parity = Parity::positive;
    hi.params = hi_p;
    hi.params.parity = Parity::positive;
    lo.eigenvalues = eigenvalues_only(build_hamiltonian(lo_p, Parity::positive));
    hi.eigenvalues = eigenvalues_only(build_hamiltonian(hi_p, Parity::positive));
    const auto k = converged_count(lo, hi, 1e-6);
    CHECK(k > 0);
    CHECK(k < lo.dim());
    const auto certified = solve_block(lo_p, Parity::positive, {20, 1e-6});
    CHECK(certified.n_converged == k);
    MESSAGE("j=10, n_max 60 vs 80, tol 1e-6: K = " << k);
}

TEST_CASE("ground state energy") {
    auto p = params(10.0, 60);
    const auto s60 = solve_block(p, Parity::positive, {0, 1e-8});
    p.n_max = 70;
    const auto s70 = solve_block(p, Parity::positive, {0, 1e-8});
    CHECK(ground_energy_intensive(s70, 10.0) <= ground_energy_intensive(s60, 10.0) + 1e-12);
    CHECK(std::abs(ground_energy_intensive(s70, 10.0) + 2.125) < 0.05);
}

TEST_CASE("density of states grows linearly in j") {
    // Certified levels of both blocks in a fixed scaled-energy window. The
    // window spans j*(hi - lo) in E, so levels per unit E is count / (j*(hi - lo)).
    const double lo = -2.05, hi = -1.75;
    std::vector<double> js, counts;
    for (double j : {10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0}) {
        const int n_max = static_cast<int>(4.0 * j) + 30;
        double c = 0;
        for (Parity blk : {Parity::positive, Parity::negative}) {
            SpectralData a, b;
            a.params = params(j, n_max);
            b.params = params(j, n_max + 20);
            a.params.parity = b.params.parity = blk;
            a.eigenvalues = eigenvalues_only(build_hamiltonian(a.params, blk));
            b.eigenvalues = eigenvalues_only(build_hamiltonian(b.params, blk));
            const auto k_conv = converged_count(a, b, 1e-6);
            for (std::size_t k = 0; k < a.dim(); ++k) {
                const double e = a.eigenvalues[static_cast<Eigen::Index>(k)] / j;
                if (e < lo || e >= hi) continue;
                REQUIRE(k < k_conv);
                c += 1;
            }
        }
        js.push_back(j);
        counts.push_back(c / (j * (hi - lo)));
    }
    const auto fit = linear_regression(js, counts);
    std::ostringstream os;
    for (double v : counts) os << ' ' << v;
    MESSAGE("levels per unit energy:" << os.str() << "; R^2 = " << fit.r_squared << ", slope " << fit.slope);
    const double r2 = fit.r_squared;
    CHECK(r2 >= 0.99);
}
