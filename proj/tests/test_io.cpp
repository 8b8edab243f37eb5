#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>

#include "dicke/config.hpp"
#include "dicke/csv.hpp"
#include "dicke/digest.hpp"
#include "dicke/errors.hpp"
#include "dicke/pipeline.hpp"
#include "dicke/spectrum_cache.hpp"

using namespace dicke;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dicke_test_" + name + "_" + std::to_string(std::random_device{}()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

// Small enough for a test, large enough to exercise every stage.
ExperimentConfig tiny_config(const fs::path& out) {
    auto c = config_from_json(nlohmann::json::parse(R"({
        "j_list": [2, 3, 4, 5, 6],
        "n_max": 30,
        "j_exclude_below": 0,
        "min_j_points": 3,
        "energies": [-1.8],
        "jz_grid": {"values": [-0.492, -0.29]},
        "points": [{"eps0": -1.8, "jz": -0.492}],
        "convergence": {"exclude_unconverged": false},
        "oracle": {"j_list": [10, 20, 30]}
    })"));
    c.output_dir = out;
    return c;
}

}  // namespace

TEST_CASE("sha256 known answers") {
    CHECK(sha256("").hex() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256("abc").hex() == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(exact_repr(0.1) == exact_repr(0.1));
    CHECK(exact_repr(0.1) != exact_repr(0.1 + 1e-17 + 1e-16));
}

TEST_CASE("csv format") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
    CHECK(format_number(0.1) == "0.1");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);

    const auto dir = scratch("csv");
    for (const char* name : {"a.csv", "b.csv"}) {
        CsvWriter w(dir / name, {{"config_digest", "abc"}, {"j", "5"}}, {"k", "label", "value"});
        w.cell(1).cell("x,y").cell(0.25);
        w.end_row();
    }
    const auto text = slurp(dir / "a.csv");
    CHECK(text == slurp(dir / "b.csv"));
    CHECK(text == "# config_digest=abc,j=5\r\nk,label,value\r\n1,\"x,y\",0.25\r\n");

    CsvWriter w(dir / "c.csv", {}, {"a", "b"});
    w.cell(1);
    CHECK_THROWS(w.end_row());
    fs::remove_all(dir);
}

TEST_CASE("spectrum cache round trip") {
    const auto dir = scratch("cache");
    const auto p = make_params(1.0, 1.0, 2.0, 3.0, 12);
    const ConvergenceOptions conv{};
    SpectrumCache cache(dir);
    const auto first = cache.get_or_solve(p, Parity::negative, conv);
    CHECK(cache.misses() == 1);
    const auto again = cache.get_or_solve(p, Parity::negative, conv);
    CHECK(cache.hits() == 1);
    CHECK(again.eigenvalues == first.eigenvalues);
    CHECK(again.eigenvectors == first.eigenvectors);
    CHECK(again.n_converged == first.n_converged);
    CHECK(again.params_digest == first.params_digest);

    const auto path = cache.path_for(first.params_digest);
    REQUIRE(fs::exists(path));

    SUBCASE("wrong digest") {
        const auto other = params_digest(make_params(1.0, 1.0, 2.0, 3.0, 13), Parity::negative, conv);
        CHECK_THROWS_AS(read_spectrum(path, p, other), CacheError);
    }
    SUBCASE("truncated") {
        fs::resize_file(path, fs::file_size(path) - 8);
        CHECK_THROWS_AS(read_spectrum(path, p, first.params_digest), CacheError);
        CHECK_THROWS_AS(cache.get_or_solve(p, Parity::negative, conv), CacheError);
    }
    SUBCASE("bad magic") {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("XXXX", 4);
        f.close();
        CHECK_THROWS_AS(read_spectrum(path, p, first.params_digest), CacheError);
    }
    SUBCASE("trailing bytes") {
        std::ofstream(path, std::ios::app | std::ios::binary) << "junk";
        CHECK_THROWS_AS(read_spectrum(path, p, first.params_digest), CacheError);
    }
    fs::remove_all(dir);
}

TEST_CASE("config parsing") {
    const auto c = config_from_json(nlohmann::json::object());
    CHECK(c.n_max_for(-1.8) == 120);
    CHECK(c.n_max_for(-1.1) == 120);
    CHECK(c.n_max_for(-0.5) == 160);
    CHECK(c.digest() == config_from_json(nlohmann::json::object()).digest());

    auto moved = c;
    moved.output_dir = "elsewhere";
    moved.threads = 4;
    CHECK(moved.digest() == c.digest());
    auto changed = c;
    changed.coupling = 2.5;
    CHECK(changed.digest() != c.digest());

    const auto round = config_from_json(config_to_json(c));
    CHECK(round.digest() == c.digest());

    using nlohmann::json;
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"j_list": [10, 5]})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"j_list": [2.3]})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"energies": [-3.0]})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"model": {"omega": -1}})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"n_max": "many"})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"fit_ranges": {"high": [2, 1]}})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"oracle": {"weights": "cauchy"}})")), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("pipeline determinism and cache idempotence") {
    const auto dir = scratch("pipe");
    auto cfg = tiny_config(dir / "a");
    cfg.cache_dir = dir / "cache";

    SpectrumCache cache(cfg.cache_dir);
    RunContext ctx{cfg, &cache, {}};
    const auto a = run_state_analysis(ctx, cfg.points);
    const auto files_a = write_state_outputs(cfg, a, dir / "a");
    const std::size_t solved = cache.misses();
    CHECK(solved == 2 * cfg.j_list.size());

    RunContext cached{cfg, &cache, {}};
    const auto b = run_state_analysis(cached, cfg.points);
    CHECK(cache.misses() == solved);
    const auto files_b = write_state_outputs(cfg, b, dir / "b");

    RunContext fresh{cfg, nullptr, {}};
    const auto c = run_state_analysis(fresh, cfg.points);
    const auto files_c = write_state_outputs(cfg, c, dir / "c");

    REQUIRE(files_a.size() == files_b.size());
    REQUIRE(files_a.size() == files_c.size());
    REQUIRE(!files_a.empty());
    for (std::size_t i = 0; i < files_a.size(); ++i) {
        CHECK(files_a[i].filename() == files_b[i].filename());
        CHECK(slurp(files_a[i]) == slurp(files_b[i]));
        CHECK(slurp(files_a[i]) == slurp(files_c[i]));
    }
    const auto head = slurp(files_a.front());
    CHECK(head.rfind("# ", 0) == 0);
    CHECK(head.find("config_digest=" + cfg.digest()) != std::string::npos);

    const auto scan = run_surface_scan(ctx, -1.8);
    CHECK(scan.rows.size() + scan.skipped.size() == 2);
    const auto s1 = write_surface_csv(cfg, scan, dir / "s1");
    const auto s2 = write_surface_csv(cfg, run_surface_scan(ctx, -1.8), dir / "s2");
    CHECK(slurp(s1.front()) == slurp(s2.front()));
    fs::remove_all(dir);
}

TEST_CASE("off-surface point is a config error") {
    const auto cfg = tiny_config("unused");
    CHECK_THROWS_AS(resolve_point({-1.8, 0.95, 0.0, ""}, cfg.model(5, 30)), ConfigError);
}
