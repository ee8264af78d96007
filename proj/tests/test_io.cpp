#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "cascade/commands.hpp"
#include "cascade/config.hpp"
#include "cascade/io.hpp"

using namespace cascade;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test run.
fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "cascade-io-test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"rfcascade"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("17-digit serialization round-trips doubles bit-exactly") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    std::uniform_int_distribution<int> exponent(-30, 30);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::ldexp(mantissa(rng), exponent(rng));
        const std::string text = format_double(v);
        CHECK(std::strtod(text.c_str(), nullptr) == v);
    }
    CHECK(std::strtod(format_double(1.0 / 3.0).c_str(), nullptr) == 1.0 / 3.0);
    CHECK(std::strtod(format_double(0.0).c_str(), nullptr) == 0.0);
}

TEST_CASE("diagram CSV round trip") {
    DiagramCurve curve;
    curve.kind = CurveKind::ss;
    curve.points.push_back({1.0 / 3.0, {0.123456789012345678, 1e-17}, 0.87, -1, true});
    curve.points.push_back({0.028, {0.5, 0.75}, 1.0 / 7.0, 1, false});
    curve.points.push_back({1e-4, {0.0, 1.0}, 0.25, 1, std::nullopt});
    DiagramCurve av = curve;
    av.kind = CurveKind::av;

    MetaBlock meta;
    meta.add("command", std::string("test"));
    meta.add("gamma", 15.0);

    const fs::path path = scratch_dir() / "diagram.csv";
    write_diagram_csv(path.string(), {curve, av}, meta);
    const auto rows = read_diagram_csv(path.string());
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].curve == "ss");
    CHECK(rows[3].curve == "av");
    for (int block = 0; block < 2; ++block) {
        for (size_t i = 0; i < curve.points.size(); ++i) {
            const DiagramRow& row = rows[block * curve.points.size() + i];
            const BranchPoint& p = curve.points[i];
            CHECK(row.da == p.p);
            CHECK(row.alpha1 == p.state.alpha1);
            CHECK(row.alpha2 == p.state.alpha2);
            CHECK(row.alpha_out == p.alpha_out);
            CHECK(row.det_sign == p.det_sign);
            CHECK(row.stable == p.stable);
        }
    }

    const std::string content = slurp(path);
    CHECK(content.find("# rfcascade ") == 0);
    CHECK(content.find("# gamma = 15\n") != std::string::npos);
    CHECK(content.find("curve,Da,alpha1,alpha2,alpha_out,det_sign,stable\n") != std::string::npos);
    CHECK(content.find('\r') == std::string::npos);
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
}

TEST_CASE("time-series CSV round trip") {
    Trajectory traj;
    traj.samples.push_back({0.0, {0.0, 0.0}, 0.0, FlowDirection::forward, CyclePhase::series});
    traj.samples.push_back(
        {0.5, {1.0 / 3.0, 2.0 / 3.0}, 2.0 / 3.0, FlowDirection::forward, CyclePhase::series});
    traj.samples.push_back(
        {1.25, {0.1234, 0.9876}, 0.9876, FlowDirection::reversed, CyclePhase::relaxing});

    const fs::path path = scratch_dir() / "series.csv";
    write_timeseries_csv(path.string(), traj, {});
    const auto rows = read_timeseries_csv(path.string());
    REQUIRE(rows.size() == 3);
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].tau == traj.samples[i].tau);
        CHECK(rows[i].alpha1 == traj.samples[i].state.alpha1);
        CHECK(rows[i].alpha2 == traj.samples[i].state.alpha2);
        CHECK(rows[i].alpha_out == traj.samples[i].alpha_out);
        CHECK(rows[i].io == io_value(traj.samples[i].dir));
    }
    CHECK(rows[0].phase == "series");
    CHECK(rows[2].phase == "relaxing");
}

TEST_CASE("scan CSV round trip and embedded gain report") {
    ScanResult scan;
    scan.table.push_back({0.0, 0.093, true, 12});
    scan.table.push_back({4.5, 0.4297, true, 26});
    scan.table.push_back({6.0, 0.0, false, 5000});
    scan.best_tau_rel = 4.5;
    scan.best_average = 0.4297;
    scan.gain_vs_reverse = 4.62;
    scan.cold_check_average = 0.4297;
    scan.cold_check_consistent = true;

    const fs::path path = scratch_dir() / "scan.csv";
    write_scan_csv(path.string(), scan, {});
    const auto rows = read_scan_csv(path.string());
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].tau_rel == 4.5);
    CHECK(rows[1].alpha_avg == 0.4297);
    CHECK(rows[2].settled == false);
    CHECK(rows[2].cycles == 5000);

    const std::string content = slurp(path);
    CHECK(content.find("# best_tau_rel = 4.5\n") != std::string::npos);
    CHECK(content.find("# gain_vs_reverse = 4.62") != std::string::npos);
    CHECK(content.find("# gain_vs_constant = n/a\n") != std::string::npos);
}

TEST_CASE("config file parsing") {
    const fs::path path = scratch_dir() / "run.cfg";
    {
        std::ofstream out(path);
        out << "# comment line\n";
        out << "gamma = 14.5\n";
        out << "da-min = 0.001   # trailing comment\n";
        out << "da_max = 0.05\n";
        out << "out = from_file.csv\n";
    }
    const auto entries = parse_config_file(path.string());
    RunConfig config;
    for (const auto& [k, v] : entries) apply_config_entry(config, k, v);
    CHECK(config.params.gamma == 14.5);
    REQUIRE(config.da_range.has_value());
    CHECK(config.da_range->first == 0.001);
    CHECK(config.da_range->second == 0.05);
    CHECK(config.out == "from_file.csv");

    CHECK_THROWS_AS(apply_config_entry(config, "not_a_key", "1"), UsageError);
    CHECK_THROWS_AS(apply_config_entry(config, "gamma", "abc"), UsageError);
    CHECK_THROWS_AS(apply_config_entry(config, "seed_alpha1", "1.5"), UsageError);

    const fs::path bad = scratch_dir() / "bad.cfg";
    {
        std::ofstream out(bad);
        out << "gamma 15\n";
    }
    CHECK_THROWS_AS(parse_config_file(bad.string()), UsageError);
    CHECK_THROWS_AS(parse_config_file((scratch_dir() / "missing.cfg").string()), UsageError);
}

TEST_CASE("mode inference and da-form validation") {
    RunConfig config;
    CHECK(std::holds_alternative<ConstantFlowMode>(config.mode()));
    config.tau_rf = 1.0;
    CHECK(std::holds_alternative<ReverseFlowMode>(config.mode()));
    config.tau_rel = 0.5;
    CHECK(std::holds_alternative<RelaxationModeCfg>(config.mode()));
    config.tau_rel = 1.5;
    CHECK_THROWS_AS(config.mode(), UsageError);

    RunConfig single;
    CHECK_THROWS_AS(single.require_single_da(), UsageError);
    single.da = 0.02;
    CHECK_NOTHROW(single.require_single_da());
    CHECK_THROWS_AS(single.require_da_range(), UsageError);

    RunConfig range;
    range.da_range = {0.02, 0.02};
    CHECK_THROWS_AS(range.require_da_range(), UsageError);  // empty range
    range.da_range = {0.01, 0.02};
    CHECK_NOTHROW(range.require_da_range());
}

TEST_CASE("CLI exit codes") {
    const std::string out = (scratch_dir() / "cli_out.csv").string();

    CHECK(run({}) == 2);                                   // missing subcommand
    CHECK(run({"bogus"}) == 2);                            // unknown subcommand
    CHECK(run({"steady", "--da-min", "0.01"}) == 2);       // missing required flags
    CHECK(run({"--help"}) == 0);
    CHECK(run({"--version"}) == 0);
    CHECK(run({"simulate", "--da", "0.02", "--cycles", "-3", "--out", out}) == 2);
    CHECK(run({"simulate", "--da", "0.02", "--tau-rel", "0.5", "--out", out}) == 2);
    CHECK(run({"steady", "--da-min", "0.02", "--da-max", "0.01", "--out", out}) == 2);

    // Header-only trajectory for zero cycles.
    CHECK(run({"simulate", "--da", "0.02", "--cycles", "0", "--out", out}) == 0);
    CHECK(read_timeseries_csv(out).empty());
    const std::string content = slurp(out);
    CHECK(content.find("tau,alpha1,alpha2,alpha_out,io,phase\n") != std::string::npos);
    CHECK(content.find("# da = 0.02\n") != std::string::npos);

    // Settling budget too small for the multiplicity window: numerical failure
    // plus a sidecar log next to the requested output.
    const std::string stuck = (scratch_dir() / "stuck.csv").string();
    CHECK(run({"periodic", "--da-min", "0.022", "--da-max", "0.023", "--tau-rf", "1",
               "--settle-cycles", "4", "--out", stuck}) == 3);
    CHECK_FALSE(fs::exists(stuck));
    CHECK(fs::exists(stuck + ".log"));
    CHECK(slurp(stuck + ".log").find("aborted:") == 0);
}

TEST_CASE("flags override the config file") {
    const fs::path cfg = scratch_dir() / "override.cfg";
    const std::string out = (scratch_dir() / "override.csv").string();
    {
        std::ofstream f(cfg);
        f << "da = 0.01\n";
        f << "cycles = 0\n";
        f << "gamma = 12\n";
    }
    CHECK(run({"simulate", "--config", cfg.string(), "--da", "0.03", "--out", out}) == 0);
    const std::string content = slurp(out);
    CHECK(content.find("# da = 0.03\n") != std::string::npos);   // flag wins
    CHECK(content.find("# gamma = 12\n") != std::string::npos);  // file value survives
}

TEST_CASE("simulate writes a parseable reverse-flow series") {
    const std::string out = (scratch_dir() / "reverse.csv").string();
    CHECK(run({"simulate", "--da", "0.022", "--tau-rf", "1", "--cycles", "4", "--out", out}) == 0);
    const auto rows = read_timeseries_csv(out);
    REQUIRE(!rows.empty());
    CHECK(rows.front().tau == 0.0);
    CHECK(rows.back().tau == 4.0);
    // Alternating direction is visible in the io column.
    bool saw0 = false, saw1 = false;
    for (const auto& r : rows) {
        saw0 = saw0 || r.io == 0;
        saw1 = saw1 || r.io == 1;
        CHECK(r.phase == "series");
    }
    CHECK(saw0);
    CHECK(saw1);
}

TEST_CASE("two seeds expose the lower and upper oscillation bands") {
    const std::string low_path = (scratch_dir() / "band_low.csv").string();
    const std::string high_path = (scratch_dir() / "band_high.csv").string();
    CHECK(run({"simulate", "--da", "0.022", "--tau-rf", "1", "--cycles", "40", "--out",
               low_path}) == 0);
    CHECK(run({"simulate", "--da", "0.022", "--tau-rf", "1", "--cycles", "40", "--seed-alpha1",
               "0.9", "--seed-alpha2", "0.9", "--out", high_path}) == 0);
    auto tail_mean = [](const std::string& path) {
        const auto rows = read_timeseries_csv(path);
        REQUIRE(rows.size() > 100);
        double sum = 0.0;
        size_t n = rows.size() / 10;
        for (size_t i = rows.size() - n; i < rows.size(); ++i) sum += rows[i].alpha_out;
        return sum / n;
    };
    CHECK(tail_mean(high_path) - tail_mean(low_path) > 0.1);
}

TEST_CASE("SVG convenience output") {
    const std::string out = (scratch_dir() / "svg_run.csv").string();
    const std::string svg = (scratch_dir() / "svg_run.svg").string();
    CHECK(run({"simulate", "--da", "0.022", "--tau-rf", "1", "--cycles", "2", "--out", out,
               "--svg", svg}) == 0);
    const std::string content = slurp(svg);
    CHECK(content.find("<svg") == 0);
    CHECK(content.find("<polyline") != std::string::npos);
    CHECK(content.find("alpha_out") != std::string::npos);
}
