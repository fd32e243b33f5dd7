#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "aoi_ncs/experiments.hpp"
#include "aoi_ncs/matrix_io.hpp"

using namespace aoi_ncs;

namespace {

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> lines;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') {
            lines.push_back(line);
        }
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.push_back("");
    }
    return fields;
}

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    out.close();
    return path.string();
}

} // namespace

TEST_CASE("table1 output schema and anchors") {
    Table1Options options;
    options.cycles = 20000;
    options.warmup = 100;
    options.seed = 9;
    options.threads = 1;
    const std::string csv = run_table1(options);

    const auto rows = data_lines(csv);
    REQUIRE(rows.size() == 7);
    CHECK(rows[0] ==
          "p,zero_wait_analytic,zero_wait_sim,zero_wait_stderr,"
          "meas_beta,meas_analytic,meas_sim,meas_stderr");

    // Columns: 0 p, 1 zero-wait analytic, 4 beta, 5 threshold analytic.
    const std::vector<double> expected_zero = {199.0, 39.0, 19.0, 9.0, 4.0, 1.5};
    for (std::size_t i = 0; i < expected_zero.size(); ++i) {
        const auto fields = split_csv(rows[i + 1]);
        REQUIRE(fields.size() == 8);
        CHECK(std::abs(std::stod(fields[1]) - expected_zero[i]) < 1e-4);
        // Threshold policy never loses to zero-wait in the analytic columns.
        CHECK(std::stod(fields[5]) <= std::stod(fields[1]));
    }

    SUBCASE("byte-identical across reruns and worker counts") {
        CHECK(run_table1(options) == csv);
        options.threads = 2;
        CHECK(run_table1(options) == csv);
    }

    SUBCASE("seed changes move only the simulated columns") {
        options.seed = 10;
        const auto other_rows = data_lines(run_table1(options));
        const auto before = split_csv(rows[3]);
        const auto after = split_csv(other_rows[3]);
        CHECK(before[1] == after[1]);
        CHECK(before[4] == after[4]);
        CHECK(before[5] == after[5]);
        CHECK(before[2] != after[2]);
    }
}

TEST_CASE("meas-curve emits the waiting map") {
    MeasCurveOptions options;
    const std::string csv = run_meas_curve(options);
    const auto rows = data_lines(csv);
    REQUIRE(rows.size() == 1 + options.p_list.size() * 10);
    CHECK(rows[0] == "p,y,g_continuous,g_floored");

    // p = 0.1 block: continuous waits positive through y = 8, floored
    // wait at y = 1 equals 7.
    const auto first = split_csv(rows[1]);
    CHECK(first[0] == "0.1");
    CHECK(first[1] == "1");
    CHECK(std::stoi(first[3]) == 7);
    for (int y = 1; y <= 10; ++y) {
        const auto fields = split_csv(rows[static_cast<std::size_t>(y)]);
        const double g_cont = std::stod(fields[2]);
        if (y <= 8) {
            CHECK(g_cont > 0.0);
        } else {
            CHECK(g_cont == 0.0);
            CHECK(std::stoi(fields[3]) == 0);
        }
    }
}

TEST_CASE("sweep grid, ordering, and divergence flags") {
    SweepOptions options;
    options.a_specs = {"1", "0.5", "1.1"};
    options.p_list = {0.1, 0.4};
    options.policies = {"zero-wait", "meas"};
    options.cycles = 5000;
    options.warmup = 50;
    options.seed = 21;
    options.threads = 1;
    const SweepResult result = run_sweep(options);
    CHECK(result.any_diverged);

    const auto rows = data_lines(result.csv);
    REQUIRE(rows.size() == 1 + 3 * 2 * 2);
    CHECK(rows[0] == "a,p,policy,analytic,sim,sim_stderr,diverged");

    double a1_zero_wait_p01 = 0.0;
    double a05_zero_wait_p01 = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto fields = split_csv(rows[i]);
        REQUIRE(fields.size() == 7);
        if (fields[0] == "1.1") {
            CHECK(fields[3].empty());
            CHECK(fields[4].empty());
            CHECK(fields[6] == "1");
        } else {
            CHECK(fields[6] == "0");
            if (fields[0] == "1" && fields[1] == "0.1" && fields[2] == "zero-wait") {
                a1_zero_wait_p01 = std::stod(fields[3]);
            }
            if (fields[0] == "0.5" && fields[1] == "0.1" && fields[2] == "zero-wait") {
                a05_zero_wait_p01 = std::stod(fields[3]);
            }
        }
    }
    CHECK(std::abs(a1_zero_wait_p01 - 19.0) < 1e-4);
    CHECK(a05_zero_wait_p01 < a1_zero_wait_p01);

    SUBCASE("worker count does not change the bytes") {
        options.threads = 3;
        CHECK(run_sweep(options).csv == result.csv);
    }
}

TEST_CASE("analyze reports the closed-form quantities") {
    AnalyzeOptions options;
    options.channel.p = 0.1;
    const AnalyzeResult result = run_analyze(options);
    CHECK(result.report.find("gamma=1") != std::string::npos);
    CHECK(result.report.find("expected_aoi: 19") != std::string::npos);
    CHECK(result.report.find("expected_f_delta: 19") != std::string::npos);

    const auto rows = data_lines(result.csv);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] ==
          "a,sigma2,channel,policy,max_wait,gamma,expected_aoi,expected_f_delta,meas_beta");

    SUBCASE("non-orthogonal dynamics have no gamma") {
        options.a_spec = "0.5";
        const auto other = run_analyze(options);
        CHECK(other.report.find("linear age cost: no") != std::string::npos);
        const auto fields = split_csv(data_lines(other.csv)[1]);
        CHECK(fields[5].empty());
    }

    SUBCASE("matrix file input with a planar rotation doubles the age") {
        const double c = std::cos(0.7);
        const double s = std::sin(0.7);
        std::ostringstream matrix;
        matrix.precision(17);
        matrix << c << ", " << -s << "\n" << s << ", " << c << "\n";
        options.a_spec = write_temp("aoi_ncs_rotation.txt", matrix.str());
        const auto other = run_analyze(options);
        const auto fields = split_csv(data_lines(other.csv)[1]);
        CHECK(std::stod(fields[5]) == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(std::abs(std::stod(fields[7]) - 38.0) < 1e-3);
    }

    SUBCASE("threshold policy logs its solution") {
        options.policy = "meas";
        const auto other = run_analyze(options);
        CHECK(other.report.find("beta=") != std::string::npos);
        CHECK(other.report.find("iterations=") != std::string::npos);
    }
}

TEST_CASE("simulate command plumbing") {
    SimulateOptions options;
    options.channel.p = 0.4;
    options.cycles = 2000;
    options.warmup = 10;
    options.seed = 31;
    options.want_cycle_log = true;
    const SimulateResult result = run_simulate(options);
    CHECK(result.metrics.total_cycles == 2000);
    CHECK(result.report.find("time_avg_sq_error:") != std::string::npos);

    const auto metric_rows = data_lines(result.metrics_csv);
    REQUIRE(metric_rows.size() == 2);
    CHECK(metric_rows[0] ==
          "time_avg_sq_error,empirical_mean_aoi,total_slots,total_cycles,"
          "stderr_sq_error,seed,diverged,diverged_at_slot");

    const auto log_rows = data_lines(result.cycle_csv);
    CHECK(log_rows[0] == "k,y_prev,wait,y_cur,zeta,cycle_len");
    REQUIRE(log_rows.size() == 1 + 2000);

    SUBCASE("renewal mode and rerun determinism") {
        options.renewal_mode = true;
        const auto fast = run_simulate(options);
        const auto again = run_simulate(options);
        CHECK(fast.metrics_csv == again.metrics_csv);
    }
}

TEST_CASE("system-matrix specs") {
    CHECK(parse_a_spec("0.75")(0, 0) == doctest::Approx(0.75));
    CHECK(parse_a_spec("-1")(0, 0) == doctest::Approx(-1.0));
    const auto path = write_temp("aoi_ncs_matrix.txt", "# comment\n1 0\n0.5, 0.5\n");
    const auto m = parse_a_spec(path);
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 2);
    CHECK(m(1, 0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(parse_a_spec(write_temp("aoi_ncs_ragged.txt", "1 2\n3\n")),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_a_spec("/nonexistent/path/matrix.txt"), std::invalid_argument);
}

TEST_CASE("channel options") {
    ChannelOptions none;
    CHECK_THROWS_AS(make_channel(none), std::invalid_argument);

    ChannelOptions det;
    det.det = 3;
    CHECK(make_channel(det).mean() == doctest::Approx(3.0));

    ChannelOptions file;
    file.dist_file = write_temp("aoi_ncs_pmf.txt", "1 0.25\n2 0.75\n");
    const auto dist = make_channel(file);
    CHECK(dist.mean() == doctest::Approx(1.75));

    ChannelOptions bad;
    bad.dist_file = write_temp("aoi_ncs_pmf_bad.txt", "1 0.25\n2 0.80\n");
    CHECK_THROWS_AS(make_channel(bad), std::invalid_argument);
}

TEST_CASE("number formatting is stable") {
    CHECK(format_double(4.0) == "4");
    CHECK(format_double(1.5) == "1.5");
    CHECK(format_double(1e-12) == "1e-12");
    CHECK(format_double(0.1) == "0.1");
}
