#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qubitless/config.hpp"
#include "qubitless/experiments.hpp"
#include "support.hpp"

using namespace qubitless;
using namespace qubitless::testing;
namespace fs = std::filesystem;

namespace {

ExperimentConfig random_config(std::mt19937_64& g) {
    ExperimentConfig c;
    c.length = pick(g, 2, 8);
    c.coupling = uniform(g, 0.01, 100.0);
    c.omega0 = uniform(g, 1.0, 1000.0);
    c.delta_omega = uniform(g, 0.0, 300.0);
    if (pick(g, 0, 1))
        for (std::size_t k = 0; k < c.length; ++k) c.larmor.push_back(uniform(g, 1.0, 1000.0));
    c.rabi = uniform(g, 1e-3, 5.0);
    if (pick(g, 0, 1)) {
        const double start = uniform(g, 1e-3, 1.0);
        c.sweep_rabi = Grid::range(start, start + uniform(g, 0.0, 2.0), uniform(g, 1e-3, 0.5));
    } else {
        std::vector<double> v(pick(g, 1, 6));
        for (auto& x : v) x = uniform(g, 1e-3, 2.0);
        c.sweep_rabi = Grid::list(v);
    }
    std::vector<double> dws(pick(g, 1, 4));
    for (auto& x : dws) x = uniform(g, 1.0, 300.0);
    c.sweep_delta_omega = Grid::list(dws);
    c.k = static_cast<int>(pick(g, 1, 10));
    c.engine = static_cast<Engine>(pick(g, 0, 2));
    c.units = pick(g, 0, 1) ? Units::J : Units::absolute;
    c.out = "out_" + std::to_string(pick(g, 0, 1000000));
    c.threads = pick(g, 0, 16);
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() /
               ("qubitless_" + std::to_string(::getpid()) + "_" + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::string& args) const {
        const std::string cmd = std::string(QUBITLESS_CLI) + " " + args + " > " + (dir_ / "stdout.txt").string() +
                                " 2> " + (dir_ / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
    std::string out(const std::string& sub) const { return "--out " + (dir_ / sub).string(); }
    fs::path path(const std::string& name) const { return dir_ / name; }

    void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

    fs::path dir_;
};

// frequency column of a transitions.csv row
double transition_frequency(const std::string& csv, const std::string& from, const std::string& to) {
    std::istringstream in(csv);
    std::string line;
    const std::string prefix = from + "," + to + ",";
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0) return std::stod(line.substr(prefix.size()));
    return -1.0;
}

}  // namespace

TEST(Grid, ExpandsRangeWithoutDrift) {
    const auto v = Grid::range(0.02, 0.5, 0.002).expand();
    ASSERT_EQ(v.size(), 241u);
    EXPECT_DOUBLE_EQ(v.front(), 0.02);
    EXPECT_NEAR(v.back(), 0.5, 1e-12);
    EXPECT_EQ(Grid::range(1.0, 1.0, 0.5).expand().size(), 1u);
    EXPECT_EQ(Grid::range(0.0, 1.05, 0.5).expand().size(), 3u);
}

TEST(Grid, Parsing) {
    EXPECT_EQ(parse_grid("1,2.5,3").values, (std::vector<double>{1.0, 2.5, 3.0}));
    EXPECT_TRUE(parse_grid("0:1:0.25").is_range());
    EXPECT_EQ(parse_grid("0:1:0.25").expand().size(), 5u);
    EXPECT_THROW(parse_grid("1:2"), ParseError);
    EXPECT_THROW(parse_grid("1:2:3:4"), ParseError);
    EXPECT_THROW(parse_grid("1,,2"), ParseError);
    EXPECT_THROW(parse_grid(""), ParseError);
    EXPECT_THROW(validate(Grid::range(0.0, 1.0, 0.0), "g"), ConfigError);
    EXPECT_THROW(validate(Grid::range(1.0, 0.0, 0.1), "g"), ConfigError);
    EXPECT_THROW(validate(Grid::list({}), "g"), ConfigError);
}

TEST(Config, DefaultsMatchReference) {
    const ExperimentConfig c;
    EXPECT_DOUBLE_EQ(c.omega0, 100.0);
    EXPECT_EQ(c.sweep_delta_omega.expand(), (std::vector<double>{10.0, 50.0, 250.0}));
    const auto s = shor_defaults();
    EXPECT_EQ(s.length, 4u);
    EXPECT_DOUBLE_EQ(s.coupling, 30.0);
    EXPECT_DOUBLE_EQ(s.delta_omega, 30.0);
    EXPECT_DOUBLE_EQ(s.rabi, 0.5);
    EXPECT_NO_THROW(validate(c));
    EXPECT_NO_THROW(validate(s));
}

TEST(Properties, ConfigRoundTrip) {
    auto g = rng(51);
    for (int trial = 0; trial < 100; ++trial) {
        const auto c = random_config(g);
        EXPECT_EQ(parse_config(serialize(c)), c) << serialize(c);
    }
}

TEST(Config, ParseErrors) {
    EXPECT_THROW(parse_config("bogus=1\n"), ParseError);
    EXPECT_THROW(parse_config("length\n"), ParseError);
    EXPECT_THROW(parse_config("length=2.5\n"), ParseError);
    EXPECT_THROW(parse_config("engine=fast\n"), ParseError);
    EXPECT_THROW(parse_config("units=Hz\n"), ParseError);
    try {
        parse_config("# comment\nJ=2\n\nrabi=abc\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
    }
    const auto c = parse_config("J = 2  # coupling\nengine=rwa\n");
    EXPECT_DOUBLE_EQ(c.coupling, 2.0);
    EXPECT_EQ(c.engine, Engine::rwa);
}

TEST(Config, ValidationErrors) {
    ExperimentConfig c;
    c.coupling = 0.0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.length = 1;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.k = 0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.sweep_rabi = Grid::list({0.1, -0.1});
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.larmor = {100.0};
    EXPECT_THROW(validate(c), ConfigError);
}

TEST(Experiments, SweepIsDeterministicAcrossThreadCounts) {
    const std::vector<double> rabis{0.1, 0.2, 0.3, 0.4, 0.5};
    const std::vector<double> dws{10.0, 50.0};
    std::ostringstream one, four;
    write_cnot_csv(one, cnot_error_sweep(1.0, 100.0, rabis, dws, Engine::exact, 1));
    write_cnot_csv(four, cnot_error_sweep(1.0, 100.0, rabis, dws, Engine::exact, 4));
    EXPECT_EQ(one.str(), four.str());
}

TEST(Experiments, RowsAreNormalizedAndOrdered) {
    const auto rows = cnot_error_sweep(1.0, 100.0, {0.1, 0.3}, {10.0, 250.0}, Engine::exact, 2);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_DOUBLE_EQ(rows[0].delta_omega, 10.0);
    EXPECT_DOUBLE_EQ(rows[1].rabi, 0.3);
    EXPECT_DOUBLE_EQ(rows[2].delta_omega, 250.0);
    for (const auto& r : rows) EXPECT_NEAR(r.p00 + r.p01 + r.p10 + r.p11, 1.0, 1e-8);
}

TEST(Experiments, ParallelForRethrows) {
    EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw NoSolution("x"); }), NoSolution);
}

TEST(Experiments, SpectrumCsvHasQuotedFrequency) {
    const auto cfg = two_spin(1.0, 100.0, 150.0, 0.1);
    const auto spec = solve_chain(cfg);
    std::ostringstream os;
    write_transitions_csv(os, transition_table(spec, cfg), cfg, Units::J);
    EXPECT_NEAR(transition_frequency(os.str(), "10", "11"), 98.98, 0.005);
    EXPECT_NEAR(transition_frequency(os.str(), "00", "10"), 151.02, 0.005);
}

TEST_F(Cli, SpectrumWritesFiles) {
    ASSERT_EQ(run("spectrum --J 1 --omega0 100 --delta-omega 50 " + out("a")), 0);
    EXPECT_NEAR(transition_frequency(slurp(path("a/transitions.csv")), "10", "11"), 98.98, 0.005);
    EXPECT_TRUE(fs::exists(path("a/spectrum.csv")));
    const auto report = slurp(path("a/reachability.txt"));
    EXPECT_NE(report.find("4 of 4"), std::string::npos) << report;
    EXPECT_NE(report.find("100.98"), std::string::npos) << report;
}

TEST_F(Cli, UniformFieldReachability) {
    ASSERT_EQ(run("spectrum --length 4 --delta-omega 0 " + out("u")), 0);
    const auto report = slurp(path("u/reachability.txt"));
    EXPECT_NE(report.find("5 of 16"), std::string::npos) << report;
}

TEST_F(Cli, ConfigFileAndFlagPrecedence) {
    write("run.cfg", "J=2\nomega0=100\ndelta_omega=50\n");
    ASSERT_EQ(run("spectrum --config " + path("run.cfg").string() + " --J 1 --units absolute " + out("p")), 0);
    EXPECT_NEAR(transition_frequency(slurp(path("p/transitions.csv")), "10", "11"), 98.98, 0.005);
}

TEST_F(Cli, ExitCodes) {
    write("bad.cfg", "length=two\n");
    EXPECT_EQ(run("spectrum --config " + path("bad.cfg").string() + " " + out("x")), 2);
    EXPECT_FALSE(slurp(path("stderr.txt")).empty());
    EXPECT_EQ(run("spectrum --no-such-flag"), 2);
    EXPECT_EQ(run("spectrum --J -1 " + out("x")), 2);
    EXPECT_EQ(run("spectrum --config " + path("missing.cfg").string()), 2);
    write("blocker", "");
    EXPECT_EQ(run("spectrum --out " + path("blocker/sub").string()), 1);
    write("gates.txt", "cnot c=1 t=0\n");
    EXPECT_EQ(run("compile " + path("gates.txt").string() + " --J 1e-7 " + out("x")), 3);
    EXPECT_EQ(run("compile " + path("nope.txt").string() + " " + out("x")), 1);
}

TEST_F(Cli, CompileWritesPulses) {
    write("gates.txt", "# demo\nu q=1 theta=1.5707963267948966 phi=0\ncnot c=1 t=0\n");
    ASSERT_EQ(run("compile " + path("gates.txt").string() + " " + out("c")), 0);
    std::ifstream in(path("c/pulses.txt"));
    EXPECT_EQ(read_sequence(in).size(), 3u);
}

TEST_F(Cli, ShorRwaAndDeterminism) {
    ASSERT_EQ(run("shor --engine rwa " + out("s1")), 0);
    ASSERT_EQ(run("shor --engine rwa " + out("s2")), 0);
    const auto csv = slurp(path("s1/shor.csv"));
    for (const char* f : {"shor.csv", "shor_summary.txt", "shor_pulses.txt"})
        EXPECT_EQ(slurp(path("s1") / f), slurp(path("s2") / f)) << f;
    std::istringstream in(csv);
    std::string line;
    int quarter = 0;
    std::getline(in, line);
    while (std::getline(in, line)) {
        const auto a = line.find(','), b = line.find(',', a + 1);
        if (std::abs(std::stod(line.substr(a + 1, b - a - 1)) - 0.25) < 1e-12) ++quarter;
    }
    EXPECT_EQ(quarter, 4);
    std::ifstream pulses(path("s1/shor_pulses.txt"));
    EXPECT_EQ(read_sequence(pulses).size(), 41u);
}

TEST_F(Cli, CnotSweepDeterministic) {
    const std::string grid = "cnot-sweep --rabi-grid 0.1:0.3:0.1 --delta-omega-grid 10,250 ";
    ASSERT_EQ(run(grid + "--threads 1 " + out("t1")), 0);
    ASSERT_EQ(run(grid + "--threads 4 " + out("t4")), 0);
    EXPECT_EQ(slurp(path("t1/cnot_sweep.csv")), slurp(path("t4/cnot_sweep.csv")));
    EXPECT_EQ(slurp(path("t1/two_pi_k.csv")), slurp(path("t4/two_pi_k.csv")));
    std::istringstream in(slurp(path("t1/cnot_sweep.csv")));
    std::string line;
    int rows = -1;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 6);
}
