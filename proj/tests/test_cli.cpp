#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ttd/io.hpp"
#include "ttd/tensor.hpp"

namespace fs = std::filesystem;

namespace {

const std::string cli = TTD_CLI_PATH;

int run(const std::string &args) {
    const int status = std::system((cli + " " + args).c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path work_dir() {
    fs::path dir = fs::temp_directory_path() / "ttd_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path &p) {
    std::ifstream is(p);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string &text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

} // namespace

TEST_CASE("usage errors exit with code 1") {
    CHECK(run("> /dev/null 2>&1") == 1);
    CHECK(run("decompose --method ctd > /dev/null 2>&1") == 1); // missing --input
    CHECK(run("frobnicate > /dev/null 2>&1") == 1);
    CHECK(run("--help > /dev/null 2>&1") == 0);
}

TEST_CASE("missing input file exits with code 1 and an error message") {
    fs::path dir = work_dir();
    fs::path err = dir / "err.txt";
    CHECK(run("decompose --input " + (dir / "nope.tnsr").string() +
              " --method ctd 2> " + err.string()) == 1);
    CHECK(slurp(err).find("error:") != std::string::npos);
}

TEST_CASE("decompose of a zero tensor: empty RSE, zero ranks, exit 0") {
    fs::path dir  = work_dir();
    fs::path zero = dir / "zero.tnsr";
    ttd::write_tnsr(zero.string(), ttd::Tensor({6, 6, 6}));
    fs::path prefix = dir / "zero_ctd";
    REQUIRE(run("decompose --input " + zero.string() + " --method ctd --out " +
                prefix.string() + " > /dev/null") == 0);

    auto summary = lines_of(slurp(prefix.string() + "_summary.csv"));
    REQUIRE(summary.size() == 2);
    CHECK(summary[0] == "method,rse,est_ranks,iterations,wall_ms,converged");
    CHECK(summary[1].rfind("ctd,,0|0|0,1,", 0) == 0);

    // nctd needs ranks but also handles the zero tensor
    fs::path nprefix = dir / "zero_nctd";
    REQUIRE(run("decompose --input " + zero.string() + " --method nctd --ranks 2 --out " +
                nprefix.string() + " > /dev/null") == 0);
    CHECK(lines_of(slurp(nprefix.string() + "_summary.csv"))[1].rfind("nctd,,0|0|0,", 0) == 0);
}

TEST_CASE("gen then decompose with a reference reports a small RSE") {
    fs::path dir = work_dir();
    REQUIRE(run("gen --dims 30,30,30 --true-rank 5 --seed 3 --out " +
                (dir / "t.tnsr").string() + " --clean-out " + (dir / "clean.tnsr").string() +
                " > /dev/null") == 0);
    fs::path prefix = dir / "ctd30";
    REQUIRE(run("decompose --input " + (dir / "t.tnsr").string() +
                " --method ctd --reference " + (dir / "clean.tnsr").string() + " --out " +
                prefix.string() + " > /dev/null") == 0);

    auto summary = lines_of(slurp(prefix.string() + "_summary.csv"));
    REQUIRE(summary.size() == 2);
    // fields: method,rse,est_ranks,...
    std::stringstream row(summary[1]);
    std::string method, rse_field, ranks_field;
    std::getline(row, method, ',');
    std::getline(row, rse_field, ',');
    std::getline(row, ranks_field, ',');
    CHECK(method == "ctd");
    CHECK(std::stod(rse_field) <= 1e-2);
    CHECK(ranks_field == "5|5|5");

    // factor/core/reconstruction artifacts exist and parse
    CHECK(ttd::read_tnsr((prefix.string() + "_core.tnsr")).order() == 3);
    CHECK(ttd::read_tnsr((prefix.string() + "_factor_1.tnsr")).dims() == ttd::Dims{30, 5});
    CHECK(ttd::read_tnsr((prefix.string() + "_recon.tnsr")).dims() == ttd::Dims{30, 30, 30});
    CHECK(!lines_of(slurp(prefix.string() + "_trace.csv")).empty());
}

TEST_CASE("an iteration-capped solve exits with code 2") {
    fs::path dir = work_dir();
    REQUIRE(run("gen --dims 12,12,12 --true-rank 3 --delta 0.02 --unit-scale --seed 5 --out " +
                (dir / "noisy.tnsr").string() + " > /dev/null") == 0);
    CHECK(run("decompose --input " + (dir / "noisy.tnsr").string() +
              " --method ctd --max-iter 3 --out " + (dir / "cap").string() +
              " > /dev/null") == 2);
}

TEST_CASE("config file values apply and CLI flags win over them") {
    fs::path dir = work_dir();
    fs::path cfg = dir / "solve.cfg";
    {
        std::ofstream os(cfg);
        os << "# solver settings\n"
           << "method=ctd\n"
           << "input=" << (dir / "noisy.tnsr").string() << "\n"
           << "out=" << (dir / "cfgrun").string() << "\n"
           << "max-iter=3\n";
    }
    // from the file alone: capped at 3 iterations -> exit 2
    CHECK(run("decompose --config " + cfg.string() + " > /dev/null") == 2);
    // CLI override lifts the cap -> converges, exit 0
    CHECK(run("decompose --config " + cfg.string() + " --max-iter 500 > /dev/null") == 0);
}

TEST_CASE("benchmark output is bit-identical across reruns (fixed seed)") {
    fs::path dir = work_dir();
    const std::string cmd =
        "benchmark --dims 10,10,10 --true-rank 3 --ranks 4 --delta 0.02 --unit-scale "
        "--methods hosvd,ctd,nctd --repeats 2 --seed 123 --out ";
    REQUIRE(run(cmd + (dir / "b1.csv").string()) == 0);
    REQUIRE(run(cmd + (dir / "b2.csv").string()) == 0);

    auto l1 = lines_of(slurp(dir / "b1.csv"));
    auto l2 = lines_of(slurp(dir / "b2.csv"));
    REQUIRE(l1.size() == l2.size());
    REQUIRE(l1.size() == 1 + 6 + 3); // header + 3 methods x 2 repeats + 3 aggregates
    for (std::size_t i = 0; i < l1.size(); ++i) {
        // strip the wall_ms column (index 12) before comparing
        auto strip = [](const std::string &line) {
            std::vector<std::string> f;
            std::stringstream ss(line);
            std::string field;
            while (std::getline(ss, field, ',')) f.push_back(field);
            if (f.size() >= 13) f[12] = "";
            std::string out;
            for (std::size_t k = 0; k < f.size(); ++k) out += (k ? "," : "") + f[k];
            return out;
        };
        REQUIRE(strip(l1[i]) == strip(l2[i]));
    }
}

TEST_CASE("phase subcommand emits the long-format grid") {
    fs::path dir = work_dir();
    REQUIRE(run("phase --dims 10,10,10 --true-rank 2 --ranks 2,3 --deltas 0,0.01 "
                "--method hosvd --repeats 2 --seed 9 --out " +
                (dir / "p.csv").string()) == 0);
    auto lines = lines_of(slurp(dir / "p.csv"));
    REQUIRE(lines.size() == 5); // header + 2x2 grid
    CHECK(lines[0] ==
          "method,dims,true_rank,axis,given_rank,axis_value,success_fraction,mean_rse,repeats");
    CHECK(lines[1].rfind("hosvd,10x10x10,2,delta,2,", 0) == 0);

    // both axes at once is a usage error
    CHECK(run("phase --dims 10,10,10 --true-rank 2 --ranks 2 --deltas 0 --ratios 0 "
              "--method hosvd 2> /dev/null") == 1);
}

TEST_CASE("trace subcommand interleaves methods and iteration curves") {
    fs::path dir = work_dir();
    REQUIRE(run("trace --dims 50,50,50 --true-rank 10 --delta 0.02 --unit-scale "
                "--methods hooi,ctd,nctd --seed 6 --out " +
                (dir / "tr.csv").string()) == 0);
    const std::string text = slurp(dir / "tr.csv");
    auto lines             = lines_of(text);
    CHECK(lines[0] == "method,iter,residual,rel_change,objective,wall_ms");
    CHECK(text.find("\nhooi,1,") != std::string::npos);
    CHECK(text.find("\nctd,5,") != std::string::npos);
    CHECK(text.find("\nnctd,50,") != std::string::npos);

    // the relative change shrinks as the solvers settle
    auto rel_change_at = [&](const std::string &method, int iter) {
        const std::string key = method + "," + std::to_string(iter) + ",";
        for (const std::string &line : lines)
            if (line.rfind(key, 0) == 0) {
                std::stringstream ss(line);
                std::string f;
                for (int k = 0; k < 4; ++k) std::getline(ss, f, ',');
                return std::stod(f);
            }
        FAIL("missing trace row " + key);
        return 0.0;
    };
    CHECK(rel_change_at("nctd", 50) < rel_change_at("nctd", 5));
    CHECK(rel_change_at("ctd", 50) < rel_change_at("ctd", 5));
}
