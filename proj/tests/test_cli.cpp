#include <doctest.h>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>

#include "vpcalc/dsl.hpp"

namespace {

struct RunResult {
    int status;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(VPCALC_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    RunResult r{-1, {}};
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int rc = pclose(p);
    r.status = WEXITSTATUS(rc);
    return r;
}

} // namespace

TEST_CASE("cli reduce prints the reduction formula") {
    auto r = run_cli("reduce \"VP[1/(x-z1)]*VP[1/(x-z2)]\"");
    CHECK(r.status == 0);
    CHECK(r.out.find("pi^2") != std::string::npos);
    CHECK(r.out.find("delta") != std::string::npos);
    // output re-parses
    std::string line = r.out.substr(0, r.out.find('\n'));
    CHECK_NOTHROW(vpcalc::dsl::parse_expr(line));
}

TEST_CASE("cli rejects malformed expressions with exit code 2") {
    auto r = run_cli("reduce \"VP[1/(x-\"");
    CHECK(r.status == 2);
    CHECK(r.out.find("parse error") != std::string::npos);
    CHECK(r.out.find("column 8") != std::string::npos);
}

TEST_CASE("cli quadrature commands") {
    auto d = run_cli("quad dilog --z 2");
    CHECK(d.status == 0);
    CHECK(d.out.find("-0.822467033424") != std::string::npos);

    auto pv = run_cli("quad pv --pole 0.5 --n 2 --a 0 --b 1");
    CHECK(pv.status == 0);
    CHECK(pv.out.find("-4") != std::string::npos);

    auto lg = run_cli("quad log --c 0 --a 0 --b 1 --f \"t\"");
    CHECK(lg.status == 0);
    CHECK(lg.out.find("-0.25") != std::string::npos);
}

TEST_CASE("cli integrate evaluates a double integral") {
    auto r = run_cli("integrate \"VP[1/(x-z)]\" --spec \"x=0..1; z=0..1\"");
    CHECK(r.status == 0);
    // the value is 0 by symmetry
    std::istringstream ss(r.out);
    double v;
    ss >> v;
    CHECK(std::abs(v) < 1e-7);
}

TEST_CASE("cli scan emits stable csv with the threshold row skipped") {
    const std::string args = "iz_scan --min -0.9 --max 3 --steps 40 --route both";
    auto r1 = run_cli(args);
    auto r2 = run_cli(args);
    CHECK(r1.status == 0);
    CHECK(r1.out == r2.out); // bit-stable across runs
    CHECK(r1.out.find("# z=0 skipped") != std::string::npos);

    std::istringstream ss(r1.out);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "z,I_route_A,I_route_B,oracle,abs_disagreement");
    int rows = 0, with_a = 0, comment = 0;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            ++comment;
            continue;
        }
        ++rows;
        const double z = std::stod(line.substr(0, line.find(',')));
        const std::string a_field =
            line.substr(line.find(',') + 1,
                        line.find(',', line.find(',') + 1) - line.find(',') - 1);
        if (!a_field.empty()) {
            ++with_a;
            CHECK(z > 0);
        } else {
            CHECK(z < 0);
        }
    }
    CHECK(rows == 39); // one of 40 grid points sits exactly on the threshold
    CHECK(comment == 1);
    CHECK(with_a == 30);
}
