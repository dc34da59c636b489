// Acceptance suite: runs every verification scenario at its pinned tolerance
// and prints one PASS/FAIL line per criterion. Exit status 0 iff all pass.

#include <cstdio>
#include <iostream>

#include "vpcalc/scenarios.hpp"

int main(int argc, char** argv) {
    vpcalc::scenarios::VerifyOptions opts;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--skip-slow") opts.include_slow = false;
        if (a == "--seed" && i + 1 < argc) opts.seed = std::stoul(argv[++i]);
    }

    auto reports = vpcalc::scenarios::verify_suite(opts);
    std::cout << vpcalc::scenarios::to_text(reports);

    int failed = 0;
    for (const auto& r : reports)
        if (!r.passed) ++failed;
    if (failed) {
        std::cout << failed << " acceptance checks FAILED\n";
        return 1;
    }
    std::cout << "all acceptance checks passed\n";
    return 0;
}
