// Acceptance runner: executes every verification suite at its pinned
// thresholds and prints one PASS/FAIL line per criterion. Exit code is the
// number of failed criteria (0 on full success).

#include <cstdio>

#include "orthoflow/verify.hpp"

using namespace orthoflow;
using verify::SuiteReport;
using verify::VerifyConfig;

namespace {

struct Criterion {
    const char* label;
    SuiteReport report;
    double budgetSeconds;  // 0 = no runtime requirement
};

int report(const Criterion& c) {
    bool timeOk = c.budgetSeconds <= 0 || c.report.seconds <= c.budgetSeconds;
    bool pass = c.report.pass() && timeOk;
    std::printf("%s criterion %s (%.2fs)\n", pass ? "PASS" : "FAIL", c.label, c.report.seconds);
    for (const auto& check : c.report.checks)
        std::printf("       %-55s value %.3e  threshold %.3e  %s\n", check.name.c_str(),
                    check.value, check.threshold, check.pass ? "ok" : "FAIL");
    if (!timeOk)
        std::printf("       runtime %.2fs exceeded budget %.2fs\n", c.report.seconds,
                    c.budgetSeconds);
    return pass ? 0 : 1;
}

}  // namespace

int main() {
    VerifyConfig cfg;  // (3,3), seed 42, 100 samples
    int failed = 0;

    failed += report({"1 (group membership)", verify::suite_membership(cfg), 5.0});
    failed += report({"2 (action axiom)", verify::suite_action_axiom(cfg), 60.0});
    failed += report({"3 (K extension)", verify::suite_k_extension(cfg), 0});
    failed += report({"4 (companion transport law)", verify::suite_cross_ratio(cfg), 0});
    failed += report({"5 (projector conjugation)", verify::suite_eq10(cfg), 0});
    failed += report({"6 (open-orbit charts)", verify::suite_charts(cfg), 0});
    failed += report({"7 (factorisation uniqueness margin)", verify::suite_decomposition(cfg), 0});
    failed += report({"8 (dimension ledger)", verify::suite_tables(cfg), 0});
    failed += report({"9 (orbit census)", verify::suite_orbit_census(cfg), 0});
    failed += report({"10 (flow oracles)", verify::suite_flow_oracles(cfg), 0});
    failed += report({"11 (principal-value invariant)", verify::suite_mu(cfg), 0});
    failed += report({"12 (conjugacy classification)", verify::suite_conjugacy(cfg), 0});
    failed += report({"13 (bundle action)", verify::suite_bundle(cfg), 0});
    failed += report({"14 (sphere action)", verify::suite_uchida(cfg), 0});

    std::printf("%s: %d of 14 criteria failed\n", failed == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                failed);
    return failed;
}
