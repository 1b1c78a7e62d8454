#include <catch2/catch_amalgamated.hpp>

#include "conefp/verify.hpp"

using namespace conefp;

namespace {

long total_failures(const std::vector<PropertyResult>& results) {
    long f = 0;
    for (const auto& r : results) f += r.failures;
    return f;
}

}  // namespace

TEST_CASE("metric suite passes clean") {
    const auto results = verify_metrics(1, 2000);
    REQUIRE(results.size() == 6);
    REQUIRE(total_failures(results) == 0);
    for (const auto& r : results) REQUIRE(r.trials > 0);
}

TEST_CASE("model and structure suites pass clean") {
    REQUIRE(total_failures(verify_models(3, 200)) == 0);
    REQUIRE(total_failures(verify_structure(3)) == 0);
}

TEST_CASE("rate and topical suites pass clean") {
    REQUIRE(total_failures(verify_rates(5)) == 0);
    REQUIRE(total_failures(verify_topical(5)) == 0);
}

TEST_CASE("verify is deterministic for a fixed seed") {
    const auto a = verify_metrics(9, 500);
    const auto b = verify_metrics(9, 500);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].name == b[i].name);
        REQUIRE(a[i].trials == b[i].trials);
        REQUIRE(a[i].failures == b[i].failures);
    }
}

TEST_CASE("theta corruption hook trips the named rate properties") {
    VerifyHooks hooks;
    hooks.theta_corruption = 0.5;
    const auto results = verify_rates(5, hooks);
    bool bound_failed = false;
    for (const auto& r : results)
        if (r.name == "rates.matrix_rate_below_bound" && !r.passed()) bound_failed = true;
    REQUIRE(bound_failed);
}

TEST_CASE("unknown suite names are rejected") {
    REQUIRE_THROWS_AS(run_verify_suite("bogus", 1), ValidationError);
}
