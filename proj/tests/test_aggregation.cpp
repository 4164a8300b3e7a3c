#include "leofl/aggregation.hpp"
#include "leofl/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace leofl;

namespace {

ClientReport report(long d, long k, double loss,
                    std::vector<double> values = {}, std::string tag = "t") {
    ClientReport r;
    r.data_count = d;
    r.epochs = k;
    r.loss = loss;
    r.params.values = std::move(values);
    r.params.layout_tag = std::move(tag);
    return r;
}

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

const Scheme kAllSchemes[] = {Scheme::FedAvg, Scheme::FedAvep, Scheme::FedIndi,
                              Scheme::FedLol, Scheme::FedSEL};

} // namespace

TEST_CASE("scheme names round-trip") {
    for (Scheme s : kAllSchemes) CHECK(scheme_from_name(scheme_name(s)) == s);
    CHECK_THROWS_AS(scheme_from_name("fedwhat"), Error);
}

TEST_CASE("subregion_weights: identical reports split evenly for every scheme") {
    const std::vector<ClientReport> reports{report(120, 5, 0.4), report(120, 5, 0.4)};
    for (Scheme s : kAllSchemes) {
        AggregatorConfig cfg{s, 0.5, 0.5};
        const auto w = subregion_weights(reports, cfg);
        REQUIRE(w.size() == 2);
        CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("subregion_weights: mass term beta=1, kappa=1") {
    // D*K = [400, 400] -> even split regardless of losses
    const std::vector<ClientReport> reports{report(100, 4, 1.0), report(200, 2, 9.0)};
    const auto w =
        subregion_weights(reports, AggregatorConfig{Scheme::FedSEL, 1.0, 1.0});
    CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("subregion_weights: pure loss term beta=0") {
    const std::vector<ClientReport> reports{report(10, 1, 1.0), report(10, 1, 3.0)};
    SUBCASE("via FedSEL beta=0") {
        const auto w =
            subregion_weights(reports, AggregatorConfig{Scheme::FedSEL, 0.0, 0.5});
        CHECK(w[0] == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(w[1] == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("via FedLol") {
        const auto w =
            subregion_weights(reports, AggregatorConfig{Scheme::FedLol, 0.5, 0.5});
        CHECK(w[0] == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(w[1] == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("subregion_weights: single report collapses to [1] for every scheme") {
    const std::vector<ClientReport> one{report(50, 3, 0.0)};   // even with zero loss
    for (Scheme s : kAllSchemes) {
        const auto w = subregion_weights(one, AggregatorConfig{s, 0.5, 0.5});
        REQUIRE(w.size() == 1);
        CHECK(w[0] == 1.0);
    }
}

TEST_CASE("subregion_weights: errors") {
    CHECK_THROWS_AS(subregion_weights({}, AggregatorConfig{}), EmptyReportSet);
    const std::vector<ClientReport> zero_loss{report(10, 1, 0.0), report(20, 1, 0.0)};
    CHECK_THROWS_AS(
        subregion_weights(zero_loss, AggregatorConfig{Scheme::FedSEL, 0.5, 0.5}),
        ZeroTotalLoss);
    const std::vector<ClientReport> zero_mass{report(0, 1, 1.0), report(0, 2, 1.0)};
    CHECK_THROWS_AS(
        subregion_weights(zero_mass, AggregatorConfig{Scheme::FedAvg, 0.5, 0.5}),
        AllZeroMass);
    // beta=1 never evaluates the loss term, so zero losses are fine
    const auto w = subregion_weights(
        zero_loss, AggregatorConfig{Scheme::FedSEL, 1.0, 0.0});
    CHECK(w[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("subregion_weights: FedAvep with equal epochs equals FedAvg") {
    const std::vector<ClientReport> reports{report(10, 6, 1.0), report(30, 6, 2.0),
                                            report(60, 6, 0.5)};
    const auto avg =
        subregion_weights(reports, AggregatorConfig{Scheme::FedAvg, 0.5, 0.7});
    const auto avep =
        subregion_weights(reports, AggregatorConfig{Scheme::FedAvep, 0.5, 0.7});
    for (std::size_t i = 0; i < avg.size(); ++i)
        CHECK(avep[i] == doctest::Approx(avg[i]).epsilon(1e-12));
}

TEST_CASE("subregion_weights: uniform data scaling leaves weights unchanged") {
    std::vector<ClientReport> reports{report(10, 2, 1.0), report(30, 5, 2.0),
                                      report(60, 1, 0.5)};
    for (Scheme s : {Scheme::FedAvg, Scheme::FedAvep}) {
        const auto before = subregion_weights(reports, AggregatorConfig{s, 0.5, 0.5});
        auto scaled = reports;
        for (auto& r : scaled) r.data_count *= 7;
        const auto after = subregion_weights(scaled, AggregatorConfig{s, 0.5, 0.5});
        for (std::size_t i = 0; i < before.size(); ++i)
            CHECK(after[i] == doctest::Approx(before[i]).epsilon(1e-12));
    }
}

TEST_CASE("subregion_weights: simplex property across schemes, random sets") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(7 * u(rng));
        std::vector<ClientReport> reports;
        for (int i = 0; i < n; ++i)
            reports.push_back(report(1 + static_cast<long>(499 * u(rng)),
                                     (i == 0 ? 1 : 0) + static_cast<long>(40 * u(rng)),
                                     0.01 + 5.0 * u(rng)));
        const double beta = u(rng), kappa = 2.0 * u(rng);
        for (Scheme s : kAllSchemes) {
            const auto w = subregion_weights(reports, AggregatorConfig{s, beta, kappa});
            REQUIRE(w.size() == reports.size());
            CHECK(std::abs(sum(w) - 1.0) <= 1e-9);
            for (double x : w) {
                CHECK(x >= -1e-12);
                CHECK(x <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("subregion_weights: loss term sums to (1-beta), mass term to beta") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(6 * u(rng));
        std::vector<ClientReport> reports;
        for (int i = 0; i < n; ++i)
            reports.push_back(report(1 + static_cast<long>(499 * u(rng)),
                                     1 + static_cast<long>(40 * u(rng)),
                                     0.01 + 5.0 * u(rng)));
        const double beta = u(rng), kappa = 2.0 * u(rng);

        const auto mass = mass_share(reports, kappa);
        const auto loss = loss_share(reports);
        CHECK(std::abs(beta * sum(mass) - beta) <= 1e-9);
        CHECK(std::abs((1.0 - beta) * sum(loss) - (1.0 - beta)) <= 1e-9);

        // FedSEL is exactly the blend of the two terms
        const auto w =
            subregion_weights(reports, AggregatorConfig{Scheme::FedSEL, beta, kappa});
        for (std::size_t i = 0; i < w.size(); ++i)
            CHECK(w[i] == doctest::Approx(beta * mass[i] + (1.0 - beta) * loss[i])
                              .epsilon(1e-12));
    }
}

TEST_CASE("merge: identity, cancellation, and dot-product oracle") {
    const auto a = report(1, 1, 0.0, {1.0, -2.0, 3.0});
    CHECK(merge({a}, {1.0}).values == std::vector<double>{1.0, -2.0, 3.0});

    const auto b = report(1, 1, 0.0, {-1.0, 2.0, -3.0});
    const auto zero = merge({a, b}, {0.5, 0.5});
    for (double v : zero.values) CHECK(v == doctest::Approx(0.0).scale(1.0));

    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<ClientReport> reports;
    for (int i = 0; i < 3; ++i) {
        std::vector<double> vals(16);
        for (double& v : vals) v = 2.0 * u(rng) - 1.0;
        reports.push_back(report(1, 1, 0.0, std::move(vals)));
    }
    double w0 = u(rng), w1 = u(rng), w2 = u(rng);
    const double tot = w0 + w1 + w2;
    w0 /= tot; w1 /= tot; w2 /= tot;
    const auto merged = merge(reports, {w0, w1, w2});
    for (std::size_t i = 0; i < merged.values.size(); ++i) {
        const double expect = w0 * reports[0].params.values[i] +
                              w1 * reports[1].params.values[i] +
                              w2 * reports[2].params.values[i];
        CHECK(merged.values[i] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("merge: identical vectors return the vector for any simplex weight") {
    const std::vector<double> v{0.5, -1.5, 2.5, 0.0};
    const std::vector<ClientReport> reports{report(1, 1, 0, v), report(2, 2, 0, v),
                                            report(3, 3, 0, v)};
    const auto out = merge(reports, {0.2, 0.3, 0.5});
    for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(out.values[i] == doctest::Approx(v[i]).epsilon(1e-12));
}

TEST_CASE("merge: errors") {
    const auto a = report(1, 1, 0.0, {1.0, 2.0}, "net-a");
    const auto b = report(1, 1, 0.0, {3.0, 4.0}, "net-b");
    CHECK_THROWS_AS(merge({a, b}, {0.5, 0.5}), LayoutMismatch);
    const auto c = report(1, 1, 0.0, {1.0, 2.0, 3.0}, "net-a");
    CHECK_THROWS_AS(merge({a, c}, {0.5, 0.5}), LayoutMismatch);
    CHECK_THROWS_AS(merge({a, a}, {0.5, 0.6}), UnnormalizedWeights);
    CHECK_THROWS_AS(merge({a, a}, {1.0}), UnnormalizedWeights);
    CHECK_THROWS_AS(merge({}, {}), EmptyReportSet);
}

TEST_CASE("global_weights: gateway credibility shares") {
    const std::vector<std::vector<ClientReport>> single{{report(100, 4, 1.0)}};
    const auto one = global_weights(single, 1.0);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == doctest::Approx(1.0));

    // kappa=1 masses: 100*4 = 400 vs 200*3 = 600
    const std::vector<std::vector<ClientReport>> two{{report(100, 4, 1.0)},
                                                     {report(200, 3, 1.0)}};
    const auto w = global_weights(two, 1.0);
    CHECK(w[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(0.6).epsilon(1e-12));

    const std::vector<std::vector<ClientReport>> equal{
        {report(50, 2, 1.0)}, {report(50, 2, 1.0)}, {report(50, 2, 1.0)}};
    for (double x : global_weights(equal, 0.5))
        CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    const std::vector<std::vector<ClientReport>> empty_mass{{report(0, 0, 1.0)}};
    CHECK_THROWS_AS(global_weights(empty_mass, 1.0), AllZeroMass);
}

TEST_CASE("global_merge mirrors merge") {
    ParamVector a{{1.0, 3.0}, "t"};
    ParamVector b{{3.0, -1.0}, "t"};
    const auto out = global_merge({a, b}, {0.25, 0.75});
    CHECK(out.values[0] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(out.values[1] == doctest::Approx(0.0).scale(1.0));
    ParamVector c{{1.0, 1.0}, "other"};
    CHECK_THROWS_AS(global_merge({a, c}, {0.5, 0.5}), LayoutMismatch);
    CHECK_THROWS_AS(global_merge({a, b}, {0.7, 0.7}), UnnormalizedWeights);
}
