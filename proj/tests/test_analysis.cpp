#include "doctest.h"

#include <cmath>

#include "sjkf/analysis.hpp"
#include "sjkf/errors.hpp"

using namespace sjkf;

namespace {

EstimateLog make_log(int n, double dt) {
    EstimateLog log;
    log.times.resize(n);
    for (int k = 0; k < n; ++k) log.times[k] = k * dt;
    log.x_true = Matrix::Zero(n, 2);
    log.x_est = Matrix::Zero(n, 2);
    log.y = Vector::Zero(n);
    log.u = Vector::Zero(n);
    return log;
}

} // namespace

TEST_CASE("cumulative error of a constant offset grows linearly") {
    EstimateLog log = make_log(5, 0.1);
    log.x_est.setOnes(); // ||delta|| = sqrt(2) each step
    const Vector cum = cumulative_error(log);
    for (int k = 0; k < 5; ++k)
        CHECK(cum(k) == doctest::Approx(std::sqrt(2.0) * 0.1 * (k + 1)).epsilon(1e-12));
}

TEST_CASE("cumulative error is zero for a perfect estimate and nondecreasing") {
    EstimateLog log = make_log(300, 0.01);
    for (int k = 0; k < 300; ++k) {
        log.x_true(k, 0) = std::sin(0.1 * k);
        log.x_true(k, 1) = std::cos(0.07 * k);
    }
    log.x_est = log.x_true;
    CHECK(cumulative_error(log).tail(1)(0) == 0.0);

    log.x_est(100, 0) += 0.3;
    log.x_est(200, 1) -= 0.1;
    const Vector cum = cumulative_error(log);
    for (int k = 1; k < 300; ++k) CHECK(cum(k) >= cum(k - 1));
}

TEST_CASE("dominance shares equal diag over trace of the second moment") {
    EstimateLog log = make_log(4, 1.0);
    log.theta = Matrix(2, 4);
    log.theta.row(0) << std::sqrt(3.0), -std::sqrt(3.0), std::sqrt(3.0), -std::sqrt(3.0);
    log.theta.row(1) << 1.0, 1.0, -1.0, -1.0; // rows orthogonal, moment = diag(3,1)
    const DominanceReport rep = pca_dominance(log, 0.0, 0.95);
    CHECK(rep.shares(0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(rep.shares(1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(rep.ranking[0] == 0);
    CHECK(rep.ranking[1] == 1);
    REQUIRE(rep.selected.size() == 2); // 0.75 < 0.95, need both

    const DominanceReport loose = pca_dominance(log, 0.0, 0.7);
    REQUIRE(loose.selected.size() == 1);
    CHECK(loose.selected[0] == 0);
}

TEST_CASE("a constant theta keeps its share without mean subtraction") {
    EstimateLog log = make_log(50, 0.1);
    log.theta = Matrix::Zero(2, 50);
    log.theta.row(0).setConstant(2.0); // centered PCA would erase this row
    for (int k = 0; k < 50; ++k) log.theta(1, k) = 0.01 * std::sin(0.3 * k);
    const DominanceReport rep = pca_dominance(log, 0.0, 0.95);
    CHECK(rep.ranking[0] == 0);
    CHECK(rep.shares(0) > 0.99);
}

TEST_CASE("shares are invariant to global scaling and follow permutations") {
    EstimateLog log = make_log(30, 0.1);
    log.theta = Matrix(3, 30);
    for (int k = 0; k < 30; ++k) {
        log.theta(0, k) = std::sin(0.2 * k);
        log.theta(1, k) = 0.5 * std::cos(0.4 * k);
        log.theta(2, k) = 0.1;
    }
    const DominanceReport base = pca_dominance(log, 0.0, 0.95);

    EstimateLog scaled = log;
    scaled.theta *= 7.0;
    const DominanceReport s = pca_dominance(scaled, 0.0, 0.95);
    CHECK((s.shares - base.shares).cwiseAbs().maxCoeff() < 1e-12);

    EstimateLog perm = log;
    perm.theta.row(0) = log.theta.row(2);
    perm.theta.row(2) = log.theta.row(0);
    const DominanceReport p = pca_dominance(perm, 0.0, 0.95);
    CHECK(p.shares(0) == doctest::Approx(base.shares(2)).epsilon(1e-12));
    CHECK(p.shares(2) == doctest::Approx(base.shares(0)).epsilon(1e-12));
    CHECK(p.shares.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("burn-in trims the early samples") {
    EstimateLog log = make_log(100, 0.1);
    log.theta = Matrix::Zero(2, 100);
    for (int k = 0; k < 100; ++k) {
        if (log.times[k] < 5.0)
            log.theta(0, k) = 100.0; // would dominate without trimming
        else
            log.theta(1, k) = 1.0;
    }
    const DominanceReport rep = pca_dominance(log, 5.0, 0.95);
    CHECK(rep.ranking[0] == 1);
    CHECK(rep.shares(1) > 0.999);
}

TEST_CASE("too few post-burn-in samples raise InsufficientSamples") {
    EstimateLog log = make_log(2, 1.0);
    log.theta = Matrix::Zero(3, 2); // 2 samples < 3 parameters
    CHECK_THROWS_AS(pca_dominance(log, 0.0, 0.95), InsufficientSamples);
    CHECK_THROWS_AS(pca_dominance(log, 100.0, 0.95), InsufficientSamples);
}

TEST_CASE("reconstruct_g sums the selected contributions") {
    const FunctionLibrary lib = make_library({"1", "x1"});
    EstimateLog log = make_log(2, 1.0);
    log.x_est = Matrix(2, 2);
    log.x_est << 1.0, 0.0, 2.0, 0.0;
    log.theta = Matrix(2, 2);
    log.theta << 1.0, 3.0, 2.0, 4.0; // col0 = (1,2), col1 = (3,4)
    const Vector all = reconstruct_g(log, lib);
    CHECK(all(0) == doctest::Approx(1.0 + 2.0 * 1.0).epsilon(1e-15));
    CHECK(all(1) == doctest::Approx(3.0 + 4.0 * 2.0).epsilon(1e-15));

    const Vector only_x1 = reconstruct_g(log, lib, std::vector<int>{1});
    CHECK(only_x1(0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(only_x1(1) == doctest::Approx(8.0).epsilon(1e-15));

    CHECK_THROWS_AS(reconstruct_g(log, lib, std::vector<int>{2}), ConfigError);
    CHECK_THROWS_AS(reconstruct_g(log, lib, std::vector<int>{-1}), ConfigError);
}

TEST_CASE("windowed dominance covers the log in order") {
    EstimateLog log = make_log(100, 0.1);
    log.theta = Matrix::Zero(2, 100);
    log.theta.row(0).setConstant(1.0);
    const auto reports = pca_dominance_windowed(log, 2.5, 0.95);
    REQUIRE(reports.size() == 4); // 25 samples per window
    for (const auto& rep : reports) CHECK(rep.ranking[0] == 0);
}
