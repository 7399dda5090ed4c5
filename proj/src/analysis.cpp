#include "sjkf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sjkf/errors.hpp"

namespace sjkf {

Vector cumulative_error(const EstimateLog& log) {
    const long n = static_cast<long>(log.times.size());
    Vector out(n);
    double acc = 0.0;
    const double dt = n > 1 ? log.times[1] - log.times[0] : 0.0;
    for (long k = 0; k < n; ++k) {
        acc += (log.x_true.row(k) - log.x_est.row(k)).norm() * dt;
        out(k) = acc;
    }
    return out;
}

namespace {

DominanceReport dominance_of(const Matrix& th_trimmed, double burn_in, double threshold) {
    const long n_theta = th_trimmed.rows();
    const long n = th_trimmed.cols();
    if (n < n_theta) throw InsufficientSamples(n, n_theta);

    Matrix moment = th_trimmed * th_trimmed.transpose() / static_cast<double>(n);
    const double total = moment.trace();
    DominanceReport rep;
    rep.burn_in = burn_in;
    rep.threshold = threshold;
    rep.shares = total > 0.0 ? Vector(moment.diagonal() / total)
                             : Vector(Vector::Zero(n_theta));
    rep.ranking.resize(n_theta);
    std::iota(rep.ranking.begin(), rep.ranking.end(), 0);
    std::stable_sort(rep.ranking.begin(), rep.ranking.end(),
                     [&rep](int a, int b) { return rep.shares(a) > rep.shares(b); });
    double cum = 0.0;
    for (int idx : rep.ranking) {
        rep.selected.push_back(idx);
        cum += rep.shares(idx);
        if (cum >= threshold) break;
    }
    return rep;
}

} // namespace

DominanceReport pca_dominance(const EstimateLog& log, double burn_in, double threshold) {
    long start = 0;
    const long n = static_cast<long>(log.times.size());
    while (start < n && log.times[start] < burn_in) ++start;
    if (start >= n) throw InsufficientSamples(0, log.theta.rows());
    return dominance_of(log.theta.rightCols(n - start), burn_in, threshold);
}

std::vector<DominanceReport> pca_dominance_windowed(const EstimateLog& log,
                                                    double window_seconds,
                                                    double threshold) {
    const long n = static_cast<long>(log.times.size());
    const double dt = n > 1 ? log.times[1] - log.times[0] : 1.0;
    const long win = std::max<long>(1, static_cast<long>(std::llround(window_seconds / dt)));
    std::vector<DominanceReport> reports;
    for (long start = 0; start + win <= n; start += win)
        reports.push_back(dominance_of(log.theta.middleCols(start, win),
                                       log.times[start], threshold));
    return reports;
}

Vector reconstruct_g(const EstimateLog& log, const FunctionLibrary& lib,
                     const std::optional<std::vector<int>>& terms) {
    const long n = static_cast<long>(log.times.size());
    const int n_theta = lib.n_theta();
    std::vector<int> use;
    if (terms.has_value()) {
        use = *terms;
        for (int idx : use)
            if (idx < 0 || idx >= n_theta)
                throw ConfigError("reconstruct_g term index " + std::to_string(idx) +
                                  " out of range");
    } else {
        use.resize(n_theta);
        std::iota(use.begin(), use.end(), 0);
    }
    Vector out(n);
    for (long k = 0; k < n; ++k) {
        const Vector psi = lib.eval(log.x_est.row(k).transpose(), log.u(k));
        double g = 0.0;
        for (int idx : use) g += log.theta(idx, k) * psi(idx);
        out(k) = g;
    }
    return out;
}

} // namespace sjkf
