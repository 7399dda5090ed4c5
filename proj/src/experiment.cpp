#include "sjkf/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "sjkf/errors.hpp"

namespace sjkf {

namespace {

std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

EstimateLog log_shell(const Trajectory& truth, int n_theta) {
    EstimateLog log;
    const auto n = truth.x.rows();
    log.times = truth.t;
    log.x_true = truth.x;
    log.x_est = Matrix::Zero(n, truth.x.cols());
    log.theta = Matrix::Zero(n_theta, n);
    log.y = truth.y;
    log.u = truth.u;
    return log;
}

} // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& columns) {
    if (static_cast<Eigen::Index>(header.size()) != columns.cols())
        throw ConfigError("csv '" + path + "': header/column count mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << '\n';
    char buf[64];
    for (Eigen::Index r = 0; r < columns.rows(); ++r) {
        for (Eigen::Index c = 0; c < columns.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", columns(r, c));
            out << (c ? "," : "") << buf;
        }
        out << '\n';
    }
    if (!out) throw ConfigError("write failed for '" + path + "'");
}

int CsvTable::col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

int CsvTable::require(const std::string& name) const {
    const int i = col(name);
    if (i < 0) throw ConfigError("csv column '" + name + "' missing");
    return i;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("'" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    CsvTable table;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    }
    const auto n_cols = static_cast<Eigen::Index>(table.header.size());
    std::vector<double> values;
    Eigen::Index n_rows = 0;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream rs(line);
        std::string cell;
        Eigen::Index got = 0;
        while (std::getline(rs, cell, ',')) {
            try {
                values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("'" + path + "' line " + std::to_string(line_no) +
                                  ": bad number '" + cell + "'");
            }
            ++got;
        }
        if (got != n_cols)
            throw ConfigError("'" + path + "' line " + std::to_string(line_no) +
                              ": expected " + std::to_string(n_cols) + " cells");
        ++n_rows;
    }
    table.data = Matrix(n_rows, n_cols);
    for (Eigen::Index r = 0; r < n_rows; ++r)
        for (Eigen::Index c = 0; c < n_cols; ++c)
            table.data(r, c) = values[static_cast<std::size_t>(r * n_cols + c)];
    return table;
}

Trajectory simulate_from_config(const ExperimentConfig& cfg) {
    NoiseSpec noise;
    noise.q_x = cfg.sim_q_x;
    noise.r = Vector::Constant(1, cfg.sim_r);
    const auto u_fn = [&cfg](double t) { return cfg.input_at(t); };
    return simulate_truth(duffing_true_dynamics(cfg.p), cfg.x0_true, u_fn,
                          cfg.t_end, cfg.dt, noise, cfg.seed);
}

ObserverRun run_observer(const ExperimentConfig& cfg, ObserverKind kind,
                         const Trajectory& truth) {
    ObserverRun run;
    run.kind = kind;
    const auto n_steps = truth.x.rows() - 1;
    const Vector r_diag = Vector::Constant(1, cfg.noise_r);
    const auto t0 = std::chrono::steady_clock::now();

    if (kind == ObserverKind::classical) {
        run.log = log_shell(truth, 0);
        const auto f = duffing_corrupted_dynamics(cfg.p);
        const double dt = cfg.dt;
        const TransitionMap dyn = [f, dt](const Vector& x, double u) {
            return euler_step(f, x, u, dt);
        };
        const TransitionMap obs = [](const Vector& x, double) {
            return Vector::Constant(1, x(0));
        };
        UTParams p;
        p.alpha = cfg.ut_alpha;
        p.beta = cfg.ut_beta;
        p.n = 2;
        p.kappa = 3.0 - p.n;
        FilterState fs;
        fs.mean = cfg.x0_est;
        fs.sqrt_cov = SqrtFactor{Matrix(cfg.init_s_x.asDiagonal())};
        run.log.x_est.row(0) = fs.mean.transpose();
        for (Eigen::Index k = 0; k < n_steps; ++k) {
            const Vector y = Vector::Constant(1, truth.y(k + 1));
            fs = srukf_step(fs, dyn, obs, cfg.noise_q_x, r_diag, truth.u(k), y, p,
                            run.diagnostics);
            run.log.x_est.row(k + 1) = fs.mean.transpose();
        }
    } else {
        const JointModel model = cfg.joint_model();
        const int n_theta = model.library.n_theta();
        const int n_total = model.n_x + n_theta;
        run.log = log_shell(truth, n_theta);
        run.sigma_star2 = sigma_star(cfg.horseshoe, cfg.horseshoe_n_samples,
                                     cfg.horseshoe_seed);

        FilterState fs;
        fs.mean = Vector(n_total);
        fs.mean.head(model.n_x) = cfg.x0_est;
        fs.mean.tail(n_theta).setConstant(cfg.theta0);
        Vector s0(n_total);
        s0.head(model.n_x) = cfg.init_s_x;
        const double s_star = std::sqrt(run.sigma_star2.estimate);
        for (int i = 0; i < n_theta; ++i)
            s0(model.n_x + i) = cfg.init_s_theta_scale < 0.0
                                    ? s_star * cfg.horseshoe.xi(i)
                                    : cfg.init_s_theta_scale;
        fs.sqrt_cov = SqrtFactor{Matrix(s0.asDiagonal())};

        UTParams base;
        base.alpha = cfg.ut_alpha;
        base.beta = cfg.ut_beta;
        base.n = n_total;
        Vector q_joint(n_total);
        q_joint.head(model.n_x) = cfg.noise_q_x;
        q_joint.tail(n_theta).setConstant(cfg.noise_q_theta);
        const PseudoMeasurement pm{cfg.pm_epsilon, cfg.pm_r};
        JointFilterOptions opts;
        opts.pass2_enabled = kind == ObserverKind::joint;
        opts.unscaled_pass2 = cfg.unscaled_pass2;
        opts.zero_q_pass2 = cfg.zero_q_pass2;

        run.log.x_est.row(0) = fs.mean.head(model.n_x).transpose();
        run.log.theta.col(0) = fs.mean.tail(n_theta);
        double s2 = run.sigma_star2.estimate;
        for (Eigen::Index k = 0; k < n_steps; ++k) {
            if (cfg.sigma_star_per_step)
                s2 = sigma_star(cfg.horseshoe, cfg.horseshoe_n_samples,
                                cfg.horseshoe_seed + static_cast<std::uint64_t>(k) + 1)
                         .estimate;
            const Vector y = Vector::Constant(1, truth.y(k + 1));
            fs = joint_filter_step(fs, model, pm, q_joint, r_diag, truth.u(k), y, base,
                                   s2, opts, run.diagnostics);
            run.log.x_est.row(k + 1) = fs.mean.head(model.n_x).transpose();
            run.log.theta.col(k + 1) = fs.mean.tail(n_theta);
        }
    }
    run.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

int sparsity_count(const EstimateLog& log, double burn_in, double rel_threshold) {
    const auto n_theta = log.theta.rows();
    if (n_theta == 0) return -1;
    Vector avg = Vector::Zero(n_theta);
    long n = 0;
    for (std::size_t k = 0; k < log.times.size(); ++k) {
        if (log.times[k] < burn_in) continue;
        avg += log.theta.col(static_cast<Eigen::Index>(k)).cwiseAbs();
        ++n;
    }
    if (n == 0) throw InsufficientSamples(0, 1);
    avg /= static_cast<double>(n);
    const double cut = rel_threshold * avg.maxCoeff();
    int count = 0;
    for (Eigen::Index i = 0; i < n_theta; ++i)
        if (avg(i) > cut) ++count;
    return count;
}

Vector state_rmse(const EstimateLog& log, double burn_in) {
    const auto n_x = log.x_true.cols();
    Vector acc = Vector::Zero(n_x);
    long n = 0;
    for (std::size_t k = 0; k < log.times.size(); ++k) {
        if (log.times[k] < burn_in) continue;
        const auto idx = static_cast<Eigen::Index>(k);
        acc += (log.x_true.row(idx) - log.x_est.row(idx)).cwiseAbs2().transpose();
        ++n;
    }
    if (n == 0) throw InsufficientSamples(0, 1);
    return (acc / static_cast<double>(n)).cwiseSqrt();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                std::vector<ObserverKind> observers) {
    if (observers.empty()) observers = {cfg.observer};
    ExperimentResult res;
    res.truth = simulate_from_config(cfg);
    for (const auto kind : observers)
        res.runs.push_back(run_observer(cfg, kind, res.truth));

    namespace stdfs = std::filesystem;
    stdfs::create_directories(cfg.output_dir);
    const auto path = [&cfg](const std::string& name) {
        return (stdfs::path(cfg.output_dir) / name).string();
    };
    const auto emit = [&res](const std::string& p, const std::vector<std::string>& header,
                             const Matrix& cols) {
        write_csv(p, header, cols);
        res.files.push_back(p);
    };

    const auto n = res.truth.x.rows();
    Vector t(n);
    for (Eigen::Index k = 0; k < n; ++k) t(k) = res.truth.t[static_cast<std::size_t>(k)];

    {
        Matrix cols(n, 5);
        cols.col(0) = t;
        cols.col(1) = res.truth.x.col(0);
        cols.col(2) = res.truth.x.col(1);
        cols.col(3) = res.truth.y;
        cols.col(4) = res.truth.u;
        emit(path("states_true.csv"), {"t", "x1", "x2", "y", "u"}, cols);
    }

    long with_theta = 0;
    for (const auto& run : res.runs)
        if (run.log.theta.rows() > 0) ++with_theta;

    for (const auto& run : res.runs) {
        const std::string name = observer_name(run.kind);
        {
            Matrix cols(n, 3);
            cols.col(0) = t;
            cols.col(1) = run.log.x_est.col(0);
            cols.col(2) = run.log.x_est.col(1);
            emit(path("states_est_" + name + ".csv"), {"t", "x1_est", "x2_est"}, cols);
        }
        const auto n_theta = run.log.theta.rows();
        if (n_theta > 0) {
            Matrix cols(n, 1 + n_theta);
            cols.col(0) = t;
            cols.rightCols(n_theta) = run.log.theta.transpose();
            std::vector<std::string> header{"t"};
            for (Eigen::Index i = 0; i < n_theta; ++i)
                header.push_back("th" + std::to_string(i + 1));
            const std::string file =
                with_theta == 1 ? "theta.csv" : "theta_" + name + ".csv";
            emit(path(file), header, cols);
        }
    }

    {
        Matrix cols(n, 1 + static_cast<Eigen::Index>(res.runs.size()));
        cols.col(0) = t;
        std::vector<std::string> header{"t"};
        for (std::size_t i = 0; i < res.runs.size(); ++i) {
            cols.col(static_cast<Eigen::Index>(i + 1)) = cumulative_error(res.runs[i].log);
            header.push_back("cum_" + observer_name(res.runs[i].kind));
        }
        emit(path("error.csv"), header, cols);
    }

    {
        const std::string p = path("report.txt");
        std::ofstream rep(p, std::ios::binary);
        if (!rep) throw ConfigError("cannot write '" + p + "'");
        rep << experiment_report(cfg, res);
        res.files.push_back(p);
    }
    return res;
}

std::vector<ComparisonRow> compare_observers(const ExperimentConfig& cfg,
                                             const std::vector<ObserverKind>& observers) {
    if (observers.size() < 2)
        throw ConfigError("compare_observers needs at least two observers");
    const Trajectory truth = simulate_from_config(cfg);
    std::vector<std::future<ObserverRun>> futures;
    futures.reserve(observers.size());
    for (const auto kind : observers)
        futures.push_back(std::async(std::launch::async, [&cfg, kind, truth]() {
            return run_observer(cfg, kind, truth);
        }));

    std::vector<ComparisonRow> rows;
    for (auto& fut : futures) {
        const ObserverRun run = fut.get();
        ComparisonRow row;
        row.observer = observer_name(run.kind);
        row.final_cumulative_error = cumulative_error(run.log).tail(1)(0);
        row.rmse = state_rmse(run.log, cfg.analysis_burn_in);
        row.sparsity_count = sparsity_count(run.log, cfg.analysis_burn_in);
        row.wall_seconds = run.wall_seconds;
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a,
                                                  const ComparisonRow& b) {
        return a.observer < b.observer;
    });
    return rows;
}

std::string format_comparison(const std::vector<ComparisonRow>& rows) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-16s %12s %10s %10s %9s %8s\n", "observer",
                  "cum_error", "rmse_x1", "rmse_x2", "sparsity", "wall_s");
    out << line;
    for (const auto& r : rows) {
        const std::string cnt =
            r.sparsity_count < 0 ? "-" : std::to_string(r.sparsity_count);
        std::snprintf(line, sizeof(line), "%-16s %12.6g %10.4g %10.4g %9s %8.3f\n",
                      r.observer.c_str(), r.final_cumulative_error, r.rmse(0), r.rmse(1),
                      cnt.c_str(), r.wall_seconds);
        out << line;
    }
    return out.str();
}

std::string experiment_report(const ExperimentConfig& cfg, const ExperimentResult& res) {
    std::ostringstream out;
    const auto n_steps = res.truth.x.rows() - 1;
    out << "run report\n==========\n\n";
    out << "model: " << cfg.model_name << ", steps: " << n_steps
        << ", dt: " << fmt(cfg.dt) << ", t_end: " << fmt(cfg.t_end)
        << ", seed: " << cfg.seed << "\n\n";

    const FunctionLibrary lib = cfg.library();
    for (const auto& run : res.runs) {
        out << "observer: " << observer_name(run.kind) << "\n";
        if (run.log.theta.rows() > 0)
            out << "  sigma_star2: " << fmt(run.sigma_star2.estimate, 12)
                << " (se " << fmt(run.sigma_star2.std_error, 3) << ", n "
                << run.sigma_star2.n_samples << ")\n";
        out << "  final cumulative error: "
            << fmt(cumulative_error(run.log).tail(1)(0), 9) << "\n";
        const Vector rmse = state_rmse(run.log, cfg.analysis_burn_in);
        out << "  post-burn-in rmse: x1 " << fmt(rmse(0)) << ", x2 " << fmt(rmse(1))
            << "\n";
        if (run.log.theta.rows() > 0) {
            out << "  sparsity count (>10% of max |avg|): "
                << sparsity_count(run.log, cfg.analysis_burn_in) << "\n";
            const DominanceReport dom =
                pca_dominance(run.log, cfg.analysis_burn_in, cfg.analysis_threshold);
            out << "  dominance:";
            for (const int i : dom.ranking)
                out << " " << lib.entries[static_cast<std::size_t>(i)].name << "="
                    << fmt(dom.shares(i), 4);
            out << "\n  selected (threshold " << fmt(cfg.analysis_threshold) << "):";
            for (const int i : dom.selected)
                out << " " << lib.entries[static_cast<std::size_t>(i)].name;
            out << "\n";
        }
        out << "  downdate recoveries: " << run.diagnostics.downdate_recoveries
            << ", merge repairs: " << run.diagnostics.merge_repairs << "\n\n";
    }

    out << "effective configuration\n=======================\n";
    for (const auto& [key, value] : config_to_map(cfg))
        out << key << " = " << value << "\n";

    out << "\ntuned defaults\n==============\n";
    out << "The following keys are tuning choices of this implementation, not\n"
           "quantities fixed by the benchmark problem; runs are only comparable\n"
           "when they agree:\n";
    for (const auto& key : ExperimentConfig::tuning_keys()) out << "  " << key << "\n";
    return out.str();
}

} // namespace sjkf
