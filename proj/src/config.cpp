#include "sjkf/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "sjkf/errors.hpp"

namespace sjkf {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(value);
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    if (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Typed view over the raw map that tracks which keys were consumed.
class KvReader {
public:
    explicit KvReader(const std::map<std::string, std::string>& kv) : kv_(kv) {}

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        used_.insert(key);
        return it->second;
    }

    double get_double(const std::string& key, double fallback) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        used_.insert(key);
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("field '" + key + "' is not a number: '" + it->second + "'");
        }
    }

    long get_long(const std::string& key, long fallback) {
        const double v = get_double(key, static_cast<double>(fallback));
        const long l = static_cast<long>(std::llround(v));
        if (static_cast<double>(l) != v)
            throw ConfigError("field '" + key + "' must be an integer");
        return l;
    }

    bool get_bool(const std::string& key, bool fallback) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        used_.insert(key);
        const std::string v = it->second;
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("field '" + key + "' is not a boolean: '" + v + "'");
    }

    Vector get_vector(const std::string& key, const Vector& fallback) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        used_.insert(key);
        const auto items = split_list(it->second);
        Vector out(static_cast<int>(items.size()));
        for (std::size_t i = 0; i < items.size(); ++i) {
            try {
                out(static_cast<int>(i)) = std::stod(items[i]);
            } catch (const std::exception&) {
                throw ConfigError("field '" + key + "' entry " + std::to_string(i + 1) +
                                  " is not a number: '" + items[i] + "'");
            }
        }
        return out;
    }

    std::vector<std::string> get_strings(const std::string& key,
                                         const std::vector<std::string>& fallback) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        used_.insert(key);
        return split_list(it->second);
    }

    void reject_unknown() const {
        for (const auto& [key, value] : kv_)
            if (!used_.count(key))
                throw ConfigError("unknown field '" + key + "'");
    }

private:
    const std::map<std::string, std::string>& kv_;
    std::set<std::string> used_;
};

Vector two(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

} // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + " has no '='");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + " has empty key");
        if (kv.count(key)) throw ConfigError("duplicate field '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string observer_name(ObserverKind k) {
    switch (k) {
        case ObserverKind::classical: return "classical";
        case ObserverKind::joint: return "joint";
        case ObserverKind::joint_no_pass2: return "joint-no-pass2";
    }
    return "?";
}

ObserverKind observer_from_name(const std::string& name) {
    if (name == "classical") return ObserverKind::classical;
    if (name == "joint") return ObserverKind::joint;
    if (name == "joint-no-pass2") return ObserverKind::joint_no_pass2;
    throw ConfigError("unknown observer '" + name +
                      "' (expected classical | joint | joint-no-pass2)");
}

ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv) {
    KvReader r(kv);
    ExperimentConfig cfg;

    cfg.model_name = r.get_string("model.name", "duffing");
    if (cfg.model_name != "duffing")
        throw ConfigError("field 'model.name': only 'duffing' is available");
    cfg.p = r.get_vector("model.p", duffing_true_params());
    cfg.x0_true = r.get_vector("model.x0_true", two(1.0, 0.0));
    cfg.x0_est = r.get_vector("model.x0_est", two(2.0, 1.0));
    cfg.theta0 = r.get_double("model.theta0", 1e-3);
    cfg.dt = r.get_double("model.dt", 0.01);
    cfg.t_end = r.get_double("model.t_end", 10.0);
    cfg.library_terms = r.get_strings(
        "library.terms",
        {"1", "x1", "x2", "x2^2", "sin(x2)", "x1^2", "x1*x2", "cos(x1)", "u"});

    cfg.input_amplitude = r.get_double("input.amplitude", 2.0);
    cfg.input_omega = r.get_double("input.omega", 1.0);
    cfg.input_phase = r.get_double("input.phase", 0.0);

    cfg.noise_q_x = r.get_vector("noise.q_x", two(1e-4, 1e-4));
    cfg.noise_q_theta = r.get_double("noise.q_theta", 0.045);
    cfg.noise_r = r.get_double("noise.r", 1e-2);
    cfg.sim_q_x = r.get_vector("sim_noise.q_x", two(1e-3, 1e-3));
    cfg.sim_r = r.get_double("sim_noise.r", 1e-3);

    cfg.ut_alpha = r.get_double("ut.alpha", 1e-3);
    cfg.ut_beta = r.get_double("ut.beta", 2.0);

    cfg.horseshoe.tau0 = r.get_double("horseshoe.tau0", 0.1);
    cfg.horseshoe.a = r.get_double("horseshoe.a", 4.5);
    cfg.horseshoe.b = r.get_double("horseshoe.b", 1.5);
    const int n_theta_cfg = static_cast<int>(cfg.library_terms.size());
    Vector xi_default = Vector::Ones(n_theta_cfg);
    cfg.horseshoe.xi = r.get_vector("horseshoe.xi", xi_default);
    if (cfg.horseshoe.xi.size() == 1 && n_theta_cfg > 1)
        cfg.horseshoe.xi = Vector::Constant(n_theta_cfg, cfg.horseshoe.xi(0));
    cfg.horseshoe_n_samples = r.get_long("horseshoe.n_samples", 1000000);
    cfg.horseshoe_seed = static_cast<std::uint64_t>(r.get_long("horseshoe.seed", 2024));

    cfg.pm_epsilon = r.get_double("pm.epsilon", 0.01);
    cfg.pm_r = r.get_double("pm.r_pm", 9.0);

    cfg.observer = observer_from_name(r.get_string("observer", "joint"));
    cfg.unscaled_pass2 = r.get_bool("filter.unscaled_pass2", false);
    cfg.zero_q_pass2 = r.get_bool("filter.zero_q_pass2", false);
    cfg.sigma_star_per_step = r.get_bool("filter.sigma_star_per_step", false);

    cfg.init_s_x = r.get_vector("init.s_x", two(1.0, 1.0));
    cfg.init_s_theta_scale = r.get_double("init.s_theta_scale", -1.0);

    cfg.analysis_burn_in = r.get_double("analysis.burn_in", 2.0);
    cfg.analysis_threshold = r.get_double("analysis.threshold", 0.95);

    cfg.seed = static_cast<std::uint64_t>(r.get_long("seed", 1));
    cfg.output_dir = r.get_string("output_dir", "out");

    r.reject_unknown();

    // validation with field-level messages
    if (cfg.dt <= 0.0) throw ConfigError("field 'model.dt' must be > 0");
    if (cfg.t_end <= cfg.dt) throw ConfigError("field 'model.t_end' must exceed model.dt");
    if (cfg.p.size() != 3) throw ConfigError("field 'model.p' needs 3 entries");
    if (cfg.x0_true.size() != 2) throw ConfigError("field 'model.x0_true' needs 2 entries");
    if (cfg.x0_est.size() != 2) throw ConfigError("field 'model.x0_est' needs 2 entries");
    if (cfg.library_terms.empty()) throw ConfigError("field 'library.terms' must not be empty");
    if (cfg.noise_q_x.size() != 2) throw ConfigError("field 'noise.q_x' needs 2 entries");
    if (cfg.sim_q_x.size() != 2) throw ConfigError("field 'sim_noise.q_x' needs 2 entries");
    if (cfg.noise_q_x.minCoeff() < 0.0) throw ConfigError("field 'noise.q_x' must be >= 0");
    if (cfg.noise_q_theta < 0.0) throw ConfigError("field 'noise.q_theta' must be >= 0");
    if (cfg.noise_r < 0.0) throw ConfigError("field 'noise.r' must be >= 0");
    if (cfg.sim_q_x.minCoeff() < 0.0) throw ConfigError("field 'sim_noise.q_x' must be >= 0");
    if (cfg.sim_r < 0.0) throw ConfigError("field 'sim_noise.r' must be >= 0");
    if (cfg.ut_alpha <= 0.0 || cfg.ut_alpha > 1.0)
        throw ConfigError("field 'ut.alpha' must be in (0, 1]");
    if (cfg.horseshoe.tau0 <= 0.0) throw ConfigError("field 'horseshoe.tau0' must be > 0");
    if (cfg.horseshoe.a <= 0.0) throw ConfigError("field 'horseshoe.a' must be > 0");
    if (cfg.horseshoe.b <= 0.0) throw ConfigError("field 'horseshoe.b' must be > 0");
    if (cfg.horseshoe.xi.size() != n_theta_cfg)
        throw ConfigError("field 'horseshoe.xi' needs 1 or n_theta entries");
    if (cfg.horseshoe.xi.minCoeff() <= 0.0)
        throw ConfigError("field 'horseshoe.xi' must be > 0");
    if (cfg.horseshoe_n_samples < 100000)
        throw ConfigError("field 'horseshoe.n_samples' must be >= 1e5");
    if (cfg.pm_epsilon <= 0.0) throw ConfigError("field 'pm.epsilon' must be > 0");
    if (cfg.pm_r <= 0.0) throw ConfigError("field 'pm.r_pm' must be > 0");
    if (cfg.init_s_x.size() != 2) throw ConfigError("field 'init.s_x' needs 2 entries");
    if (cfg.init_s_x.minCoeff() <= 0.0) throw ConfigError("field 'init.s_x' must be > 0");
    if (cfg.analysis_burn_in < 0.0 || cfg.analysis_burn_in >= cfg.t_end)
        throw ConfigError("field 'analysis.burn_in' must be in [0, t_end)");
    if (cfg.analysis_threshold <= 0.0 || cfg.analysis_threshold > 1.0)
        throw ConfigError("field 'analysis.threshold' must be in (0, 1]");

    cfg.library(); // validates term names
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    return config_from_map(parse_config_file(path));
}

FunctionLibrary ExperimentConfig::library() const { return make_library(library_terms); }

JointModel ExperimentConfig::joint_model() const {
    return duffing_joint_model(p, library(), dt);
}

double ExperimentConfig::input_at(double t) const {
    return input_amplitude * std::sin(input_omega * t + input_phase);
}

std::vector<std::string> ExperimentConfig::tuning_keys() {
    return {"model.dt",     "model.t_end",    "model.theta0",   "input.amplitude",
            "input.omega",  "input.phase",    "noise.q_x",      "noise.q_theta",
            "noise.r",      "sim_noise.q_x",  "sim_noise.r",    "pm.epsilon",
            "pm.r_pm",      "init.s_x",       "init.s_theta_scale"};
}

std::map<std::string, std::string> config_to_map(const ExperimentConfig& cfg) {
    std::map<std::string, std::string> kv;
    auto put_vec = [&kv](const std::string& key, const Vector& v) {
        std::string s;
        for (int i = 0; i < v.size(); ++i) {
            if (i) s += ", ";
            s += format_double(v(i));
        }
        kv[key] = s;
    };
    kv["model.name"] = cfg.model_name;
    put_vec("model.p", cfg.p);
    put_vec("model.x0_true", cfg.x0_true);
    put_vec("model.x0_est", cfg.x0_est);
    kv["model.theta0"] = format_double(cfg.theta0);
    kv["model.dt"] = format_double(cfg.dt);
    kv["model.t_end"] = format_double(cfg.t_end);
    {
        std::string s;
        for (std::size_t i = 0; i < cfg.library_terms.size(); ++i) {
            if (i) s += ", ";
            s += cfg.library_terms[i];
        }
        kv["library.terms"] = s;
    }
    kv["input.amplitude"] = format_double(cfg.input_amplitude);
    kv["input.omega"] = format_double(cfg.input_omega);
    kv["input.phase"] = format_double(cfg.input_phase);
    put_vec("noise.q_x", cfg.noise_q_x);
    kv["noise.q_theta"] = format_double(cfg.noise_q_theta);
    kv["noise.r"] = format_double(cfg.noise_r);
    put_vec("sim_noise.q_x", cfg.sim_q_x);
    kv["sim_noise.r"] = format_double(cfg.sim_r);
    kv["ut.alpha"] = format_double(cfg.ut_alpha);
    kv["ut.beta"] = format_double(cfg.ut_beta);
    kv["horseshoe.tau0"] = format_double(cfg.horseshoe.tau0);
    kv["horseshoe.a"] = format_double(cfg.horseshoe.a);
    kv["horseshoe.b"] = format_double(cfg.horseshoe.b);
    put_vec("horseshoe.xi", cfg.horseshoe.xi);
    kv["horseshoe.n_samples"] = std::to_string(cfg.horseshoe_n_samples);
    kv["horseshoe.seed"] = std::to_string(cfg.horseshoe_seed);
    kv["pm.epsilon"] = format_double(cfg.pm_epsilon);
    kv["pm.r_pm"] = format_double(cfg.pm_r);
    kv["observer"] = observer_name(cfg.observer);
    kv["filter.unscaled_pass2"] = cfg.unscaled_pass2 ? "true" : "false";
    kv["filter.zero_q_pass2"] = cfg.zero_q_pass2 ? "true" : "false";
    kv["filter.sigma_star_per_step"] = cfg.sigma_star_per_step ? "true" : "false";
    put_vec("init.s_x", cfg.init_s_x);
    kv["init.s_theta_scale"] = format_double(cfg.init_s_theta_scale);
    kv["analysis.burn_in"] = format_double(cfg.analysis_burn_in);
    kv["analysis.threshold"] = format_double(cfg.analysis_threshold);
    kv["seed"] = std::to_string(cfg.seed);
    kv["output_dir"] = cfg.output_dir;
    return kv;
}

} // namespace sjkf
