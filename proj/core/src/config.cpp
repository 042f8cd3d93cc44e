#include "readc/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace readc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Field {
    std::string section;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T out;
    in >> out;
    if (in.fail() || !in.eof())
        throw std::invalid_argument("config: bad value '" + value + "' for key '" + key + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "on" || value == "1") return true;
    if (value == "false" || value == "off" || value == "0") return false;
    throw std::invalid_argument("config: bad boolean '" + value + "' for key '" + key + "'");
}

const std::map<std::string, Field>& field_table() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        auto str = [&t](const char* sec, const char* key, std::string ExperimentConfig::* member) {
            t[key] = Field{sec, [member](ExperimentConfig& c, const std::string& v) { c.*member = v; }};
        };
        auto num = [&t]<typename T>(const char* sec, const char* key, T ExperimentConfig::* member) {
            t[key] = Field{sec, [member, key = std::string(key)](ExperimentConfig& c, const std::string& v) {
                               c.*member = parse_number<T>(key, v);
                           }};
        };
        auto boolean = [&t](const char* sec, const char* key, bool ExperimentConfig::* member) {
            t[key] = Field{sec, [member, key = std::string(key)](ExperimentConfig& c, const std::string& v) {
                               c.*member = parse_bool(key, v);
                           }};
        };

        str("experiment", "domain", &ExperimentConfig::domain);
        str("experiment", "board", &ExperimentConfig::board);
        str("experiment", "algorithm", &ExperimentConfig::algorithm);
        str("experiment", "heuristic", &ExperimentConfig::heuristic);
        str("experiment", "clustering", &ExperimentConfig::clustering);
        num("experiment", "cluster_cutoff", &ExperimentConfig::cluster_cutoff);
        num("experiment", "cluster_count", &ExperimentConfig::cluster_count);
        num("experiment", "n_runs", &ExperimentConfig::n_runs);
        num("experiment", "base_seed", &ExperimentConfig::base_seed);
        num("experiment", "step_budget", &ExperimentConfig::step_budget);
        num("experiment", "convergence_reward", &ExperimentConfig::convergence_reward);
        num("experiment", "convergence_window", &ExperimentConfig::convergence_window);
        str("experiment", "teacher_model", &ExperimentConfig::teacher_model);
        str("experiment", "regressor_model", &ExperimentConfig::regressor_model);
        boolean("experiment", "gaussian_kl_drop_constant", &ExperimentConfig::gaussian_kl_drop_constant);

        num("network", "epsilon", &ExperimentConfig::epsilon);
        num("network", "epsilon_decay", &ExperimentConfig::epsilon_decay);
        num("network", "epsilon_min", &ExperimentConfig::epsilon_min);
        num("network", "alpha", &ExperimentConfig::alpha);
        num("network", "gamma", &ExperimentConfig::gamma);
        num("network", "buffer_size", &ExperimentConfig::buffer_size);
        num("network", "batch_size", &ExperimentConfig::batch_size);
        num("network", "entropy_window", &ExperimentConfig::entropy_window);
        num("network", "hidden_width", &ExperimentConfig::hidden_width);

        num("curriculum", "max_length", &ExperimentConfig::max_length);
        num("curriculum", "eta", &ExperimentConfig::eta);
        num("curriculum", "beta", &ExperimentConfig::beta);
        num("curriculum", "candidate_subset", &ExperimentConfig::candidate_subset);

        num("baselines", "n_source_tasks", &ExperimentConfig::n_source_tasks);
        num("baselines", "mpc_steps", &ExperimentConfig::mpc_steps);
        num("baselines", "steps_prior", &ExperimentConfig::steps_prior);
        num("baselines", "steps_per_task", &ExperimentConfig::steps_per_task);
        num("baselines", "random_radius", &ExperimentConfig::random_radius);
        num("baselines", "random_step_iters", &ExperimentConfig::random_step_iters);

        num("regressor", "gbm_trees", &ExperimentConfig::gbm_trees);
        num("regressor", "gbm_depth", &ExperimentConfig::gbm_depth);
        num("regressor", "gbm_shrinkage", &ExperimentConfig::gbm_shrinkage);
        num("regressor", "gbm_min_leaf", &ExperimentConfig::gbm_min_leaf);
        num("regressor", "snapshot_interval", &ExperimentConfig::snapshot_interval);
        num("regressor", "snapshots", &ExperimentConfig::snapshots);
        str("regressor", "regressor_kind", &ExperimentConfig::regressor_kind);
        str("regressor", "source_board", &ExperimentConfig::source_board);
        num("regressor", "teacher_budget", &ExperimentConfig::teacher_budget);
        num("regressor", "source_convergence_reward",
            &ExperimentConfig::source_convergence_reward);

        num("parking", "n_spots", &ExperimentConfig::n_spots);
        num("parking", "row_offset", &ExperimentConfig::row_offset);
        return t;
    }();
    return table;
}

template <typename T>
void require(bool ok, const T& message) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + message);
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
    for (const char* o : options)
        if (v == o) return true;
    return false;
}

}  // namespace

void ExperimentConfig::validate() const {
    require(one_of(domain, {"keylock", "flags", "parking"}), "unknown domain '" + domain + "'");
    require(one_of(algorithm, {"readc-td", "readc-sa", "random", "max-policy-change", "none"}),
            "unknown algorithm '" + algorithm + "'");
    require(one_of(heuristic, {"max-entropy", "proximity", "max-distance"}),
            "unknown heuristic '" + heuristic + "'");
    require(one_of(clustering, {"off", "cutoff", "count"}),
            "unknown clustering mode '" + clustering + "'");
    require(one_of(regressor_kind, {"gbm", "linear"}),
            "unknown regressor kind '" + regressor_kind + "'");
    require(domain == "parking" || !board.empty(), "grid domains need a board path");
    require(n_runs >= 1, "n_runs must be >= 1");
    require(step_budget > 0, "step_budget must be positive");
    require(epsilon >= 0.0 && epsilon <= 1.0, "epsilon must lie in [0, 1]");
    require(epsilon_decay > 0.0 && epsilon_decay <= 1.0, "epsilon_decay must lie in (0, 1]");
    require(epsilon_min >= 0.0 && epsilon_min <= 1.0, "epsilon_min must lie in [0, 1]");
    require(alpha > 0.0, "alpha must be positive");
    require(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0, 1)");
    require(buffer_size > 0, "buffer_size must be positive");
    require(batch_size > 0, "batch_size must be positive");
    require(entropy_window > 0, "entropy_window must be positive");
    require(hidden_width >= 0, "hidden_width must be nonnegative");
    require(max_length >= 0, "max_length must be nonnegative");
    require(eta > 0, "eta must be positive");
    require(beta > 0, "beta must be positive");
    require(candidate_subset > 0, "candidate_subset must be positive");
    require(cluster_cutoff > 0.0, "cluster_cutoff must be positive");
    require(cluster_count > 0, "cluster_count must be positive");
    require(convergence_window > 0, "convergence_window must be positive");
    require(n_source_tasks > 0, "n_source_tasks must be positive");
    require(mpc_steps > 0, "mpc_steps must be positive");
    require(steps_prior > 0, "steps_prior must be positive");
    require(steps_per_task > 0, "steps_per_task must be positive");
    require(random_radius > 0, "random_radius must be positive");
    require(gbm_trees > 0 && gbm_depth > 0 && gbm_min_leaf > 0, "bad gbm settings");
    require(gbm_shrinkage > 0.0 && gbm_shrinkage <= 1.0, "gbm_shrinkage must lie in (0, 1]");
    require(snapshots > 0 && snapshot_interval > 0, "bad snapshot settings");
    require(n_spots >= 1, "n_spots must be >= 1");
    require(row_offset > 0.0, "row_offset must be positive");
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            require(line.back() == ']', "unterminated section at line " + std::to_string(line_no));
            section = trim(line.substr(1, line.size() - 2));
            require(one_of(section, {"experiment", "network", "curriculum", "baselines",
                                     "regressor", "parking"}),
                    "unknown section '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        require(eq != std::string::npos, "expected key = value at line " + std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = field_table().find(key);
        require(it != field_table().end(), "unknown key '" + key + "'");
        require(section == it->second.section,
                "key '" + key + "' belongs to section [" + it->second.section + "]");
        it->second.set(cfg, value);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must look like key=value: " + assignment);
    std::string key = trim(assignment.substr(0, eq));
    const auto dot = key.find('.');
    if (dot != std::string::npos) key = key.substr(dot + 1);  // section prefix is optional
    const std::string value = trim(assignment.substr(eq + 1));
    const auto it = field_table().find(key);
    if (it == field_table().end())
        throw std::invalid_argument("config: unknown key '" + key + "'");
    it->second.set(cfg, value);
}

}  // namespace readc
