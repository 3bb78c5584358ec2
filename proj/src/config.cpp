#include "aocsi/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "aocsi/csv.hpp"

namespace aocsi {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) parts.push_back(trim(part));
    return parts;
}

// section.key -> value, from a flat INI-style file. `#` starts a comment.
std::map<std::string, std::string> parse_keys(const std::string& text,
                                              const std::string& origin) {
    std::map<std::string, std::string> keys;
    std::stringstream ss(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ParseError(origin + ":" + std::to_string(line_no) +
                                 ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(origin + ":" + std::to_string(line_no) +
                             ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (section.empty() || key.empty()) {
            throw ParseError(origin + ":" + std::to_string(line_no) +
                             ": key outside a section or empty key");
        }
        keys[section + "." + key] = trim(line.substr(eq + 1));
    }
    return keys;
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const double d = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return d;
    } catch (const std::exception&) {
        throw ParseError("key " + key + ": cannot parse '" + value + "' as a number");
    }
}

long long parse_int(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const long long i = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return i;
    } catch (const std::exception&) {
        throw ParseError("key " + key + ": cannot parse '" + value + "' as an integer");
    }
}

std::vector<double> parse_vector(const std::string& value, const std::string& key) {
    std::vector<double> out;
    for (const std::string& tok : split(value, ' ')) {
        if (!tok.empty()) out.push_back(parse_double(tok, key));
    }
    return out;
}

class KeyReader {
public:
    explicit KeyReader(std::map<std::string, std::string> keys) : keys_(std::move(keys)) {}

    bool has(const std::string& key) const { return keys_.count(key) > 0; }

    std::string require(const std::string& key) {
        const auto it = keys_.find(key);
        if (it == keys_.end()) throw ValidationError("missing required key " + key);
        used_.insert(it->first);
        return it->second;
    }

    std::string get(const std::string& key, const std::string& fallback) {
        const auto it = keys_.find(key);
        if (it == keys_.end()) return fallback;
        used_.insert(it->first);
        return it->second;
    }

    void check_all_used() const {
        for (const auto& [key, value] : keys_) {
            if (!used_.count(key)) throw ValidationError("unknown key " + key);
        }
    }

private:
    std::map<std::string, std::string> keys_;
    std::set<std::string> used_;
};

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    KeyReader keys(parse_keys(text, origin));
    ExperimentConfig cfg;

    // Channel: rows separated by ';', entries by whitespace.
    const std::vector<std::string> matrix_rows =
        split(keys.require("channel.transition"), ';');
    const std::size_t m = matrix_rows.size();
    cfg.transition = Matrix(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::vector<double> row = parse_vector(
            matrix_rows[i], "channel.transition[" + std::to_string(i) + "]");
        if (row.size() != m) {
            throw ValidationError("key channel.transition[" + std::to_string(i) +
                                  "]: expected " + std::to_string(m) + " entries, got " +
                                  std::to_string(row.size()));
        }
        for (std::size_t j = 0; j < m; ++j) cfg.transition(i, j) = row[j];
    }
    cfg.reliabilities = parse_vector(keys.require("channel.reliability"),
                                     "channel.reliability");

    cfg.reward.r_suc = parse_double(keys.require("reward.r_suc"), "reward.r_suc");
    cfg.reward.r_fail = parse_double(keys.require("reward.r_fail"), "reward.r_fail");
    cfg.reward.eps_t = parse_double(keys.require("reward.eps_t"), "reward.eps_t");
    cfg.reward.eps_c = parse_double(keys.require("reward.eps_c"), "reward.eps_c");
    cfg.reward.beta = parse_double(keys.require("reward.beta"), "reward.beta");

    cfg.delta_max =
        static_cast<int>(parse_int(keys.require("solver.delta_max"), "solver.delta_max"));
    cfg.theta = parse_double(keys.get("solver.theta", "1e-9"), "solver.theta");
    cfg.max_iterations = static_cast<long>(
        parse_int(keys.get("solver.max_iterations", "100000"), "solver.max_iterations"));
    cfg.damping = parse_double(keys.get("solver.damping", "0"), "solver.damping");
    const std::vector<double> ref =
        parse_vector(keys.get("solver.ref_state", "1 0"), "solver.ref_state");
    if (ref.size() != 2) {
        throw ValidationError("key solver.ref_state: expected two integers (age state)");
    }
    cfg.ref_state = {static_cast<int>(ref[0]), static_cast<int>(ref[1])};

    cfg.horizon = parse_int(keys.require("sim.horizon"), "sim.horizon");
    cfg.seed = static_cast<std::uint64_t>(parse_int(keys.require("sim.seed"), "sim.seed"));
    cfg.warmup = parse_int(keys.get("sim.warmup", "0"), "sim.warmup");
    const std::string accounting = keys.get("sim.accounting", "expected");
    if (accounting == "expected") {
        cfg.accounting = Accounting::Expected;
    } else if (accounting == "realized") {
        cfg.accounting = Accounting::Realized;
    } else {
        throw ValidationError("key sim.accounting: expected 'expected' or 'realized', "
                              "got '" + accounting + "'");
    }

    keys.check_all_used();

    // Cross-field validation through the module constructors, so the
    // error text names the first violated invariant.
    try {
        ChannelModel model(cfg.transition, cfg.reliabilities);
        cfg.reward.validate();
        if (cfg.delta_max < 2) throw ValidationError("solver.delta_max must be >= 2");
        if (!(cfg.theta > 0)) throw ValidationError("solver.theta must be > 0");
        if (cfg.damping < 0 || cfg.damping >= 1) {
            throw ValidationError("solver.damping must be in [0, 1)");
        }
        if (cfg.ref_state.age < 1 || cfg.ref_state.age > cfg.delta_max ||
            cfg.ref_state.last_state < 0 ||
            cfg.ref_state.last_state >= static_cast<int>(model.num_states())) {
            throw ValidationError("solver.ref_state is outside the state space");
        }
        if (cfg.horizon <= 0) throw ValidationError("sim.horizon must be > 0");
        if (cfg.warmup < 0 || cfg.warmup >= cfg.horizon) {
            throw ValidationError("sim.warmup must be in [0, horizon)");
        }
    } catch (const ModelError& e) {
        throw ValidationError(std::string("key channel: ") + e.what());
    } catch (const InvalidRewardParams& e) {
        throw ValidationError(std::string("key reward: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::uint64_t ExperimentConfig::hash() const {
    std::string canon;
    const std::size_t m = reliabilities.size();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            canon += format_double(transition(i, j)) + ",";
        }
    }
    for (double r : reliabilities) canon += format_double(r) + ",";
    for (double v : {reward.r_suc, reward.r_fail, reward.eps_t, reward.eps_c,
                     reward.beta, theta, damping}) {
        canon += format_double(v) + ",";
    }
    canon += std::to_string(delta_max) + "," + std::to_string(ref_state.age) + "," +
             std::to_string(ref_state.last_state) + "," + std::to_string(max_iterations);

    std::uint64_t h = 14695981039346656037ull; // FNV-1a
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace aocsi
