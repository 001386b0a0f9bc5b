#include "ecowalker/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "csv_format.hpp"

namespace ecowalker {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool is_bare_key(std::string_view k) {
    if (k.empty()) return false;
    for (char c : k) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-';
        if (!ok) return false;
    }
    return true;
}

// Dotted bare key, e.g. "analysis.cutoff".
std::string parse_key(std::string_view raw, const std::string& where) {
    std::string out;
    std::size_t start = 0;
    while (true) {
        const auto dot = raw.find('.', start);
        const std::string part = trim(raw.substr(start, dot == std::string_view::npos ? raw.npos : dot - start));
        if (!is_bare_key(part)) throw ConfigError(where + ": invalid key '" + std::string(raw) + "'");
        if (!out.empty()) out += '.';
        out += part;
        if (dot == std::string_view::npos) return out;
        start = dot + 1;
    }
}

std::optional<double> parse_toml_number(std::string s) {
    std::erase(s, '_');
    if (s == "inf" || s == "+inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    if (!s.empty() && s.front() == '+') s.erase(0, 1);
    if (s.empty()) return std::nullopt;
    return csv::parse_number(s);
}

// Index of the first '#' outside a string, or npos.
std::size_t comment_start(std::string_view line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
        } else if (c == '"') {
            in_string = true;
        } else if (c == '#') {
            return i;
        }
    }
    return std::string_view::npos;
}

ConfigValue parse_value(const std::string& text, const std::string& where) {
    if (text.empty()) throw ConfigError(where + ": missing value");
    if (text == "true") return true;
    if (text == "false") return false;
    if (text.front() == '"') {
        std::string out;
        std::size_t i = 1;
        for (; i < text.size() && text[i] != '"'; ++i) {
            if (text[i] != '\\') {
                out += text[i];
                continue;
            }
            if (++i >= text.size()) break;
            switch (text[i]) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: throw ConfigError(where + ": unsupported escape '\\" + std::string(1, text[i]) + "'");
            }
        }
        if (i != text.size() - 1) throw ConfigError(where + ": malformed string " + text);
        return out;
    }
    if (text.front() == '[') {
        if (text.back() != ']') throw ConfigError(where + ": unterminated array");
        std::vector<double> out;
        const std::string body = trim(std::string_view(text).substr(1, text.size() - 2));
        if (body.empty()) return out;
        auto parts = csv::split(body, ',');
        if (trim(parts.back()).empty()) parts.pop_back();  // trailing comma
        for (auto p : parts) {
            const auto v = parse_toml_number(trim(p));
            if (!v) throw ConfigError(where + ": array elements must be numbers, got '" + trim(p) + "'");
            out.push_back(*v);
        }
        return out;
    }
    if (const auto v = parse_toml_number(text)) return *v;
    throw ConfigError(where + ": cannot parse value '" + text + "'");
}

const char* type_name(const ConfigValue& v) {
    switch (v.index()) {
        case 0: return "number";
        case 1: return "boolean";
        case 2: return "string";
        default: return "array";
    }
}

template <class T>
const T& expect(const ConfigValue& v, const char* want, const std::string& where) {
    if (const T* p = std::get_if<T>(&v)) return *p;
    throw ConfigError(where + ": expected " + want + ", got " + type_name(v));
}

std::string echo_number(double v) { return csv::number(v); }

std::string echo_array(const double* v, std::size_t n) {
    std::string s = "[";
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += ", ";
        s += echo_number(v[i]);
    }
    return s + "]";
}

// One configurable field: how to set it from a value and how to echo it.
struct Field {
    std::string key;
    std::function<void(ExperimentConfig&, const ConfigValue&, const std::string&)> set;  // null: read-only
    std::function<std::string(const ExperimentConfig&)> get;
};

template <class Acc>
Field number_field(std::string key, Acc acc) {
    return {std::move(key),
            [acc](ExperimentConfig& c, const ConfigValue& v, const std::string& where) {
                acc(c) = expect<double>(v, "number", where);
            },
            [acc](const ExperimentConfig& c) { return echo_number(acc(const_cast<ExperimentConfig&>(c))); }};
}

template <class Acc>
Field int_field(std::string key, Acc acc, long long lo) {
    return {std::move(key),
            [acc, lo](ExperimentConfig& c, const ConfigValue& v, const std::string& where) {
                const double d = expect<double>(v, "number", where);
                if (d != std::floor(d) || d < static_cast<double>(lo) || d > 9.0e15) {
                    throw ConfigError(where + ": expected an integer >= " + std::to_string(lo));
                }
                acc(c) = static_cast<std::remove_reference_t<decltype(acc(c))>>(d);
            },
            [acc](const ExperimentConfig& c) { return std::to_string(acc(const_cast<ExperimentConfig&>(c))); }};
}

template <class Acc>
Field bool_field(std::string key, Acc acc) {
    return {std::move(key),
            [acc](ExperimentConfig& c, const ConfigValue& v, const std::string& where) {
                acc(c) = expect<bool>(v, "boolean", where);
            },
            [acc](const ExperimentConfig& c) { return acc(const_cast<ExperimentConfig&>(c)) ? "true" : "false"; }};
}

template <class Acc>
Field segment_field(std::string key, Acc acc) {
    return {std::move(key),
            [acc](ExperimentConfig& c, const ConfigValue& v, const std::string& where) {
                const auto& a = expect<std::vector<double>>(v, "array", where);
                if (a.size() != kNumSegments) {
                    throw ConfigError(where + ": expected " + std::to_string(kNumSegments) +
                                      " values (trunk, thigh L/R, shank L/R, foot L/R)");
                }
                std::copy(a.begin(), a.end(), acc(c).begin());
            },
            [acc](const ExperimentConfig& c) {
                const auto& t = acc(const_cast<ExperimentConfig&>(c));
                return echo_array(t.data(), t.size());
            }};
}

template <class Acc>
Field limits_field(std::string key, Acc acc) {
    return {std::move(key),
            [acc](ExperimentConfig& c, const ConfigValue& v, const std::string& where) {
                const auto& a = expect<std::vector<double>>(v, "array", where);
                if (a.size() != 2) throw ConfigError(where + ": expected [min, max]");
                acc(c) = JointLimits{a[0], a[1]};
            },
            [acc](const ExperimentConfig& c) {
                const auto& l = acc(const_cast<ExperimentConfig&>(c));
                const double v[2] = {l.min, l.max};
                return echo_array(v, 2);
            }};
}

template <class Acc>
Field read_only(std::string key, Acc acc) {
    return {std::move(key), nullptr,
            [acc](const ExperimentConfig& c) { return echo_number(acc(const_cast<ExperimentConfig&>(c))); }};
}

#define FIELD(path) [](ExperimentConfig& c) -> auto& { return c.path; }

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        number_field("robot.l_thigh", FIELD(robot.l_thigh)),
        number_field("robot.l_shank", FIELD(robot.l_shank)),
        number_field("robot.l_heel", FIELD(robot.l_heel)),
        number_field("robot.l_toe", FIELD(robot.l_toe)),
        number_field("robot.ankle_height", FIELD(robot.ankle_height)),
        number_field("robot.r_gas", FIELD(robot.r_gas)),
        number_field("robot.r_sol", FIELD(robot.r_sol)),
        number_field("robot.k_gas", FIELD(robot.k_gas)),
        number_field("robot.k_sol", FIELD(robot.k_sol)),
        number_field("robot.k_toe", FIELD(robot.k_toe)),
        number_field("robot.toe_rest_angle", FIELD(robot.toe_rest_angle)),
        number_field("robot.ankle_slack_angle", FIELD(robot.ankle_slack_angle)),
        number_field("robot.knee_slack_angle", FIELD(robot.knee_slack_angle)),
        segment_field("robot.segment_masses", FIELD(robot.segment_masses)),
        segment_field("robot.segment_inertias", FIELD(robot.segment_inertias)),
        segment_field("robot.segment_com_offsets", FIELD(robot.segment_com_offsets)),
        number_field("robot.total_mass", FIELD(robot.total_mass)),
        number_field("robot.supply_voltage", FIELD(robot.supply_voltage)),
        number_field("robot.gravity", FIELD(robot.gravity)),
        number_field("robot.trunk_lean", FIELD(robot.trunk_lean)),
        limits_field("robot.hip_limits", FIELD(robot.hip_limits)),
        limits_field("robot.knee_limits", FIELD(robot.knee_limits)),
        limits_field("robot.ankle_limits", FIELD(robot.ankle_limits)),
        number_field("robot.toe_max_angle", FIELD(robot.toe_max_angle)),
        number_field("robot.hard_stop_stiffness", FIELD(robot.hard_stop_stiffness)),
        number_field("robot.hard_stop_damping", FIELD(robot.hard_stop_damping)),

        number_field("sim.dt", FIELD(sim.dt)),
        number_field("sim.contact_kn", FIELD(sim.contact_kn)),
        number_field("sim.contact_dn", FIELD(sim.contact_dn)),
        number_field("sim.friction_mu", FIELD(sim.friction_mu)),
        number_field("sim.friction_vreg", FIELD(sim.friction_vreg)),
        number_field("sim.duration", FIELD(sim.duration)),
        int_field("sim.seed", FIELD(sim.seed), 0),
        number_field("sim.initial_jitter", FIELD(sim.initial_jitter)),
        number_field("sim.actuator_efficiency", FIELD(sim.actuator_efficiency)),
        number_field("sim.winding_loss", FIELD(sim.winding_loss)),
        number_field("sim.idle_power", FIELD(sim.idle_power)),
        int_field("sim.log_every", FIELD(sim.log_every), 1),
        bool_field("sim.contacts_enabled", FIELD(sim.contacts_enabled)),
        number_field("sim.fall_height", FIELD(sim.fall_height)),
        number_field("sim.divergence_bound", FIELD(sim.divergence_bound)),

        number_field("cpg.frequency", FIELD(cpg.frequency)),
        number_field("cpg.hip_duty", FIELD(cpg.hip_duty)),
        number_field("cpg.knee_duty", FIELD(cpg.knee_duty)),
        number_field("cpg.knee_amplitude", FIELD(cpg.knee_amplitude)),
        number_field("cpg.knee_offset", FIELD(cpg.knee_offset)),
        number_field("cpg.hip_amplitude", FIELD(cpg.hip_amplitude)),
        number_field("cpg.hip_offset", FIELD(cpg.hip_offset)),
        number_field("cpg.hip_swing_steady", FIELD(cpg.hip_swing_steady)),

        number_field("gains.kp_hip_right", FIELD(gains.kp_hip_right)),
        number_field("gains.kp_hip_left", FIELD(gains.kp_hip_left)),
        number_field("gains.kd_hip", FIELD(gains.kd_hip)),
        number_field("gains.kp_knee", FIELD(gains.kp_knee)),
        number_field("gains.kd_knee", FIELD(gains.kd_knee)),
        number_field("gains.torque_limit", FIELD(gains.torque_limit)),

        {"experiment.mode",
         [](ExperimentConfig& c, const ConfigValue& v, const std::string& where) {
             try {
                 c.mode = ActuationMode::parse(expect<std::string>(v, "string", where));
             } catch (const ParamError& e) {
                 throw ConfigError(where + ": " + e.what());
             }
         },
         [](const ExperimentConfig& c) { return '"' + c.mode.name() + '"'; }},
        int_field("experiment.warmup_cycles", FIELD(options.warmup_cycles), 0),
        int_field("experiment.settle_cycles", FIELD(options.settle_cycles), 0),
        int_field("experiment.cycles", FIELD(options.cycles), 1),
        number_field("experiment.cpg_phase0", FIELD(options.cpg_phase0)),
        {"experiment.duration",
         [](ExperimentConfig& c, const ConfigValue& v, const std::string& where) {
             c.options.duration = expect<double>(v, "number", where);
         },
         [](const ExperimentConfig& c) {
             return echo_number(c.options.duration ? *c.options.duration : c.options.default_duration(c.cpg));
         }},
        {"experiment.output_dir",
         [](ExperimentConfig& c, const ConfigValue& v, const std::string& where) {
             c.output_dir = expect<std::string>(v, "string", where);
         },
         [](const ExperimentConfig& c) { return '"' + c.output_dir + '"'; }},

        number_field("analysis.resample_rate", FIELD(analysis.resample_rate)),
        int_field("analysis.filter_order", FIELD(analysis.filter_order), 1),
        number_field("analysis.angle_cutoff", FIELD(analysis.angle_cutoff)),
        number_field("analysis.velocity_cutoff", FIELD(analysis.velocity_cutoff)),
        int_field("analysis.cycles", FIELD(analysis.cycles), 0),
        number_field("analysis.cot_nr", FIELD(analysis.cot_nr)),
        number_field("analysis.plateau_rate", FIELD(analysis.touchdown.plateau_rate)),
        number_field("analysis.plateau_duration", FIELD(analysis.touchdown.plateau_duration)),
        number_field("analysis.activity_rate", FIELD(analysis.touchdown.activity_rate)),
        {"analysis.plateau_max_angle",
         [](ExperimentConfig& c, const ConfigValue& v, const std::string& where) {
             c.analysis.touchdown.plateau_max_angle = expect<double>(v, "number", where);
         },
         [](const ExperimentConfig& c) {
             const auto& a = c.analysis.touchdown.plateau_max_angle;
             return a ? echo_number(*a) : std::string("inf");
         }},
        number_field("analysis.transition_half_window", FIELD(analysis.events.transition_half_window)),
        read_only("analysis.rate_threshold", FIELD(analysis.events.rate_threshold)),
        read_only("analysis.to_window", FIELD(analysis.events.to_window)),
        read_only("analysis.skf_before", FIELD(analysis.events.skf_before)),
        read_only("analysis.skf_after", FIELD(analysis.events.skf_after)),
    };
    return f;
}

#undef FIELD

const Field* find_field(const std::string& key) {
    for (const auto& f : fields()) {
        if (f.key == key) return &f;
    }
    return nullptr;
}

void validate_all(const ExperimentConfig& c, const std::string& source) {
    try {
        validate_params(c.robot);
        validate_sim(c.sim);
        validate_cpg(c.cpg);
        validate_gains(c.gains);
        validate_analysis(c.analysis);
    } catch (const ParamError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    if (c.options.duration && !(*c.options.duration >= 0.0)) {
        throw ConfigError(source + ": experiment.duration must be non-negative");
    }
    if (!(c.options.cpg_phase0 >= 0.0 && c.options.cpg_phase0 < 1.0)) {
        throw ConfigError(source + ": experiment.cpg_phase0 outside [0, 1)");
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string where(const ConfigDocument& doc, const std::string& key) {
    const auto it = doc.lines.find(key);
    return doc.source + ":" + (it == doc.lines.end() ? std::string("?") : std::to_string(it->second));
}

// Keys without a table get `prefix_for_bare`.
void apply_fields(const ConfigDocument& doc, ExperimentConfig& cfg, const std::string& prefix_for_bare) {
    for (const auto& [raw, value] : doc.values) {
        const std::string key = raw.find('.') == std::string::npos ? prefix_for_bare + raw : raw;
        if (key.rfind("include.", 0) == 0) continue;
        const Field* f = find_field(key);
        const std::string at = where(doc, raw);
        if (!f) throw ConfigError(at + ": unknown key '" + raw + "'");
        if (!f->set) throw ConfigError(at + ": '" + raw + "' is read-only");
        f->set(cfg, value, at);
    }
}

}  // namespace

ConfigDocument parse_toml(const std::string& text, const std::string& source) {
    ConfigDocument doc;
    doc.source = source;
    std::string table;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string at = source + ":" + std::to_string(lineno);
        std::string_view view(line);
        if (const auto c = comment_start(view); c != std::string_view::npos) view = view.substr(0, c);
        const std::string s = trim(view);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.size() < 3 || s.back() != ']' || s[1] == '[') throw ConfigError(at + ": malformed table header");
            table = parse_key(std::string_view(s).substr(1, s.size() - 2), at);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(at + ": expected key = value");
        std::string key = parse_key(std::string_view(s).substr(0, eq), at);
        if (!table.empty()) key = table + "." + key;
        ConfigValue value = parse_value(trim(std::string_view(s).substr(eq + 1)), at);
        if (!doc.values.emplace(key, std::move(value)).second) {
            throw ConfigError(at + ": duplicate key '" + key + "'");
        }
        doc.lines[key] = lineno;
    }
    return doc;
}

ExperimentConfig apply_config(const ConfigDocument& doc, ExperimentConfig base) {
    for (const auto& [key, value] : doc.values) {
        if (key.rfind("include.", 0) == 0 && key != "include.robot") {
            throw ConfigError(where(doc, key) + ": unknown key '" + key + "'");
        }
        if (key.find('.') == std::string::npos) {
            throw ConfigError(where(doc, key) + ": key '" + key + "' must be inside a table");
        }
    }
    apply_fields(doc, base, "");
    validate_all(base, doc.source);
    return base;
}

RobotParams load_robot_params(const std::filesystem::path& path) {
    const ConfigDocument doc = parse_toml(read_file(path), path.string());
    ExperimentConfig cfg;
    for (const auto& [key, value] : doc.values) {
        const bool robot = key.find('.') == std::string::npos || key.rfind("robot.", 0) == 0;
        if (!robot) throw ConfigError(where(doc, key) + ": unknown key '" + key + "' in robot file");
    }
    apply_fields(doc, cfg, "robot.");
    try {
        validate_params(cfg.robot);
    } catch (const ParamError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return cfg.robot;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    const ConfigDocument doc = parse_toml(read_file(path), path.string());
    ExperimentConfig base;
    if (const auto it = doc.values.find("include.robot"); it != doc.values.end()) {
        const auto& rel = expect<std::string>(it->second, "string", where(doc, "include.robot"));
        std::filesystem::path robot_path(rel);
        if (robot_path.is_relative()) robot_path = path.parent_path() / robot_path;
        base.robot = load_robot_params(robot_path);
    }
    return apply_config(doc, base);
}

std::filesystem::path resolve_config_path(const std::string& path) {
    namespace fs = std::filesystem;
    const char* env = std::getenv("ECOWALKER_CONFIG_DIR");
    const fs::path dir = env ? fs::path(env) : fs::path();
    if (path.empty()) {
        if (!dir.empty() && fs::exists(dir / "experiment.toml")) return dir / "experiment.toml";
        return {};
    }
    if (fs::exists(path)) return path;
    if (!dir.empty() && fs::path(path).is_relative() && fs::exists(dir / path)) return dir / path;
    return {};
}

Metadata config_echo(const ExperimentConfig& cfg) {
    Metadata md;
    for (const auto& f : fields()) md[f.key] = f.get(cfg);
    return md;
}

RobotParams robot_params_from_metadata(const Metadata& md, RobotParams base) {
    ExperimentConfig cfg;
    cfg.robot = base;
    for (const auto& [key, text] : md) {
        if (key.rfind("robot.", 0) != 0) continue;
        const Field* f = find_field(key);
        if (!f || !f->set) throw ConfigError("metadata: unknown robot key '" + key + "'");
        f->set(cfg, parse_value(trim(text), "metadata " + key), "metadata " + key);
    }
    try {
        validate_params(cfg.robot);
    } catch (const ParamError& e) {
        throw ConfigError(std::string("metadata: ") + e.what());
    }
    return cfg.robot;
}

}  // namespace ecowalker
