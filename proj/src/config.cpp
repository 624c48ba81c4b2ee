#include "pulsegabor/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pulsegabor {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

double parse_number(const std::string& text, const std::string& where) {
    std::string t;
    for (char c : text)
        if (c != '_') t.push_back(c);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) throw ConfigError(where + ": cannot parse '" + text + "' as a number");
    return v;
}

ConfigValue parse_value(const std::string& raw, const std::string& where) {
    const std::string v = trim(raw);
    if (v.empty()) throw ConfigError(where + ": missing value");
    if (v == "true") return true;
    if (v == "false") return false;
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"') throw ConfigError(where + ": unterminated string");
        return v.substr(1, v.size() - 2);
    }
    if (v.front() == '[') {
        if (v.back() != ']') throw ConfigError(where + ": unterminated array");
        std::vector<double> out;
        std::stringstream ss(v.substr(1, v.size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (trim(item).empty()) continue;
            out.push_back(parse_number(trim(item), where));
        }
        return out;
    }
    return parse_number(v, where);
}

double as_number(const ConfigValue& v, const std::string& key) {
    if (const double* d = std::get_if<double>(&v)) return *d;
    throw ConfigError("config: " + key + " must be a number");
}

std::string as_string(const ConfigValue& v, const std::string& key) {
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    throw ConfigError("config: " + key + " must be a string");
}

std::uint64_t as_count(double d, const std::string& key) {
    if (!(d >= 0.0) || d != std::floor(d) || d > 9.0e18) throw ConfigError("config: " + key + " must be a non-negative integer");
    return static_cast<std::uint64_t>(d);
}

}  // namespace

ConfigTable parse_config_text(const std::string& text) {
    ConfigTable table;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string where = "config line " + std::to_string(number);
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError(where + ": malformed section header");
            section = trim(body.substr(1, body.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(body.substr(0, eq));
        if (key.empty()) throw ConfigError(where + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (table.count(full)) throw ConfigError(where + ": duplicate key " + full);
        table[full] = parse_value(body.substr(eq + 1), where);
    }
    return table;
}

ConfigTable read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

RunConfig::RunConfig() { sim = PyramidConfig{}.sim; }

void RunConfig::apply(const ConfigTable& table) {
    // Plasticity defaults scale with theta, so theta goes first.
    if (const auto it = table.find("sim.theta"); it != table.end()) {
        sim.theta = as_number(it->second, it->first);
        if (!(sim.theta > 0.0)) throw ConfigError("config: sim.theta must be > 0");
        plasticity = default_plasticity(sim.theta);
    }
    for (const auto& [key, value] : table) {
        auto num = [&] { return as_number(value, key); };
        if (key == "sim.theta") continue;
        if (key == "sim.dt") sim.dt = num();
        else if (key == "sim.duration") sim.duration = num();
        else if (key == "sim.seed") sim.seed = as_count(num(), key);
        else if (key == "plasticity.gamma") plasticity.w31.gamma = plasticity.w32.gamma = num();
        else if (key == "plasticity.mu_31") plasticity.w31.mu = num();
        else if (key == "plasticity.mu_32") plasticity.w32.mu = num();
        else if (key == "plasticity.membrane_w_max") plasticity.w31.w_max = plasticity.w32.w_max = num();
        else if (key == "plasticity.gamma_d") plasticity.w41.gamma_d = num();
        else if (key == "plasticity.mu_d") plasticity.w41.mu_d = num();
        else if (key == "plasticity.w_inf") plasticity.w41.w_inf = num();
        else if (key == "plasticity.i_theta") plasticity.w41.i_theta = num();
        else if (key == "plasticity.w_max") plasticity.w41.w_max = plasticity.fixed_w_max = num();
        else if (key == "plasticity.w42") plasticity.w42 = num();
        else if (key == "plasticity.w43") plasticity.w43 = num();
        else if (key == "plasticity.initial_w31") plasticity.initial_w31 = num();
        else if (key == "plasticity.initial_w32") plasticity.initial_w32 = num();
        else if (key == "retina.rate_gain") retina.rate_gain = num();
        else if (key == "retina.sigma") retina.optics.sigma = num();
        else if (key == "retina.eta") retina.noise_level = num();
        else if (key == "pyramid.sum_divisor") sum_divisor = num();
        else if (key == "pyramid.snapshot_pulses") {
            snapshot_pulses.clear();
            if (const auto* list = std::get_if<std::vector<double>>(&value)) {
                for (double d : *list) snapshot_pulses.push_back(as_count(d, key));
            } else {
                snapshot_pulses.push_back(as_count(num(), key));
            }
        }
        else if (key == "mask.file") mask_file = std::filesystem::path(as_string(value, key));
        else if (key == "mask.wavelength") gabor.gabor.wavelength = num();
        else if (key == "mask.orientation") gabor.gabor.orientation = num();
        else if (key == "mask.sigma") gabor.gabor.sigma = num();
        else if (key == "mask.aspect") gabor.gabor.aspect = num();
        else if (key == "mask.phase") gabor.gabor.phase = num();
        else if (key == "mask.size") gabor.gabor.size = static_cast<std::size_t>(as_count(num(), key));
        else if (key == "mask.max_coeff") gabor.max_coeff = static_cast<int>(as_count(num(), key));
        else if (key == "output.dir") output_dir = as_string(value, key);
        else throw ConfigError("config: unknown key " + key);
    }
}

void RunConfig::apply_gabor_spec(const std::string& spec) {
    ConfigTable table;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("gabor: expected key=value, got '" + item + "'");
        const std::string key = trim(item.substr(0, eq));
        table["mask." + key] = parse_number(trim(item.substr(eq + 1)), "gabor " + key);
    }
    for (const auto& [k, v] : table)
        if (k == "mask.file") throw ConfigError("gabor: file is not a Gabor parameter");
    apply(table);
}

void RunConfig::validate() const {
    sim.validate();
    plasticity.validate();
    retina.validate();
    pyramid().validate();
    if (!mask_file) gabor.gabor.validate();
    if (gabor.max_coeff < 1) throw ConfigError("config: mask.max_coeff must be >= 1");
}

PyramidConfig RunConfig::pyramid() const {
    PyramidConfig p;
    p.sim = sim;
    p.plasticity = plasticity;
    p.retina = retina;
    p.sum_divisor = sum_divisor;
    return p;
}

IntegerMask RunConfig::mask() const {
    if (mask_file) {
        std::ifstream in(*mask_file);
        if (!in) throw ConfigError("mask: cannot open " + mask_file->string());
        try {
            return IntegerMask::from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("mask: " + mask_file->string() + ": " + e.what());
        }
    }
    return default_gabor_mask(gabor);
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["sim"] = {{"dt", sim.dt}, {"duration", sim.duration}, {"seed", sim.seed}, {"theta", sim.theta}};
    j["plasticity"] = {{"gamma", plasticity.w31.gamma},
                       {"mu_31", plasticity.w31.mu},
                       {"mu_32", plasticity.w32.mu},
                       {"membrane_w_max", plasticity.w31.w_max},
                       {"gamma_d", plasticity.w41.gamma_d},
                       {"mu_d", plasticity.w41.mu_d},
                       {"w_inf", plasticity.w41.w_inf},
                       {"i_theta", plasticity.w41.i_theta},
                       {"w_max", plasticity.w41.w_max},
                       {"w42", plasticity.w42},
                       {"w43", plasticity.w43},
                       {"initial_w31", plasticity.initial_w31},
                       {"initial_w32", plasticity.initial_w32}};
    j["retina"] = {{"rate_gain", retina.rate_gain}, {"sigma", retina.optics.sigma}, {"eta", retina.noise_level}};
    j["pyramid"] = {{"sum_divisor", sum_divisor}, {"snapshot_pulses", snapshot_pulses}};
    if (mask_file) {
        j["mask"] = {{"file", mask_file->string()}};
    } else {
        j["mask"] = {{"wavelength", gabor.gabor.wavelength}, {"orientation", gabor.gabor.orientation},
                     {"sigma", gabor.gabor.sigma},           {"aspect", gabor.gabor.aspect},
                     {"phase", gabor.gabor.phase},           {"size", gabor.gabor.size},
                     {"max_coeff", gabor.max_coeff}};
    }
    j["output"] = {{"dir", output_dir.string()}};
    return j;
}

std::optional<std::uint64_t> seed_from_environment() {
    const char* v = std::getenv("PULSEGABOR_SEED");
    if (v == nullptr || *v == '\0') return std::nullopt;
    char* end = nullptr;
    const unsigned long long s = std::strtoull(v, &end, 10);
    if (*end != '\0' || v[0] == '-') throw ConfigError(std::string("PULSEGABOR_SEED is not an unsigned integer: ") + v);
    return static_cast<std::uint64_t>(s);
}

}  // namespace pulsegabor
