#ifndef FASTHZ_CONFIG_HPP
#define FASTHZ_CONFIG_HPP

// Experiment configuration: one JSON document, every physical quantity
// carrying its unit in the key name. Conversion to linear SI units happens
// here and nowhere else.

#include <fasthz/analytic.hpp>
#include <fasthz/errors.hpp>
#include <fasthz/montecarlo.hpp>
#include <fasthz/propagation.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

namespace fasthz {

inline constexpr int config_schema_version = 1;

struct LinkConfig {
    double tx_power_dbm = 20.0;
    double tx_gain_dbi = 17.0;
    double rx_gain_dbi = 14.0;
    double freq_ghz = 1000.0;
    double dist_2d_m = 10.0;
    double tx_height_m = 4.0;
    double rx_height_m = 1.0;
    double absorb_coeff_per_m = 0.192;
    double bandwidth_ghz = 10.0;
    double noise_temp_k = 290.0;
    std::optional<double> noise_power_dbm; // replaces the thermal floor
    std::optional<double> gamma_bar_db;    // replaces the whole link budget

    bool operator==(const LinkConfig&) const = default;
};

struct ChannelConfig {
    double alpha = 2.0;
    int mu = 1;
    std::optional<double> beta; // absent: beta^alpha = mu

    bool operator==(const ChannelConfig&) const = default;
};

struct LayoutConfig {
    int num_ports = 50;
    double size_wavelengths = 1.0;

    bool operator==(const LayoutConfig&) const = default;
};

struct QueryConfig {
    std::optional<double> target_rate_gbps = 7.0;
    std::optional<double> snr_threshold_db;
    /// Read the threshold as an envelope level x and test against x^alpha.
    bool envelope_threshold = false;

    bool operator==(const QueryConfig&) const = default;
};

/// Sweep axes as named in the config, with their grid units.
enum class ConfigAxis { ports, rate_gbps, snr_db, alpha, mu, size_wavelengths };

inline const char* to_string(ConfigAxis a) {
    switch (a) {
    case ConfigAxis::ports: return "ports";
    case ConfigAxis::rate_gbps: return "rate_gbps";
    case ConfigAxis::snr_db: return "snr_db";
    case ConfigAxis::alpha: return "alpha";
    case ConfigAxis::mu: return "mu";
    case ConfigAxis::size_wavelengths: return "size_wavelengths";
    }
    return "?";
}

struct SweepConfig {
    ConfigAxis axis = ConfigAxis::ports;
    std::vector<double> grid{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};

    bool operator==(const SweepConfig&) const = default;

    SweepAxis core_axis() const {
        switch (axis) {
        case ConfigAxis::ports: return SweepAxis::ports;
        case ConfigAxis::rate_gbps: return SweepAxis::rate;
        case ConfigAxis::snr_db: return SweepAxis::snr;
        case ConfigAxis::alpha: return SweepAxis::alpha;
        case ConfigAxis::mu: return SweepAxis::mu;
        case ConfigAxis::size_wavelengths: return SweepAxis::W;
        }
        throw config_error("unknown sweep axis");
    }

    /// Grid in the units the core expects.
    std::vector<double> core_grid() const {
        std::vector<double> g = grid;
        if (axis == ConfigAxis::rate_gbps)
            for (auto& v : g) v *= 1e9;
        return g;
    }
};

/// (L, W) grid for the correlation table; empty lists fall back to the layout.
struct CorrConfig {
    std::vector<int> ports;
    std::vector<double> size_wavelengths;

    bool operator==(const CorrConfig&) const = default;
};

struct ExperimentConfig {
    int schema_version = config_schema_version;
    LinkConfig link;
    ChannelConfig channel;
    LayoutConfig layout;
    DiversityConfig diversity;
    QueryConfig query;
    MCSettings mc;
    QuadratureSpec quadrature;
    SweepConfig sweep;
    CorrConfig corr;
    std::optional<std::string> output_path;

    bool operator==(const ExperimentConfig&) const = default;

    ThzLink thz_link() const {
        ThzLink l{};
        l.tx_power_w = units::dbm_to_watts(link.tx_power_dbm);
        l.tx_gain = units::db_to_linear(link.tx_gain_dbi);
        l.rx_gain = units::db_to_linear(link.rx_gain_dbi);
        l.freq_hz = link.freq_ghz * 1e9;
        l.dist_2d_m = link.dist_2d_m;
        l.tx_height_m = link.tx_height_m;
        l.rx_height_m = link.rx_height_m;
        l.absorb_coeff = link.absorb_coeff_per_m;
        l.bandwidth_hz = link.bandwidth_ghz * 1e9;
        l.noise_power_w = link.noise_power_dbm ? units::dbm_to_watts(*link.noise_power_dbm)
                                               : thermal_noise_w(l.bandwidth_hz, link.noise_temp_k);
        return l;
    }

    double gamma_bar() const {
        return link.gamma_bar_db ? units::db_to_linear(*link.gamma_bar_db) : average_snr(thz_link());
    }

    OutageQuery outage_query() const {
        if (query.snr_threshold_db) return OutageQuery::snr(units::db_to_linear(*query.snr_threshold_db));
        return OutageQuery::rate(*query.target_rate_gbps * 1e9);
    }

    double gamma_th() const { return outage_threshold(outage_query(), thz_link()); }

    OutageScenario scenario() const {
        OutageScenario s;
        s.alpha = channel.alpha;
        s.mu = channel.mu;
        s.beta = channel.beta.value_or(0.0);
        s.num_ports = layout.num_ports;
        s.size_coeff = layout.size_wavelengths;
        s.diversity = diversity;
        s.gamma_bar = gamma_bar();
        s.gamma_th = gamma_th();
        s.bandwidth_hz = link.bandwidth_ghz * 1e9;
        s.alpha_scaled_threshold = query.envelope_threshold;
        s.quad = quadrature;
        return s;
    }
};

namespace detail {

// Maps JSON pointers to the 1-based source line where the member or array
// element starts, so that semantic errors can cite a line.
class LineIndex {
public:
    explicit LineIndex(const std::string& text) { scan(text); }

    int line_of(std::string pointer) const {
        for (;;) {
            if (auto it = lines_.find(pointer); it != lines_.end()) return it->second;
            const auto cut = pointer.rfind('/');
            if (cut == std::string::npos || pointer.empty()) return 1;
            pointer.erase(cut);
        }
    }

private:
    struct Frame {
        bool object;
        std::string key;
        int index = -1;
        bool expect = true; // next token is a key (object) or an element (array)
    };

    static std::string escape(const std::string& key) {
        std::string out;
        for (char c : key) {
            if (c == '~') out += "~0";
            else if (c == '/') out += "~1";
            else out += c;
        }
        return out;
    }

    std::string path() const {
        std::string p;
        for (const auto& f : stack_) p += "/" + (f.object ? escape(f.key) : std::to_string(f.index));
        return p;
    }

    void element_start(int line) {
        if (!stack_.empty() && !stack_.back().object && stack_.back().expect) {
            stack_.back().expect = false;
            ++stack_.back().index;
            lines_.emplace(path(), line);
        }
    }

    void scan(const std::string& text) {
        int line = 1;
        for (std::size_t i = 0; i < text.size(); ++i) {
            const char c = text[i];
            if (c == '\n') { ++line; continue; }
            if (c == ' ' || c == '\t' || c == '\r') continue;
            if (c == '"') {
                std::string s;
                for (++i; i < text.size() && text[i] != '"'; ++i) {
                    if (text[i] == '\\' && i + 1 < text.size()) ++i;
                    s += text[i];
                }
                if (!stack_.empty() && stack_.back().object && stack_.back().expect) {
                    stack_.back().key = s;
                    stack_.back().expect = false;
                    lines_.emplace(path(), line);
                } else {
                    element_start(line);
                }
                continue;
            }
            switch (c) {
            case '{':
                element_start(line);
                stack_.push_back({true, {}, -1, true});
                break;
            case '[':
                element_start(line);
                stack_.push_back({false, {}, -1, true});
                break;
            case '}':
            case ']':
                if (!stack_.empty()) stack_.pop_back();
                break;
            case ',':
                if (!stack_.empty()) stack_.back().expect = true;
                break;
            case ':': break;
            default: element_start(line); break;
            }
        }
    }

    std::vector<Frame> stack_;
    std::map<std::string, int> lines_;
};

class ConfigReader {
public:
    ConfigReader(const std::string& text, std::string source) : lines_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& pointer, const std::string& msg) const {
        throw config_error(source_ + ":" + std::to_string(lines_.line_of(pointer)) + ": " + display(pointer) + ": " +
                           msg);
    }

    // Rejects members outside `known`, catching misspelled keys.
    void only(const nlohmann::json& obj, const std::string& ptr, std::initializer_list<const char*> known) const {
        if (!obj.is_object()) fail(ptr, "expected an object");
        for (const auto& [key, value] : obj.items()) {
            bool ok = false;
            for (const char* k : known) ok |= key == k;
            if (!ok) fail(ptr + "/" + key, "unknown key");
        }
    }

    void number(const nlohmann::json& obj, const std::string& ptr, const char* key, double& out) const {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_number()) fail(ptr + "/" + key, "expected a number");
        out = v.get<double>();
    }

    void number(const nlohmann::json& obj, const std::string& ptr, const char* key, std::optional<double>& out) const {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (v.is_null()) { out.reset(); return; }
        if (!v.is_number()) fail(ptr + "/" + key, "expected a number or null");
        out = v.get<double>();
    }

    template <class Int>
    void integer(const nlohmann::json& obj, const std::string& ptr, const char* key, Int& out) const {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_number_integer()) fail(ptr + "/" + key, "expected an integer");
        if constexpr (std::is_unsigned_v<Int>) {
            if (v.is_number_unsigned()) out = static_cast<Int>(v.get<std::uint64_t>());
            else fail(ptr + "/" + key, "expected a non-negative integer");
        } else {
            out = static_cast<Int>(v.get<std::int64_t>());
        }
    }

    void boolean(const nlohmann::json& obj, const std::string& ptr, const char* key, bool& out) const {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_boolean()) fail(ptr + "/" + key, "expected true or false");
        out = v.get<bool>();
    }

    template <class T>
    void list(const nlohmann::json& obj, const std::string& ptr, const char* key, std::vector<T>& out) const {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        const std::string p = ptr + "/" + key;
        if (!v.is_array()) fail(p, "expected an array");
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const bool ok = std::is_integral_v<T> ? v[i].is_number_integer() : v[i].is_number();
            if (!ok) fail(p + "/" + std::to_string(i), std::is_integral_v<T> ? "expected an integer" : "expected a number");
            out.push_back(v[i].get<T>());
        }
    }

private:
    static std::string display(const std::string& pointer) {
        if (pointer.empty()) return "(root)";
        std::string out;
        for (std::size_t i = 1; i < pointer.size(); ++i) out += pointer[i] == '/' ? '.' : pointer[i];
        return out;
    }

    LineIndex lines_;
    std::string source_;
};

inline Scheme parse_scheme(const ConfigReader& rd, const std::string& ptr, const nlohmann::json& v) {
    if (!v.is_string()) rd.fail(ptr, "expected a string");
    const auto s = v.get<std::string>();
    if (s == "none") return Scheme::none;
    if (s == "sc") return Scheme::sc;
    if (s == "mgc") return Scheme::mgc;
    rd.fail(ptr, "unknown scheme '" + s + "' (none, sc, mgc)");
}

inline ConfigAxis parse_axis(const ConfigReader& rd, const std::string& ptr, const nlohmann::json& v) {
    if (!v.is_string()) rd.fail(ptr, "expected a string");
    const auto s = v.get<std::string>();
    for (auto a : {ConfigAxis::ports, ConfigAxis::rate_gbps, ConfigAxis::snr_db, ConfigAxis::alpha, ConfigAxis::mu,
                   ConfigAxis::size_wavelengths})
        if (s == to_string(a)) return a;
    rd.fail(ptr, "unknown sweep axis '" + s + "'");
}

inline void validate_config(const ExperimentConfig& c, const ConfigReader& rd) {
    const auto& l = c.link;
    auto positive = [&](double v, const char* ptr) {
        if (!(v > 0.0) || !std::isfinite(v)) rd.fail(ptr, "must be positive");
    };
    positive(l.freq_ghz, "/link/freq_ghz");
    positive(l.dist_2d_m, "/link/dist_2d_m");
    positive(l.tx_height_m, "/link/tx_height_m");
    positive(l.rx_height_m, "/link/rx_height_m");
    positive(l.bandwidth_ghz, "/link/bandwidth_ghz");
    positive(l.noise_temp_k, "/link/noise_temp_k");
    if (!(l.absorb_coeff_per_m >= 0.0)) rd.fail("/link/absorb_coeff_per_m", "must be non-negative");
    positive(c.channel.alpha, "/channel/alpha");
    if (c.channel.mu < 1) rd.fail("/channel/mu", "must be a positive integer");
    if (c.channel.beta && !(*c.channel.beta > 0.0)) rd.fail("/channel/beta", "must be positive");
    if (c.layout.num_ports < 1) rd.fail("/layout/num_ports", "must be >= 1");
    positive(c.layout.size_wavelengths, "/layout/size_wavelengths");
    try {
        c.diversity.validate(c.layout.num_ports);
    } catch (const config_error& e) {
        rd.fail("/diversity", e.what());
    }
    if (c.query.target_rate_gbps && c.query.snr_threshold_db)
        rd.fail("/query", "give either target_rate_gbps or snr_threshold_db, not both");
    if (!c.query.target_rate_gbps && !c.query.snr_threshold_db)
        rd.fail("/query", "one of target_rate_gbps or snr_threshold_db is required");
    if (c.query.target_rate_gbps) positive(*c.query.target_rate_gbps, "/query/target_rate_gbps");
    try {
        c.mc.validate();
    } catch (const domain_error& e) {
        rd.fail("/mc", e.what());
    }
    try {
        c.quadrature.validate();
    } catch (const domain_error& e) {
        rd.fail("/quadrature", e.what());
    }
    if (c.sweep.grid.empty()) rd.fail("/sweep/grid", "must not be empty");
    for (std::size_t i = 1; i < c.sweep.grid.size(); ++i)
        if (!(c.sweep.grid[i] > c.sweep.grid[i - 1]))
            rd.fail("/sweep/grid/" + std::to_string(i), "grid must be strictly increasing");
    for (std::size_t i = 0; i < c.corr.ports.size(); ++i)
        if (c.corr.ports[i] < 1) rd.fail("/corr/ports/" + std::to_string(i), "must be >= 1");
    for (std::size_t i = 0; i < c.corr.size_wavelengths.size(); ++i)
        if (!(c.corr.size_wavelengths[i] > 0.0)) rd.fail("/corr/size_wavelengths/" + std::to_string(i), "must be positive");
}

} // namespace detail

/// Parses and validates a configuration. Missing members take their
/// defaults; unknown members are errors. `source` prefixes error messages.
inline ExperimentConfig parse_config(const std::string& text, const std::string& source = "config") {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
        throw config_error(source + ":" + std::to_string(line) + ": invalid JSON: " + e.what());
    }
    const detail::ConfigReader rd(text, source);
    ExperimentConfig c;
    rd.only(doc, "", {"schema_version", "link", "channel", "layout", "diversity", "query", "mc", "quadrature", "sweep",
                      "corr", "output_path"});
    if (!doc.contains("schema_version")) rd.fail("", "schema_version is required");
    rd.integer(doc, "", "schema_version", c.schema_version);
    if (c.schema_version != config_schema_version)
        rd.fail("/schema_version", "unsupported version " + std::to_string(c.schema_version));

    if (doc.contains("link")) {
        const auto& j = doc["link"];
        rd.only(j, "/link", {"tx_power_dbm", "tx_gain_dbi", "rx_gain_dbi", "freq_ghz", "dist_2d_m", "tx_height_m",
                             "rx_height_m", "absorb_coeff_per_m", "bandwidth_ghz", "noise_temp_k", "noise_power_dbm",
                             "gamma_bar_db"});
        auto& l = c.link;
        rd.number(j, "/link", "tx_power_dbm", l.tx_power_dbm);
        rd.number(j, "/link", "tx_gain_dbi", l.tx_gain_dbi);
        rd.number(j, "/link", "rx_gain_dbi", l.rx_gain_dbi);
        rd.number(j, "/link", "freq_ghz", l.freq_ghz);
        rd.number(j, "/link", "dist_2d_m", l.dist_2d_m);
        rd.number(j, "/link", "tx_height_m", l.tx_height_m);
        rd.number(j, "/link", "rx_height_m", l.rx_height_m);
        rd.number(j, "/link", "absorb_coeff_per_m", l.absorb_coeff_per_m);
        rd.number(j, "/link", "bandwidth_ghz", l.bandwidth_ghz);
        rd.number(j, "/link", "noise_temp_k", l.noise_temp_k);
        rd.number(j, "/link", "noise_power_dbm", l.noise_power_dbm);
        rd.number(j, "/link", "gamma_bar_db", l.gamma_bar_db);
    }
    if (doc.contains("channel")) {
        const auto& j = doc["channel"];
        rd.only(j, "/channel", {"alpha", "mu", "beta"});
        rd.number(j, "/channel", "alpha", c.channel.alpha);
        rd.integer(j, "/channel", "mu", c.channel.mu);
        rd.number(j, "/channel", "beta", c.channel.beta);
    }
    if (doc.contains("layout")) {
        const auto& j = doc["layout"];
        rd.only(j, "/layout", {"num_ports", "size_wavelengths"});
        rd.integer(j, "/layout", "num_ports", c.layout.num_ports);
        rd.number(j, "/layout", "size_wavelengths", c.layout.size_wavelengths);
    }
    if (doc.contains("diversity")) {
        const auto& j = doc["diversity"];
        rd.only(j, "/diversity", {"scheme", "order"});
        if (j.contains("scheme")) c.diversity.scheme = detail::parse_scheme(rd, "/diversity/scheme", j["scheme"]);
        rd.integer(j, "/diversity", "order", c.diversity.order);
    }
    if (doc.contains("query")) {
        const auto& j = doc["query"];
        rd.only(j, "/query", {"target_rate_gbps", "snr_threshold_db", "envelope_threshold"});
        // Giving one form of the threshold drops the default of the other.
        if (j.contains("snr_threshold_db") && !j.contains("target_rate_gbps")) c.query.target_rate_gbps.reset();
        rd.number(j, "/query", "target_rate_gbps", c.query.target_rate_gbps);
        rd.number(j, "/query", "snr_threshold_db", c.query.snr_threshold_db);
        rd.boolean(j, "/query", "envelope_threshold", c.query.envelope_threshold);
    }
    if (doc.contains("mc")) {
        const auto& j = doc["mc"];
        // Worker count is an execution setting (command line only) so that it
        // cannot change the echoed document.
        rd.only(j, "/mc", {"trials", "seed", "confidence"});
        rd.integer(j, "/mc", "trials", c.mc.trials);
        rd.integer(j, "/mc", "seed", c.mc.seed);
        rd.number(j, "/mc", "confidence", c.mc.confidence);
    }
    if (doc.contains("quadrature")) {
        const auto& j = doc["quadrature"];
        rd.only(j, "/quadrature", {"nodes", "rel_tol", "abs_tol", "max_doublings"});
        rd.integer(j, "/quadrature", "nodes", c.quadrature.nodes);
        rd.number(j, "/quadrature", "rel_tol", c.quadrature.rel_tol);
        rd.number(j, "/quadrature", "abs_tol", c.quadrature.abs_tol);
        rd.integer(j, "/quadrature", "max_doublings", c.quadrature.max_doublings);
    }
    if (doc.contains("sweep")) {
        const auto& j = doc["sweep"];
        rd.only(j, "/sweep", {"axis", "grid"});
        if (j.contains("axis")) c.sweep.axis = detail::parse_axis(rd, "/sweep/axis", j["axis"]);
        rd.list(j, "/sweep", "grid", c.sweep.grid);
    }
    if (doc.contains("corr")) {
        const auto& j = doc["corr"];
        rd.only(j, "/corr", {"ports", "size_wavelengths"});
        rd.list(j, "/corr", "ports", c.corr.ports);
        rd.list(j, "/corr", "size_wavelengths", c.corr.size_wavelengths);
    }
    if (doc.contains("output_path")) {
        const auto& v = doc["output_path"];
        if (v.is_string()) c.output_path = v.get<std::string>();
        else if (!v.is_null()) rd.fail("/output_path", "expected a string or null");
    }
    detail::validate_config(c, rd);
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

/// Complete document, defaults included; parse_config(to_json(c).dump()) == c
/// up to the worker count, which is not part of the document.
inline nlohmann::json to_json(const ExperimentConfig& c) {
    using nlohmann::json;
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json j;
    j["schema_version"] = c.schema_version;
    j["link"] = {{"tx_power_dbm", c.link.tx_power_dbm},
                 {"tx_gain_dbi", c.link.tx_gain_dbi},
                 {"rx_gain_dbi", c.link.rx_gain_dbi},
                 {"freq_ghz", c.link.freq_ghz},
                 {"dist_2d_m", c.link.dist_2d_m},
                 {"tx_height_m", c.link.tx_height_m},
                 {"rx_height_m", c.link.rx_height_m},
                 {"absorb_coeff_per_m", c.link.absorb_coeff_per_m},
                 {"bandwidth_ghz", c.link.bandwidth_ghz},
                 {"noise_temp_k", c.link.noise_temp_k},
                 {"noise_power_dbm", opt(c.link.noise_power_dbm)},
                 {"gamma_bar_db", opt(c.link.gamma_bar_db)}};
    j["channel"] = {{"alpha", c.channel.alpha}, {"mu", c.channel.mu}, {"beta", opt(c.channel.beta)}};
    j["layout"] = {{"num_ports", c.layout.num_ports}, {"size_wavelengths", c.layout.size_wavelengths}};
    j["diversity"] = {{"scheme", to_string(c.diversity.scheme)}, {"order", c.diversity.order}};
    j["query"] = {{"target_rate_gbps", opt(c.query.target_rate_gbps)},
                  {"snr_threshold_db", opt(c.query.snr_threshold_db)},
                  {"envelope_threshold", c.query.envelope_threshold}};
    j["mc"] = {{"trials", c.mc.trials}, {"seed", c.mc.seed}, {"confidence", c.mc.confidence}};
    j["quadrature"] = {{"nodes", c.quadrature.nodes},
                       {"rel_tol", c.quadrature.rel_tol},
                       {"abs_tol", c.quadrature.abs_tol},
                       {"max_doublings", c.quadrature.max_doublings}};
    j["sweep"] = {{"axis", to_string(c.sweep.axis)}, {"grid", c.sweep.grid}};
    j["corr"] = {{"ports", c.corr.ports}, {"size_wavelengths", c.corr.size_wavelengths}};
    j["output_path"] = c.output_path ? json(*c.output_path) : json(nullptr);
    return j;
}

} // namespace fasthz

#endif // FASTHZ_CONFIG_HPP
