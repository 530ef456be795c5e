#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "tiltpump/experiments.hpp"

namespace tiltpump {

namespace {

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, end);
    if (s.find_first_of(".eEn") == std::string::npos)
        s += ".0";
    return s;
}

std::string quote(const std::string& s) {
    std::ostringstream os;
    os << toml::value<std::string>(s);
    return os.str();
}

std::string literal_of(const toml::node& n) {
    if (auto v = n.as_floating_point())
        return format_double(v->get());
    if (auto v = n.as_integer())
        return std::to_string(v->get());
    if (auto v = n.as_boolean())
        return v->get() ? "true" : "false";
    if (auto v = n.as_string())
        return quote(v->get());
    if (auto a = n.as_array()) {
        std::string s = "[";
        for (std::size_t i = 0; i < a->size(); ++i) {
            if (i)
                s += ", ";
            s += literal_of(*a->get(i));
        }
        return s + "]";
    }
    throw ConfigError("unsupported value type in configuration");
}

[[noreturn]] void bad_value(const std::string& key, const std::string& expected) {
    throw ConfigError("configuration key '" + key + "' must be " + expected);
}

double read_double(const std::string& key, const toml::node& n) {
    if (auto v = n.value<double>(); v && (n.is_floating_point() || n.is_integer()))
        return *v;
    bad_value(key, "a number");
}

int read_int(const std::string& key, const toml::node& n) {
    if (auto v = n.as_integer()) {
        const auto x = v->get();
        if (x >= std::numeric_limits<int>::min() && x <= std::numeric_limits<int>::max())
            return static_cast<int>(x);
    }
    bad_value(key, "an integer");
}

bool read_bool(const std::string& key, const toml::node& n) {
    if (auto v = n.as_boolean())
        return v->get();
    bad_value(key, "true or false");
}

std::string read_string(const std::string& key, const toml::node& n) {
    if (auto v = n.as_string())
        return v->get();
    bad_value(key, "a string");
}

RationalRatio parse_ratio(const std::string& key, const toml::node& n) {
    if (n.is_integer())
        return RationalRatio::rational(read_int(key, n), 1);
    if (n.is_floating_point())
        return RationalRatio::irrational(read_double(key, n));
    if (auto v = n.as_string()) {
        const std::string& s = v->get();
        const auto slash = s.find('/');
        try {
            std::size_t used = 0;
            const int p = std::stoi(s.substr(0, slash), &used);
            if (used != (slash == std::string::npos ? s.size() : slash))
                bad_value(key, "\"p/q\", an integer or a number");
            int q = 1;
            if (slash != std::string::npos) {
                const std::string tail = s.substr(slash + 1);
                q = std::stoi(tail, &used);
                if (used != tail.size())
                    bad_value(key, "\"p/q\", an integer or a number");
            }
            return RationalRatio::rational(p, q);
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const ConfigError*>(&e))
                throw;
            throw ConfigError("configuration key '" + key + "': " + e.what());
        }
    }
    bad_value(key, "\"p/q\", an integer or a number");
}

std::string ratio_literal(const RationalRatio& r) {
    if (r.is_rational())
        return quote(std::to_string(r.p()) + "/" + std::to_string(r.q()));
    return format_double(r.value());
}

template <class E>
E read_enum(const std::string& key, const toml::node& n,
            const std::vector<std::pair<const char*, E>>& names) {
    const std::string s = read_string(key, n);
    for (const auto& [name, value] : names)
        if (s == name)
            return value;
    std::string list;
    for (const auto& [name, value] : names)
        list += (list.empty() ? "" : ", ") + std::string(name);
    bad_value(key, "one of " + list);
}

template <class E>
std::string enum_literal(E value, const std::vector<std::pair<const char*, E>>& names) {
    for (const auto& [name, v] : names)
        if (v == value)
            return quote(name);
    return "\"\"";
}

const std::vector<std::pair<const char*, ScenarioKind>> kKindNames = {
    {"drift_scan", ScenarioKind::drift_scan},
    {"variance_study", ScenarioKind::variance_study},
    {"quantum_evolution", ScenarioKind::quantum_evolution},
    {"wannier_pump", ScenarioKind::wannier_pump},
    {"irrational_longtime", ScenarioKind::irrational_longtime},
    {"continuum_pump", ScenarioKind::continuum_pump},
    {"chern_map", ScenarioKind::chern_map},
};
const std::vector<std::pair<const char*, Band>> kBandNames = {{"lower", Band::lower},
                                                              {"upper", Band::upper}};
const std::vector<std::pair<const char*, PacketKind>> kPacketNames = {
    {"gaussian", PacketKind::gaussian}, {"wannier", PacketKind::wannier}};
const std::vector<std::pair<const char*, Stepper>> kStepperNames = {
    {"magnus4", Stepper::magnus4},
    {"midpoint", Stepper::midpoint},
    {"frozen_start", Stepper::frozen_start}};
const std::vector<std::pair<const char*, SplitScheme>> kSchemeNames = {
    {"fourth_order", SplitScheme::fourth_order}, {"strang", SplitScheme::strang}};

struct Field {
    std::string section;
    std::string key;
    std::function<std::string(const ScenarioConfig&)> write;
    std::function<void(ScenarioConfig&, const std::string&, const toml::node&)> read;
};

template <class Acc>
Field number(const char* section, const char* key, Acc acc) {
    return {section, key,
            [acc](const ScenarioConfig& c) {
                return format_double(acc(const_cast<ScenarioConfig&>(c)));
            },
            [acc](ScenarioConfig& c, const std::string& k, const toml::node& n) {
                acc(c) = read_double(k, n);
            }};
}

template <class Acc>
Field integer(const char* section, const char* key, Acc acc) {
    return {section, key,
            [acc](const ScenarioConfig& c) {
                return std::to_string(acc(const_cast<ScenarioConfig&>(c)));
            },
            [acc](ScenarioConfig& c, const std::string& k, const toml::node& n) {
                acc(c) = read_int(k, n);
            }};
}

template <class Acc>
Field flag(const char* section, const char* key, Acc acc) {
    return {section, key,
            [acc](const ScenarioConfig& c) -> std::string {
                return acc(const_cast<ScenarioConfig&>(c)) ? "true" : "false";
            },
            [acc](ScenarioConfig& c, const std::string& k, const toml::node& n) {
                acc(c) = read_bool(k, n);
            }};
}

template <class Acc>
Field text(const char* section, const char* key, Acc acc) {
    return {section, key,
            [acc](const ScenarioConfig& c) { return quote(acc(const_cast<ScenarioConfig&>(c))); },
            [acc](ScenarioConfig& c, const std::string& k, const toml::node& n) {
                acc(c) = read_string(k, n);
            }};
}

template <class E, class Acc>
Field choice(const char* section, const char* key, const std::vector<std::pair<const char*, E>>& names,
             Acc acc) {
    return {section, key,
            [acc, &names](const ScenarioConfig& c) {
                return enum_literal(acc(const_cast<ScenarioConfig&>(c)), names);
            },
            [acc, &names](ScenarioConfig& c, const std::string& k, const toml::node& n) {
                acc(c) = read_enum(k, n, names);
            }};
}

const std::vector<Field>& fields() {
    using C = ScenarioConfig;
    static const std::vector<Field> all = {
        text("scenario", "name", [](C& c) -> std::string& { return c.name; }),
        choice("scenario", "kind", kKindNames, [](C& c) -> ScenarioKind& { return c.kind; }),
        text("scenario", "description", [](C& c) -> std::string& { return c.description; }),

        number("model", "J", [](C& c) -> double& { return c.model.J; }),
        number("model", "delta0", [](C& c) -> double& { return c.model.delta0; }),
        number("model", "Delta0", [](C& c) -> double& { return c.model.Delta0; }),
        number("model", "omega", [](C& c) -> double& { return c.model.omega; }),
        number("model", "phi0", [](C& c) -> double& { return c.model.phi0; }),
        integer("model", "L_sites", [](C& c) -> int& { return c.model.L_sites; }),
        Field{"model", "ratio", [](const C& c) { return ratio_literal(c.ratio); },
              [](C& c, const std::string& k, const toml::node& n) { c.ratio = parse_ratio(k, n); }},
        choice("model", "band", kBandNames, [](C& c) -> Band& { return c.band; }),

        choice("packet", "kind", kPacketNames, [](C& c) -> PacketKind& { return c.packet; }),
        number("packet", "sigma", [](C& c) -> double& { return c.sigma; }),
        number("packet", "j0", [](C& c) -> double& { return c.j0; }),
        number("packet", "k0", [](C& c) -> double& { return c.k0; }),
        integer("packet", "wannier_cell", [](C& c) -> int& { return c.wannier_cell; }),

        integer("run", "k_points", [](C& c) -> int& { return c.k_points; }),
        integer("run", "points_per_cycle", [](C& c) -> int& { return c.points_per_cycle; }),
        Field{"run", "p_values",
              [](const C& c) {
                  std::string s = "[";
                  for (std::size_t i = 0; i < c.p_values.size(); ++i)
                      s += (i ? ", " : "") + std::to_string(c.p_values[i]);
                  return s + "]";
              },
              [](C& c, const std::string& k, const toml::node& n) {
                  const auto* a = n.as_array();
                  if (!a)
                      bad_value(k, "an array of integers");
                  c.p_values.clear();
                  for (const auto& e : *a)
                      c.p_values.push_back(read_int(k, e));
              }},
        number("run", "cycles", [](C& c) -> double& { return c.cycles; }),
        integer("run", "steps_per_cycle", [](C& c) -> int& { return c.steps_per_cycle; }),
        integer("run", "samples_per_cycle", [](C& c) -> int& { return c.samples_per_cycle; }),
        choice("run", "stepper", kStepperNames, [](C& c) -> Stepper& { return c.stepper; }),
        flag("run", "record_momentum", [](C& c) -> bool& { return c.record_momentum; }),
        integer("run", "snapshot_every", [](C& c) -> int& { return c.snapshot_every; }),
        flag("run", "dt_check", [](C& c) -> bool& { return c.dt_check; }),
        integer("run", "grid_k", [](C& c) -> int& { return c.grid_k; }),
        integer("run", "grid_t", [](C& c) -> int& { return c.grid_t; }),

        number("continuum", "Vs", [](C& c) -> double& { return c.continuum.Vs; }),
        number("continuum", "Vl", [](C& c) -> double& { return c.continuum.Vl; }),
        number("continuum", "omega", [](C& c) -> double& { return c.continuum.omega; }),
        number("continuum", "F_over_homega",
               [](C& c) -> double& { return c.continuum.F_over_homega; }),
        number("continuum", "phi0", [](C& c) -> double& { return c.continuum.phi0; }),
        integer("continuum", "box_cells", [](C& c) -> int& { return c.continuum.box_cells; }),
        integer("continuum", "points_per_cell",
                [](C& c) -> int& { return c.continuum.points_per_cell; }),
        number("continuum", "trap_gamma", [](C& c) -> double& { return c.continuum.trap_gamma; }),
        number("continuum", "trap_x0", [](C& c) -> double& { return c.continuum.trap_x0; }),
        number("continuum", "dt", [](C& c) -> double& { return c.continuum_dt; }),
        choice("continuum", "scheme", kSchemeNames,
               [](C& c) -> SplitScheme& { return c.continuum_scheme; }),

        integer("output", "precision", [](C& c) -> int& { return c.precision; }),
    };
    return all;
}

const Field& find_field(const std::string& dotted) {
    for (const auto& f : fields())
        if (f.section + "." + f.key == dotted)
            return f;
    throw ConfigError("unknown configuration key '" + dotted + "'");
}

const std::vector<std::string>& section_names() {
    static const std::vector<std::string> names = {"scenario", "model",     "packet",
                                                   "run",      "continuum", "output"};
    return names;
}

bool is_section(const std::string& s) {
    const auto& n = section_names();
    return std::find(n.begin(), n.end(), s) != n.end();
}

toml::table parse_text(const std::string& text, const std::string& origin) {
    try {
        return toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "cannot parse " << origin << ": " << e.description() << " (line "
           << e.source().begin.line << ", column " << e.source().begin.column << ")";
        throw ConfigError(os.str());
    }
}

// Reads the value of a --set / variant literal; anything that is not valid
// TOML is taken as a bare string.
toml::table literal_table(const std::string& literal) {
    try {
        return toml::parse("v = " + literal);
    } catch (const toml::parse_error&) {
        toml::table t;
        t.insert("v", literal);
        return t;
    }
}

Variant read_variant(const toml::table& t, std::size_t index) {
    Variant v;
    for (auto&& [k, node] : t) {
        const std::string key(k.str());
        if (key == "name") {
            v.name = read_string("variant.name", node);
            continue;
        }
        const auto* section = node.as_table();
        if (!section || !is_section(key))
            throw ConfigError("variant " + std::to_string(index) + ": unknown entry '" + key + "'");
        for (auto&& [sk, sn] : *section) {
            const std::string dotted = key + "." + std::string(sk.str());
            find_field(dotted);
            if (dotted == "scenario.kind" || dotted == "scenario.name")
                throw ConfigError("variants cannot override " + dotted);
            v.overrides.emplace_back(dotted, literal_of(sn));
        }
    }
    if (v.name.empty())
        throw ConfigError("variant " + std::to_string(index) + " needs a name");
    return v;
}

void check_name(const std::string& what, const std::string& name) {
    if (name.empty())
        throw ConfigError(what + " must not be empty");
    for (char ch : name)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
            throw ConfigError(what + " '" + name + "' may only contain letters, digits, '_' and '-'");
}

void validate_single(const ScenarioConfig& c) {
    check_name("scenario.name", c.name);
    if (c.precision < 1 || c.precision > 17)
        throw ConfigError("output.precision must be in [1, 17]");

    auto model_error = [](const std::exception& e) {
        return ConfigError(std::string("model: ") + e.what());
    };
    const bool tight_binding = c.kind != ScenarioKind::continuum_pump;
    if (tight_binding) {
        try {
            c.tilted_model().validate();
        } catch (const ParameterError& e) {
            throw model_error(e);
        }
    }

    auto need = [](bool ok, const std::string& msg) {
        if (!ok)
            throw ConfigError(msg);
    };

    switch (c.kind) {
    case ScenarioKind::drift_scan:
        need(c.ratio.is_rational(), "model.ratio must be rational (\"p/q\") for drift_scan");
        need(c.k_points >= 1, "run.k_points must be >= 1");
        need(c.points_per_cycle >= 2, "run.points_per_cycle must be >= 2");
        break;
    case ScenarioKind::variance_study:
        need(c.ratio.is_rational(), "model.ratio must be rational; its denominator sets q");
        need(!c.p_values.empty(), "run.p_values must list at least one p");
        need(c.k_points >= 2, "run.k_points must be >= 2");
        need(c.points_per_cycle >= 2, "run.points_per_cycle must be >= 2");
        for (int p : c.p_values)
            need(std::gcd(p, c.ratio.q()) == 1,
                 "run.p_values: " + std::to_string(p) + " is not co-prime to q = " +
                     std::to_string(c.ratio.q()));
        break;
    case ScenarioKind::quantum_evolution:
    case ScenarioKind::wannier_pump: {
        need(std::isfinite(c.cycles) && c.cycles >= 0.0, "run.cycles must be >= 0");
        need(c.steps_per_cycle >= 1, "run.steps_per_cycle must be >= 1");
        need(c.samples_per_cycle >= 1 && c.samples_per_cycle <= c.steps_per_cycle,
             "run.samples_per_cycle must be in [1, steps_per_cycle]");
        need(c.snapshot_every >= 0, "run.snapshot_every must be >= 0");
        const bool wannier = c.kind == ScenarioKind::wannier_pump || c.packet == PacketKind::wannier;
        if (wannier) {
            need(c.wannier_cell >= 0 && c.wannier_cell < c.model.cells(),
                 "packet.wannier_cell must be a cell index in [0, " +
                     std::to_string(c.model.cells() - 1) + "]");
        } else {
            need(std::isfinite(c.sigma) && c.sigma > 0.0, "packet.sigma must be > 0");
            need(std::isfinite(c.k0), "packet.k0 must be finite");
            need(c.j0 - 6.0 * c.sigma >= 0.0 && c.j0 + 6.0 * c.sigma <= c.model.L_sites - 1,
                 "packet.j0 needs 6 sigma clearance inside the chain");
        }
        break;
    }
    case ScenarioKind::irrational_longtime:
        need(c.cycles >= 1.0 && std::floor(c.cycles) == c.cycles,
             "run.cycles must be a whole number >= 1");
        need(c.points_per_cycle >= 2, "run.points_per_cycle must be >= 2");
        need(std::isfinite(c.k0), "packet.k0 must be finite");
        break;
    case ScenarioKind::continuum_pump:
        try {
            c.continuum.validate();
        } catch (const ParameterError& e) {
            throw ConfigError(std::string("continuum: ") + e.what());
        }
        need(c.continuum.trap_gamma > 0.0, "continuum.trap_gamma must be > 0");
        need(std::isfinite(c.continuum_dt) && c.continuum_dt > 0.0, "continuum.dt must be > 0");
        need(std::isfinite(c.cycles) && c.cycles > 0.0, "run.cycles must be > 0");
        break;
    case ScenarioKind::chern_map:
        need(c.grid_k >= 20 && c.grid_t >= 20, "run.grid_k and run.grid_t must be >= 20");
        break;
    }
}

} // namespace

std::string to_string(ScenarioKind kind) {
    for (const auto& [name, k] : kKindNames)
        if (k == kind)
            return name;
    return "unknown";
}

ScenarioKind parse_scenario_kind(const std::string& text) {
    for (const auto& [name, k] : kKindNames)
        if (text == name)
            return k;
    throw ConfigError("unknown scenario kind '" + text + "'");
}

std::vector<std::string> scenario_kind_names() {
    std::vector<std::string> out;
    for (const auto& [name, k] : kKindNames)
        out.emplace_back(name);
    return out;
}

ScenarioConfig parse_config(const std::string& toml_text) {
    const auto root = parse_text(toml_text, "configuration");
    ScenarioConfig c;
    bool has_kind = false;
    for (auto&& [k, node] : root) {
        const std::string key(k.str());
        if (key == "variant") {
            const auto* arr = node.as_array();
            if (!arr)
                throw ConfigError("'variant' must be an array of tables ([[variant]])");
            for (std::size_t i = 0; i < arr->size(); ++i) {
                const auto* t = arr->get(i)->as_table();
                if (!t)
                    throw ConfigError("'variant' must be an array of tables ([[variant]])");
                c.variants.push_back(read_variant(*t, i));
            }
            continue;
        }
        const auto* section = node.as_table();
        if (!section || !is_section(key))
            throw ConfigError("unknown configuration section '" + key + "'");
        for (auto&& [sk, sn] : *section) {
            const std::string dotted = key + "." + std::string(sk.str());
            find_field(dotted).read(c, dotted, sn);
            if (dotted == "scenario.kind")
                has_kind = true;
        }
    }
    if (!has_kind)
        throw ConfigError("missing required key scenario.kind (one of drift_scan, variance_study, "
                          "quantum_evolution, wannier_pump, irrational_longtime, continuum_pump, "
                          "chern_map)");
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open configuration file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_toml(const ScenarioConfig& config) {
    std::ostringstream os;
    std::string current;
    for (const auto& f : fields()) {
        if (f.section != current) {
            if (!current.empty())
                os << "\n";
            os << "[" << f.section << "]\n";
            current = f.section;
        }
        os << f.key << " = " << f.write(config) << "\n";
    }
    for (const auto& v : config.variants) {
        os << "\n[[variant]]\nname = " << quote(v.name) << "\n";
        auto overrides = v.overrides;
        std::stable_sort(overrides.begin(), overrides.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::string section;
        for (const auto& [key, literal] : overrides) {
            const auto dot = key.find('.');
            const std::string s = key.substr(0, dot);
            if (s != section) {
                os << "[variant." << s << "]\n";
                section = s;
            }
            os << key.substr(dot + 1) << " = " << literal << "\n";
        }
    }
    return os.str();
}

void apply_override(ScenarioConfig& config, const std::string& key, const std::string& value) {
    const Field& f = find_field(key);
    const auto t = literal_table(value);
    f.read(config, key, *t.get("v"));
}

ScenarioConfig resolve_variant(const ScenarioConfig& config, const Variant& variant) {
    ScenarioConfig c = config;
    c.variants.clear();
    for (const auto& [key, literal] : variant.overrides) {
        try {
            apply_override(c, key, literal);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("variant '" + variant.name + "': " + e.what());
        }
    }
    return c;
}

void validate_config(const ScenarioConfig& config) {
    if (config.variants.empty()) {
        validate_single(config);
        return;
    }
    check_name("scenario.name", config.name);
    std::set<std::string> names;
    for (const auto& v : config.variants) {
        check_name("variant name", v.name);
        if (!names.insert(v.name).second)
            throw ConfigError("duplicate variant name '" + v.name + "'");
        std::set<std::string> keys;
        for (const auto& [key, literal] : v.overrides) {
            find_field(key);
            if (!keys.insert(key).second)
                throw ConfigError("variant '" + v.name + "' overrides " + key + " twice");
        }
        try {
            validate_single(resolve_variant(config, v));
        } catch (const ConfigError& e) {
            throw ConfigError("variant '" + v.name + "': " + e.what());
        }
    }
}

} // namespace tiltpump
