#include "optstop/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace optstop {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
    throw std::invalid_argument(path + ":" + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& path, int line, const std::string& key,
                    const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        fail(path, line, "value for '" + key + "' is not a number: '" + text + "'");
    return value;
}

// One parsed key with its source line, grouped per section.
struct Entry {
    double value = 0.0;
    int line = 0;
};
using Section = std::map<std::string, Entry>;

const std::set<std::string>& allowed_keys(const std::string& path, int line,
                                          const std::string& section) {
    static const std::set<std::string> temperature = {"mu1", "mu2", "xi1", "xi2",
                                                      "gamma", "c0", "s0"};
    static const std::set<std::string> damage = {"alpha1", "alpha2", "sigma1",
                                                 "sigma2", "s0"};
    static const std::set<std::string> economy = {"r"};
    static const std::set<std::string> cost = {"k", "q"};
    if (section == "temperature") return temperature;
    if (section == "damage") return damage;
    if (section == "economy") return economy;
    if (section == "cost") return cost;
    fail(path, line, "unknown section [" + section + "]");
}

double require(const std::string& path, const Section& sec,
               const std::string& section, const std::string& key) {
    auto it = sec.find(key);
    if (it == sec.end())
        throw std::invalid_argument(path + ": section [" + section +
                                    "] is missing required key '" + key + "'");
    return it->second.value;
}

}  // namespace

Parameters default_parameters() {
    TemperatureModel m;
    m.mu1 = 0.01;
    m.mu2 = 0.005;
    m.xi1 = 0.1;
    m.xi2 = 0.1;
    m.gamma = 1.9012608;
    m.C0 = 15.0;
    m.S0 = 1.0;

    Parameters p;
    p.temperature = m;
    p.dynamics = calibrate(m, 0.05);
    p.cost.K = 60.0;
    p.cost.q = 0.0;
    return p;
}

Parameters load_parameters(const std::string& path,
                           std::vector<std::string>& warnings) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);

    std::map<std::string, Section> sections;
    std::string current;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        // Values are numeric, so '#'/';' can only start a comment.
        std::size_t cut = raw.find_first_of("#;");
        std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                fail(path, lineno, "malformed section header: '" + line + "'");
            current = trim(line.substr(1, line.size() - 2));
            allowed_keys(path, lineno, current);  // rejects unknown sections
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(path, lineno, "expected 'key = value': '" + line + "'");
        if (current.empty())
            fail(path, lineno, "key outside any section: '" + line + "'");

        std::string key = trim(line.substr(0, eq));
        for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        const auto& allowed = allowed_keys(path, lineno, current);
        if (!allowed.count(key))
            fail(path, lineno, "unknown key '" + key + "' in section [" + current + "]");

        Section& sec = sections[current];
        if (sec.count(key))
            fail(path, lineno,
                 "duplicate key '" + key + "' in section [" + current +
                     "] (first set on line " + std::to_string(sec[key].line) + ")");
        double value = parse_number(path, lineno, key, trim(line.substr(eq + 1)));
        sec[key] = Entry{value, lineno};
    }

    Parameters p = default_parameters();
    if (auto it = sections.find("economy"); it != sections.end())
        p.dynamics.r = require(path, it->second, "economy", "r");
    if (auto it = sections.find("cost"); it != sections.end()) {
        const Section& sec = it->second;
        if (auto k = sec.find("k"); k != sec.end()) p.cost.K = k->second.value;
        if (auto q = sec.find("q"); q != sec.end()) p.cost.q = q->second.value;
    }

    auto temp_it = sections.find("temperature");
    auto damage_it = sections.find("damage");
    if (temp_it != sections.end()) {
        const Section& sec = temp_it->second;
        TemperatureModel m;
        m.mu1 = require(path, sec, "temperature", "mu1");
        m.mu2 = require(path, sec, "temperature", "mu2");
        m.xi1 = require(path, sec, "temperature", "xi1");
        m.xi2 = require(path, sec, "temperature", "xi2");
        m.gamma = require(path, sec, "temperature", "gamma");
        m.C0 = require(path, sec, "temperature", "c0");
        m.S0 = require(path, sec, "temperature", "s0");
        m.validate();
        p.temperature = m;
        p.dynamics = calibrate(m, p.dynamics.r);
    }
    if (damage_it != sections.end()) {
        if (temp_it != sections.end())
            warnings.push_back(path +
                               ": both [temperature] and [damage] given; "
                               "using [damage] and ignoring the calibration");
        const Section& sec = damage_it->second;
        DamageDynamics d;
        d.alpha1 = require(path, sec, "damage", "alpha1");
        d.alpha2 = require(path, sec, "damage", "alpha2");
        d.sigma1 = require(path, sec, "damage", "sigma1");
        d.sigma2 = require(path, sec, "damage", "sigma2");
        d.S0 = require(path, sec, "damage", "s0");
        d.r = p.dynamics.r;
        p.temperature.reset();
        p.dynamics = d;
    }

    p.dynamics.validate();
    p.cost.validate();
    return p;
}

}  // namespace optstop
