#include "squeezelab/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace sqz::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
    const auto p = s.find('#');
    return trim(p == std::string::npos ? s : s.substr(0, p));
}

bool parse_number(const std::string& s, double& v) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* b = t.data();
    const char* e = b + t.size();
    if (*b == '+') ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    return ec == std::errc() && p == e && std::isfinite(v);
}

double number_or_throw(const std::string& s, const std::string& src, int line, const std::string& what) {
    double v;
    if (!parse_number(s, v)) throw ParseError(src, line, "invalid number for " + what + ": '" + trim(s) + "'");
    return v;
}

// "key = value" or "key value".
bool split_kv(const std::string& line, std::string& k, std::string& v) {
    auto p = line.find('=');
    std::size_t skip = 1;
    if (p == std::string::npos) p = line.find_first_of(" \t");
    if (p == std::string::npos) return false;
    k = trim(line.substr(0, p));
    v = trim(line.substr(p + skip));
    return !k.empty() && !v.empty();
}

std::vector<std::string> tokens(const std::string& s) {
    std::istringstream ss(s);
    std::vector<std::string> out;
    for (std::string t; ss >> t;) out.push_back(t);
    return out;
}

const char* kAxes = "xyz";

}  // namespace

ParseError::ParseError(const std::string& source, int line, const std::string& msg)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, p) : std::string("nan");
}

MomentData read_moments(std::istream& in, const std::string& source) {
    std::map<std::string, std::pair<double, int>> vals;
    std::string raw;
    int ln = 0;
    while (std::getline(in, raw)) {
        ++ln;
        const std::string line = strip_comment(raw);
        if (line.empty()) continue;
        std::string k, v;
        if (!split_kv(line, k, v)) throw ParseError(source, ln, "expected 'key = value'");
        if (vals.count(k)) throw ParseError(source, ln, "duplicate key '" + k + "'");
        vals[k] = {number_or_throw(v, source, ln, k), ln};
    }
    std::set<std::string> known{"N", "j", "Jx", "Jy", "Jz", "localx", "localy", "localz"};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            known.insert(std::string("C") + kAxes[a] + kAxes[b]);
            known.insert(std::string("Q") + kAxes[a] + kAxes[b]);
        }
    for (const auto& [k, v] : vals)
        if (!known.count(k)) throw ParseError(source, v.second, "unknown key '" + k + "'");
    auto need = [&](const std::string& k) {
        auto it = vals.find(k);
        if (it == vals.end()) throw ParseError(source, ln, "missing key '" + k + "'");
        return it->second.first;
    };
    MomentData md;
    md.n = need("N");
    md.j = need("j");
    for (int a = 0; a < 3; ++a) md.mean(a) = need(std::string("J") + kAxes[a]);
    for (char M : {'C', 'Q'}) {
        Mat3& X = M == 'C' ? md.C : md.Q;
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) {
                const double v = need(std::string(1, M) + kAxes[a] + kAxes[b]);
                X(a, b) = X(b, a) = v;
                const std::string lower = std::string(1, M) + kAxes[b] + kAxes[a];
                auto it = vals.find(lower);
                if (a != b && it != vals.end() && std::abs(it->second.first - v) > 1e-12 * std::max(1.0, std::abs(v)))
                    throw ParseError(source, it->second.second, lower + " differs from its transpose");
            }
    }
    sync_local(md);
    for (int a = 0; a < 3; ++a) {
        auto it = vals.find(std::string("local") + kAxes[a]);
        if (it != vals.end()) md.local(a) = it->second.first;
    }
    try {
        validate(md);
    } catch (const std::invalid_argument& e) {
        throw ParseError(source, ln, e.what());
    }
    return md;
}

MomentData read_moments_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError(path, 0, "cannot open file");
    return read_moments(f, path);
}

void write_moments(std::ostream& out, const MomentData& md) {
    out << "N = " << format_double(md.n) << "\n";
    out << "j = " << format_double(md.j) << "\n";
    for (int a = 0; a < 3; ++a) out << "J" << kAxes[a] << " = " << format_double(md.mean(a)) << "\n";
    for (char M : {'C', 'Q'}) {
        const Mat3& X = M == 'C' ? md.C : md.Q;
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) out << M << kAxes[a] << kAxes[b] << " = " << format_double(X(a, b)) << "\n";
    }
    for (int a = 0; a < 3; ++a) out << "local" << kAxes[a] << " = " << format_double(md.local(a)) << "\n";
}

void write_fcurve(std::ostream& out, const FCurve& c) {
    out << "# J " << format_double(c.J) << "\n";
    out << "# samples " << c.sample_x.size() << "\n";
    out << "# envelope_gap " << format_double(c.envelope_gap) << "\n";
    for (std::size_t i = 0; i < c.x.size(); ++i) out << format_double(c.x[i]) << " " << format_double(c.f[i]) << "\n";
}

FCurve read_fcurve(std::istream& in, const std::string& source) {
    FCurve c;
    bool have_J = false;
    std::string raw;
    int ln = 0;
    while (std::getline(in, raw)) {
        ++ln;
        const std::string t = trim(raw);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const auto tk = tokens(t.substr(1));
            if (tk.size() == 2 && tk[0] == "J") {
                c.J = number_or_throw(tk[1], source, ln, "J");
                have_J = true;
            } else if (tk.size() == 2 && tk[0] == "envelope_gap") {
                c.envelope_gap = number_or_throw(tk[1], source, ln, "envelope_gap");
            }
            continue;
        }
        const auto tk = tokens(t);
        if (tk.size() != 2) throw ParseError(source, ln, "expected 'X F'");
        const double x = number_or_throw(tk[0], source, ln, "X");
        const double f = number_or_throw(tk[1], source, ln, "F");
        if (!c.x.empty() && x <= c.x.back()) throw ParseError(source, ln, "X must increase");
        c.x.push_back(x);
        c.f.push_back(f);
    }
    if (!have_J) throw ParseError(source, ln, "missing '# J' header");
    if (c.x.size() < 2) throw ParseError(source, ln, "curve needs at least two points");
    c.sample_x = c.x;
    c.sample_f = c.f;
    return c;
}

MeasurementSequence read_sequence(std::istream& in, const std::string& source) {
    MeasurementSequence seq;
    seq.name = source;
    std::string raw;
    int ln = 0;
    while (std::getline(in, raw)) {
        ++ln;
        const std::string line = strip_comment(raw);
        if (line.empty()) continue;
        const auto tk = tokens(line);
        Step s;
        if (tk[0] == "rot") {
            if (tk.size() != 2) throw ParseError(source, ln, "expected 'rot <theta>'");
            s.kind = Step::Kind::Rotate;
            s.theta = number_or_throw(tk[1], source, ln, "theta");
        } else if (tk[0] == "meas") {
            if (tk.size() < 2 || tk.size() > 3) throw ParseError(source, ln, "expected 'meas <idx> [record|skip]'");
            s.kind = Step::Kind::Measure;
            const double idx = number_or_throw(tk[1], source, ln, "index");
            if (idx != std::floor(idx) || idx < 1) throw ParseError(source, ln, "measurement index must be a positive integer");
            s.index = static_cast<int>(idx);
            s.label = s.index;
            if (tk.size() == 3) {
                if (tk[2] == "record") s.recorded = true;
                else if (tk[2] == "skip") s.recorded = false;
                else throw ParseError(source, ln, "unknown flag '" + tk[2] + "'");
            }
        } else {
            throw ParseError(source, ln, "unknown step '" + tk[0] + "'");
        }
        seq.steps.push_back(s);
    }
    try {
        seq.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(source, ln, e.what());
    }
    return seq;
}

void write_sequence(std::ostream& out, const MeasurementSequence& seq) {
    for (const Step& s : seq.steps) {
        if (s.kind == Step::Kind::Rotate) out << "rot " << format_double(s.theta) << "\n";
        else out << "meas " << s.index << (s.recorded ? " record" : " skip") << "\n";
    }
}

Config Config::parse(std::istream& in, const std::string& source) {
    Config c;
    std::string raw;
    int ln = 0;
    while (std::getline(in, raw)) {
        ++ln;
        const std::string line = strip_comment(raw);
        if (line.empty()) continue;
        const auto p = line.find('=');
        if (p == std::string::npos) throw ParseError(source, ln, "expected 'key=value'");
        const std::string k = trim(line.substr(0, p)), v = trim(line.substr(p + 1));
        if (k.empty()) throw ParseError(source, ln, "empty key");
        if (c.kv_.count(k)) throw ParseError(source, ln, "duplicate key '" + k + "'");
        c.kv_[k] = v;
    }
    return c;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError(path, 0, "cannot open file");
    return parse(f, path);
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    double v;
    if (!parse_number(it->second, v)) throw std::invalid_argument("config: '" + key + "' is not a number");
    return v;
}

long Config::get_int(const std::string& key, long fallback) const {
    const double v = get_double(key, static_cast<double>(fallback));
    if (v != std::floor(v)) throw std::invalid_argument("config: '" + key + "' is not an integer");
    return static_cast<long>(v);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: '" + key + "' is not a boolean");
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string& s = it->second;
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        double a, b, n;
        if (parts.size() != 3 || !parse_number(parts[0], a) || !parse_number(parts[1], b) || !parse_number(parts[2], n) ||
            n < 1 || n != std::floor(n))
            throw std::invalid_argument("config: '" + key + "' range must be 'start:stop:count'");
        const int cnt = static_cast<int>(n);
        for (int i = 0; i < cnt; ++i) out.push_back(cnt == 1 ? a : a + (b - a) * i / (cnt - 1));
        return out;
    }
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ',');) {
        double v;
        if (!parse_number(p, v)) throw std::invalid_argument("config: '" + key + "' has a non-numeric entry");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("config: '" + key + "' is empty");
    return out;
}

std::string Config::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mixin = [&](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ull;
        }
    };
    for (const auto& [k, v] : kv_) {
        mixin(k);
        mixin("=");
        mixin(v);
        mixin("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header, const std::string& config_hash)
    : out_(out), cols_(header.size()) {
    out_ << "# config_hash=" << config_hash << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != cols_) throw std::invalid_argument("csv: row width differs from header");
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << "\n";
}

}  // namespace sqz::io
