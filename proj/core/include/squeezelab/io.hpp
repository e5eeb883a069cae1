#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "squeezelab/extreme.hpp"
#include "squeezelab/lg.hpp"
#include "squeezelab/moments.hpp"

namespace sqz::io {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, int line, const std::string& msg);
    int line() const { return line_; }

private:
    int line_;
};

// Moment file: "key = value" per line, '#' starts a comment. Required keys
// N, j, Jx, Jy, Jz, Cxx Cxy Cxz Cyy Cyz Czz, Qxx Qxy Qxz Qyy Qyz Qzz. Optional
// lower-triangle entries (must match) and localx..z (default N diag Q).
MomentData read_moments(std::istream& in, const std::string& source = "<stream>");
MomentData read_moments_file(const std::string& path);
void write_moments(std::ostream& out, const MomentData& md);

// Curve table: header lines "# J <value>", "# samples <n>", "# envelope_gap <g>",
// then "X F" hull vertices.
void write_fcurve(std::ostream& out, const FCurve& c);
FCurve read_fcurve(std::istream& in, const std::string& source = "<stream>");

// "rot <theta>" or "meas <idx> [record|skip]"; measurements default to recorded.
// Slot labels are the measurement indices.
MeasurementSequence read_sequence(std::istream& in, const std::string& source = "<stream>");
void write_sequence(std::ostream& out, const MeasurementSequence& seq);

// Flat key=value configuration.
class Config {
public:
    static Config parse(std::istream& in, const std::string& source = "<stream>");
    static Config parse_file(const std::string& path);

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // Comma-separated list, or "a:b:n" for n evenly spaced points.
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }
    // FNV-1a over the sorted entries, hex encoded.
    std::string hash() const;

private:
    std::map<std::string, std::string> kv_;
};

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header, const std::string& config_hash);
    void row(const std::vector<double>& values);

private:
    std::ostream& out_;
    std::size_t cols_;
};

std::string format_double(double v);

}  // namespace sqz::io
