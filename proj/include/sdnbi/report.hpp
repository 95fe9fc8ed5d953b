#pragma once

// Serialization of run artifacts: the CSV tables and JSON reports a run
// writes to disk, and the parsers the comparison command needs to read them
// back. Everything here maps strings to values and back; file handling stays
// with the caller.

#include <sdnbi/core.hpp>
#include <sdnbi/engines.hpp>
#include <sdnbi/metrics.hpp>
#include <sdnbi/problems.hpp>
#include <sdnbi/reference.hpp>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdnbi {

inline constexpr const char* kToolkitVersion = "1.0.0";

namespace detail {

// %.17g round-trips every double exactly and never depends on locale or
// stream state, which keeps rerun artifacts byte identical
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string decision_header(const ProblemSpec& spec) {
    std::string h;
    for (int i = 0; i < spec.n1; ++i) h += ",x" + std::to_string(i + 1);
    for (int i = 0; i < spec.n2; ++i) h += ",y" + std::to_string(i + 1);
    return h;
}

inline std::string decision_fields(const DecisionVector& d) {
    std::string row;
    for (const double v : d.continuous) row += "," + fmt(v);
    for (const int v : d.integer) row += "," + std::to_string(v);
    return row;
}

} // namespace detail

// One parsed row of a front table.
struct FrontRow {
    int iter_found = 0;
    Vec2 raw{};
    Vec2 z{};
    DecisionVector decision;
};

inline std::string front_csv(const ProblemSpec& spec, const EngineResult& r) {
    std::string out = "iter_found,z1_raw,z2_raw,z1_norm,z2_norm";
    out += detail::decision_header(spec);
    out += '\n';
    for (const ObjectivePoint& p : r.archive.points()) {
        out += std::to_string(p.iter_found);
        out += ',' + detail::fmt(p.raw[0]) + ',' + detail::fmt(p.raw[1]);
        out += ',' + detail::fmt(p.z[0]) + ',' + detail::fmt(p.z[1]);
        out += detail::decision_fields(p.decision);
        out += '\n';
    }
    return out;
}

inline std::string reference_csv(const ProblemSpec& spec, const ReferenceFront& f) {
    std::string out = "z1_raw,z2_raw,z1_norm,z2_norm";
    out += detail::decision_header(spec);
    out += '\n';
    for (const ObjectivePoint& p : f.archive.points()) {
        out += detail::fmt(p.raw[0]) + ',' + detail::fmt(p.raw[1]);
        out += ',' + detail::fmt(p.z[0]) + ',' + detail::fmt(p.z[1]);
        out += detail::decision_fields(p.decision);
        out += '\n';
    }
    return out;
}

inline std::string iterations_csv(const EngineResult& r) {
    std::string out = "iter,event,d_max,elapsed,archive_size,new_z1_raw,new_z2_raw\n";
    for (const IterationRecord& rec : r.iterations) {
        out += std::to_string(rec.iter);
        out += ',' + detail::csv_field(rec.event);
        out += ',' + detail::fmt(rec.d_max) + ',' + detail::fmt(rec.elapsed);
        out += ',' + std::to_string(rec.archive_size);
        if (rec.new_point) {
            out += ',' + detail::fmt(rec.new_point->raw[0]);
            out += ',' + detail::fmt(rec.new_point->raw[1]);
        } else {
            out += ",,";
        }
        out += '\n';
    }
    return out;
}

inline std::string metrics_json(const std::string& problem, const std::string& algorithm,
                                const EngineResult& r, const MetricReport& m) {
    nlohmann::ordered_json j;
    j["problem"] = problem;
    j["algorithm"] = algorithm;
    j["termination"] = r.termination;
    j["n_iters"] = r.iterations.size();
    j["n_unq"] = m.n_unq;
    j["hv"] = m.hv;
    j["dm"] = m.dm;
    j["t_total"] = m.t_total;
    j["t_avg"] = m.t_avg;
    j["bounds"]["ideal"] = {r.bounds.ideal[0], r.bounds.ideal[1]};
    j["bounds"]["nadir"] = {r.bounds.nadir[0], r.bounds.nadir[1]};
    j["fathomed"] = nlohmann::ordered_json::array();
    for (const FathomedInterval& f : r.fathomed) {
        j["fathomed"].push_back({{"lo", f.lo}, {"hi", f.hi}, {"iter", f.iter}});
    }
    return j.dump(2) + "\n";
}

inline std::string reference_metrics_json(const std::string& problem, const ReferenceFront& f,
                                          const MetricReport& m) {
    nlohmann::ordered_json j;
    j["problem"] = problem;
    j["n_unq"] = m.n_unq;
    j["hv"] = m.hv;
    j["dm"] = m.dm;
    j["n_requested"] = f.n_requested;
    j["n_failed"] = f.n_failed;
    j["bounds"]["ideal"] = {f.bounds.ideal[0], f.bounds.ideal[1]};
    j["bounds"]["nadir"] = {f.bounds.nadir[0], f.bounds.nadir[1]};
    return j.dump(2) + "\n";
}

inline std::string manifest_json(const std::string& problem, const EngineConfig& config,
                                 const std::vector<std::string>& outputs,
                                 const std::string& started, const std::string& finished) {
    nlohmann::ordered_json j;
    j["problem"] = problem;
    j["algorithm"] = algorithm_name(config.algorithm);
    j["config"]["epsilon"] = config.epsilon;
    j["config"]["max_iters"] = config.max_iters;
    j["config"]["n_beta"] = config.n_beta;
    j["config"]["n_starts"] = config.solver.n_starts;
    j["config"]["seed"] = config.seed;
    j["outputs"] = outputs;
    j["started"] = started;
    j["finished"] = finished;
    j["version"] = kToolkitVersion;
    j["seed"] = config.seed;
    return j.dump(2) + "\n";
}

// Minimal reader for the comma separated format the writers above produce:
// quoted fields, doubled quote escapes, and both newline conventions.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                field.clear();
                rows.push_back(std::move(row));
                row.clear();
                any = false;
            }
        } else {
            field += c;
            any = true;
        }
    }
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    if (quoted) throw std::runtime_error("unterminated quoted field");
    return rows;
}

namespace detail {

inline double to_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw std::runtime_error("bad number: " + s);
    return v;
}

} // namespace detail

// Reads both front table layouts: run fronts carry iter_found, reference
// fronts do not. Decision columns are recognized by their x/y headers.
inline std::vector<FrontRow> parse_front_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw std::runtime_error("empty front table");
    const std::vector<std::string>& header = rows.front();
    std::size_t it = header.size(), z1r = header.size(), z2r = header.size();
    std::size_t z1n = header.size(), z2n = header.size();
    std::vector<std::size_t> xcols, ycols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string& h = header[c];
        if (h == "iter_found") it = c;
        else if (h == "z1_raw") z1r = c;
        else if (h == "z2_raw") z2r = c;
        else if (h == "z1_norm") z1n = c;
        else if (h == "z2_norm") z2n = c;
        else if (!h.empty() && h[0] == 'x') xcols.push_back(c);
        else if (!h.empty() && h[0] == 'y') ycols.push_back(c);
        else throw std::runtime_error("unknown front column: " + h);
    }
    if (z1r == header.size() || z2r == header.size() || z1n == header.size() ||
        z2n == header.size()) {
        throw std::runtime_error("front table missing objective columns");
    }
    std::vector<FrontRow> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const std::vector<std::string>& r = rows[i];
        if (r.size() != header.size()) throw std::runtime_error("ragged front row");
        FrontRow fr;
        if (it != header.size()) fr.iter_found = std::stoi(r[it]);
        fr.raw = {detail::to_double(r[z1r]), detail::to_double(r[z2r])};
        fr.z = {detail::to_double(r[z1n]), detail::to_double(r[z2n])};
        for (const std::size_t c : xcols) fr.decision.continuous.push_back(detail::to_double(r[c]));
        for (const std::size_t c : ycols) fr.decision.integer.push_back(std::stoi(r[c]));
        out.push_back(std::move(fr));
    }
    return out;
}

} // namespace sdnbi
