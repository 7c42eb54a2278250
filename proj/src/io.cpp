#include "cyclemix/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cyclemix/error.hpp"

namespace cyclemix::io {

std::string format_double(double x) {
    char buf[64];
    snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::IoError, "cannot open '" + path + "': " + std::strerror(errno));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::IoError, "cannot write '" + path + "': " + std::strerror(errno));
    out << content;
    if (!out) raise(ErrorKind::IoError, "write to '" + path + "' failed");
}

std::string graph_to_text(const LongRangeGraph& g) {
    std::string out;
    out += std::to_string(g.n());
    out += ' ';
    out += format_double(g.alpha());
    out += ' ';
    out += model_name(g.model());
    out += ' ';
    out += std::to_string(g.seed());
    out += '\n';
    for (const Edge& e : g.edges()) {
        out += std::to_string(e.u);
        out += ' ';
        out += std::to_string(e.v);
        out += '\n';
    }
    return out;
}

LongRangeGraph graph_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) raise(ErrorKind::IoError, "empty graph file");
    std::istringstream header(line);
    uint64_t n = 0, seed = 0;
    double alpha = 0.0;
    std::string model;
    if (!(header >> n >> alpha >> model >> seed))
        raise(ErrorKind::IoError, "bad graph header (expected: n alpha model seed)");
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        uint64_t u = 0, v = 0;
        if (!(row >> u >> v)) raise(ErrorKind::IoError, "bad edge line: '" + line + "'");
        edges.push_back(Edge{static_cast<uint32_t>(u), static_cast<uint32_t>(v)});
    }
    for (Edge& e : edges)
        if (e.u > e.v) std::swap(e.u, e.v);
    return LongRangeGraph(static_cast<uint32_t>(n), alpha, model_from_name(model), seed,
                          std::move(edges));
}

void save_graph(const std::string& path, const LongRangeGraph& g) {
    write_file(path, graph_to_text(g));
}

LongRangeGraph load_graph(const std::string& path) { return graph_from_text(read_file(path)); }

std::string matrix_to_text(const TransitionMatrix& P) {
    std::string out;
    out += std::to_string(P.n());
    out += '\n';
    for (uint32_t i = 0; i < P.n(); ++i) {
        auto targets = P.row_targets(i);
        auto probs = P.row_probs(i);
        size_t k = 0;
        bool diag_done = false;
        auto emit = [&out, i](uint32_t j, double p) {
            out += std::to_string(i);
            out += ' ';
            out += std::to_string(j);
            out += ' ';
            out += format_double(p);
            out += '\n';
        };
        for (k = 0; k < targets.size(); ++k) {
            if (!diag_done && targets[k] > i && P.hold(i) > 0.0) {
                emit(i, P.hold(i));
                diag_done = true;
            }
            emit(targets[k], probs[k]);
        }
        if (!diag_done && P.hold(i) > 0.0) emit(i, P.hold(i));
    }
    return out;
}

TransitionMatrix matrix_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) raise(ErrorKind::IoError, "empty matrix file");
    uint32_t n = 0;
    try {
        n = static_cast<uint32_t>(std::stoul(line));
    } catch (...) {
        raise(ErrorKind::IoError, "bad matrix header (expected dimension)");
    }
    std::vector<std::vector<std::pair<uint32_t, double>>> rows(n);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        uint64_t i = 0, j = 0;
        double p = 0.0;
        if (!(row >> i >> j >> p)) raise(ErrorKind::IoError, "bad matrix line: '" + line + "'");
        if (i >= n || j >= n) raise(ErrorKind::IoError, "matrix entry out of range");
        if (i != j) rows[i].emplace_back(static_cast<uint32_t>(j), p);
        // diagonal entries are recomputed as the hold probability
    }
    return TransitionMatrix::from_rows(n, rows);
}

void save_matrix(const std::string& path, const TransitionMatrix& P) {
    write_file(path, matrix_to_text(P));
}

namespace {

std::string record_row(const SweepRecord& r) {
    std::string out;
    out += model_name(r.model);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += format_double(r.alpha);
    out += ',';
    out += format_double(r.r);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.t_mix);
    out += ',';
    out += phi_kind_name(r.phi_kind);
    out += ',';
    out += format_double(r.phi_value);
    out += ',';
    out += std::to_string(r.max_degree);
    out += ',';
    out += format_double(r.wall_time_ms);
    out += '\n';
    return out;
}

}  // namespace

std::string records_csv(const std::vector<SweepRecord>& records) {
    std::string out = "model,n,alpha,r,seed,t_mix,phi_kind,phi_value,max_degree,wall_time_ms\n";
    for (const auto& r : records) out += record_row(r);
    return out;
}

void write_records_csv(const std::string& path, const std::vector<SweepRecord>& records) {
    write_file(path, records_csv(records));
}

std::string summary_csv(const Summary& summary) {
    std::string out = "n,r,count,t_mix_median,t_mix_mean,phi_median,phi_mean\n";
    for (const auto& row : summary.rows) {
        out += std::to_string(row.n);
        out += ',';
        out += format_double(row.r);
        out += ',';
        out += std::to_string(row.count);
        out += ',';
        out += format_double(row.t_mix_median);
        out += ',';
        out += format_double(row.t_mix_mean);
        out += ',';
        out += format_double(row.phi_median);
        out += ',';
        out += format_double(row.phi_mean);
        out += '\n';
    }
    for (const auto& [r, fit] : summary.t_mix_fits) {
        out += "# fit t_mix r=" + format_double(r) + ": slope=" + format_double(fit.slope) +
               " intercept=" + format_double(fit.intercept) + " rms=" + format_double(fit.rms) +
               "\n";
    }
    for (const auto& [r, fit] : summary.phi_fits) {
        out += "# fit phi r=" + format_double(r) + ": slope=" + format_double(fit.slope) +
               " intercept=" + format_double(fit.intercept) + " rms=" + format_double(fit.rms) +
               "\n";
    }
    return out;
}

void write_summary_csv(const std::string& path, const Summary& summary) {
    write_file(path, summary_csv(summary));
}

std::vector<std::string> write_plot_data(const std::string& dir, const Summary& summary) {
    std::vector<double> rs;
    for (const auto& row : summary.rows) rs.push_back(row.r);
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());

    std::vector<std::string> paths;
    for (double r : rs) {
        char rbuf[32];
        snprintf(rbuf, sizeof rbuf, "%g", r);
        std::string path = dir + "/plot_r" + rbuf + ".dat";
        std::string out = "# n t_mix_median (r=" + std::string(rbuf) + ")\n";
        for (const auto& row : summary.rows)
            if (row.r == r && row.t_mix_median > 0.0)
                out += std::to_string(row.n) + " " + format_double(row.t_mix_median) + "\n";
        write_file(path, out);
        paths.push_back(path);
    }
    return paths;
}

void write_profile_csv(const std::string& path, uint32_t start,
                       const std::vector<double>& profile) {
    std::string out = "start,k,d\n";
    for (size_t k = 0; k < profile.size(); ++k)
        out += std::to_string(start) + "," + std::to_string(k) + "," + format_double(profile[k]) +
               "\n";
    if (path.size() > 3 && path.substr(path.size() - 3) == ".gz") {
        gzFile f = gzopen(path.c_str(), "wb");
        if (!f) raise(ErrorKind::IoError, "cannot open '" + path + "' for gzip write");
        int written = gzwrite(f, out.data(), static_cast<unsigned>(out.size()));
        gzclose(f);
        if (written <= 0 || static_cast<size_t>(written) != out.size())
            raise(ErrorKind::IoError, "gzip write to '" + path + "' failed");
        return;
    }
    write_file(path, out);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string trimmed(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        raise(ErrorKind::ConfigError, "bad numeric value for " + key + ": '" + v + "'");
    }
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        uint64_t x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        raise(ErrorKind::ConfigError, "bad integer value for " + key + ": '" + v + "'");
    }
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& text, SweepConfig base,
                               std::vector<std::string>* seen_keys) {
    SweepConfig c = base;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string s = trimmed(line);
        if (s.empty() || s[0] == '#') continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            raise(ErrorKind::ConfigError, "expected key=value, got '" + s + "'");
        std::string key = trimmed(s.substr(0, eq));
        std::string value = trimmed(s.substr(eq + 1));
        if (seen_keys) seen_keys->push_back(key);
        if (key == "model") {
            c.model = model_from_name(value);
        } else if (key == "alpha") {
            c.alpha = parse_double(key, value);
        } else if (key == "sizes") {
            c.sizes.clear();
            for (const std::string& part : split(value, ','))
                c.sizes.push_back(static_cast<uint32_t>(parse_u64(key, trimmed(part))));
        } else if (key == "trials") {
            c.trials_per_size = static_cast<uint32_t>(parse_u64(key, value));
        } else if (key == "q_c") {
            c.params.q_c = parse_double(key, value);
        } else if (key == "q_l") {
            c.params.q_l = parse_double(key, value);
        } else if (key == "d") {
            uint64_t d = parse_u64(key, value);
            if (d == 0) {
                c.auto_d = true;
            } else {
                c.auto_d = false;
                c.params.d = static_cast<uint32_t>(d);
            }
        } else if (key == "r_values") {
            c.r_values.clear();
            for (const std::string& part : split(value, ','))
                c.r_values.push_back(parse_double(key, trimmed(part)));
        } else if (key == "epsilon") {
            c.epsilon = parse_double(key, value);
        } else if (key == "seed") {
            c.base_seed = parse_u64(key, value);
        } else if (key == "trim") {
            c.trim_fraction = parse_double(key, value);
        } else if (key == "workers") {
            c.workers = static_cast<uint32_t>(parse_u64(key, value));
        } else if (key == "measure") {
            if (value == "full") c.measure_mixing = true;
            else if (value == "phi-only") c.measure_mixing = false;
            else raise(ErrorKind::ConfigError, "measure must be 'full' or 'phi-only'");
        } else if (key == "ceiling") {
            c.mixing.ceiling = parse_u64(key, value);
        } else if (key == "tile_width") {
            c.mixing.tile_width = static_cast<uint32_t>(parse_u64(key, value));
        } else if (key == "check_interval") {
            c.mixing.check_interval = static_cast<uint32_t>(parse_u64(key, value));
        } else if (key == "kernel") {
            c.mixing.backend = value;
        } else if (key == "timings") {
            c.emit_timings = parse_u64(key, value) != 0;
        } else {
            raise(ErrorKind::ConfigError, "unknown config key '" + key + "'");
        }
    }
    return c;
}

SweepConfig load_sweep_config(const std::string& path, SweepConfig base,
                              std::vector<std::string>* seen_keys) {
    return parse_sweep_config(read_file(path), std::move(base), seen_keys);
}

}  // namespace cyclemix::io
