#pragma once

#include <string>
#include <vector>

#include "cyclemix/chain.hpp"
#include "cyclemix/graph.hpp"
#include "cyclemix/lab.hpp"

namespace cyclemix::io {

// Text graph format: header "n alpha model seed", then one "u v" chord per
// line in lexicographic order. Round-trips bit-exactly (alpha via %.17g).
std::string graph_to_text(const LongRangeGraph& g);
LongRangeGraph graph_from_text(const std::string& text);
void save_graph(const std::string& path, const LongRangeGraph& g);
LongRangeGraph load_graph(const std::string& path);

// Debug matrix dump: "i j p" per nonzero including the diagonal, row-major,
// 17 significant digits.
std::string matrix_to_text(const TransitionMatrix& P);
TransitionMatrix matrix_from_text(const std::string& text);
void save_matrix(const std::string& path, const TransitionMatrix& P);

std::string records_csv(const std::vector<SweepRecord>& records);
void write_records_csv(const std::string& path, const std::vector<SweepRecord>& records);

std::string summary_csv(const Summary& summary);
void write_summary_csv(const std::string& path, const Summary& summary);

// Two-column "n value" files per r-variant (trimmed median mixing times),
// named plot_r<r>.dat under dir.
std::vector<std::string> write_plot_data(const std::string& dir, const Summary& summary);

// Profile dump "start,k,d"; writes gzip when the path ends in .gz.
void write_profile_csv(const std::string& path, uint32_t start, const std::vector<double>& profile);

// Flat key=value config file; '#' starts a comment. Unknown keys are errors.
// seen_keys, when given, collects the keys present in the text.
SweepConfig parse_sweep_config(const std::string& text, SweepConfig base = {},
                               std::vector<std::string>* seen_keys = nullptr);
SweepConfig load_sweep_config(const std::string& path, SweepConfig base = {},
                              std::vector<std::string>* seen_keys = nullptr);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::string format_double(double x);  // %.17g

}  // namespace cyclemix::io
