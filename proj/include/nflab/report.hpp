#pragma once

// Deterministic report emission.  Every number is rendered at 12 significant
// digits, run metadata (including the only timestamp) lives in comment
// headers or the meta object, and the row bodies are byte-identical across
// reruns of the same configuration.

#include <cstdint>
#include <string>
#include <vector>

namespace nflab {

// Fixed %.12g rendering used for every floating-point cell.
std::string format_number(double v);

// 64-bit FNV-1a of the text, as 16 lowercase hex characters.
std::string fnv1a_hex(const std::string& text);

// Current time as an RFC 3339 UTC stamp (second resolution).
std::string utc_timestamp();

struct ReportMeta {
    std::string command;     // producing subcommand
    std::string config_hash; // canonical configuration hash
    std::string seed;        // recorded verbatim as given
    std::string created;     // timestamp; never enters the body
};

// Rows hold pre-rendered cells so CSV and JSON emit identical content.
struct ReportTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

// '#'-prefixed header lines (tool version, command, config hash, seed,
// timestamp), then the column line and one line per row; the final line is
// newline-terminated.  Cells containing separators are double-quoted.
std::string render_csv(const ReportMeta& meta, const ReportTable& table);

// {"meta": {...}, "columns": [...], "rows": [[...]]} with 2-space indent and
// a trailing newline; every cell is a string rendered exactly as in CSV.
std::string render_json(const ReportMeta& meta, const ReportTable& table);

// Write content to the path, or to standard output when path is "-".
// Throws IoError naming the path on failure.
void write_report(const std::string& path, const std::string& content);

} // namespace nflab
