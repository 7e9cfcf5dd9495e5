#include "nflab/report.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "nflab/errors.hpp"
#include "nflab/version.hpp"

namespace nflab {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001B3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm parts{};
    gmtime_r(&now, &parts);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &parts);
    return buf;
}

namespace {

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string quoted = "\"";
    for (char ch : cell) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    quoted += '"';
    return quoted;
}

} // namespace

std::string render_csv(const ReportMeta& meta, const ReportTable& table) {
    std::string out;
    out += "# nflab ";
    out += kVersion;
    out += "\n# command: " + meta.command;
    out += "\n# config_hash: " + meta.config_hash;
    out += "\n# seed: " + meta.seed;
    out += "\n# created: " + meta.created + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(table.columns[i]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_escape(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const ReportMeta& meta, const ReportTable& table) {
    nlohmann::ordered_json doc;
    doc["meta"] = {{"tool", std::string("nflab ") + kVersion},
                   {"command", meta.command},
                   {"config_hash", meta.config_hash},
                   {"seed", meta.seed},
                   {"created", meta.created}};
    doc["columns"] = table.columns;
    doc["rows"] = table.rows;
    return doc.dump(2) + "\n";
}

void write_report(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        if (!std::cout) throw IoError("report: failed writing to standard output");
        return;
    }
    std::ofstream stream(path, std::ios::binary);
    if (!stream) throw IoError("report: cannot open '" + path + "' for writing");
    stream << content;
    stream.flush();
    if (!stream) throw IoError("report: failed writing '" + path + "'");
}

} // namespace nflab
