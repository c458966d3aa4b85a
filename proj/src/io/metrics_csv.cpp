// SPDX-License-Identifier: Apache-2.0
#include "io/metrics_csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "util/error.hpp"

namespace hbrom::io {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& field, std::size_t line_no) {
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(v))
        fail(ErrorKind::format, "metrics csv line " + std::to_string(line_no) +
                                    ": field '" + field + "' is not a finite number");
    return v;
}

// RFC-4180 field split for one record line
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted)
        fail(ErrorKind::format,
             "metrics csv line " + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

} // namespace

std::string metrics_to_csv(const std::vector<EpochRecord>& records) {
    std::string out = kMetricsHeader;
    out += '\n';
    for (const auto& r : records) {
        out += std::to_string(r.epoch);
        for (double v : {r.train_mse, r.val_mse, r.fwd_nfe, r.bwd_nfe, r.stiffness,
                         r.adj_norm_t0, r.adj_norm_tT}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

std::vector<EpochRecord> metrics_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<EpochRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line, line_no);
        if (fields.size() != 8)
            fail(ErrorKind::format, "metrics csv line " + std::to_string(line_no) + ": expected 8 columns, got " +
                                        std::to_string(fields.size()));
        if (line_no == 1) {
            if (line != kMetricsHeader)
                fail(ErrorKind::format, "metrics csv: unexpected header '" + line + "'");
            continue;
        }
        EpochRecord r;
        r.epoch = static_cast<long>(parse_double(fields[0], line_no));
        r.train_mse = parse_double(fields[1], line_no);
        r.val_mse = parse_double(fields[2], line_no);
        r.fwd_nfe = parse_double(fields[3], line_no);
        r.bwd_nfe = parse_double(fields[4], line_no);
        r.stiffness = parse_double(fields[5], line_no);
        r.adj_norm_t0 = parse_double(fields[6], line_no);
        r.adj_norm_tT = parse_double(fields[7], line_no);
        records.push_back(r);
    }
    return records;
}

void write_metrics_csv(const std::vector<EpochRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
    const std::string text = metrics_to_csv(records);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) fail(ErrorKind::io, "short write to '" + path + "'");
}

std::vector<EpochRecord> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return metrics_from_csv(text);
}

} // namespace hbrom::io
