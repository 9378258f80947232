#pragma once

// CSV emission and parsing: RFC-4180 quoting, '.' decimal separator,
// 17-significant-digit reals (lossless double round trip), a provenance
// comment header, and incremental row writing.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbs {

struct ResultRow {
    std::vector<std::string> names;
    std::vector<double> values;

    void add(const std::string& name, double v)
    {
        names.push_back(name);
        values.push_back(v);
    }
};

inline std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string csv_quote(const std::string& field)
{
    if (field.find_first_of(",\"\n") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::uint64_t fnv1a(const std::string& text)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Incremental writer: provenance comment + header on construction, one
// flushed line per row.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& config_hash_hex,
              std::uint64_t seed)
        : out_(path, std::ios::trunc)
    {
        if (!out_)
            throw std::runtime_error("cannot open " + path);
        out_ << "# cbs config_hash=" << config_hash_hex << " seed=" << seed << "\n";
        out_.flush();
    }

    void write(const ResultRow& row)
    {
        if (!wrote_header_) {
            for (std::size_t i = 0; i < row.names.size(); ++i)
                out_ << (i ? "," : "") << csv_quote(row.names[i]);
            out_ << "\n";
            wrote_header_ = true;
        }
        for (std::size_t i = 0; i < row.values.size(); ++i)
            out_ << (i ? "," : "") << format_real(row.values[i]);
        out_ << "\n";
        out_.flush();
        if (!out_)
            throw std::runtime_error("write failure");
    }

private:
    std::ofstream out_;
    bool wrote_header_ = false;
};

inline std::string emit_csv(const std::vector<ResultRow>& rows,
                            const std::string& config_hash_hex, std::uint64_t seed)
{
    std::string text = "# cbs config_hash=" + config_hash_hex +
                       " seed=" + std::to_string(seed) + "\n";
    if (rows.empty())
        throw std::invalid_argument("emit_csv: no rows");
    for (std::size_t i = 0; i < rows[0].names.size(); ++i)
        text += (i ? "," : "") + csv_quote(rows[0].names[i]);
    text += "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.values.size(); ++i)
            text += (i ? "," : "") + format_real(row.values[i]);
        text += "\n";
    }
    return text;
}

// Parses numeric CSV written by the emitter (comments skipped); fields are
// unquoted as needed.
inline std::vector<ResultRow> parse_csv(const std::string& text)
{
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else
            cur += c;
    }
    if (!cur.empty())
        lines.push_back(cur);

    const auto split = [](const std::string& line) {
        std::vector<std::string> fields;
        std::string f;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    f += '"';
                    ++i;
                } else if (c == '"')
                    quoted = false;
                else
                    f += c;
            } else if (c == '"')
                quoted = true;
            else if (c == ',') {
                fields.push_back(f);
                f.clear();
            } else
                f += c;
        }
        fields.push_back(f);
        return fields;
    };

    std::vector<ResultRow> rows;
    std::vector<std::string> header;
    for (const auto& line : lines) {
        if (line.empty() || line[0] == '#')
            continue;
        if (header.empty()) {
            header = split(line);
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != header.size())
            throw std::runtime_error("csv row width mismatch");
        ResultRow row;
        for (std::size_t i = 0; i < fields.size(); ++i)
            row.add(header[i], std::stod(fields[i]));
        rows.push_back(row);
    }
    return rows;
}

} // namespace cbs
