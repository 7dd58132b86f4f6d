#pragma once

#include "tarlev/error.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace tarlev::io {

using CsvRow = std::vector<std::string>;

/// RFC 4180 reader: quoted fields with doubled quotes, CRLF or LF line ends, optional UTF-8
/// BOM. Blank lines are skipped. Throws MalformedCsv on an unterminated quote.
inline std::vector<CsvRow> parse_csv(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t line = 1;
    auto end_row = [&] {
        if (field_started || !row.empty()) {
            row.push_back(field);
            rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        field_started = false;
    };
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
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty())
                    throw Error(ErrorCode::MalformedCsv, "stray quote on line " + std::to_string(line));
                quoted = true;
                field_started = true;
                break;
            case ',':
                row.push_back(field);
                field.clear();
                field_started = true;
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') break;
                end_row();
                ++line;
                break;
            case '\n':
                end_row();
                ++line;
                break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (quoted) throw Error(ErrorCode::MalformedCsv, "unterminated quoted field");
    end_row();
    return rows;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

}  // namespace tarlev::io
