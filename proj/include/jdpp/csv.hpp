#pragma once

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace jdpp::csv {

// RFC-4180 field quoting.
inline std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline std::string number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline void write_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << escape(fields[i]);
    }
    os << "\r\n";
}

// Inverse of write_row for a single record (quoted fields may contain newlines).
std::vector<std::string> parse_row(const std::string& line);

}  // namespace jdpp::csv
