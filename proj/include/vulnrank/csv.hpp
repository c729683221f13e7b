#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace vulnrank::csv {

// RFC 4180 record reader: quoted fields may contain commas, doubled quotes
// and line breaks. CRLF and LF line endings are both accepted.
class Reader {
public:
    explicit Reader(std::istream& in) : in_{in} {}

    // Reads the next record. `line` receives the 1-based physical line on
    // which the record starts. Returns false at end of input.
    bool next(std::vector<std::string>& fields, std::size_t& line);

    // Set when the last record ended inside an unterminated quote.
    bool last_record_malformed() const { return malformed_; }

private:
    std::istream& in_;
    std::size_t line_{0};
    bool malformed_{false};
};

std::string escape(std::string_view field);

// Joins fields with commas, escaping as needed.
std::string join(const std::vector<std::string>& fields);

// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

}  // namespace vulnrank::csv
