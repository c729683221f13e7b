#include "vulnrank/csv.hpp"

#include <charconv>
#include <system_error>

namespace vulnrank::csv {

bool Reader::next(std::vector<std::string>& fields, std::size_t& line)
{
    fields.clear();
    malformed_ = false;
    std::string raw;
    if (!std::getline(in_, raw)) {
        return false;
    }
    ++line_;
    line = line_;

    std::string field;
    bool quoted = false;
    bool any = false;
    for (;;) {
        if (!raw.empty() && raw.back() == '\r') {
            raw.pop_back();
        }
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const char c = raw[i];
            any = true;
            if (quoted) {
                if (c == '"') {
                    if (i + 1 < raw.size() && raw[i + 1] == '"') {
                        field += '"';
                        ++i;
                    } else {
                        quoted = false;
                    }
                } else {
                    field += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else {
                field += c;
            }
        }
        if (!quoted) {
            break;
        }
        // Quoted field continues on the next physical line.
        if (!std::getline(in_, raw)) {
            malformed_ = true;
            break;
        }
        ++line_;
        field += '\n';
    }
    if (any || !fields.empty()) {
        fields.push_back(std::move(field));
    }
    return true;
}

std::string escape(std::string_view field)
{
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string join(const std::vector<std::string>& fields)
{
    // A lone empty field would otherwise read back as a blank line.
    if (fields.size() == 1 && fields[0].empty()) {
        return "\"\"";
    }
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += escape(fields[i]);
    }
    return out;
}

std::string format_number(double value)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) {
        return "nan";
    }
    return std::string(buf, ptr);
}

}  // namespace vulnrank::csv
