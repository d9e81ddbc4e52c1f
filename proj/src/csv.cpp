#include "csv.hpp"

#include "cantons/error.hpp"

namespace cantons::detail {

std::string trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<CsvRecord> read_csv(std::string_view text, char delimiter) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    std::vector<CsvRecord> records;
    CsvRecord current;
    std::string field;
    bool in_quotes = false;
    bool field_quoted = false;
    bool record_has_content = false;
    std::size_t line = 1;
    std::size_t quote_line = 0;
    current.line = 1;

    const auto end_field = [&] {
        current.fields.push_back(field_quoted ? field : trim(field));
        field.clear();
        field_quoted = false;
    };
    const auto end_record = [&] {
        if (record_has_content) {
            end_field();
            records.push_back(std::move(current));
        }
        current = CsvRecord{};
        field.clear();
        field_quoted = false;
        record_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && trim(field).empty()) {
            field.clear();
            in_quotes = true;
            field_quoted = true;
            record_has_content = true;
            quote_line = line;
        } else if (c == delimiter) {
            end_field();
            record_has_content = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_record();
            ++line;
            current.line = line;
        } else {
            if (c != ' ' && c != '\t') record_has_content = true;
            field.push_back(c);
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", quote_line);
    end_record();
    return records;
}

std::string csv_escape(std::string_view field, char delimiter) {
    if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace cantons::detail
