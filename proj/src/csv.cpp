#include "dynmkw/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace dynmkw {

namespace {

struct Record {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

std::vector<Record> split_records(const std::string& text, char delimiter, std::string_view source) {
    std::vector<Record> records;
    Record current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    current.line = 1;

    auto end_record = [&] {
        if (field_started || !current.fields.empty()) {
            current.fields.push_back(std::move(field));
            records.push_back(std::move(current));
        }
        current = Record{};
        field.clear();
        field_started = false;
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
        if (c == '"') {
            in_quotes = true;
            field_started = true;
        } else if (c == delimiter) {
            current.fields.push_back(std::move(field));
            field.clear();
            field_started = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_record();
            ++line;
            current.line = line;
        } else {
            if (!field_started) current.line = line;
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) {
        throw std::runtime_error(std::string(source) + ":" + std::to_string(line) +
                                 ": unterminated quoted field");
    }
    end_record();
    return records;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

}  // namespace

CsvData parse_csv(std::istream& in, bool has_header, char delimiter, std::string_view source) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::vector<Record> records = split_records(text, delimiter, source);
    auto fail = [&](std::size_t line, const std::string& why) -> std::runtime_error {
        return std::runtime_error(std::string(source) + ":" + std::to_string(line) + ": " + why);
    };

    std::vector<std::string> labels;
    std::size_t first = 0;
    if (has_header) {
        if (records.empty()) throw fail(1, "missing header row");
        for (auto& f : records.front().fields) labels.emplace_back(trim(f));
        first = 1;
    }
    if (records.size() - first < 2) throw fail(records.empty() ? 1 : records.back().line, "need at least 2 data rows");

    const std::size_t width = records[first].fields.size();
    if (has_header && labels.size() != width) {
        throw fail(records[first].line, "row has " + std::to_string(width) +
                                            " fields but the header has " + std::to_string(labels.size()));
    }
    Matrix values(static_cast<Index>(records.size() - first), static_cast<Index>(width));
    for (std::size_t r = first; r < records.size(); ++r) {
        const Record& rec = records[r];
        if (rec.fields.size() != width) {
            throw fail(rec.line, "ragged row: expected " + std::to_string(width) + " fields, got " +
                                     std::to_string(rec.fields.size()));
        }
        for (std::size_t c = 0; c < width; ++c) {
            const std::string_view cell = trim(rec.fields[c]);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw fail(rec.line, "column " + std::to_string(c + 1) + ": non-numeric value '" +
                                         std::string(cell) + "'");
            }
            if (!std::isfinite(v)) {
                throw fail(rec.line, "column " + std::to_string(c + 1) + ": non-finite value");
            }
            values(static_cast<Index>(r - first), static_cast<Index>(c)) = v;
        }
    }
    return CsvData{ObservationMatrix(std::move(values)), std::move(labels)};
}

CsvData read_csv(const std::filesystem::path& path, bool has_header, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return parse_csv(in, has_header, delimiter, path.string());
}

}  // namespace dynmkw
