#pragma once

#include <string>
#include <vector>

namespace jumpflow {

/// 17 significant digits, '.' decimal separator, locale-independent.
std::string format_double(double x);

/// RFC-4180-style writer: comma-separated, LF line endings, header first.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(const std::vector<std::string>& cells);
    void add_row_numeric(const std::vector<double>& cells);

    const std::string& text() const { return text_; }
    void write_file(const std::string& path) const;

private:
    std::string text_;
    std::size_t columns_;
};

void write_text_file(const std::string& path, const std::string& text);

} // namespace jumpflow
