#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tscore::tsv
{

// Shortest round-trip form capped at 17 significant digits; "nan", "inf",
// "-inf" for non-finite values.
auto format_double(double value) -> std::string;

// Full-field parse; accepts "nan"/"NaN"/"NA" as quiet NaN when allow_nan.
auto parse_double(std::string_view field, bool allow_nan = false) -> std::optional<double>;

auto split_fields(std::string_view line) -> std::vector<std::string_view>;

// Line reader that skips blank lines and '#' comments and remembers the
// 1-based number of the current line for diagnostics.
class Reader
{
public:
    Reader(std::istream& in, std::string source);

    // Next data line split on tabs, or nullopt at end of input.
    auto next() -> std::optional<std::vector<std::string>>;

    [[nodiscard]] auto line_number() const noexcept -> std::size_t { return line_no_; }
    [[nodiscard]] auto source() const noexcept -> const std::string& { return source_; }

    // "source:line: message"
    [[nodiscard]] auto where(std::string_view message) const -> std::string;

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_no_ = 0;
    std::string buffer_;
};

// Column index of `name` in a header row.
auto find_column(const std::vector<std::string>& header, std::string_view name)
    -> std::optional<std::size_t>;

// "# key=value" lines.
using Comments = std::vector<std::pair<std::string, std::string>>;
void write_comments(std::ostream& out, const Comments& comments);

}  // namespace tscore::tsv
