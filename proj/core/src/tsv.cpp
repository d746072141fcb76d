#include "tscore/tsv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>

namespace tscore::tsv
{

auto format_double(double value) -> std::string
{
    if (std::isnan(value))
    {
        return "nan";
    }
    if (std::isinf(value))
    {
        return value > 0 ? "inf" : "-inf";
    }
    std::array<char, 64> buf{};
    // Shortest representation that round-trips; never more than 17 digits.
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return {buf.data(), res.ptr};
}

auto parse_double(std::string_view field, bool allow_nan) -> std::optional<double>
{
    if (allow_nan && (field == "nan" || field == "NaN" || field == "NA"))
    {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (!field.empty() && field.front() == '+')
    {
        field.remove_prefix(1);
    }
    double value = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last || field.empty())
    {
        return std::nullopt;
    }
    if (!std::isfinite(value))
    {
        return allow_nan ? std::optional<double>(value) : std::nullopt;
    }
    return value;
}

auto split_fields(std::string_view line) -> std::vector<std::string_view>
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        const auto tab = line.find('\t', start);
        if (tab == std::string_view::npos)
        {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return out;
}

Reader::Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

auto Reader::next() -> std::optional<std::vector<std::string>>
{
    while (std::getline(in_, buffer_))
    {
        ++line_no_;
        if (!buffer_.empty() && buffer_.back() == '\r')
        {
            buffer_.pop_back();
        }
        if (buffer_.empty() || buffer_.front() == '#')
        {
            continue;
        }
        std::vector<std::string> fields;
        for (const auto f : split_fields(buffer_))
        {
            fields.emplace_back(f);
        }
        return fields;
    }
    return std::nullopt;
}

auto Reader::where(std::string_view message) const -> std::string
{
    return source_ + ":" + std::to_string(line_no_) + ": " + std::string(message);
}

auto find_column(const std::vector<std::string>& header, std::string_view name)
    -> std::optional<std::size_t>
{
    for (std::size_t i = 0; i < header.size(); ++i)
    {
        if (header[i] == name)
        {
            return i;
        }
    }
    return std::nullopt;
}

void write_comments(std::ostream& out, const Comments& comments)
{
    for (const auto& [key, value] : comments)
    {
        out << "# " << key << '=' << value << '\n';
    }
}

}  // namespace tscore::tsv
