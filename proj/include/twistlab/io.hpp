#pragma once

// JSON and CSV emitters: LF line endings, floats with 17 significant digits.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "twistlab/error.hpp"

namespace twistlab {

using Json = nlohmann::ordered_json;

inline std::string format_real(double v)
{
    if (std::isnan(v)) {
        return "NaN";
    }
    if (std::isinf(v)) {
        return v > 0 ? "Infinity" : "-Infinity";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void write_json(std::string &out, const Json &j, int indent)
{
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) {
                out += ",\n";
            }
            first = false;
            out += inner + Json(it.key()).dump() + ": ";
            write_json(out, it.value(), indent + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // Arrays of scalars stay on one line.
        bool flat = true;
        for (const auto &e : j) {
            flat = flat && !e.is_structured();
        }
        if (flat) {
            out += "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i != 0) {
                    out += ", ";
                }
                write_json(out, j[i], indent + 1);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i != 0) {
                out += ",\n";
            }
            out += inner;
            write_json(out, j[i], indent + 1);
        }
        out += "\n" + pad + "]";
        return;
    }
    case Json::value_t::number_float: {
        const double v = j.get<double>();
        // Non-finite values have no JSON literal.
        out += std::isfinite(v) ? format_real(v) : "null";
        return;
    }
    default:
        out += j.dump();
    }
}

} // namespace detail

inline std::string to_json_text(const Json &j)
{
    std::string out;
    detail::write_json(out, j, 0);
    out += "\n";
    return out;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::vector<std::string> &header)
    {
        for (std::size_t i = 0; i < header.size(); ++i) {
            text_ += (i == 0 ? "" : ",") + header[i];
        }
        text_ += "\n";
        columns_ = header.size();
    }

    template <typename... Ts> void row(const Ts &...cells)
    {
        static_assert(sizeof...(Ts) > 0);
        if (sizeof...(Ts) != columns_) {
            throw std::invalid_argument("CsvWriter: column count mismatch");
        }
        bool first = true;
        ((text_ += (first ? "" : ","), text_ += cell(cells), first = false), ...);
        text_ += "\n";
        ++rows_;
    }

    [[nodiscard]] const std::string &text() const { return text_; }
    [[nodiscard]] std::size_t rows() const { return rows_; }

private:
    static std::string cell(double v) { return format_real(v); }
    static std::string cell(const std::string &s) { return s; }
    static std::string cell(const char *s) { return s; }
    template <typename I> static std::string cell(I v) requires std::is_integral_v<I> { return std::to_string(v); }

    std::string text_;
    std::size_t columns_ = 0;
    std::size_t rows_ = 0;
};

inline void write_text_file(const std::string &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open output file '" + path + "'");
    }
    out << text;
    if (!out) {
        throw Error("failed writing '" + path + "'");
    }
}

} // namespace twistlab
