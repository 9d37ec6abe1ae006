#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "mvjump/errors.hpp"

namespace mvjump::io {

/// 17 significant digits; parses back to the same double.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string> header)
        : out_(path, std::ios::binary), path_(path) {
        if (!out_) throw Error("cannot open " + path.string() + " for writing");
        bool first = true;
        for (const auto& h : header) {
            if (!first) out_ << ',';
            out_ << h;
            first = false;
        }
        out_ << '\n';
    }

    CsvWriter& row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
        if (!out_) throw Error("write failed: " + path_.string());
        return *this;
    }

    CsvWriter& row(const std::vector<double>& cells) {
        std::vector<std::string> s;
        s.reserve(cells.size());
        for (double v : cells) s.push_back(fmt(v));
        return row(s);
    }

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace mvjump::io
