#pragma once

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tensor.hpp"

namespace ttd {

/// Scientific notation with 10 significant digits; the CSV/number format used
/// in every file this library writes.
inline std::string format_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

/// Full-precision form used for tensor files so read(write(t)) == t bit-for-bit.
inline std::string format_exact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// TNSR v1: line 1 = order, line 2 = extents, then whitespace-separated values
/// in linearization order (first index fastest).
inline void write_tnsr(std::ostream &os, const Tensor &t) {
    os << t.order() << "\n";
    for (Index n = 0; n < t.order(); ++n) os << (n ? " " : "") << t.dim(n);
    os << "\n";
    for (Index i = 0; i < t.size(); ++i) os << format_exact(t[i]) << "\n";
}

inline void write_tnsr(const std::string &path, const Tensor &t) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_tnsr(os, t);
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline Tensor read_tnsr(std::istream &is, const std::string &what = "<stream>") {
    Index order = 0;
    if (!(is >> order) || order < 1)
        throw std::runtime_error(what + ": bad TNSR header (order)");
    Dims dims(static_cast<std::size_t>(order));
    for (Index n = 0; n < order; ++n)
        if (!(is >> dims[static_cast<std::size_t>(n)]) || dims[static_cast<std::size_t>(n)] < 1)
            throw std::runtime_error(what + ": bad TNSR extents");
    const Index size = dim_product(dims);
    Vector data(size);
    for (Index i = 0; i < size; ++i)
        if (!(is >> data(i)))
            throw std::runtime_error(what + ": TNSR value list too short");
    return Tensor(std::move(dims), std::move(data));
}

inline Tensor read_tnsr(const std::string &path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return read_tnsr(is, path);
}

/// Plain value list (CSV or whitespace separated) with extents supplied by the
/// caller; the CLI's alternative tensor input.
inline Tensor read_values(std::istream &is, const Dims &dims, const std::string &what) {
    // Commas count as separators so plain CSV rows parse too.
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    for (char &c : text)
        if (c == ',') c = ' ';
    std::istringstream tokens(text);
    const Index size = dim_product(dims);
    Vector data(size);
    Index i = 0;
    std::string token;
    while (i < size && tokens >> token) {
        std::size_t used = 0;
        data(i) = std::stod(token, &used);
        if (used != token.size()) throw std::runtime_error(what + ": bad value '" + token + "'");
        ++i;
    }
    if (i != size) throw std::runtime_error(what + ": value list too short for given dims");
    return Tensor(dims, std::move(data));
}

inline Tensor read_values(const std::string &path, const Dims &dims) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return read_values(is, dims, path);
}

/// Flat key=value config; '#' starts a comment, blank lines ignored.
inline std::vector<std::pair<std::string, std::string>> read_kv(const std::string &path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    auto trim = [](std::string s) {
        const char *ws = " \t\r";
        s.erase(0, s.find_first_not_of(ws));
        s.erase(s.find_last_not_of(ws) + 1);
        return s;
    };
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kv;
}

/// One CSV row; fields are joined with commas, no quoting (writers never emit
/// commas inside fields).
inline void write_csv_row(std::ostream &os, const std::vector<std::string> &fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << fields[i];
    os << "\n";
}

} // namespace ttd
