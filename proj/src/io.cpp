#include "mqg/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mqg::io {

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void dump_string(std::string& out, const std::string& s)
{
    // The library's escaping is already canonical; reuse it for strings.
    out += Json(s).dump();
}

void dump(std::string& out, const Json& j, int indent)
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
        for (const auto& [k, v] : j.items()) {
            if (!first) out += ",\n";
            first = false;
            out += inner;
            dump_string(out, k);
            out += ": ";
            dump(out, v, indent + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        bool scalars = true;
        for (const auto& v : j) scalars = scalars && !v.is_structured();
        if (scalars) {
            out += "[";
            for (std::size_t k = 0; k < j.size(); ++k) {
                if (k) out += ", ";
                dump(out, j[k], indent + 1);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t k = 0; k < j.size(); ++k) {
            if (k) out += ",\n";
            out += inner;
            dump(out, j[k], indent + 1);
        }
        out += "\n" + pad + "]";
        return;
    }
    case Json::value_t::number_float: {
        const double x = j.get<double>();
        out += std::isfinite(x) ? format_double(x) : "null";
        return;
    }
    case Json::value_t::string:
        dump_string(out, j.get<std::string>());
        return;
    default:
        out += j.dump();
        return;
    }
}

std::string_view trim(std::string_view s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(std::string_view s)
{
    const std::string tmp(trim(s));
    std::size_t used = 0;
    double x = 0;
    try {
        x = std::stod(tmp, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + tmp + "'");
    }
    if (used != tmp.size()) throw std::invalid_argument("not a number: '" + tmp + "'");
    return x;
}

template <class Fn>
void for_each_line(std::string_view text, Fn&& f)
{
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        if (!line.empty() && line.front() != '#') f(line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
}

std::string coeff_text(double c)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%+.16e", c);
    return buf;
}

} // namespace

std::string dump_json(const Json& j)
{
    std::string out;
    dump(out, j, 0);
    out += "\n";
    return out;
}

std::string word_to_text(const Word& w)
{
    if (w.empty()) return "1";
    std::string out;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (k) out += '*';
        out += 'Y';
        out += std::to_string(w[k] + 1);
    }
    return out;
}

Word word_from_text(std::string_view s)
{
    s = trim(s);
    if (s == "1") return Word{};
    std::vector<Letter> letters;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const auto star = s.find('*', pos);
        const auto tok = trim(s.substr(pos, star == std::string_view::npos ? std::string_view::npos : star - pos));
        if (tok.size() < 2 || tok.front() != 'Y') throw std::invalid_argument("bad letter in word: '" + std::string(s) + "'");
        int idx = 0;
        for (char ch : tok.substr(1)) {
            if (ch < '0' || ch > '9') throw std::invalid_argument("bad letter in word: '" + std::string(s) + "'");
            idx = idx * 10 + (ch - '0');
            if (idx > 256) throw std::invalid_argument("letter index too large");
        }
        if (idx < 1) throw std::invalid_argument("letters are 1-based");
        letters.push_back(static_cast<Letter>(idx - 1));
        if (star == std::string_view::npos) break;
        pos = star + 1;
    }
    if (letters.empty()) throw std::invalid_argument("empty word text");
    return Word(std::move(letters));
}

std::string poly_to_text(const NCPoly<double>& p)
{
    std::string out;
    for (const auto& [w, c] : p.terms()) out += coeff_text(c) + " " + word_to_text(w) + "\n";
    return out;
}

NCPoly<double> poly_from_text(std::string_view text)
{
    NCPoly<double> p;
    for_each_line(text, [&](std::string_view line) {
        const auto sp = line.find_first_of(" \t");
        if (sp == std::string_view::npos) throw std::invalid_argument("poly line needs '<coeff> <word>'");
        p.add(word_from_text(line.substr(sp + 1)), parse_double(line.substr(0, sp)));
    });
    return p;
}

std::string tensor_to_text(const NCTensor<double>& t)
{
    std::string out;
    for (const auto& [k, c] : t.terms())
        out += coeff_text(c) + " " + word_to_text(k.first) + " | " + word_to_text(k.second) + "\n";
    return out;
}

NCTensor<double> tensor_from_text(std::string_view text)
{
    NCTensor<double> t;
    for_each_line(text, [&](std::string_view line) {
        const auto sp = line.find_first_of(" \t");
        const auto bar = line.find('|');
        if (sp == std::string_view::npos || bar == std::string_view::npos || bar < sp)
            throw std::invalid_argument("tensor line needs '<coeff> <left> | <right>'");
        t.add(word_from_text(line.substr(sp + 1, bar - sp - 1)), word_from_text(line.substr(bar + 1)),
              parse_double(line.substr(0, sp)));
    });
    return t;
}

Json poly_to_json(const NCPoly<double>& p)
{
    Json terms = Json::array();
    for (const auto& [w, c] : p.terms()) {
        Json letters = Json::array();
        for (Letter l : w) letters.push_back(static_cast<int>(l) + 1);
        terms.push_back(Json{{"word", letters}, {"coeff", c}});
    }
    return Json{{"terms", terms}};
}

NCPoly<double> poly_from_json(const Json& j)
{
    NCPoly<double> p;
    for (const auto& term : j.at("terms")) {
        std::vector<Letter> letters;
        for (const auto& l : term.at("word")) {
            const int v = l.get<int>();
            if (v < 1 || v > 256) throw std::invalid_argument("poly_from_json: letters are 1-based");
            letters.push_back(static_cast<Letter>(v - 1));
        }
        p.add(Word(std::move(letters)), term.at("coeff").get<double>());
    }
    return p;
}

Json matrix_to_json(const Mat<double>& m)
{
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string matrix_to_csv(const Mat<double>& m)
{
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

Mat<double> matrix_from_text(std::string_view text)
{
    std::vector<std::vector<double>> rows;
    for_each_line(text, [&](std::string_view line) {
        std::vector<double> row;
        std::istringstream in{std::string(line)};
        std::string cell;
        while (in >> cell) {
            std::size_t pos = 0;
            while (pos <= cell.size()) {
                const auto comma = cell.find(',', pos);
                const auto part = cell.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
                if (!part.empty()) row.push_back(parse_double(part));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        }
        rows.push_back(std::move(row));
    });
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n == 0) throw std::invalid_argument("matrix text is empty");
    Mat<double> m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != n) throw std::invalid_argument("matrix text is not square");
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

void write_file(const std::string& path, std::string_view contents)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace mqg::io
