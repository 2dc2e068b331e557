#include "mpspec/io.hpp"

#include "mpspec/error.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace mpspec {

json number_json(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

json to_json(cplx z) { return json::array({number_json(z.real()), number_json(z.imag())}); }

json to_json(const CVector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
    return a;
}

json to_json(const CMatrix& m) {
    json a = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        a.push_back(row);
    }
    return a;
}

namespace {

double real_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        if (s == "nan") return NAN;
    }
    throw InputError("expected a number, got " + j.dump());
}

}  // namespace

cplx complex_from_json(const json& j) {
    if (j.is_array()) {
        if (j.size() != 2) throw InputError("complex number must be [re, im]");
        return {real_from_json(j[0]), real_from_json(j[1])};
    }
    return {real_from_json(j), 0.0};
}

CVector vector_from_json(const json& j) {
    if (!j.is_array()) throw InputError("expected an array");
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    return v;
}

CMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw InputError("expected a matrix (array of rows)");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw InputError("matrix rows have unequal length");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c]);
    }
    return m;
}

MultiParamPencil pencil_from_json(const json& j) {
    try {
        if (!j.is_object()) throw InputError("pencil must be a JSON object");
        if (j.contains("A")) {
            std::vector<CMatrix> a;
            for (const json& m : j.at("A")) a.push_back(matrix_from_json(m));
            if (a.size() < 2) throw InputError("linear pencil needs A0 and at least one A_i");
            return MultiParamPencil::linear(a);
        }
        const int k = j.at("k").get<int>();
        const int l = j.at("l").get<int>();
        const int m = j.at("m").get<int>();
        std::vector<Term> terms;
        for (const json& t : j.at("terms")) {
            Term term;
            term.exponent = t.at("exp").get<std::vector<int>>();
            term.coeff = matrix_from_json(t.at("matrix"));
            terms.push_back(std::move(term));
        }
        return MultiParamPencil(k, l, m, std::move(terms));
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed pencil JSON: ") + e.what());
    }
}

json pencil_to_json(const MultiParamPencil& p) {
    json terms = json::array();
    for (const Term& t : p.terms()) terms.push_back({{"exp", t.exponent}, {"matrix", to_json(t.coeff)}});
    return {{"k", p.k()}, {"l", p.l()}, {"m", p.m()}, {"terms", terms}};
}

GridSpec grid_from_json(const json& j) {
    try {
        GridSpec g;
        for (const json& a : j.at("axes")) {
            if (a.contains("fixed")) {
                g.axes.push_back(Axis::fixed(complex_from_json(a.at("fixed"))));
            } else if (a.contains("real")) {
                const json& r = a.at("real");
                if (r.size() != 3) throw InputError("real axis is [a, b, n]");
                g.axes.push_back(Axis::real(r[0].get<double>(), r[1].get<double>(), r[2].get<int>()));
            } else if (a.contains("complex")) {
                const json& c = a.at("complex");
                if (c.size() != 6) throw InputError("complex axis is [a, b, c, d, nre, nim]");
                g.axes.push_back(Axis::complex_box(c[0].get<double>(), c[1].get<double>(),
                                                   c[2].get<double>(), c[3].get<double>(),
                                                   c[4].get<int>(), c[5].get<int>()));
            } else {
                throw InputError("unknown axis kind in " + a.dump());
            }
        }
        return g;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed grid JSON: ") + e.what());
    }
}

json grid_to_json(const GridSpec& g) {
    json axes = json::array();
    for (const Axis& a : g.axes) {
        switch (a.kind) {
            case Axis::Kind::fixed: axes.push_back({{"fixed", to_json(a.value)}}); break;
            case Axis::Kind::real: axes.push_back({{"real", {a.a, a.b, a.n_re}}}); break;
            case Axis::Kind::complex_box:
                axes.push_back({{"complex", {a.a, a.b, a.c, a.d, a.n_re, a.n_im}}});
                break;
        }
    }
    return {{"axes", axes}};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw InputError("'" + path + "' is not valid JSON: " + e.what());
    }
}

MultiParamPencil load_pencil(const std::string& path) { return pencil_from_json(read_json(path)); }

RVector load_data(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<double> vals;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        for (char& ch : line)
            if (ch == ',' || ch == ';' || ch == '\t' || ch == '\r') ch = ' ';
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                const double v = std::stod(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                vals.push_back(v);
            } catch (const std::exception&) {
                if (first && vals.empty()) break;  // header
                throw InputError("bad number '" + tok + "' in " + path);
            }
        }
        first = false;
    }
    if (vals.empty()) throw InputError("no data in " + path);
    RVector y(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) y(static_cast<Eigen::Index>(i)) = vals[i];
    return y;
}

cplx parse_complex(const std::string& s) {
    static const std::regex full(
        R"(^\s*([+-]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)?\s*(?:([+-]?)\s*((?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)?\s*[ij])?\s*$)");
    std::smatch m;
    if (s.find_first_not_of(" \t") == std::string::npos || !std::regex_match(s, m, full))
        throw InputError("cannot parse number '" + s + "'");
    const bool has_im = s.find_first_of("ij") != std::string::npos;
    double re = 0.0;
    double im = 0.0;
    if (has_im) {
        // "4j" parses its digits into the first group; move them over
        if (m[1].matched && !m[3].matched && m[2].str().empty()) {
            im = std::stod(m[1].str());
        } else {
            if (m[1].matched) re = std::stod(m[1].str());
            im = m[3].matched ? std::stod(m[3].str()) : 1.0;
            if (m[2].str() == "-") im = -im;
        }
    } else {
        if (!m[1].matched) throw InputError("cannot parse number '" + s + "'");
        re = std::stod(m[1].str());
    }
    return {re, im};
}

std::vector<cplx> parse_complex_list(const std::string& s) {
    std::vector<cplx> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = s.find(',', start);
        out.push_back(parse_complex(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<double> parse_real_list(const std::string& s) {
    std::vector<double> out;
    for (cplx z : parse_complex_list(s)) {
        if (z.imag() != 0.0) throw InputError("expected real numbers in '" + s + "'");
        out.push_back(z.real());
    }
    return out;
}

}  // namespace mpspec
