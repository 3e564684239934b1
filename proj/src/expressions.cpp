#include "robsim/expressions.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace robsim {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string strip(const std::string& s) {
    auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_args(const std::string& term, const std::string& args,
                               std::size_t expected) {
    std::vector<double> vals;
    for (const std::string& tok : split(args, ',')) {
        try {
            std::size_t used = 0;
            vals.push_back(std::stod(strip(tok), &used));
            if (used != strip(tok).size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ParseError("expression term '" + term + "': bad number '" + tok + "'");
        }
    }
    if (vals.size() != expected)
        throw ParseError("expression term '" + term + "': expected " +
                         std::to_string(expected) + " arguments");
    return vals;
}

constexpr double kPi = 3.14159265358979323846;

} // namespace

SpaceFn make_scalar_expression(const std::string& spec, const DomainSpec& dom) {
    struct Term {
        enum Kind { constant, linear, sinprod } kind;
        double a[4] = {0, 0, 0, 0};
    };
    std::vector<Term> terms;
    for (const std::string& raw : split(spec, ';')) {
        const std::string t = strip(raw);
        if (t.empty()) throw ParseError("empty expression term in '" + spec + "'");
        if (t == "zero") {
            terms.push_back({Term::constant, {0, 0, 0, 0}});
            continue;
        }
        auto colon = t.find(':');
        const std::string head = colon == std::string::npos ? t : t.substr(0, colon);
        const std::string args = colon == std::string::npos ? "" : t.substr(colon + 1);
        Term term;
        if (head == "constant") {
            term.kind = Term::constant;
            auto v = parse_args(t, args, 1);
            term.a[0] = v[0];
        } else if (head == "linear") {
            term.kind = Term::linear;
            auto v = parse_args(t, args, 4);
            for (int i = 0; i < 4; ++i) term.a[i] = v[i];
        } else if (head == "sinprod") {
            term.kind = Term::sinprod;
            auto v = parse_args(t, args, 4);
            for (int i = 0; i < 4; ++i) term.a[i] = v[i];
        } else {
            throw ParseError("unknown expression term '" + head + "'");
        }
        terms.push_back(term);
    }

    const double Lx = dom.Lx, Ly = dom.Ly;
    return [terms, Lx, Ly](double x, double y, double z) {
        double s = 0.0;
        for (const Term& t : terms) {
            switch (t.kind) {
                case Term::constant: s += t.a[0]; break;
                case Term::linear: s += t.a[0] + t.a[1] * x + t.a[2] * y + t.a[3] * z; break;
                case Term::sinprod: {
                    double v = t.a[0];
                    if (t.a[1] != 0.0) v *= std::sin(t.a[1] * kPi * x / Lx);
                    if (t.a[2] != 0.0) v *= std::sin(t.a[2] * kPi * y / Ly);
                    if (t.a[3] != 0.0) v *= std::sin(t.a[3] * kPi * z);
                    s += v;
                    break;
                }
            }
        }
        return s;
    };
}

VelocityField make_velocity_expression(const std::string& spec, const DomainSpec& dom) {
    VelocityField v(dom);
    for (const std::string& raw : split(spec, ';')) {
        const std::string t = strip(raw);
        if (t == "zero") continue;
        auto colon = t.find(':');
        const std::string head = colon == std::string::npos ? t : t.substr(0, colon);
        if (head != "stream")
            throw ParseError("unknown velocity expression term '" + t + "'");
        auto a = parse_args(t, t.substr(colon + 1), 3);
        const double A = a[0];
        const int m = int(a[1]), n = int(a[2]);
        if (m < 1 || n < 1)
            throw ParseError("stream modes must be positive integers in '" + t + "'");
        // psi at grid nodes; u1 = d psi/dy, u2 = -d psi/dx by node differences
        auto psi = [&](int i, int j) {
            return A * std::sin(m * kPi * dom.xf(i) / dom.Lx) *
                   std::sin(n * kPi * dom.yf(j) / dom.Ly);
        };
        for (int j = 0; j < dom.ny; ++j)
            for (int i = 0; i <= dom.nx; ++i)
                v.u1(i, j) += (psi(i, j + 1) - psi(i, j)) / dom.dy();
        for (int j = 0; j <= dom.ny; ++j)
            for (int i = 0; i < dom.nx; ++i)
                v.u2(i, j) -= (psi(i + 1, j) - psi(i, j)) / dom.dx();
    }
    v.enforce_noslip();
    return v;
}

ScalarField3D sample_at_centers(const SpaceFn& f, const DomainSpec& dom,
                                const std::string& name, BoundaryKind bc) {
    ScalarField3D out(dom, name, bc);
    for (int k = 0; k < dom.nz; ++k)
        for (int j = 0; j < dom.ny; ++j)
            for (int i = 0; i < dom.nx; ++i)
                out.at(i, j, k) = f(dom.xc(i), dom.yc(j), dom.zc(k));
    return out;
}

} // namespace robsim
