#include "socrs/rational.hpp"

#include "socrs/errors.hpp"

#include <cctype>

namespace socrs {

Rational fraction(long num, long den) {
    if (den == 0) throw InputError("zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& r) {
    return r.get_str();
}

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw InputError("empty rational literal");

    if (s.find('/') != std::string::npos) {
        Rational r;
        if (r.set_str(s, 10) != 0) throw InputError("bad rational literal '" + text + "'");
        if (r.get_den() == 0) throw InputError("zero denominator in '" + text + "'");
        r.canonicalize();
        return r;
    }

    // Decimal literal: [sign] digits [. digits] [e [sign] digits]
    std::size_t i = 0;
    bool negative = false;
    if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
    std::string digits;
    int scale = 0;
    bool any = false;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) digits += s[i++], any = true;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) digits += s[i++], --scale, any = true;
    }
    if (!any) throw InputError("bad rational literal '" + text + "'");
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        std::size_t used = 0;
        int exponent = 0;
        try {
            exponent = std::stoi(s.substr(i), &used);
        } catch (const std::exception&) {
            throw InputError("bad exponent in '" + text + "'");
        }
        i += used;
        scale += exponent;
    }
    if (i != s.size()) throw InputError("trailing characters in '" + text + "'");

    Rational r{mpz_class(digits, 10)};
    mpz_class ten_power;
    mpz_ui_pow_ui(ten_power.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    if (scale < 0)
        r /= ten_power;
    else
        r *= ten_power;
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

Rational exact(double v) {
    return Rational(v);
}

std::vector<Rational> exact(std::span<const double> v) {
    std::vector<Rational> out;
    out.reserve(v.size());
    for (double d : v) out.emplace_back(d);
    return out;
}

std::vector<double> to_doubles(std::span<const Rational> v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& r : v) out.push_back(r.get_d());
    return out;
}

Rational binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(c);
}

Rational power(const Rational& base, int exponent) {
    Rational result = 1;
    Rational b = exponent < 0 ? Rational(1 / base) : base;
    for (int e = exponent < 0 ? -exponent : exponent; e > 0; e >>= 1) {
        if (e & 1) result *= b;
        b *= b;
    }
    return result;
}

}  // namespace socrs
