#include "expr_io.hpp"

#include <cctype>

namespace dymforge {

std::string jet_name(const Alphabet& alph, JetVar v) {
    const std::string& base = alph.spec(v.gen).name;
    if (v.order == 0)
        return base;
    if (base.size() == 1)
        return base + std::to_string(v.order);
    return base + "_" + std::to_string(v.order);
}

namespace {

std::string exponent_text(std::int32_t e2) {
    if (e2 == 2)
        return "";
    if (e2 % 2 == 0) {
        const int n = e2 / 2;
        if (n > 0)
            return "^" + std::to_string(n);
        return "^(" + std::to_string(n) + ")";
    }
    return "^(" + std::to_string(e2) + "/2)";
}

std::string term_text(const Alphabet* alph, const DiffMono& t) {
    if (t.exps.empty())
        return to_string(t.coeff);
    std::string vars;
    for (const auto& [v, e2] : t.exps) {
        if (!vars.empty())
            vars += "*";
        vars += jet_name(*alph, v) + exponent_text(e2);
    }
    if (t.coeff == 1)
        return vars;
    if (t.coeff == -1)
        return "-" + vars;
    return to_string(t.coeff) + "*" + vars;
}

std::string join_terms(std::vector<std::string> parts) {
    if (parts.empty())
        return "0";
    std::string out = parts[0];
    for (size_t i = 1; i < parts.size(); ++i) {
        if (parts[i].starts_with("-"))
            out += " - " + parts[i].substr(1);
        else
            out += " + " + parts[i];
    }
    return out;
}

std::string latex_base(const std::string& name, int order) {
    size_t us = name.find('_');
    std::string head = (us == std::string::npos) ? name : name.substr(0, us);
    std::string sub = (us == std::string::npos) ? "" : name.substr(us + 1);
    size_t d = head.size();
    while (d > 0 && std::isdigit(static_cast<unsigned char>(head[d - 1])))
        --d;
    std::string letters = head.substr(0, d);
    std::string digits = head.substr(d);
    if (!sub.empty() && sub[0] == 'm')
        sub = "-" + sub.substr(1);

    std::string sup, low;
    if (!sub.empty()) {
        sup = digits;
        low = sub;
    } else {
        low = digits;
    }
    if (order > 0) {
        if (!low.empty())
            low += ",";
        low += std::string(static_cast<size_t>(order), 'x');
    }
    std::string out = letters;
    if (!sup.empty())
        out += "^{" + sup + "}";
    if (!low.empty())
        out += "_{" + low + "}";
    return out;
}

std::string exponent_latex(std::int32_t e2) {
    if (e2 == 2)
        return "";
    if (e2 % 2 == 0)
        return "^{" + std::to_string(e2 / 2) + "}";
    return "^{" + std::to_string(e2) + "/2}";
}

std::string coeff_latex(const Rational& q) {
    if (is_integer(q))
        return to_string(q);
    std::string sign = q < 0 ? "-" : "";
    Rational a = abs(q);
    return sign + "\\frac{" + a.get_num().get_str() + "}{" + a.get_den().get_str() + "}";
}

std::string term_latex(const Alphabet* alph, const DiffMono& t) {
    if (t.exps.empty())
        return coeff_latex(t.coeff);
    std::string vars;
    for (const auto& [v, e2] : t.exps) {
        if (!vars.empty())
            vars += "\\,";
        vars += latex_base(alph->spec(v.gen).name, v.order) + exponent_latex(e2);
    }
    if (t.coeff == 1)
        return vars;
    if (t.coeff == -1)
        return "-" + vars;
    return coeff_latex(t.coeff) + "\\," + vars;
}

class Parser {
public:
    Parser(std::string_view s, AlphabetPtr alph) : s_(s), alph_(std::move(alph)) {}

    DiffPoly run() {
        DiffPoly p = parse_sum();
        skip_ws();
        if (pos_ != s_.size())
            fail("trailing input at position " + std::to_string(pos_));
        return p;
    }

private:
    std::string_view s_;
    size_t pos_ = 0;
    AlphabetPtr alph_;

    [[noreturn]] void fail(const std::string& msg) { throw ParseError("parse: " + msg); }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    bool eat(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    DiffPoly parse_sum() {
        DiffPoly acc = parse_product();
        for (;;) {
            if (eat('+'))
                acc = acc + parse_product();
            else if (eat('-'))
                acc = acc - parse_product();
            else
                return acc;
        }
    }

    DiffPoly parse_product() {
        DiffPoly acc = parse_power();
        while (eat('*'))
            acc = acc * parse_power();
        return acc;
    }

    DiffPoly parse_power() {
        if (eat('-'))
            return -parse_power();
        DiffPoly base = parse_atom();
        if (!eat('^'))
            return base;
        auto [num, den] = parse_exponent();
        return base.mono_pow(num, den);
    }

    DiffPoly parse_atom() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            DiffPoly p = parse_sum();
            if (!eat(')'))
                fail("expected ')'");
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
            return DiffPoly::constant(alph_, parse_rational());
        if (std::isalpha(static_cast<unsigned char>(c)))
            return parse_ident();
        fail(pos_ < s_.size() ? std::string("unexpected character '") + c + "'"
                              : std::string("unexpected end of input"));
    }

    std::string parse_digits() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (pos_ == start)
            fail("expected digits at position " + std::to_string(start));
        return std::string(s_.substr(start, pos_ - start));
    }

    Rational parse_rational() {
        mpz_class num(parse_digits());
        if (pos_ < s_.size() && s_[pos_] == '/') {
            ++pos_;
            mpz_class den(parse_digits());
            if (den == 0)
                fail("zero denominator");
            Rational q(num, den);
            q.canonicalize();
            return q;
        }
        return Rational(num);
    }

    std::pair<long, long> parse_exponent() {
        bool paren = eat('(');
        long sign = 1;
        if (paren && eat('-'))
            sign = -1;
        long num = std::stol(parse_digits());
        long den = 1;
        if (paren && pos_ < s_.size() && s_[pos_] == '/') {
            ++pos_;
            den = std::stol(parse_digits());
            if (den != 1 && den != 2)
                fail("exponent denominator must be 1 or 2");
        }
        if (paren && !eat(')'))
            fail("expected ')' after exponent");
        return {sign * num, den};
    }

    DiffPoly parse_ident() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string id(s_.substr(start, pos_ - start));

        int best_gen = -1, best_order = 0;
        size_t best_len = 0;
        for (int g = 0; g < alph_->size(); ++g) {
            const std::string& name = alph_->spec(g).name;
            if (id.size() < name.size() || id.compare(0, name.size(), name) != 0)
                continue;
            std::string rest = id.substr(name.size());
            int order = 0;
            if (!rest.empty()) {
                if (rest[0] == '_')
                    rest = rest.substr(1);
                else if (name.size() != 1)
                    continue; // multi-char bases need "_order"
                if (rest.empty() ||
                    rest.find_first_not_of("0123456789") != std::string::npos)
                    continue;
                order = std::stoi(rest);
            }
            if (name.size() > best_len) {
                best_len = name.size();
                best_gen = g;
                best_order = order;
            }
        }
        if (best_gen < 0)
            fail("unknown symbol '" + id + "'");
        return DiffPoly::generator(alph_, best_gen, best_order);
    }
};

} // namespace

std::string render_text(const DiffPoly& p) {
    std::vector<std::string> parts;
    parts.reserve(p.terms().size());
    for (const auto& t : p.terms())
        parts.push_back(term_text(p.alphabet().get(), t));
    return join_terms(std::move(parts));
}

std::string render_latex(const DiffPoly& p) {
    std::vector<std::string> parts;
    parts.reserve(p.terms().size());
    for (const auto& t : p.terms())
        parts.push_back(term_latex(p.alphabet().get(), t));
    return join_terms(std::move(parts));
}

DiffPoly parse_expr(std::string_view text, AlphabetPtr alph) {
    return Parser(text, std::move(alph)).run();
}

} // namespace dymforge
