#include "algebra.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

namespace dymforge {

Alphabet::Alphabet(std::vector<GeneratorSpec> gens) : gens_(std::move(gens)) {
    std::unordered_set<std::string> seen;
    for (const auto& g : gens_) {
        if (g.name.empty())
            throw Error("alphabet: empty generator name");
        if (!seen.insert(g.name).second)
            throw Error("alphabet: duplicate generator name '" + g.name + "'");
    }
}

int Alphabet::find(std::string_view name) const {
    for (int i = 0; i < size(); ++i)
        if (gens_[static_cast<size_t>(i)].name == name)
            return i;
    return -1;
}

int Alphabet::require(std::string_view name) const {
    int i = find(name);
    if (i < 0)
        throw Error("alphabet: unknown generator '" + std::string(name) + "'");
    return i;
}

bool Alphabet::same_content(const Alphabet& other) const {
    if (size() != other.size())
        return false;
    for (int i = 0; i < size(); ++i) {
        const auto& a = gens_[static_cast<size_t>(i)];
        const auto& b = other.gens_[static_cast<size_t>(i)];
        if (a.name != b.name || a.kind != b.kind)
            return false;
    }
    return true;
}

AlphabetPtr make_alphabet(std::vector<GeneratorSpec> gens) {
    return std::make_shared<Alphabet>(std::move(gens));
}

namespace {

std::int64_t grade(const MonoExps& m) {
    std::int64_t g = 0;
    for (const auto& [v, e2] : m)
        g += e2;
    return g;
}

void check_exponent(const Alphabet& alph, JetVar v, std::int32_t e2) {
    if (v.gen < 0 || v.gen >= alph.size())
        throw Error("monomial references generator outside the alphabet");
    if (v.order < 0)
        throw Error("negative jet order");
    if (v.order >= 1) {
        if (e2 < 0 || e2 % 2 != 0)
            throw ExponentConstraintError(
                "derivative jets carry non-negative integer exponents only");
        return;
    }
    switch (alph.spec(v.gen).kind) {
    case GeneratorKind::Plain:
        if (e2 < 0 || e2 % 2 != 0)
            throw ExponentConstraintError("plain generator '" + alph.spec(v.gen).name +
                                          "' takes non-negative integer exponents only");
        break;
    case GeneratorKind::Radical:
        break; // any half-integer
    case GeneratorKind::Invertible:
        if (e2 % 2 != 0)
            throw ExponentConstraintError("invertible generator '" + alph.spec(v.gen).name +
                                          "' takes integer exponents only");
        break;
    }
}

// Sort one monomial's exponent list and merge repeated variables.
void canonicalize_exps(MonoExps& exps) {
    std::sort(exps.begin(), exps.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    MonoExps out;
    out.reserve(exps.size());
    for (const auto& e : exps) {
        if (!out.empty() && out.back().first == e.first)
            out.back().second += e.second;
        else
            out.push_back(e);
    }
    std::erase_if(out, [](const auto& e) { return e.second == 0; });
    exps = std::move(out);
}

} // namespace

std::strong_ordering compare_mono(const MonoExps& a, const MonoExps& b) {
    const std::int64_t ga = grade(a), gb = grade(b);
    if (ga != gb)
        return ga <=> gb;
    // Graded lex: walk variables in ascending (gen, order); at the first
    // variable whose exponents differ, the larger exponent wins.
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
            if (a[i].second != b[j].second)
                return a[i].second <=> b[j].second;
            ++i, ++j;
        } else if (a[i].first < b[j].first) {
            // b has exponent 0 here
            return a[i].second <=> 0;
        } else {
            return 0 <=> b[j].second;
        }
    }
    if (i < a.size())
        return a[i].second <=> 0;
    if (j < b.size())
        return 0 <=> b[j].second;
    return std::strong_ordering::equal;
}

void DiffPoly::validate_and_set(AlphabetPtr alph, std::vector<DiffMono> terms) {
    for (auto& t : terms) {
        canonicalize_exps(t.exps);
        if (!alph && !t.exps.empty())
            throw Error("non-constant term without an alphabet");
        for (const auto& [v, e2] : t.exps)
            check_exponent(*alph, v, e2);
    }
    std::sort(terms.begin(), terms.end(), [](const DiffMono& x, const DiffMono& y) {
        return compare_mono(x.exps, y.exps) == std::strong_ordering::greater;
    });
    std::vector<DiffMono> merged;
    merged.reserve(terms.size());
    for (auto& t : terms) {
        if (!merged.empty() && merged.back().exps == t.exps)
            merged.back().coeff += t.coeff;
        else
            merged.push_back(std::move(t));
    }
    std::erase_if(merged, [](const DiffMono& t) { return t.coeff == 0; });
    alph_ = std::move(alph);
    terms_ = std::move(merged);
}

DiffPoly DiffPoly::zero(AlphabetPtr alph) {
    DiffPoly p;
    p.alph_ = std::move(alph);
    return p;
}

DiffPoly DiffPoly::constant(AlphabetPtr alph, Rational value) {
    DiffPoly p;
    p.alph_ = std::move(alph);
    if (value != 0)
        p.terms_.push_back(DiffMono{std::move(value), {}});
    return p;
}

DiffPoly DiffPoly::generator(AlphabetPtr alph, int gen, int order) {
    DiffPoly p;
    p.validate_and_set(std::move(alph), {DiffMono{Rational(1), {{JetVar{gen, order}, 2}}}});
    return p;
}

DiffPoly DiffPoly::generator(AlphabetPtr alph, std::string_view name, int order) {
    int gen = alph->require(name);
    return generator(std::move(alph), gen, order);
}

DiffPoly DiffPoly::monomial(AlphabetPtr alph, Rational coeff, MonoExps exps) {
    DiffPoly p;
    p.validate_and_set(std::move(alph), {DiffMono{std::move(coeff), std::move(exps)}});
    return p;
}

DiffPoly DiffPoly::from_terms(AlphabetPtr alph, std::vector<DiffMono> terms) {
    DiffPoly p;
    p.validate_and_set(std::move(alph), std::move(terms));
    return p;
}

bool DiffPoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].exps.empty());
}

Rational DiffPoly::constant_value() const {
    for (const auto& t : terms_)
        if (t.exps.empty())
            return t.coeff;
    return Rational(0);
}

const AlphabetPtr& DiffPoly::merged_alphabet(const DiffPoly& a, const DiffPoly& b) {
    if (!a.alph_)
        return b.alph_;
    if (!b.alph_)
        return a.alph_;
    if (a.alph_ == b.alph_ || a.alph_->same_content(*b.alph_))
        return a.alph_;
    throw Error("operation on polynomials over different alphabets");
}

DiffPoly DiffPoly::operator-() const {
    DiffPoly p(*this);
    for (auto& t : p.terms_)
        t.coeff = -t.coeff;
    return p;
}

DiffPoly DiffPoly::operator+(const DiffPoly& rhs) const {
    const AlphabetPtr& alph = merged_alphabet(*this, rhs);
    // Both operands are canonical; merge the sorted term lists directly.
    DiffPoly out;
    out.alph_ = alph;
    out.terms_.reserve(terms_.size() + rhs.terms_.size());
    size_t i = 0, j = 0;
    while (i < terms_.size() && j < rhs.terms_.size()) {
        auto ord = compare_mono(terms_[i].exps, rhs.terms_[j].exps);
        if (ord == std::strong_ordering::greater) {
            out.terms_.push_back(terms_[i++]);
        } else if (ord == std::strong_ordering::less) {
            out.terms_.push_back(rhs.terms_[j++]);
        } else {
            Rational c = terms_[i].coeff + rhs.terms_[j].coeff;
            if (c != 0)
                out.terms_.push_back(DiffMono{std::move(c), terms_[i].exps});
            ++i, ++j;
        }
    }
    for (; i < terms_.size(); ++i)
        out.terms_.push_back(terms_[i]);
    for (; j < rhs.terms_.size(); ++j)
        out.terms_.push_back(rhs.terms_[j]);
    return out;
}

DiffPoly DiffPoly::operator-(const DiffPoly& rhs) const {
    return *this + (-rhs);
}

DiffPoly DiffPoly::operator*(const DiffPoly& rhs) const {
    const AlphabetPtr& alph = merged_alphabet(*this, rhs);
    std::vector<DiffMono> prod;
    prod.reserve(terms_.size() * rhs.terms_.size());
    for (const auto& a : terms_) {
        for (const auto& b : rhs.terms_) {
            DiffMono t;
            t.coeff = a.coeff * b.coeff;
            t.exps.reserve(a.exps.size() + b.exps.size());
            // merge two sorted exponent lists
            size_t i = 0, j = 0;
            while (i < a.exps.size() && j < b.exps.size()) {
                if (a.exps[i].first == b.exps[j].first) {
                    std::int32_t e2 = a.exps[i].second + b.exps[j].second;
                    if (e2 != 0)
                        t.exps.emplace_back(a.exps[i].first, e2);
                    ++i, ++j;
                } else if (a.exps[i].first < b.exps[j].first) {
                    t.exps.push_back(a.exps[i++]);
                } else {
                    t.exps.push_back(b.exps[j++]);
                }
            }
            for (; i < a.exps.size(); ++i)
                t.exps.push_back(a.exps[i]);
            for (; j < b.exps.size(); ++j)
                t.exps.push_back(b.exps[j]);
            prod.push_back(std::move(t));
        }
    }
    std::sort(prod.begin(), prod.end(), [](const DiffMono& x, const DiffMono& y) {
        return compare_mono(x.exps, y.exps) == std::strong_ordering::greater;
    });
    DiffPoly out;
    out.alph_ = alph;
    out.terms_.reserve(prod.size());
    for (auto& t : prod) {
        if (!out.terms_.empty() && out.terms_.back().exps == t.exps)
            out.terms_.back().coeff += t.coeff;
        else
            out.terms_.push_back(std::move(t));
    }
    std::erase_if(out.terms_, [](const DiffMono& t) { return t.coeff == 0; });
    return out;
}

bool DiffPoly::operator==(const DiffPoly& rhs) const {
    if (terms_.size() != rhs.terms_.size())
        return false;
    for (size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].coeff != rhs.terms_[i].coeff || terms_[i].exps != rhs.terms_[i].exps)
            return false;
    return true;
}

DiffPoly DiffPoly::scale(const Rational& c) const {
    if (c == 0)
        return zero(alph_);
    DiffPoly p(*this);
    for (auto& t : p.terms_)
        t.coeff *= c;
    return p;
}

DiffPoly DiffPoly::pow(unsigned n) const {
    DiffPoly acc = constant(alph_, 1);
    DiffPoly base = *this;
    while (n > 0) {
        if (n & 1u)
            acc = acc * base;
        n >>= 1u;
        if (n)
            base = base * base;
    }
    return acc;
}

DiffPoly DiffPoly::diff_x() const {
    std::vector<DiffMono> out;
    for (const auto& t : terms_) {
        for (size_t k = 0; k < t.exps.size(); ++k) {
            const auto [v, e2] = t.exps[k];
            DiffMono d;
            d.coeff = t.coeff * rat(e2, 2);
            d.exps.reserve(t.exps.size() + 1);
            for (size_t m = 0; m < t.exps.size(); ++m) {
                if (m == k) {
                    if (e2 != 2)
                        d.exps.emplace_back(v, e2 - 2);
                } else {
                    d.exps.push_back(t.exps[m]);
                }
            }
            d.exps.emplace_back(JetVar{v.gen, v.order + 1}, 2);
            out.push_back(std::move(d));
        }
    }
    DiffPoly p;
    p.validate_and_set(alph_, std::move(out));
    return p;
}

DiffPoly DiffPoly::diff_x(int n) const {
    DiffPoly p = *this;
    for (int i = 0; i < n; ++i)
        p = p.diff_x();
    return p;
}

DiffPoly DiffPoly::partial(JetVar v) const {
    std::vector<DiffMono> out;
    for (const auto& t : terms_) {
        auto it = std::find_if(t.exps.begin(), t.exps.end(),
                               [&](const auto& e) { return e.first == v; });
        if (it == t.exps.end())
            continue;
        DiffMono d;
        d.coeff = t.coeff * rat(it->second, 2);
        for (const auto& e : t.exps) {
            if (e.first == v) {
                if (e.second != 2)
                    d.exps.emplace_back(v, e.second - 2);
            } else {
                d.exps.push_back(e);
            }
        }
        out.push_back(std::move(d));
    }
    DiffPoly p;
    p.validate_and_set(alph_, std::move(out));
    return p;
}

DiffPoly DiffPoly::euler(int gen) const {
    auto mo = max_order(gen);
    if (!mo)
        return zero(alph_);
    DiffPoly acc = zero(alph_);
    for (int n = 0; n <= *mo; ++n) {
        DiffPoly q = partial(JetVar{gen, n}).diff_x(n);
        acc = (n % 2 == 0) ? acc + q : acc - q;
    }
    return acc;
}

std::optional<int> DiffPoly::max_order(int gen) const {
    std::optional<int> best;
    for (const auto& t : terms_)
        for (const auto& [v, e2] : t.exps)
            if (v.gen == gen && (!best || v.order > *best))
                best = v.order;
    return best;
}

bool DiffPoly::contains(int gen) const {
    return max_order(gen).has_value();
}

std::vector<int> DiffPoly::generators_present() const {
    std::set<int> s;
    for (const auto& t : terms_)
        for (const auto& [v, e2] : t.exps)
            s.insert(v.gen);
    return {s.begin(), s.end()};
}

Rational rational_pow(const Rational& q, long num, long den) {
    if (den != 1 && den != 2)
        throw Error("rational_pow: denominator must be 1 or 2");
    if (q == 0) {
        if (num <= 0)
            throw Error("rational_pow: zero base with non-positive exponent");
        return Rational(0);
    }
    if (den == 2 && num % 2 == 0)
        return rational_pow(q, num / 2, 1);
    Rational base = q;
    if (den == 2) {
        if (q < 0)
            throw NotAPerfectPowerError("negative coefficient under a square root");
        mpz_class rn, rd;
        if (!mpz_root(rn.get_mpz_t(), q.get_num().get_mpz_t(), 2) ||
            !mpz_root(rd.get_mpz_t(), q.get_den().get_mpz_t(), 2))
            throw NotAPerfectPowerError("coefficient " + to_string(q) +
                                        " is not a perfect square");
        base = Rational(rn, rd);
    }
    const unsigned long e = static_cast<unsigned long>(num < 0 ? -num : num);
    mpz_class pn, pd;
    mpz_pow_ui(pn.get_mpz_t(), base.get_num().get_mpz_t(), e);
    mpz_pow_ui(pd.get_mpz_t(), base.get_den().get_mpz_t(), e);
    Rational r = (num < 0) ? Rational(pd, pn) : Rational(pn, pd);
    r.canonicalize();
    return r;
}

DiffPoly DiffPoly::substitute(const std::map<int, DiffPoly>& bindings, AlphabetPtr target) const {
    if (!target) {
        for (const auto& [g, val] : bindings)
            if (val.alphabet()) {
                target = val.alphabet();
                break;
            }
        if (!target)
            target = alph_;
    }
    // diff_x iterates of each binding, filled on demand
    std::map<int, std::vector<DiffPoly>> derivs;
    auto binding_jet = [&](int gen, int order) -> const DiffPoly& {
        auto& chain = derivs[gen];
        if (chain.empty())
            chain.push_back(bindings.at(gen));
        while (static_cast<int>(chain.size()) <= order)
            chain.push_back(chain.back().diff_x());
        return chain[static_cast<size_t>(order)];
    };

    DiffPoly acc = zero(target);
    for (const auto& t : terms_) {
        DiffPoly term = constant(target, t.coeff);
        MonoExps passthrough;
        for (const auto& [v, e2] : t.exps) {
            if (bindings.count(v.gen)) {
                const DiffPoly& val = binding_jet(v.gen, v.order);
                DiffPoly factor = (e2 > 0 && e2 % 2 == 0)
                                      ? val.pow(static_cast<unsigned>(e2 / 2))
                                      : val.mono_pow(e2, 2);
                term = term * factor;
            } else {
                int g = alph_ ? target->require(alph_->spec(v.gen).name) : v.gen;
                passthrough.emplace_back(JetVar{g, v.order}, e2);
            }
        }
        if (!passthrough.empty())
            term = term * monomial(target, Rational(1), std::move(passthrough));
        acc = acc + term;
    }
    return acc;
}

DiffPoly DiffPoly::mono_root(int r) const {
    if (r <= 0)
        throw Error("mono_root: root index must be positive");
    if (r == 1)
        return *this;
    if (terms_.size() != 1)
        throw NotAMonomialError("mono_root requires a single monomial, got " +
                                std::to_string(terms_.size()) + " terms");
    const DiffMono& t = terms_[0];
    if (r % 2 == 0 && t.coeff < 0)
        throw NotAPerfectPowerError("even root of a negative monomial");
    // coefficient root
    Rational c = t.coeff;
    bool neg = c < 0;
    if (neg)
        c = -c;
    mpz_class rn, rd;
    if (!mpz_root(rn.get_mpz_t(), c.get_num().get_mpz_t(), static_cast<unsigned long>(r)) ||
        !mpz_root(rd.get_mpz_t(), c.get_den().get_mpz_t(), static_cast<unsigned long>(r)))
        throw NotAPerfectPowerError("coefficient " + to_string(t.coeff) +
                                    " has no exact " + std::to_string(r) + "-th root");
    Rational cr(rn, rd);
    cr.canonicalize();
    if (neg)
        cr = -cr;
    MonoExps exps;
    for (const auto& [v, e2] : t.exps) {
        if (e2 % r != 0)
            throw NotAPerfectPowerError("exponent not divisible by the root index");
        exps.emplace_back(v, e2 / r);
    }
    try {
        return monomial(alph_, std::move(cr), std::move(exps));
    } catch (const ExponentConstraintError& e) {
        throw NotAPerfectPowerError(std::string("root leaves the ring: ") + e.what());
    }
}

DiffPoly DiffPoly::mono_pow(long num, long den) const {
    if (den != 1 && den != 2)
        throw Error("mono_pow: denominator must be 1 or 2");
    if (num == 0)
        return constant(alph_, 1);
    if (den == 2 && num % 2 == 0)
        return mono_pow(num / 2, 1);
    if (den == 1 && num > 0)
        return pow(static_cast<unsigned>(num));
    if (terms_.size() != 1)
        throw NotAMonomialError("fractional or negative power of a non-monomial");
    const DiffMono& t = terms_[0];
    Rational c = rational_pow(t.coeff, num, den);
    MonoExps exps;
    for (const auto& [v, e2] : t.exps) {
        long e = static_cast<long>(e2) * num;
        if (e % den != 0)
            throw NotAPerfectPowerError("fractional power leaves the exponent lattice");
        exps.emplace_back(v, static_cast<std::int32_t>(e / den));
    }
    return monomial(alph_, std::move(c), std::move(exps));
}

double DiffPoly::eval(const std::function<double(JetVar)>& value_of) const {
    double sum = 0.0;
    for (const auto& t : terms_) {
        double prod = to_double(t.coeff);
        for (const auto& [v, e2] : t.exps) {
            double base = value_of(v);
            if ((e2 < 0 || e2 % 2 != 0) && base <= 0.0)
                throw DomainError("non-positive base for fractional or negative power");
            prod *= std::pow(base, static_cast<double>(e2) / 2.0);
        }
        sum += prod;
    }
    return sum;
}

bool is_total_derivative(const DiffPoly& p, int gen) {
    return p.euler(gen).is_zero();
}

bool is_total_derivative(const DiffPoly& p) {
    for (int g : p.generators_present())
        if (!p.euler(g).is_zero())
            return false;
    return true;
}

} // namespace dymforge
