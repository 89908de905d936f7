#include "laurent.hpp"

#include "expr_io.hpp"

#include <json.hpp>

namespace dymforge {

void LaurentSeries::validate() {
    if (floor_ && *floor_ > top_)
        throw EmptyWindowError("laurent window [" + std::to_string(*floor_) + ", " +
                               std::to_string(top_) + "] is empty");
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        if (it->first > top_ || (floor_ && it->first < *floor_))
            throw Error("laurent coefficient at degree " + std::to_string(it->first) +
                        " outside window");
        if (it->second.is_zero()) {
            it = coeffs_.erase(it);
            continue;
        }
        if (!alph_ && it->second.alphabet())
            alph_ = it->second.alphabet();
        ++it;
    }
}

LaurentSeries LaurentSeries::zero(AlphabetPtr alph, std::optional<int> floor, int top) {
    LaurentSeries s;
    s.alph_ = std::move(alph);
    s.top_ = top;
    s.floor_ = floor;
    s.validate();
    return s;
}

LaurentSeries LaurentSeries::from_coeffs(AlphabetPtr alph, std::map<int, DiffPoly> coeffs,
                                         int top, std::optional<int> floor) {
    LaurentSeries s;
    s.alph_ = std::move(alph);
    s.coeffs_ = std::move(coeffs);
    s.top_ = top;
    s.floor_ = floor;
    s.validate();
    return s;
}

LaurentSeries LaurentSeries::monomial_z(DiffPoly coeff, int deg) {
    LaurentSeries s;
    s.alph_ = coeff.alphabet();
    s.top_ = deg;
    if (!coeff.is_zero())
        s.coeffs_.emplace(deg, std::move(coeff));
    return s;
}

LaurentSeries LaurentSeries::z_pow(AlphabetPtr alph, int deg) {
    return monomial_z(DiffPoly::constant(std::move(alph), Rational(1)), deg);
}

DiffPoly LaurentSeries::coeff_at(int d) const {
    if (!known_at(d))
        throw BelowPrecisionError("coefficient at degree " + std::to_string(d) +
                                  " is below the precision floor " +
                                  std::to_string(*floor_));
    auto it = coeffs_.find(d);
    return it != coeffs_.end() ? it->second : DiffPoly::zero(alph_);
}

bool LaurentSeries::is_even() const {
    for (const auto& [d, c] : coeffs_)
        if (d % 2 != 0)
            return false;
    return true;
}

LaurentSeries LaurentSeries::operator-() const {
    LaurentSeries s(*this);
    for (auto& [d, c] : s.coeffs_)
        c = -c;
    return s;
}

LaurentSeries LaurentSeries::operator+(const LaurentSeries& rhs) const {
    LaurentSeries s;
    s.alph_ = alph_ ? alph_ : rhs.alph_;
    s.top_ = std::max(top_, rhs.top_);
    if (floor_ && rhs.floor_)
        s.floor_ = std::max(*floor_, *rhs.floor_);
    else if (floor_)
        s.floor_ = floor_;
    else
        s.floor_ = rhs.floor_;
    for (const auto& [d, c] : coeffs_)
        if (s.known_at(d))
            s.coeffs_[d] = c;
    for (const auto& [d, c] : rhs.coeffs_) {
        if (!s.known_at(d))
            continue;
        auto it = s.coeffs_.find(d);
        if (it == s.coeffs_.end())
            s.coeffs_[d] = c;
        else
            it->second = it->second + c;
    }
    s.validate();
    return s;
}

LaurentSeries LaurentSeries::operator-(const LaurentSeries& rhs) const {
    return *this + (-rhs);
}

LaurentSeries LaurentSeries::operator*(const LaurentSeries& rhs) const {
    LaurentSeries s;
    s.alph_ = alph_ ? alph_ : rhs.alph_;
    s.top_ = top_ + rhs.top_;
    if (floor_ && rhs.floor_)
        s.floor_ = std::max(*floor_ + rhs.top_, *rhs.floor_ + top_);
    else if (floor_)
        s.floor_ = *floor_ + rhs.top_;
    else if (rhs.floor_)
        s.floor_ = *rhs.floor_ + top_;
    for (const auto& [da, ca] : coeffs_) {
        for (const auto& [db, cb] : rhs.coeffs_) {
            const int d = da + db;
            if (!s.known_at(d))
                continue;
            DiffPoly prod = ca * cb;
            auto it = s.coeffs_.find(d);
            if (it == s.coeffs_.end())
                s.coeffs_.emplace(d, std::move(prod));
            else
                it->second = it->second + prod;
        }
    }
    s.validate();
    return s;
}

bool LaurentSeries::operator==(const LaurentSeries& rhs) const {
    return top_ == rhs.top_ && floor_ == rhs.floor_ && coeffs_ == rhs.coeffs_;
}

LaurentSeries LaurentSeries::scale(const Rational& c) const {
    LaurentSeries s(*this);
    if (c == 0) {
        s.coeffs_.clear();
        return s;
    }
    for (auto& [d, p] : s.coeffs_)
        p = p.scale(c);
    return s;
}

LaurentSeries LaurentSeries::times(const DiffPoly& p) const {
    return *this * monomial_z(p, 0);
}

LaurentSeries LaurentSeries::shift(int d) const {
    LaurentSeries s;
    s.alph_ = alph_;
    s.top_ = top_ + d;
    if (floor_)
        s.floor_ = *floor_ + d;
    for (const auto& [deg, c] : coeffs_)
        s.coeffs_.emplace(deg + d, c);
    return s;
}

LaurentSeries LaurentSeries::with_floor(int f) const {
    if (floor_ && *floor_ >= f)
        return *this;
    LaurentSeries s;
    s.alph_ = alph_;
    s.top_ = top_;
    s.floor_ = f;
    for (const auto& [d, c] : coeffs_)
        if (d >= f)
            s.coeffs_.emplace(d, c);
    s.validate();
    return s;
}

LaurentSeries LaurentSeries::with_top(int new_top) const {
    LaurentSeries s;
    s.alph_ = alph_;
    s.top_ = new_top;
    s.floor_ = floor_;
    for (const auto& [d, c] : coeffs_)
        if (d <= new_top)
            s.coeffs_.emplace(d, c);
    s.validate();
    return s;
}

LaurentSeries LaurentSeries::diff_x() const {
    LaurentSeries s;
    s.alph_ = alph_;
    s.top_ = top_;
    s.floor_ = floor_;
    for (const auto& [d, c] : coeffs_) {
        DiffPoly dc = c.diff_x();
        if (!dc.is_zero())
            s.coeffs_.emplace(d, std::move(dc));
    }
    return s;
}

LaurentSeries LaurentSeries::project_plus() const {
    if (floor_ && *floor_ > 0)
        throw BelowPrecisionError("project_plus needs knowledge down to degree 0, floor is " +
                                  std::to_string(*floor_));
    LaurentSeries s;
    s.alph_ = alph_;
    s.top_ = std::max(top_, 0);
    for (const auto& [d, c] : coeffs_)
        if (d >= 0)
            s.coeffs_.emplace(d, c);
    return s;
}

LaurentSeries LaurentSeries::project_minus() const {
    if (floor_ && *floor_ > -1)
        throw BelowPrecisionError("project_minus with no known negative degrees");
    LaurentSeries s;
    s.alph_ = alph_;
    s.top_ = std::min(top_, -1);
    s.floor_ = floor_;
    for (const auto& [d, c] : coeffs_)
        if (d < 0)
            s.coeffs_.emplace(d, c);
    s.validate();
    return s;
}

bool agree_within(const LaurentSeries& a, const LaurentSeries& b) {
    int lo = std::min(a.top(), b.top());
    if (a.floor())
        lo = std::max(lo, *a.floor() - 1);
    if (b.floor())
        lo = std::max(lo, *b.floor() - 1);
    const int hi = std::max(a.top(), b.top());
    for (int d = lo + 1; d <= hi; ++d) {
        DiffPoly ca = d <= a.top() ? a.coeff_at(d) : DiffPoly::zero(a.alphabet());
        DiffPoly cb = d <= b.top() ? b.coeff_at(d) : DiffPoly::zero(b.alphabet());
        if (!(ca == cb))
            return false;
    }
    return true;
}

std::string LaurentSeries::to_json() const {
    nlohmann::json j;
    j["var"] = "z";
    j["top"] = top_;
    if (floor_)
        j["floor"] = *floor_;
    else
        j["floor"] = nullptr;
    j["terms"] = nlohmann::json::array();
    for (const auto& [d, c] : coeffs_)
        j["terms"].push_back({{"deg", d}, {"coeff", render_text(c)}});
    return j.dump();
}

LaurentSeries LaurentSeries::from_json(const std::string& text, AlphabetPtr alph) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("laurent json: ") + e.what());
    }
    LaurentSeries s;
    s.alph_ = alph;
    try {
        s.top_ = j.at("top").get<int>();
        if (!j.at("floor").is_null())
            s.floor_ = j.at("floor").get<int>();
        for (const auto& t : j.at("terms"))
            s.coeffs_[t.at("deg").get<int>()] =
                parse_expr(t.at("coeff").get<std::string>(), alph);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("laurent json: ") + e.what());
    }
    s.validate();
    return s;
}

} // namespace dymforge
