#include "dr/multipoly.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace dr {

bool GradedLexDesc::operator()(const Exponents& a, const Exponents& b) const {
    long da = std::accumulate(a.begin(), a.end(), 0L);
    long db = std::accumulate(b.begin(), b.end(), 0L);
    if (da != db) return da > db;
    return a > b;
}

MultiPoly::MultiPoly(const Rat& c) {
    if (c != 0) terms_.emplace(Exponents{}, c);
}

MultiPoly MultiPoly::zero(std::vector<std::string> vars) {
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    MultiPoly p;
    p.vars_ = std::move(vars);
    return p;
}

MultiPoly MultiPoly::var(const std::string& name, int exp) {
    MultiPoly p;
    p.vars_ = {name};
    if (exp < 0) throw DomainError("negative exponent");
    p.terms_.emplace(Exponents{exp}, Rat(1));
    return p;
}

bool MultiPoly::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() != 1) return false;
    const Exponents& e = terms_.begin()->first;
    return std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
}

Rat MultiPoly::constant_value() const {
    Exponents zero(vars_.size(), 0);
    auto it = terms_.find(zero);
    return it == terms_.end() ? Rat(0) : it->second;
}

int MultiPoly::total_degree() const {
    if (terms_.empty()) return -1;
    // descending graded order: first term has maximal total degree
    const Exponents& e = terms_.begin()->first;
    return (int)std::accumulate(e.begin(), e.end(), 0L);
}

int MultiPoly::var_index(const std::string& var) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
    if (it == vars_.end() || *it != var) return -1;
    return (int)(it - vars_.begin());
}

int MultiPoly::degree_in(const std::string& var) const {
    int idx = var_index(var);
    if (idx < 0) return terms_.empty() ? -1 : 0;
    int d = terms_.empty() ? -1 : 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[idx]);
    return d;
}

void MultiPoly::add_term(const Exponents& e, const Rat& c) {
    if (e.size() != vars_.size()) throw DomainError("exponent arity mismatch");
    for (int x : e)
        if (x < 0) throw DomainError("negative exponent");
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Rat MultiPoly::coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rat(0) : it->second;
}

MultiPoly MultiPoly::aligned_to(const std::vector<std::string>& vars) const {
    if (vars == vars_) return *this;
    MultiPoly out = MultiPoly::zero(vars);
    std::vector<int> pos(vars_.size());
    for (size_t i = 0; i < vars_.size(); ++i) {
        pos[i] = out.var_index(vars_[i]);
        if (pos[i] < 0) throw DomainError("aligned_to: missing variable " + vars_[i]);
    }
    for (const auto& [e, c] : terms_) {
        Exponents ne(out.vars_.size(), 0);
        for (size_t i = 0; i < e.size(); ++i) ne[pos[i]] = e[i];
        out.terms_.emplace(std::move(ne), c);
    }
    return out;
}

MultiPoly MultiPoly::renamed(const std::map<std::string, std::string>& renames) const {
    std::vector<std::string> nv;
    for (const auto& v : vars_) {
        auto it = renames.find(v);
        nv.push_back(it == renames.end() ? v : it->second);
    }
    MultiPoly out = MultiPoly::zero(nv);
    for (const auto& [e, c] : terms_) {
        Exponents ne(out.vars_.size(), 0);
        for (size_t i = 0; i < e.size(); ++i) {
            int idx = out.var_index(nv[i]);
            ne[idx] += e[i];
        }
        out.add_term(ne, c);
    }
    return out;
}

MultiPoly MultiPoly::compacted() const {
    std::vector<char> used(vars_.size(), 0);
    for (const auto& [e, c] : terms_)
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] > 0) used[i] = 1;
    std::vector<std::string> nv;
    for (size_t i = 0; i < vars_.size(); ++i)
        if (used[i]) nv.push_back(vars_[i]);
    MultiPoly out = MultiPoly::zero(nv);
    for (const auto& [e, c] : terms_) {
        Exponents ne;
        for (size_t i = 0; i < e.size(); ++i)
            if (used[i]) ne.push_back(e[i]);
        out.terms_.emplace(std::move(ne), c);
    }
    return out;
}

static std::vector<std::string> var_union(const std::vector<std::string>& a,
                                          const std::vector<std::string>& b) {
    std::vector<std::string> u;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
    return u;
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly out = *this;
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
    auto vars = var_union(vars_, o.vars_);
    MultiPoly a = aligned_to(vars), b = o.aligned_to(vars);
    for (const auto& [e, c] : b.terms_) a.add_term(e, c);
    return a;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const { return *this + (-o); }

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
    auto vars = var_union(vars_, o.vars_);
    MultiPoly a = aligned_to(vars), b = o.aligned_to(vars);
    MultiPoly out = MultiPoly::zero(vars);
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) {
            Exponents e(vars.size());
            for (size_t i = 0; i < vars.size(); ++i) e[i] = ea[i] + eb[i];
            out.add_term(e, ca * cb);
        }
    return out;
}

MultiPoly MultiPoly::operator*(const Rat& c) const {
    if (c == 0) return MultiPoly::zero(vars_);
    MultiPoly out = *this;
    for (auto& [e, coeff] : out.terms_) coeff *= c;
    return out;
}

MultiPoly MultiPoly::pow(unsigned e) const {
    MultiPoly out(Rat(1));
    MultiPoly base = *this;
    while (e) {
        if (e & 1) out = out * base;
        base = base * base;
        e >>= 1;
    }
    return out;
}

bool MultiPoly::operator==(const MultiPoly& o) const {
    auto vars = var_union(vars_, o.vars_);
    return aligned_to(vars).terms_ == o.aligned_to(vars).terms_;
}

Rat MultiPoly::evaluate(const std::map<std::string, Rat>& point) const {
    std::vector<Rat> vals(vars_.size());
    for (size_t i = 0; i < vars_.size(); ++i) {
        auto it = point.find(vars_[i]);
        if (it == point.end())
            throw DomainError("evaluate: missing value for variable " + vars_[i]);
        vals[i] = it->second;
    }
    Rat acc(0);
    for (const auto& [e, c] : terms_) {
        Rat t = c;
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i]) t *= rat_pow(vals[i], (unsigned long)e[i]);
        acc += t;
    }
    return acc;
}

MultiPoly MultiPoly::substitute(const std::map<std::string, MultiPoly>& images) const {
    for (const auto& v : vars_)
        if (!images.count(v))
            throw DomainError("substitute: missing image for variable " + v);
    return substitute_or_keep(images);
}

MultiPoly MultiPoly::substitute_or_keep(const std::map<std::string, MultiPoly>& images) const {
    std::vector<MultiPoly> img(vars_.size());
    for (size_t i = 0; i < vars_.size(); ++i) {
        auto it = images.find(vars_[i]);
        img[i] = it == images.end() ? MultiPoly::var(vars_[i]) : it->second;
    }
    MultiPoly acc;
    for (const auto& [e, c] : terms_) {
        MultiPoly t{c};
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i]) t = t * img[i].pow((unsigned)e[i]);
        acc = acc + t;
    }
    return acc;
}

std::map<int, MultiPoly> MultiPoly::coeffs_in(const std::string& var) const {
    std::map<int, MultiPoly> out;
    int idx = var_index(var);
    if (idx < 0) {
        if (!terms_.empty()) out.emplace(0, *this);
        return out;
    }
    for (const auto& [e, c] : terms_) {
        Exponents ne = e;
        int d = ne[idx];
        ne[idx] = 0;
        auto [it, inserted] = out.try_emplace(d, MultiPoly::zero(vars_));
        it->second.add_term(ne, c);
    }
    return out;
}

std::string MultiPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << c;
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            os << "*" << vars_[i];
            if (e[i] > 1) os << "^" << e[i];
        }
    }
    return os.str();
}

nlohmann::json MultiPoly::to_json() const {
    nlohmann::json j;
    j["vars"] = vars_;
    j["terms"] = nlohmann::json::array();
    for (const auto& [e, c] : terms_) {
        j["terms"].push_back({{"exp", e},
                              {"num", rat_num(c).get_str()},
                              {"den", rat_den(c).get_str()}});
    }
    return j;
}

MultiPoly MultiPoly::from_json(const nlohmann::json& j) {
    std::vector<std::string> vars = j.at("vars").get<std::vector<std::string>>();
    std::vector<std::string> sorted = vars;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw DomainError("polynomial JSON has duplicate variables");
    MultiPoly out = MultiPoly::zero(sorted);
    for (const auto& t : j.at("terms")) {
        Exponents e = t.at("exp").get<Exponents>();
        if (e.size() != vars.size())
            throw DomainError("polynomial JSON exponent arity mismatch");
        Rat c = make_rat(Int(t.at("num").get<std::string>()),
                         Int(t.at("den").get<std::string>()));
        // incoming exponents follow the file's variable order
        Exponents ne(sorted.size(), 0);
        for (size_t i = 0; i < vars.size(); ++i)
            ne[out.var_index(vars[i])] = e[i];
        out.add_term(ne, c);
    }
    return out;
}

} // namespace dr
