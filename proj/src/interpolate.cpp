#include "dr/interpolate.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace dr {

nlohmann::json InterpolationCertificate::to_json() const {
    return {{"window_start", window_start},
            {"degree", degree},
            {"nodes", nodes},
            {"validation_nodes", validation_nodes}};
}

nlohmann::json LatticeFitCertificate::to_json() const {
    return {{"design", design}, {"holdout", holdout}, {"degree_bound", degree_bound}};
}

MultiPoly lagrange_interpolate(const std::vector<std::pair<long, Rat>>& points,
                               const std::string& var) {
    if (points.empty()) throw DomainError("lagrange_interpolate: no points");
    std::set<long> seen;
    for (const auto& [x, y] : points)
        if (!seen.insert(x).second)
            throw DomainError("lagrange_interpolate: duplicate node");

    MultiPoly x = MultiPoly::var(var);
    MultiPoly acc;
    for (size_t i = 0; i < points.size(); ++i) {
        MultiPoly basis{points[i].second};
        for (size_t j = 0; j < points.size(); ++j) {
            if (j == i) continue;
            Rat scale = make_rat(Int(1), Int(points[i].first - points[j].first));
            basis = basis * ((x - MultiPoly(Rat(points[j].first))) * scale);
        }
        acc = acc + basis;
    }
    return acc;
}

namespace {

std::vector<long> admissible_nodes(long start, long modulus, size_t count) {
    std::vector<long> nodes;
    for (long v = start + 1; nodes.size() < count; ++v) {
        if (modulus != 0 && std::gcd(v, modulus) != 1) continue;
        nodes.push_back(v);
    }
    return nodes;
}

} // namespace

StableInterpolationResult stable_interpolation(
    const std::function<Rat(long)>& sampler, int degree_hint,
    int validation_count, long start, long coprimality_modulus,
    const std::string& var, const StableInterpolationOptions& opts) {
    if (degree_hint < 0) degree_hint = 0;
    if (validation_count < 1) validation_count = 1;
    if (start < 0) start = 0;

    MultiPoly best;
    int hint = degree_hint;
    long window = start;
    while (true) {
        auto nodes = admissible_nodes(window, coprimality_modulus,
                                      (size_t)hint + 1 + validation_count);
        std::vector<Rat> values(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i) values[i] = sampler(nodes[i]);

        for (int d = 0; d <= hint; ++d) {
            std::vector<std::pair<long, Rat>> pts;
            for (int i = 0; i <= d; ++i) pts.emplace_back(nodes[i], values[i]);
            MultiPoly cand = lagrange_interpolate(pts, var);
            bool ok = true;
            for (int i = d + 1; i <= d + validation_count && ok; ++i)
                ok = cand.evaluate({{var, Rat(nodes[i])}}) == values[i];
            if (ok) {
                InterpolationCertificate cert;
                cert.window_start = window;
                cert.degree = d;
                cert.nodes.assign(nodes.begin(), nodes.begin() + d + 1);
                cert.validation_nodes.assign(nodes.begin() + d + 1,
                                             nodes.begin() + d + 1 + validation_count);
                return {std::move(cand), std::move(cert)};
            }
            best = std::move(cand);
        }
        if (hint < opts.max_degree) {
            hint = std::min(opts.max_degree, 2 * hint + 4);
        } else if (window < opts.max_start) {
            window = std::max<long>(2 * window, 8);
        } else {
            std::ostringstream os;
            os << "not-yet-polynomial: no window of degree <= " << hint
               << " stabilized below start " << window
               << " (degree_hint or start too small)";
            throw NotYetPolynomial(os.str(), std::move(best));
        }
    }
}

std::optional<std::vector<Rat>> solve_linear_system(std::vector<std::vector<Rat>> A,
                                                    std::vector<Rat> b) {
    size_t n = A.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && A[piv][col] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        Rat inv = A[col][col];
        for (size_t r = col + 1; r < n; ++r) {
            if (A[r][col] == 0) continue;
            Rat f = A[r][col] / inv;
            for (size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<Rat> x(n);
    for (size_t i = n; i-- > 0;) {
        Rat acc = b[i];
        for (size_t c = i + 1; c < n; ++c) acc -= A[i][c] * x[c];
        x[i] = acc / A[i][i];
    }
    return x;
}

namespace {

// All exponent tuples of the given arity with total degree <= bound,
// in a fixed deterministic order.
void monomials_up_to(int arity, int bound, std::vector<int>& cur,
                     std::vector<std::vector<int>>& out) {
    if ((int)cur.size() == arity) {
        out.push_back(cur);
        return;
    }
    int used = std::accumulate(cur.begin(), cur.end(), 0);
    for (int e = 0; e <= bound - used; ++e) {
        cur.push_back(e);
        monomials_up_to(arity, bound, cur, out);
        cur.pop_back();
    }
}

// Deterministic enumeration of Z^rank by max-norm shells, lex within a shell.
std::vector<std::vector<long>> integer_shell_points(int rank, size_t count,
                                                    const std::set<std::vector<long>>& skip) {
    std::vector<std::vector<long>> out;
    for (long norm = 0; out.size() < count; ++norm) {
        std::vector<long> p(rank, -norm);
        while (true) {
            long mx = 0;
            for (long v : p) mx = std::max(mx, std::labs(v));
            if (mx == norm && !skip.count(p)) {
                out.push_back(p);
                if (out.size() == count) break;
            }
            int i = rank - 1;
            while (i >= 0 && p[i] == norm) p[i--] = -norm;
            if (i < 0) break;
            ++p[i];
        }
    }
    return out;
}

} // namespace

LatticeFitResult fit_poly_on_lattice(
    const std::function<Rat(const std::vector<long>&)>& sampler,
    const std::vector<std::string>& coord_vars, int degree_bound,
    int holdout_count, long scale) {
    int rank = (int)coord_vars.size();
    if (rank == 0) {
        // rank-0 lattice: the single point 0
        LatticeFitResult res;
        res.poly = MultiPoly(sampler({}));
        res.certificate.degree_bound = degree_bound;
        res.certificate.design = {{}};
        return res;
    }
    std::vector<std::vector<int>> monos;
    {
        std::vector<int> cur;
        monomials_up_to(rank, degree_bound, cur, monos);
    }
    // principal lattice of total degree degree_bound: unisolvent design
    std::vector<std::vector<long>> design;
    std::set<std::vector<long>> design_set;
    for (const auto& m : monos) {
        std::vector<long> p(m.begin(), m.end());
        for (auto& v : p) v *= scale;
        design.push_back(p);
        design_set.insert(p);
    }
    size_t M = monos.size();
    std::vector<std::vector<Rat>> mat(M, std::vector<Rat>(M));
    std::vector<Rat> rhs(M);
    for (size_t i = 0; i < M; ++i) {
        for (size_t j = 0; j < M; ++j) {
            Rat v(1);
            for (int kk = 0; kk < rank; ++kk)
                if (monos[j][kk])
                    v *= rat_pow(Rat(design[i][kk]), (unsigned long)monos[j][kk]);
            mat[i][j] = v;
        }
        rhs[i] = sampler(design[i]);
    }
    auto sol = solve_linear_system(std::move(mat), std::move(rhs));
    if (!sol) throw CertificationError("fit_poly_on_lattice: singular design");

    std::vector<std::string> sorted_vars = coord_vars;
    std::sort(sorted_vars.begin(), sorted_vars.end());
    MultiPoly poly = MultiPoly::zero(sorted_vars);
    for (size_t j = 0; j < M; ++j) {
        Exponents e(rank, 0);
        for (int kk = 0; kk < rank; ++kk) {
            int idx = poly.var_index(coord_vars[kk]);
            e[idx] = monos[j][kk];
        }
        poly.add_term(e, (*sol)[j]);
    }

    auto holdout_raw = integer_shell_points(rank, (size_t)holdout_count +
                                            design_set.size(), {});
    std::vector<std::vector<long>> holdout;
    for (auto& p : holdout_raw) {
        std::vector<long> q = p;
        for (auto& v : q) v *= scale;
        if (design_set.count(q)) continue;
        holdout.push_back(q);
        if ((int)holdout.size() == holdout_count) break;
    }
    for (const auto& p : holdout) {
        std::map<std::string, Rat> point;
        for (int kk = 0; kk < rank; ++kk) point[coord_vars[kk]] = Rat(p[kk]);
        if (poly.evaluate(point) != sampler(p))
            throw CertificationError("fit_poly_on_lattice: not polynomial at this degree");
    }
    LatticeFitResult res;
    res.poly = std::move(poly);
    res.certificate.design = std::move(design);
    res.certificate.holdout = std::move(holdout);
    res.certificate.degree_bound = degree_bound;
    return res;
}

MultiPoly faulhaber(int d, const std::string& result_var) {
    if (d < 0) throw DomainError("faulhaber: negative power");
    std::vector<std::pair<long, Rat>> pts;
    Rat acc(0);
    pts.emplace_back(0, acc);
    for (long a = 1; a <= d + 1; ++a) {
        acc += rat_pow(Rat(a), (unsigned long)d);
        pts.emplace_back(a, acc);
    }
    return lagrange_interpolate(pts, result_var);
}

MultiPoly sum_range_closed_form(const MultiPoly& P, const std::string& sum_var,
                                const std::string& result_var) {
    MultiPoly out;
    for (const auto& [d, coeff] : P.coeffs_in(sum_var))
        out = out + coeff * faulhaber(d, result_var);
    return out.compacted();
}

} // namespace dr
