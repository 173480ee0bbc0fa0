#pragma once

// Homeomorphisms of the circle RP^1 built as composition chains of Moebius
// maps, power maps and monotone splines.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "projline.hpp"

namespace torus_planes {

/// x -> sgn(x) |x|^p, fixing 0 and infinity.
struct PowerMap {
    double exponent;

    explicit PowerMap(double p) : exponent(p) {
        if (!(p > 0.0) || !std::isfinite(p))
            throw GeometryError(ErrorCode::InvalidHomeomorphism, "power map exponent must be positive");
    }

    ProjPoint apply(const ProjPoint& x) const {
        const double h0 = x.h0(), h1 = x.h1();
        if (h1 == 0.0) return ProjPoint::infinity();
        if (h0 == 0.0) return ProjPoint::zero();
        // evaluate in whichever affine chart keeps the ratio bounded by 1
        if (std::abs(h0) <= h1) return ProjPoint(std::copysign(std::pow(std::abs(h0 / h1), exponent), h0), 1.0);
        return ProjPoint(std::copysign(1.0, h0), std::pow(std::abs(h1 / h0), exponent));
    }

    PowerMap inverse() const { return PowerMap(1.0 / exponent); }
};

/// Piecewise-linear homeomorphism in the angle chart through strictly
/// cyclically monotone knots; orientation-preserving.
class MonotoneSpline {
public:
    /// Knots (x_i, y_i) in any order; x must be distinct and the y values
    /// must increase cyclically with winding number one.
    explicit MonotoneSpline(const std::vector<std::pair<ProjPoint, ProjPoint>>& knots) {
        if (knots.size() < 3)
            throw GeometryError(ErrorCode::InvalidHomeomorphism, "spline needs at least three knots");
        std::vector<std::pair<double, double>> c;
        c.reserve(knots.size());
        for (const auto& [x, y] : knots) c.emplace_back(x.chart(), y.chart());
        std::sort(c.begin(), c.end());
        const std::size_t n = c.size();
        auto data = std::make_shared<Data>();
        data->xs.push_back(c[0].first);
        data->ys.push_back(c[0].second);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& cur = c[i];
            const auto& nxt = c[(i + 1) % n];
            double dx = nxt.first - cur.first;
            if (i + 1 == n) dx += 1.0;
            double dy = nxt.second - cur.second;
            while (dy <= 0.0) dy += 1.0;
            while (dy > 1.0) dy -= 1.0;
            if (!(dx > 1e-12))
                throw GeometryError(ErrorCode::InvalidHomeomorphism, "spline knots have repeated x");
            if (!(dy > 1e-12) || dy >= 1.0 - 1e-12)
                throw GeometryError(ErrorCode::InvalidHomeomorphism, "spline knots are not strictly monotone");
            total += dy;
            data->xs.push_back(data->xs.back() + dx);
            data->ys.push_back(data->ys.back() + dy);
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw GeometryError(ErrorCode::InvalidHomeomorphism, "spline knots do not wind exactly once");
        data->ys.back() = data->ys.front() + 1.0;
        data->xs.back() = data->xs.front() + 1.0;
        data_ = std::move(data);
    }

    ProjPoint apply(const ProjPoint& x) const { return ProjPoint::from_chart(evaluate(x.chart())); }

    /// Swapping knot coordinates gives the exact inverse of a piecewise-linear map.
    MonotoneSpline inverse() const {
        auto data = std::make_shared<Data>(*data_);
        std::swap(data->xs, data->ys);
        // renormalize so the first lifted x lies in [0, 1)
        const double shift = std::floor(data->xs.front());
        for (auto& v : data->xs) v -= shift;
        return MonotoneSpline(std::move(data));
    }

    std::size_t knot_count() const { return data_->xs.size() - 1; }

private:
    struct Data {
        std::vector<double> xs;  // lifted chart abscissae, xs.back() = xs.front() + 1
        std::vector<double> ys;  // lifted chart ordinates, ys.back() = ys.front() + 1
    };

    explicit MonotoneSpline(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

    double evaluate(double s) const {
        const auto& xs = data_->xs;
        const auto& ys = data_->ys;
        while (s < xs.front()) s += 1.0;
        while (s >= xs.back()) s -= 1.0;
        auto it = std::upper_bound(xs.begin(), xs.end(), s);
        const std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - xs.begin() - 1, 0));
        const double w = (s - xs[i]) / (xs[i + 1] - xs[i]);
        double t = ys[i] + w * (ys[i + 1] - ys[i]);
        t -= std::floor(t);
        return t;
    }

    std::shared_ptr<const Data> data_;
};

using HomeoAtom = std::variant<MobiusMap, PowerMap, MonotoneSpline>;

inline int atom_orientation(const HomeoAtom& atom) {
    if (const auto* m = std::get_if<MobiusMap>(&atom)) return m->orientation();
    return 1;
}

inline ProjPoint atom_apply(const HomeoAtom& atom, const ProjPoint& x) {
    return std::visit([&](const auto& a) { return a.apply(x); }, atom);
}

inline HomeoAtom atom_inverse(const HomeoAtom& atom) {
    return std::visit([](const auto& a) -> HomeoAtom { return a.inverse(); }, atom);
}

/// Chain of atoms evaluated left to right: chain {a, b} is x -> b(a(x)).
class CircleHomeo {
public:
    CircleHomeo() = default;
    explicit CircleHomeo(std::vector<HomeoAtom> chain) : chain_(std::move(chain)) {
        for (const auto& a : chain_) orientation_ *= atom_orientation(a);
    }
    CircleHomeo(std::initializer_list<HomeoAtom> chain) : CircleHomeo(std::vector<HomeoAtom>(chain)) {}

    static CircleHomeo identity() { return {}; }

    const std::vector<HomeoAtom>& chain() const { return chain_; }
    int orientation() const { return orientation_; }
    bool empty() const { return chain_.empty(); }

    ProjPoint apply(const ProjPoint& x) const {
        ProjPoint y = x;
        for (const auto& a : chain_) y = atom_apply(a, y);
        return y;
    }
    ProjPoint operator()(const ProjPoint& x) const { return apply(x); }

    CircleHomeo inverse() const {
        std::vector<HomeoAtom> inv;
        inv.reserve(chain_.size());
        for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) inv.push_back(atom_inverse(*it));
        return CircleHomeo(std::move(inv));
    }

    /// x -> next(this(x)).
    CircleHomeo then(const CircleHomeo& next) const {
        std::vector<HomeoAtom> c = chain_;
        c.insert(c.end(), next.chain_.begin(), next.chain_.end());
        return CircleHomeo(std::move(c));
    }

private:
    std::vector<HomeoAtom> chain_;
    int orientation_ = 1;
};

inline ProjPoint homeo_apply(const CircleHomeo& h, const ProjPoint& x) { return h.apply(x); }
inline CircleHomeo homeo_inverse(const CircleHomeo& h) { return h.inverse(); }

/// Evenly spaced chart grid of the circle, starting at 0.
inline std::vector<ProjPoint> chart_grid(int n) {
    std::vector<ProjPoint> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pts.push_back(ProjPoint::from_chart(static_cast<double>(i) / n));
    return pts;
}

inline double homeo_sup_distance(const CircleHomeo& h1, const CircleHomeo& h2, int grid_size) {
    if (grid_size < 3) throw GeometryError(ErrorCode::PreconditionViolated, "grid_size must be at least 3");
    double worst = 0.0;
    for (const auto& x : chart_grid(grid_size)) worst = std::max(worst, chordal_distance(h1(x), h2(x)));
    return worst;
}

/// Images of n ordered grid points must advance cyclically in the direction
/// of the chain's orientation and wind exactly once.
inline bool monotone_audit(const CircleHomeo& h, int n = 256) {
    const auto grid = chart_grid(n);
    double total = 0.0;
    double prev = h(grid.front()).chart();
    const double first = prev;
    for (int i = 1; i <= n; ++i) {
        const double cur = i == n ? first : h(grid[static_cast<std::size_t>(i)]).chart();
        double step = (cur - prev) * h.orientation();
        step -= std::floor(step);
        if (step <= 0.0 || step >= 1.0) return false;
        total += step;
        prev = cur;
    }
    return std::abs(total - 1.0) < 1e-6;
}

/// Throws InvalidHomeomorphism if the chain fails the monotonicity audit.
inline CircleHomeo checked_homeo(CircleHomeo h) {
    if (!monotone_audit(h)) throw GeometryError(ErrorCode::InvalidHomeomorphism, "chain is not a circle homeomorphism");
    return h;
}

inline constexpr int kRootScan = 512;
inline constexpr double kRootTol = 1e-11;

/// Chart positions s in [0,1) where the two point-valued functions agree,
/// located by sign changes of the wrapped chart difference on a uniform
/// scan and refined by bisection. Samples that hit zero exactly are kept;
/// tangential contacts between samples are not detected.
inline std::vector<double> chart_crossings(const std::function<ProjPoint(double)>& lhs,
                                           const std::function<ProjPoint(double)>& rhs,
                                           int scan = kRootScan, double tol = kRootTol) {
    auto diff = [&](double s) { return chart_difference(lhs(s), rhs(s)); };
    std::vector<double> roots;
    std::vector<double> vals(static_cast<std::size_t>(scan) + 1);
    for (int i = 0; i <= scan; ++i) vals[static_cast<std::size_t>(i)] = diff(static_cast<double>(i) / scan);
    constexpr double kExact = 1e-14;
    constexpr double kWrap = 0.25;
    for (int i = 0; i < scan; ++i) {
        double lo = static_cast<double>(i) / scan;
        double hi = static_cast<double>(i + 1) / scan;
        double flo = vals[static_cast<std::size_t>(i)];
        const double fhi = vals[static_cast<std::size_t>(i) + 1];
        if (std::abs(flo) < kExact) {
            roots.push_back(lo);
            continue;
        }
        if (std::abs(fhi) < kExact) continue;  // picked up as the next interval's lower end
        if ((flo > 0.0) == (fhi > 0.0)) continue;
        if (std::abs(flo) > kWrap && std::abs(fhi) > kWrap) continue;  // chart seam, not a root
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            const double fm = diff(mid);
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push_back(0.5 * (lo + hi));
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> unique;
    for (double r : roots) {
        if (r >= 1.0) r -= 1.0;
        const bool dup = std::any_of(unique.begin(), unique.end(), [&](double u) {
            const double d = std::abs(u - r);
            return std::min(d, 1.0 - d) < 1e-9;
        });
        if (!dup) unique.push_back(r);
    }
    return unique;
}

/// Solutions x of h1(x) = h2(x), located in the angle chart.
inline std::vector<ProjPoint> homeo_solve_equal(const CircleHomeo& h1, const CircleHomeo& h2,
                                                int scan = kRootScan, double tol = kRootTol) {
    auto l = [&](double s) { return h1(ProjPoint::from_chart(s)); };
    auto r = [&](double s) { return h2(ProjPoint::from_chart(s)); };
    std::vector<ProjPoint> out;
    for (double s : chart_crossings(l, r, scan, tol)) out.push_back(ProjPoint::from_chart(s));
    return out;
}

inline double parse_real(const std::string& text) {
    std::string t = text;
    t.erase(0, t.find_first_not_of(" \t"));
    t.erase(t.find_last_not_of(" \t\r\n") + 1);
    if (t == "inf" || t == "+inf" || t == "-inf" || t == "infinity")
        return std::numeric_limits<double>::infinity();
    auto one = [](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw GeometryError(ErrorCode::ParseError, "not a number: '" + s + "'");
        }
        if (used != s.size()) throw GeometryError(ErrorCode::ParseError, "not a number: '" + s + "'");
        return v;
    };
    if (const auto slash = t.find('/'); slash != std::string::npos)
        return one(t.substr(0, slash)) / one(t.substr(slash + 1));
    return one(t);
}

/// Knot file: one `x y` pair per line in the real chart, `inf` allowed,
/// blank lines and `#` comments ignored.
inline MonotoneSpline parse_knots(std::istream& in) {
    std::vector<std::pair<ProjPoint, ProjPoint>> knots;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string xs, ys, extra;
        if (!(ls >> xs)) continue;
        if (!(ls >> ys) || (ls >> extra))
            throw GeometryError(ErrorCode::ParseError, "knot line " + std::to_string(lineno) + " must hold two values");
        knots.emplace_back(ProjPoint::real(parse_real(xs)), ProjPoint::real(parse_real(ys)));
    }
    return MonotoneSpline(knots);
}

inline MonotoneSpline load_knot_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GeometryError(ErrorCode::ParseError, "cannot open knot file " + path);
    return parse_knots(in);
}

}  // namespace torus_planes
