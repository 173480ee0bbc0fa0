#pragma once

// Toroidal circle plane models on the torus RP^1 x RP^1: the classical
// plane (graphs of all of PGL(2,R)) and half-classical planes M(f, g).

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "homeo.hpp"
#include "projline.hpp"

namespace torus_planes {

enum class ParallelRelation { None, Plus, Minus, Both };

inline const char* to_string(ParallelRelation r) {
    switch (r) {
        case ParallelRelation::None: return "none";
        case ParallelRelation::Plus: return "plus";
        case ParallelRelation::Minus: return "minus";
        case ParallelRelation::Both: return "both";
    }
    return "none";
}

/// Plus iff the x coordinates agree (same vertical), minus iff the y
/// coordinates agree (same horizontal), both iff p = q.
inline ParallelRelation parallel(const TorusPoint& p, const TorusPoint& q, double tol = kDefaultEqualityTol) {
    const bool plus = approx_equal(p.x, q.x, tol);
    const bool minus = approx_equal(p.y, q.y, tol);
    if (plus && minus) return ParallelRelation::Both;
    if (plus) return ParallelRelation::Plus;
    if (minus) return ParallelRelation::Minus;
    return ParallelRelation::None;
}

enum class ParallelKind { Plus, Minus };

inline const char* to_string(ParallelKind k) { return k == ParallelKind::Plus ? "plus" : "minus"; }

/// Plus class {coordinate} x S^1 or minus class S^1 x {coordinate}.
struct ParallelClass {
    ParallelKind kind;
    ProjPoint coordinate;

    bool contains(const TorusPoint& p, double tol = kDefaultEqualityTol) const {
        return approx_equal(kind == ParallelKind::Plus ? p.x : p.y, coordinate, tol);
    }
};

enum class CircleTag { ClassicalPGL, HalfClassicalPSL, HalfClassicalTwisted };

inline const char* to_string(CircleTag t) {
    switch (t) {
        case CircleTag::ClassicalPGL: return "classical-PGL";
        case CircleTag::HalfClassicalPSL: return "half-classical-PSL";
        case CircleTag::HalfClassicalTwisted: return "half-classical-twisted";
    }
    return "unknown";
}

/// Graph {(x, graph(x))} of a circle homeomorphism. `map` is the defining
/// Moebius element: the whole graph for classical and PSL circles, the
/// middle factor nu of g^-1 nu f for twisted ones.
struct Circle {
    CircleTag tag;
    MobiusMap map;
    CircleHomeo graph;

    ProjPoint operator()(const ProjPoint& x) const { return graph(x); }

    double residual(const TorusPoint& p) const { return chordal_distance(graph(p.x), p.y); }

    bool contains(const TorusPoint& p, double tol = kDefaultEqualityTol) const { return residual(p) < tol; }

    TorusPoint point_at(const ProjPoint& x) const { return {x, graph(x)}; }
};

enum class PlaneFamily { Classical, HalfClassical };

inline constexpr double kMembershipTol = 1e-9;
inline constexpr double kUniquenessTol = 1e-7;

/// Circle homeomorphism together with the literal that produced it.
struct HomeoSpec {
    CircleHomeo homeo;
    std::string literal = "id";
};

class PlaneModel {
public:
    static PlaneModel classical(double tolerance = kMembershipTol) {
        PlaneModel m;
        m.family_ = PlaneFamily::Classical;
        m.tolerance_ = tolerance;
        return m;
    }

    /// M(f, g); f and g must be orientation-preserving.
    static PlaneModel half_classical(const HomeoSpec& f, const HomeoSpec& g = {}, double tolerance = kMembershipTol) {
        if (f.homeo.orientation() != 1 || g.homeo.orientation() != 1)
            throw GeometryError(ErrorCode::InvalidHomeomorphism, "f and g must preserve orientation");
        PlaneModel m;
        m.family_ = PlaneFamily::HalfClassical;
        m.f_ = f;
        m.g_ = g;
        m.f_inv_ = f.homeo.inverse();
        m.g_inv_ = g.homeo.inverse();
        m.tolerance_ = tolerance;
        return m;
    }

    /// Test hook: a plane whose twisted branch is built from det > 0 maps.
    /// Such a plane violates joining and serves as a negative control.
    PlaneModel with_corrupted_twisted_branch() const {
        PlaneModel m = *this;
        m.twisted_orientation_ = 1;
        return m;
    }

    PlaneFamily family() const { return family_; }
    bool is_classical() const { return family_ == PlaneFamily::Classical; }
    const CircleHomeo& f() const { return f_.homeo; }
    const CircleHomeo& g() const { return g_.homeo; }
    const CircleHomeo& f_inverse() const { return f_inv_; }
    const CircleHomeo& g_inverse() const { return g_inv_; }
    double tolerance() const { return tolerance_; }
    double uniqueness_tolerance() const { return uniqueness_tolerance_; }
    int twisted_orientation() const { return twisted_orientation_; }
    bool corrupted() const { return twisted_orientation_ != -1; }
    /// General g is supported but only g = id is covered by the classification.
    bool experimental() const { return family_ == PlaneFamily::HalfClassical && !g_.homeo.empty(); }

    PlaneModel with_tolerance(double tol) const {
        PlaneModel m = *this;
        m.tolerance_ = tol;
        return m;
    }

    std::string descriptor() const {
        if (is_classical()) return "classical";
        std::string s = "half-classical(f=" + f_.literal + ",g=" + g_.literal + ")";
        if (corrupted()) s += "[corrupted-twisted-branch]";
        return s;
    }

    Circle make_circle(CircleTag tag, const MobiusMap& m) const {
        if (tag == CircleTag::HalfClassicalTwisted)
            return {tag, m, f_.homeo.then(CircleHomeo{m}).then(g_inv_)};
        return {tag, m, CircleHomeo{m}};
    }

    bool in_circle_set(const Circle& c) const {
        switch (c.tag) {
            case CircleTag::ClassicalPGL: return is_classical();
            case CircleTag::HalfClassicalPSL: return !is_classical() && c.map.orientation() == 1;
            case CircleTag::HalfClassicalTwisted:
                return !is_classical() && c.map.orientation() == twisted_orientation_;
        }
        return false;
    }

    /// Coordinates in which a circle of the given tag is the Moebius map itself.
    const CircleHomeo& branch_x(CircleTag tag) const {
        return tag == CircleTag::HalfClassicalTwisted ? f_.homeo : identity_;
    }
    const CircleHomeo& branch_y(CircleTag tag) const {
        return tag == CircleTag::HalfClassicalTwisted ? g_.homeo : identity_;
    }
    const CircleHomeo& branch_x_inverse(CircleTag tag) const {
        return tag == CircleTag::HalfClassicalTwisted ? f_inv_ : identity_;
    }

private:
    PlaneFamily family_ = PlaneFamily::Classical;
    HomeoSpec f_;
    HomeoSpec g_;
    CircleHomeo f_inv_;
    CircleHomeo g_inv_;
    CircleHomeo identity_;
    double tolerance_ = kMembershipTol;
    double uniqueness_tolerance_ = kUniquenessTol;
    int twisted_orientation_ = -1;
};

inline void require_pairwise_non_parallel(const TorusPoint& p, const TorusPoint& q, const TorusPoint& r,
                                          double tol = kDefaultEqualityTol) {
    if (parallel(p, q, tol) != ParallelRelation::None || parallel(p, r, tol) != ParallelRelation::None ||
        parallel(q, r, tol) != ParallelRelation::None)
        throw GeometryError(ErrorCode::ParallelInput, "points must be pairwise non-parallel");
}

/// Both candidate circles through three points, before branch selection.
struct JoinCandidates {
    MobiusMap through_map;              // mu with mu(x_i) = y_i
    std::optional<MobiusMap> twisted_map;  // nu with nu(f(x_i)) = g(y_i); half-classical only
    std::optional<Circle> psl;
    std::optional<Circle> twisted;

    int branch_count() const { return (psl ? 1 : 0) + (twisted ? 1 : 0); }
};

inline JoinCandidates join_candidates(const PlaneModel& plane, const TorusPoint& p, const TorusPoint& q,
                                      const TorusPoint& r) {
    require_pairwise_non_parallel(p, q, r);
    JoinCandidates out{mobius_from_three(p.x, q.x, r.x, p.y, q.y, r.y), std::nullopt, std::nullopt, std::nullopt};
    if (plane.is_classical()) {
        out.psl = plane.make_circle(CircleTag::ClassicalPGL, out.through_map);
        return out;
    }
    if (out.through_map.orientation() == 1) out.psl = plane.make_circle(CircleTag::HalfClassicalPSL, out.through_map);
    const auto& f = plane.f();
    const auto& g = plane.g();
    out.twisted_map = mobius_from_three(f(p.x), f(q.x), f(r.x), g(p.y), g(q.y), g(r.y));
    if (out.twisted_map->orientation() == plane.twisted_orientation())
        out.twisted = plane.make_circle(CircleTag::HalfClassicalTwisted, *out.twisted_map);
    return out;
}

/// The unique circle of the plane through three pairwise non-parallel points.
inline Circle join(const PlaneModel& plane, const TorusPoint& p, const TorusPoint& q, const TorusPoint& r) {
    auto c = join_candidates(plane, p, q, r);
    if (c.branch_count() == 0) throw GeometryError(ErrorCode::NoBranch, "no branch of the circle set joins the points");
    if (c.branch_count() == 2) throw GeometryError(ErrorCode::AmbiguousBranch, "both branches join the points");
    return c.psl ? *c.psl : *c.twisted;
}

/// Both graphs are Moebius maps in the same branch coordinates.
inline bool share_branch_coordinates(const Circle& c, const Circle& d) {
    const bool ct = c.tag == CircleTag::HalfClassicalTwisted;
    const bool dt = d.tag == CircleTag::HalfClassicalTwisted;
    return ct == dt;
}

/// All points where the two circles meet, reported as (x, C(x)).
inline std::vector<TorusPoint> circle_intersect(const PlaneModel& plane, const Circle& c, const Circle& d,
                                                double tangency_band = kParabolicBand) {
    if (homeo_sup_distance(c.graph, d.graph, 64) < plane.uniqueness_tolerance())
        throw GeometryError(ErrorCode::EqualCircles, "circles coincide");
    std::vector<TorusPoint> out;
    if (share_branch_coordinates(c, d)) {
        const MobiusMap k = d.map.inverse() * c.map;
        if (is_identity(k)) throw GeometryError(ErrorCode::EqualCircles, "circles coincide");
        // the product is rounded at the scale |C| |D|, which bounds how well a
        // double fixed point can be told from two close ones
        auto norm = [](const MobiusMap& m) { return std::sqrt(m.a() * m.a() + m.b() * m.b() + m.c() * m.c() + m.d() * m.d()); };
        const double band =
            std::max(tangency_band, 64.0 * std::numeric_limits<double>::epsilon() * norm(c.map) * norm(d.map));
        const auto& xinv = plane.branch_x_inverse(c.tag);
        for (const auto& w : mobius_fixed_points(k, band)) out.push_back(c.point_at(xinv(w)));
        return out;
    }
    for (const auto& x : homeo_solve_equal(c.graph, d.graph)) out.push_back(c.point_at(x));
    return out;
}

/// Outcome of the tangency search in the pencil of circles through p and q.
struct TouchResult {
    Circle circle;
    double log_parameter;  // log t of the selected pencil member
    int brackets;          // sign changes of the tangency function over the scan
    double discriminant;   // trace^2 - 4 det of C^-1 D in branch coordinates
};

inline constexpr int kPencilScan = 512;
inline constexpr double kPencilLogRange = 60.0;

/// Circle of the plane through p and q meeting C only at p.
///
/// Works in the branch coordinates of C, where every member of C's branch is
/// a Moebius map. Members of the pencil through p and q with C's
/// orientation are scanned over log t; the tangency function compares
/// the multiplier of C^-1 D at p with 1, which happens exactly when p is a
/// double fixed point. The unique sign change is refined by bisection.
inline TouchResult touch(const PlaneModel& plane, const Circle& c, const TorusPoint& p, const TorusPoint& q) {
    const double tol = plane.tolerance();
    if (!c.contains(p, tol)) throw GeometryError(ErrorCode::PreconditionViolated, "p must lie on C");
    if (c.contains(q, tol)) throw GeometryError(ErrorCode::PreconditionViolated, "q must not lie on C");
    if (parallel(p, q) != ParallelRelation::None)
        throw GeometryError(ErrorCode::PreconditionViolated, "q must not be parallel to p");
    const auto& bx = plane.branch_x(c.tag);
    const auto& by = plane.branch_y(c.tag);
    const ProjPoint up = bx(p.x);
    const ProjPoint vp = by(p.y);
    const auto pencil = mobius_two_pairs(up, vp, bx(q.x), by(q.y));
    const int orientation = c.map.orientation();
    const MobiusMap c_inv = c.map.inverse();
    const MobiusMap to_inf = MobiusMap::rotation((0.5 - up.chart()) * std::numbers::pi);
    const MobiusMap from_inf = to_inf.inverse();

    // |a| - |d| of the member conjugated so that p sits at infinity; the
    // multiplier there is a/d and vanishes to 1 exactly at tangency.
    const auto c_inv_raw = c_inv.entries();
    const auto to_inf_raw = to_inf.entries();
    const auto from_inf_raw = from_inf.entries();
    auto tangency = [&](double log_t) {
        const auto k = detail::multiply(
            to_inf_raw, detail::multiply(c_inv_raw, detail::multiply(pencil.oriented_raw(log_t, orientation), from_inf_raw)));
        return std::abs(k[0]) - std::abs(k[3]);
    };

    auto log_t_at = [&](int i) { return -kPencilLogRange + 2.0 * kPencilLogRange * i / kPencilScan; };
    std::vector<double> samples(kPencilScan + 1);
    for (int i = 0; i <= kPencilScan; ++i) samples[static_cast<std::size_t>(i)] = tangency(log_t_at(i));
    int brackets = 0;
    std::optional<std::pair<double, double>> first;
    for (int i = 0; i < kPencilScan; ++i) {
        const double fa = samples[static_cast<std::size_t>(i)];
        const double fb = samples[static_cast<std::size_t>(i) + 1];
        if ((fa > 0.0) != (fb > 0.0) || fa == 0.0) {
            ++brackets;
            if (!first) first = {log_t_at(i), log_t_at(i + 1)};
        }
    }
    if (!first) throw GeometryError(ErrorCode::NotFound, "no tangent member in the pencil through p and q");
    auto [lo, hi] = *first;
    double flo = tangency(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = tangency(mid);
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
    const double log_t = 0.5 * (lo + hi);
    const auto raw = pencil.oriented_raw(log_t, orientation);
    const MobiusMap member = detail::from_raw(raw);
    const MobiusMap k = c_inv * member;
    const double disc = k.trace() * k.trace() - 4.0 * k.det();
    return {plane.make_circle(c.tag, member), log_t, brackets, disc};
}

/// Line of the derived plane at `base`: a parallel class or a circle through base.
using DerivedLine = std::variant<ParallelClass, Circle>;

inline DerivedLine derived_line_through(const PlaneModel& plane, const TorusPoint& base, const TorusPoint& a,
                                        const TorusPoint& b) {
    if (parallel(base, a) != ParallelRelation::None || parallel(base, b) != ParallelRelation::None)
        throw GeometryError(ErrorCode::PointOnBaseCross, "derived points must avoid the parallel classes of the base");
    switch (parallel(a, b)) {
        case ParallelRelation::Both:
            throw GeometryError(ErrorCode::PreconditionViolated, "derived points must be distinct");
        case ParallelRelation::Plus: return ParallelClass{ParallelKind::Plus, a.x};
        case ParallelRelation::Minus: return ParallelClass{ParallelKind::Minus, a.y};
        case ParallelRelation::None: break;
    }
    return join(plane, base, a, b);
}

/// `id`, `power:<p>` or `spline:<path>`.
inline HomeoSpec parse_homeo_spec(const std::string& literal) {
    if (literal.empty() || literal == "id" || literal == "identity") return {CircleHomeo::identity(), "id"};
    const auto colon = literal.find(':');
    const std::string kind = literal.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : literal.substr(colon + 1);
    if (kind == "power") {
        return {CircleHomeo{PowerMap(parse_real(arg))}, literal};
    }
    if (kind == "spline") return {checked_homeo(CircleHomeo{load_knot_file(arg)}), literal};
    throw GeometryError(ErrorCode::ParseError, "unknown homeomorphism literal '" + literal + "'");
}

/// Plane from the command-line shorthand: `classical`, `half-classical`,
/// or `half:<f literal>`; explicit f/g literals override the shorthand.
inline PlaneModel plane_from_spec(const std::string& spec, const std::optional<std::string>& f = std::nullopt,
                                  const std::optional<std::string>& g = std::nullopt,
                                  double tolerance = kMembershipTol) {
    if (spec == "classical") {
        if ((f && *f != "id") || (g && *g != "id"))
            throw GeometryError(ErrorCode::ParseError, "the classical plane takes no f or g");
        return PlaneModel::classical(tolerance);
    }
    std::string f_lit = "id";
    if (spec.rfind("half:", 0) == 0) {
        f_lit = spec.substr(5);
    } else if (spec != "half-classical" && spec != "half") {
        throw GeometryError(ErrorCode::ParseError, "unknown plane '" + spec + "'");
    }
    if (f) f_lit = *f;
    return PlaneModel::half_classical(parse_homeo_spec(f_lit), parse_homeo_spec(g.value_or("id")), tolerance);
}

/// Flat `key = value` plane configuration; `#` starts a comment.
/// Keys: family (classical | half-classical), f, g, tolerance.
inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw GeometryError(ErrorCode::ParseError, "config line " + std::to_string(lineno) + " lacks '='");
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline PlaneModel plane_from_config(std::istream& in) {
    const auto kv = parse_key_values(in);
    for (const auto& [k, v] : kv)
        if (k != "family" && k != "f" && k != "g" && k != "tolerance")
            throw GeometryError(ErrorCode::ParseError, "unknown config key '" + k + "'");
    const auto fam = kv.count("family") ? kv.at("family") : std::string("classical");
    const double tol = kv.count("tolerance") ? parse_real(kv.at("tolerance")) : kMembershipTol;
    if (!(tol > 0.0)) throw GeometryError(ErrorCode::ParseError, "tolerance must be positive");
    std::optional<std::string> f, g;
    if (kv.count("f")) f = kv.at("f");
    if (kv.count("g")) g = kv.at("g");
    if (fam == "classical") return plane_from_spec("classical", f, g, tol);
    if (fam == "half-classical") return plane_from_spec("half-classical", f, g, tol);
    throw GeometryError(ErrorCode::ParseError, "unknown family '" + fam + "'");
}

inline PlaneModel plane_from_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GeometryError(ErrorCode::ParseError, "cannot open config " + path);
    return plane_from_config(in);
}

}  // namespace torus_planes
