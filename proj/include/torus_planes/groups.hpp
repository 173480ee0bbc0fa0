#pragma once

// Explicit automorphism families acting on the torus: kernel and diagonal
// PSL(2,R) actions, the affine-type groups Phi_d / Phi_inf, the two-fixed-point
// actions of Phi_0 and Phi_d (d < 0), and the factor model of L2 x SO(2).

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "homeo.hpp"
#include "planes.hpp"
#include "projline.hpp"

namespace torus_planes {

/// (x, y) -> (x, mu(y)); fixes every plus class.
struct KernelPlusPSL {
    MobiusMap mu;
};
/// (x, y) -> (mu(x), y); fixes every minus class.
struct KernelMinusPSL {
    MobiusMap mu;
};
/// (x, y) -> (mu(x), mu(y)).
struct DiagonalPSL {
    MobiusMap mu;
};
/// Phi_d: (x, y) -> (a x + b, a^d y + c); for d = inf, Phi_inf: (x + b, a y + c).
struct PhiStd {
    double d;
    double a;
    double b;
    double c;
};
/// d = 0: (x, y) -> (a x, b y + c); d < 0: (a sgn(x) |x|^b, b^d y + c).
struct PhiTwoFixed {
    double d;
    double a;
    double b;
    double c;
};

enum class GroupFamily { KernelPlus, KernelMinus, Diagonal, PhiStd, PhiTwoFixed };

inline const char* to_string(GroupFamily f) {
    switch (f) {
        case GroupFamily::KernelPlus: return "kernel-plus-psl";
        case GroupFamily::KernelMinus: return "kernel-minus-psl";
        case GroupFamily::Diagonal: return "diagonal-psl";
        case GroupFamily::PhiStd: return "phi";
        case GroupFamily::PhiTwoFixed: return "phi2";
    }
    return "unknown";
}

class GroupElement {
public:
    using Params = std::variant<KernelPlusPSL, KernelMinusPSL, DiagonalPSL, PhiStd, PhiTwoFixed>;

    explicit GroupElement(Params params) : params_(std::move(params)) { validate(); }

    const Params& params() const { return params_; }
    GroupFamily family() const { return static_cast<GroupFamily>(params_.index()); }

    template <class T>
    const T& as() const {
        return std::get<T>(params_);
    }

    /// d parameter for the affine-type families; NaN otherwise.
    double exponent() const {
        if (const auto* p = std::get_if<PhiStd>(&params_)) return p->d;
        if (const auto* p = std::get_if<PhiTwoFixed>(&params_)) return p->d;
        return std::numeric_limits<double>::quiet_NaN();
    }

private:
    void validate() const {
        auto psl = [](const MobiusMap& m) {
            if (m.orientation() != 1)
                throw GeometryError(ErrorCode::PreconditionViolated, "PSL element needs det > 0");
        };
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, PhiStd>) {
                    if (!(p.a > 0.0)) throw GeometryError(ErrorCode::PreconditionViolated, "phi needs a > 0");
                    if (std::isnan(p.d) || (std::isinf(p.d) && p.d < 0.0))
                        throw GeometryError(ErrorCode::PreconditionViolated, "phi needs d real or +inf");
                } else if constexpr (std::is_same_v<T, PhiTwoFixed>) {
                    if (!(p.a > 0.0) || !(p.b > 0.0))
                        throw GeometryError(ErrorCode::PreconditionViolated, "phi2 needs a, b > 0");
                    if (!(p.d <= 0.0) || std::isinf(p.d))
                        throw GeometryError(ErrorCode::PreconditionViolated, "phi2 needs finite d <= 0");
                } else {
                    psl(p.mu);
                }
            },
            params_);
    }

    Params params_;
};

/// Coordinatewise maps (x-factor, y-factor) realizing the element.
inline std::pair<CircleHomeo, CircleHomeo> factor_maps(const GroupElement& g) {
    return std::visit(
        [](const auto& p) -> std::pair<CircleHomeo, CircleHomeo> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, KernelPlusPSL>) {
                return {CircleHomeo::identity(), CircleHomeo{p.mu}};
            } else if constexpr (std::is_same_v<T, KernelMinusPSL>) {
                return {CircleHomeo{p.mu}, CircleHomeo::identity()};
            } else if constexpr (std::is_same_v<T, DiagonalPSL>) {
                return {CircleHomeo{p.mu}, CircleHomeo{p.mu}};
            } else if constexpr (std::is_same_v<T, PhiStd>) {
                if (std::isinf(p.d))
                    return {CircleHomeo{MobiusMap::affine(1.0, p.b)}, CircleHomeo{MobiusMap::affine(p.a, p.c)}};
                return {CircleHomeo{MobiusMap::affine(p.a, p.b)},
                        CircleHomeo{MobiusMap::affine(std::pow(p.a, p.d), p.c)}};
            } else {
                if (p.d == 0.0)
                    return {CircleHomeo{MobiusMap::affine(p.a, 0.0)}, CircleHomeo{MobiusMap::affine(p.b, p.c)}};
                // sgn(x)|x|^b is 0 at 0 and inf at inf by continuity
                return {CircleHomeo{PowerMap(p.b), MobiusMap::affine(p.a, 0.0)},
                        CircleHomeo{MobiusMap::affine(std::pow(p.b, p.d), p.c)}};
            }
        },
        g.params());
}

inline TorusPoint act(const GroupElement& g, const TorusPoint& p) {
    const auto [fx, fy] = factor_maps(g);
    return {fx(p.x), fy(p.y)};
}

/// Image of a circle under g as a graph: y = gy(C(gx^-1(x))).
inline CircleHomeo push_forward_graph(const GroupElement& g, const CircleHomeo& graph) {
    const auto [fx, fy] = factor_maps(g);
    return fx.inverse().then(graph).then(fy);
}

inline GroupElement group_identity(GroupFamily family, double d = 0.0) {
    switch (family) {
        case GroupFamily::KernelPlus: return GroupElement(KernelPlusPSL{MobiusMap::identity()});
        case GroupFamily::KernelMinus: return GroupElement(KernelMinusPSL{MobiusMap::identity()});
        case GroupFamily::Diagonal: return GroupElement(DiagonalPSL{MobiusMap::identity()});
        case GroupFamily::PhiStd: return GroupElement(PhiStd{d, 1.0, 0.0, 0.0});
        case GroupFamily::PhiTwoFixed: return GroupElement(PhiTwoFixed{d, 1.0, 1.0, 0.0});
    }
    throw GeometryError(ErrorCode::FamilyMismatch, "unknown family");
}

/// Closed-form product: act(compose(g1, g2), p) = act(g1, act(g2, p)).
inline GroupElement compose(const GroupElement& g1, const GroupElement& g2) {
    if (g1.family() != g2.family())
        throw GeometryError(ErrorCode::FamilyMismatch, "elements belong to different families");
    const bool same_d = g1.exponent() == g2.exponent() || (std::isnan(g1.exponent()) && std::isnan(g2.exponent()));
    if (!same_d) throw GeometryError(ErrorCode::FamilyMismatch, "elements have different d");
    switch (g1.family()) {
        case GroupFamily::KernelPlus:
            return GroupElement(KernelPlusPSL{g1.as<KernelPlusPSL>().mu * g2.as<KernelPlusPSL>().mu});
        case GroupFamily::KernelMinus:
            return GroupElement(KernelMinusPSL{g1.as<KernelMinusPSL>().mu * g2.as<KernelMinusPSL>().mu});
        case GroupFamily::Diagonal:
            return GroupElement(DiagonalPSL{g1.as<DiagonalPSL>().mu * g2.as<DiagonalPSL>().mu});
        case GroupFamily::PhiStd: {
            const auto& l = g1.as<PhiStd>();
            const auto& r = g2.as<PhiStd>();
            if (std::isinf(l.d)) return GroupElement(PhiStd{l.d, l.a * r.a, l.b + r.b, l.a * r.c + l.c});
            return GroupElement(PhiStd{l.d, l.a * r.a, l.a * r.b + l.b, std::pow(l.a, l.d) * r.c + l.c});
        }
        case GroupFamily::PhiTwoFixed: {
            const auto& l = g1.as<PhiTwoFixed>();
            const auto& r = g2.as<PhiTwoFixed>();
            if (l.d == 0.0) return GroupElement(PhiTwoFixed{0.0, l.a * r.a, l.b * r.b, l.b * r.c + l.c});
            return GroupElement(
                PhiTwoFixed{l.d, l.a * std::pow(r.a, l.b), l.b * r.b, std::pow(l.b, l.d) * r.c + l.c});
        }
    }
    throw GeometryError(ErrorCode::FamilyMismatch, "unknown family");
}

inline GroupElement group_inverse(const GroupElement& g) {
    switch (g.family()) {
        case GroupFamily::KernelPlus: return GroupElement(KernelPlusPSL{g.as<KernelPlusPSL>().mu.inverse()});
        case GroupFamily::KernelMinus: return GroupElement(KernelMinusPSL{g.as<KernelMinusPSL>().mu.inverse()});
        case GroupFamily::Diagonal: return GroupElement(DiagonalPSL{g.as<DiagonalPSL>().mu.inverse()});
        case GroupFamily::PhiStd: {
            const auto& p = g.as<PhiStd>();
            if (std::isinf(p.d)) return GroupElement(PhiStd{p.d, 1.0 / p.a, -p.b, -p.c / p.a});
            return GroupElement(PhiStd{p.d, 1.0 / p.a, -p.b / p.a, -p.c / std::pow(p.a, p.d)});
        }
        case GroupFamily::PhiTwoFixed: {
            const auto& p = g.as<PhiTwoFixed>();
            if (p.d == 0.0) return GroupElement(PhiTwoFixed{0.0, 1.0 / p.a, 1.0 / p.b, -p.c / p.b});
            return GroupElement(PhiTwoFixed{p.d, std::pow(p.a, -1.0 / p.b), 1.0 / p.b, -p.c * std::pow(p.b, -p.d)});
        }
    }
    throw GeometryError(ErrorCode::FamilyMismatch, "unknown family");
}

enum class FactorActionKind { SO2OnCircle, L2OnLine, PSLOnCircle, Trivial };

inline const char* to_string(FactorActionKind k) {
    switch (k) {
        case FactorActionKind::SO2OnCircle: return "SO2-on-circle";
        case FactorActionKind::L2OnLine: return "L2-on-line";
        case FactorActionKind::PSLOnCircle: return "PSL-on-circle";
        case FactorActionKind::Trivial: return "trivial";
    }
    return "unknown";
}

struct FactorActionReport {
    FactorActionKind kind;
    std::vector<ParallelClass> fixed_classes;  // empty when every class is fixed
    bool fixes_every_class = false;
};

struct FactorAction {
    CircleHomeo map;
    FactorActionReport report;
};

inline constexpr int kFixedScan = 512;

/// Fixed coordinates of a circle map: sign-change scan over the chart plus
/// explicit checks of 0 and infinity. Empty if the map is the identity.
inline std::vector<ProjPoint> fixed_coordinates(const CircleHomeo& map, int scan = kFixedScan,
                                                double tol = kDefaultEqualityTol) {
    std::vector<ProjPoint> out;
    auto add = [&](const ProjPoint& p) {
        for (const auto& q : out)
            if (approx_equal(p, q, 1e-8)) return;
        out.push_back(p);
    };
    for (const auto& special : {ProjPoint::zero(), ProjPoint::infinity()})
        if (approx_equal(map(special), special, tol)) add(special);
    for (const auto& p : homeo_solve_equal(map, CircleHomeo::identity(), scan)) add(p);
    std::sort(out.begin(), out.end(), [](const ProjPoint& a, const ProjPoint& b) { return a.chart() < b.chart(); });
    return out;
}

inline FactorActionKind factor_kind(GroupFamily family, ParallelKind side) {
    const bool plus = side == ParallelKind::Plus;
    switch (family) {
        case GroupFamily::KernelPlus: return plus ? FactorActionKind::Trivial : FactorActionKind::PSLOnCircle;
        case GroupFamily::KernelMinus: return plus ? FactorActionKind::PSLOnCircle : FactorActionKind::Trivial;
        case GroupFamily::Diagonal: return FactorActionKind::PSLOnCircle;
        case GroupFamily::PhiStd:
        case GroupFamily::PhiTwoFixed: return FactorActionKind::L2OnLine;
    }
    return FactorActionKind::Trivial;
}

/// Action on the coordinates of plus classes (x) or minus classes (y).
inline FactorAction induced_factor_action(const GroupElement& g, ParallelKind side, int scan = kFixedScan) {
    const auto maps = factor_maps(g);
    CircleHomeo map = side == ParallelKind::Plus ? maps.first : maps.second;
    FactorActionReport report{factor_kind(g.family(), side), {}, false};
    if (homeo_sup_distance(map, CircleHomeo::identity(), scan) < 1e-12) {
        report.fixes_every_class = true;
    } else {
        for (const auto& p : fixed_coordinates(map, scan)) report.fixed_classes.push_back({side, p});
    }
    return {std::move(map), std::move(report)};
}

/// Element of L2 x SO(2) modeled by its two factor actions only: rotation by
/// `angle` on the minus factor, x -> a x + b on the plus factor with the
/// fixed class pinned at infinity.
struct SO2L2Element {
    double angle;
    double a;
    double b;

    static SO2L2Element identity() { return {0.0, 1.0, 0.0}; }

    /// Rotation by the full angle of the circle factor; the chart of RP^1
    /// has period pi in homogeneous angle, so the matrix turns by angle / 2.
    MobiusMap minus_factor() const { return MobiusMap::rotation(0.5 * angle); }
    MobiusMap plus_factor() const { return MobiusMap::affine(a, b); }

    double normalized_angle() const {
        double t = std::fmod(angle, 2.0 * std::numbers::pi);
        if (t < 0.0) t += 2.0 * std::numbers::pi;
        return t;
    }
};

inline SO2L2Element compose(const SO2L2Element& l, const SO2L2Element& r) {
    double angle = std::fmod(l.angle + r.angle, 2.0 * std::numbers::pi);
    if (angle < 0.0) angle += 2.0 * std::numbers::pi;
    return {angle, l.a * r.a, l.a * r.b + l.b};
}

inline std::pair<MobiusMap, MobiusMap> so2_times_l2_factor_model(double angle, double a, double b) {
    if (!(a > 0.0)) throw GeometryError(ErrorCode::PreconditionViolated, "L2 factor needs a > 0");
    const SO2L2Element e{angle, a, b};
    return {e.minus_factor(), e.plus_factor()};
}

using GroupLiteral = std::variant<GroupElement, SO2L2Element>;

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

inline MobiusMap parse_matrix(const std::string& text) {
    auto parts = split(text, ',');
    if (parts.size() == 1) parts = split(text, ':');
    if (parts.size() != 4) throw GeometryError(ErrorCode::ParseError, "matrix literal needs four entries");
    return MobiusMap(parse_real(parts[0]), parse_real(parts[1]), parse_real(parts[2]), parse_real(parts[3]));
}

}  // namespace detail

/// `diag:psl:<a,b,c,d>`, `kplus:psl:<...>`, `kminus:psl:<...>`,
/// `phi:<d>:<a>:<b>:<c>`, `phi2:<d>:<a>:<b>:<c>`, `so2l2:<angle>:<a>:<b>`.
inline GroupLiteral parse_group_literal(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw GeometryError(ErrorCode::ParseError, "bad group literal '" + text + "'");
    const std::string head = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);
    try {
        if (head == "diag" || head == "kplus" || head == "kminus") {
            if (rest.rfind("psl:", 0) != 0)
                throw GeometryError(ErrorCode::ParseError, "expected '" + head + ":psl:<entries>'");
            const MobiusMap mu = detail::parse_matrix(rest.substr(4));
            if (head == "diag") return GroupElement(DiagonalPSL{mu});
            if (head == "kplus") return GroupElement(KernelPlusPSL{mu});
            return GroupElement(KernelMinusPSL{mu});
        }
        const auto parts = detail::split(rest, ':');
        if (head == "phi" || head == "phi2") {
            if (parts.size() != 4) throw GeometryError(ErrorCode::ParseError, head + " needs <d>:<a>:<b>:<c>");
            const double d = parse_real(parts[0]);
            const double a = parse_real(parts[1]), b = parse_real(parts[2]), c = parse_real(parts[3]);
            if (head == "phi") return GroupElement(PhiStd{d, a, b, c});
            return GroupElement(PhiTwoFixed{d, a, b, c});
        }
        if (head == "so2l2") {
            if (parts.size() != 3) throw GeometryError(ErrorCode::ParseError, "so2l2 needs <angle>:<a>:<b>");
            const double a = parse_real(parts[1]);
            if (!(a > 0.0)) throw GeometryError(ErrorCode::ParseError, "so2l2 needs a > 0");
            return SO2L2Element{parse_real(parts[0]), a, parse_real(parts[2])};
        }
    } catch (const GeometryError& e) {
        if (e.code() == ErrorCode::ParseError) throw;
        throw GeometryError(ErrorCode::ParseError, e.what());
    }
    throw GeometryError(ErrorCode::ParseError, "unknown group family '" + head + "'");
}

inline std::string to_literal(const GroupElement& g) {
    auto num = [](double v) {
        if (std::isinf(v)) return std::string("inf");
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    auto mat = [&](const MobiusMap& m) {
        return num(m.a()) + "," + num(m.b()) + "," + num(m.c()) + "," + num(m.d());
    };
    return std::visit(
        [&](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, KernelPlusPSL>) return "kplus:psl:" + mat(p.mu);
            else if constexpr (std::is_same_v<T, KernelMinusPSL>) return "kminus:psl:" + mat(p.mu);
            else if constexpr (std::is_same_v<T, DiagonalPSL>) return "diag:psl:" + mat(p.mu);
            else if constexpr (std::is_same_v<T, PhiStd>)
                return "phi:" + num(p.d) + ":" + num(p.a) + ":" + num(p.b) + ":" + num(p.c);
            else return "phi2:" + num(p.d) + ":" + num(p.a) + ":" + num(p.b) + ":" + num(p.c);
        },
        g.params());
}

}  // namespace torus_planes
