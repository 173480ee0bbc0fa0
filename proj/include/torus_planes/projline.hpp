#pragma once

// Arithmetic on the real projective line RP^1 (the model for each circle
// factor of the torus) and on real Moebius transformations acting on it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace torus_planes {

inline constexpr double kDefaultEqualityTol = 1e-9;
inline constexpr double kParabolicBand = 1e-10;

/// Point [h0 : h1] of RP^1; the affine value is h0/h1 and [1 : 0] is infinity.
///
/// Stored on the unit circle with h1 > 0, or h1 == 0 and h0 > 0, so that
/// two representatives of the same point compare componentwise.
class ProjPoint {
public:
    ProjPoint() : h0_(0.0), h1_(1.0) {}

    ProjPoint(double h0, double h1) {
        if (!std::isfinite(h0) || !std::isfinite(h1) || (h0 == 0.0 && h1 == 0.0))
            throw GeometryError(ErrorCode::DegeneratePoint, "homogeneous pair must be finite and non-zero");
        const double n = std::hypot(h0, h1);
        // already-normalized input is left untouched so canonicalization is idempotent
        if (std::abs(n - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
            h0 /= n;
            h1 /= n;
        }
        if (h1 < 0.0 || (h1 == 0.0 && h0 < 0.0)) {
            h0 = -h0;
            h1 = -h1;
        }
        h0_ = h0 + 0.0;  // folds -0.0
        h1_ = h1 + 0.0;
    }

    static ProjPoint real(double x) {
        if (std::isinf(x)) return infinity();
        return ProjPoint(x, 1.0);
    }
    static ProjPoint infinity() { return ProjPoint(1.0, 0.0); }
    static ProjPoint zero() { return ProjPoint(0.0, 1.0); }

    /// Inverse of chart(): s in [0,1) with 0 -> 0 and 0.5 -> infinity.
    static ProjPoint from_chart(double s) {
        if (s - std::floor(s) == 0.5) return infinity();  // cos(pi/2) is not exactly 0
        const double phi = s * std::numbers::pi;
        return ProjPoint(std::sin(phi), std::cos(phi));
    }

    double h0() const { return h0_; }
    double h1() const { return h1_; }

    /// Affine value; +infinity for the point at infinity.
    double value() const {
        if (h1_ == 0.0) return std::numeric_limits<double>::infinity();
        return h0_ / h1_;
    }

    /// Angle chart atan2(h0, h1) / pi mod 1, used for plotting and scans.
    double chart() const {
        double s = std::atan2(h0_, h1_) / std::numbers::pi;
        if (s < 0.0) s += 1.0;
        if (s >= 1.0) s -= 1.0;
        return s;
    }

    bool is_infinity(double tol = kDefaultEqualityTol) const;

    friend bool operator==(const ProjPoint& a, const ProjPoint& b) {
        return a.h0_ == b.h0_ && a.h1_ == b.h1_;
    }

private:
    double h0_;
    double h1_;
};

/// Chordal metric on canonical representatives: min(|p - q|, |p + q|).
inline double chordal_distance(const ProjPoint& p, const ProjPoint& q) {
    const double dm = std::hypot(p.h0() - q.h0(), p.h1() - q.h1());
    const double dp = std::hypot(p.h0() + q.h0(), p.h1() + q.h1());
    return std::min(dm, dp);
}

inline bool approx_equal(const ProjPoint& p, const ProjPoint& q, double tol = kDefaultEqualityTol) {
    return chordal_distance(p, q) < tol;
}

inline bool ProjPoint::is_infinity(double tol) const {
    return approx_equal(*this, infinity(), tol);
}

/// Signed chart difference of a and b wrapped into (-0.5, 0.5].
inline double chart_difference(const ProjPoint& a, const ProjPoint& b) {
    double d = a.chart() - b.chart();
    while (d > 0.5) d -= 1.0;
    while (d <= -0.5) d += 1.0;
    return d;
}

inline std::string to_string(const ProjPoint& p) {
    if (p.h1() == 0.0) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", p.value());
    return buf;
}

inline std::ostream& operator<<(std::ostream& os, const ProjPoint& p) { return os << to_string(p); }

struct TorusPoint {
    ProjPoint x;
    ProjPoint y;

    friend bool operator==(const TorusPoint&, const TorusPoint&) = default;
};

inline TorusPoint torus_point(double x, double y) { return {ProjPoint::real(x), ProjPoint::real(y)}; }

inline double torus_distance(const TorusPoint& p, const TorusPoint& q) {
    return std::max(chordal_distance(p.x, q.x), chordal_distance(p.y, q.y));
}

inline std::string to_string(const TorusPoint& p) { return to_string(p.x) + "," + to_string(p.y); }

/// Element of PGL(2,R): a 2x2 real matrix up to scale with |det| = 1.
///
/// The matrix [[a, b], [c, d]] acts by [h0 : h1] -> [a h0 + b h1 : c h0 + d h1].
/// The representative is scaled by 1/sqrt(|det|) and its sign chosen so that
/// the largest-magnitude entry is positive.
class MobiusMap {
public:
    MobiusMap() : m_{1.0, 0.0, 0.0, 1.0}, orientation_(1) {}

    MobiusMap(double a, double b, double c, double d) {
        const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw GeometryError(ErrorCode::SingularMatrix, "matrix entries must be finite and not all zero");
        a /= scale;
        b /= scale;
        c /= scale;
        d /= scale;
        const double det = a * d - b * c;
        if (std::abs(det) < 1e-14)
            throw GeometryError(ErrorCode::SingularMatrix, "matrix is singular");
        orientation_ = det > 0.0 ? 1 : -1;
        const double r = 1.0 / std::sqrt(std::abs(det));
        m_ = {a * r, b * r, c * r, d * r};
        std::size_t imax = 0;
        for (std::size_t i = 1; i < 4; ++i)
            if (std::abs(m_[i]) > std::abs(m_[imax]) + 1e-15) imax = i;
        if (m_[imax] < 0.0)
            for (auto& e : m_) e = -e;
        for (auto& e : m_) e += 0.0;
    }

    static MobiusMap identity() { return {}; }
    /// x -> a x + b
    static MobiusMap affine(double a, double b) { return MobiusMap(a, b, 0.0, 1.0); }
    /// Rotation of the homogeneous vector; shifts the angle chart by theta / pi.
    static MobiusMap rotation(double theta) {
        return MobiusMap(std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta));
    }

    double a() const { return m_[0]; }
    double b() const { return m_[1]; }
    double c() const { return m_[2]; }
    double d() const { return m_[3]; }
    const std::array<double, 4>& entries() const { return m_; }

    double det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }
    double trace() const { return m_[0] + m_[3]; }

    /// +1 for PSL(2,R) members, -1 for orientation-reversing maps.
    int orientation() const { return orientation_; }

    ProjPoint apply(const ProjPoint& x) const {
        return ProjPoint(m_[0] * x.h0() + m_[1] * x.h1(), m_[2] * x.h0() + m_[3] * x.h1());
    }
    ProjPoint operator()(const ProjPoint& x) const { return apply(x); }

    MobiusMap inverse() const { return MobiusMap(m_[3], -m_[1], -m_[2], m_[0]); }

    /// Composition: (m1 * m2)(x) = m1(m2(x)).
    friend MobiusMap operator*(const MobiusMap& l, const MobiusMap& r) {
        return MobiusMap(l.a() * r.a() + l.b() * r.c(), l.a() * r.b() + l.b() * r.d(),
                         l.c() * r.a() + l.d() * r.c(), l.c() * r.b() + l.d() * r.d());
    }

private:
    std::array<double, 4> m_;
    int orientation_;
};

/// Projective equality: max entry difference up to sign after normalization.
inline double projective_distance(const MobiusMap& l, const MobiusMap& r) {
    double dm = 0.0, dp = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        dm = std::max(dm, std::abs(l.entries()[i] - r.entries()[i]));
        dp = std::max(dp, std::abs(l.entries()[i] + r.entries()[i]));
    }
    return std::min(dm, dp);
}

inline bool approx_equal(const MobiusMap& l, const MobiusMap& r, double tol = 1e-10) {
    return projective_distance(l, r) < tol;
}

inline bool is_identity(const MobiusMap& m, double tol = 1e-10) {
    return approx_equal(m, MobiusMap::identity(), tol);
}

inline std::string to_string(const MobiusMap& m) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "[[%.17g, %.17g], [%.17g, %.17g]]", m.a(), m.b(), m.c(), m.d());
    return buf;
}

namespace detail {

// Coefficients (p1, -p0) of the linear form vanishing at p = [p0 : p1].
inline std::array<double, 2> vanishing_form(const ProjPoint& p) { return {p.h1(), -p.h0()}; }

inline double eval_form(const std::array<double, 2>& form, const ProjPoint& z) {
    return form[0] * z.h0() + form[1] * z.h1();
}

// Raw matrix sending (p1, p2, p3) to (0, 1, infinity).
inline std::array<double, 4> frame_to_standard(const ProjPoint& p1, const ProjPoint& p2, const ProjPoint& p3) {
    const auto l1 = vanishing_form(p1);
    const auto l3 = vanishing_form(p3);
    const double s1 = eval_form(l3, p2);
    const double s3 = eval_form(l1, p2);
    return {l1[0] * s1, l1[1] * s1, l3[0] * s3, l3[1] * s3};
}

inline std::array<double, 4> adjugate(const std::array<double, 4>& m) { return {m[3], -m[1], -m[2], m[0]}; }

inline std::array<double, 4> multiply(const std::array<double, 4>& l, const std::array<double, 4>& r) {
    return {l[0] * r[0] + l[1] * r[2], l[0] * r[1] + l[1] * r[3], l[2] * r[0] + l[3] * r[2],
            l[2] * r[1] + l[3] * r[3]};
}

inline MobiusMap from_raw(const std::array<double, 4>& m) { return MobiusMap(m[0], m[1], m[2], m[3]); }

inline void require_distinct(const ProjPoint& a, const ProjPoint& b, double tol, const char* what) {
    if (approx_equal(a, b, tol)) throw GeometryError(ErrorCode::CoincidentPoints, what);
}

}  // namespace detail

inline ProjPoint mobius_apply(const MobiusMap& m, const ProjPoint& x) { return m.apply(x); }

/// The unique element of PGL(2,R) sending x1, x2, x3 to y1, y2, y3.
inline MobiusMap mobius_from_three(const ProjPoint& x1, const ProjPoint& x2, const ProjPoint& x3,
                                   const ProjPoint& y1, const ProjPoint& y2, const ProjPoint& y3,
                                   double tol = kDefaultEqualityTol) {
    detail::require_distinct(x1, x2, tol, "source points x1, x2 coincide");
    detail::require_distinct(x1, x3, tol, "source points x1, x3 coincide");
    detail::require_distinct(x2, x3, tol, "source points x2, x3 coincide");
    detail::require_distinct(y1, y2, tol, "target points y1, y2 coincide");
    detail::require_distinct(y1, y3, tol, "target points y1, y3 coincide");
    detail::require_distinct(y2, y3, tol, "target points y2, y3 coincide");
    const auto src = detail::frame_to_standard(x1, x2, x3);
    const auto dst = detail::frame_to_standard(y1, y2, y3);
    return detail::from_raw(detail::multiply(detail::adjugate(dst), src));
}

/// One-parameter family of Moebius maps sending source_from -> source_to and
/// other_from -> other_to, written target_frame^-1 * diag(t, 1) * source_frame
/// for t != 0, where the frames send the two prescribed points to 0 and infinity.
class MobiusPencil {
public:
    MobiusPencil(const std::array<double, 4>& source_frame, const std::array<double, 4>& target_frame)
        : source_(source_frame), target_inv_(detail::adjugate(target_frame)) {
        const double ds = source_frame[0] * source_frame[3] - source_frame[1] * source_frame[2];
        const double dt = target_frame[0] * target_frame[3] - target_frame[1] * target_frame[2];
        frame_sign_ = (ds > 0.0) == (dt > 0.0) ? 1 : -1;
    }

    /// Family member for any t != 0; its orientation is sign(t) * frame_sign().
    MobiusMap member(double t) const {
        const std::array<double, 4> scaled = {t * source_[0], t * source_[1], source_[2], source_[3]};
        return detail::from_raw(detail::multiply(target_inv_, scaled));
    }

    /// Member with det > 0 for t > 0.
    MobiusMap positive_member(double t) const { return member(t * frame_sign_); }

    /// Member of the requested orientation for t > 0.
    MobiusMap oriented_member(double t, int orientation) const {
        return member(t * frame_sign_ * (orientation > 0 ? 1 : -1));
    }

    /// Unnormalized member with t = exp(log_t), weighted so that no entry
    /// overflows however far out the family is taken.
    std::array<double, 4> oriented_raw(double log_t, int orientation) const {
        const double sign = frame_sign_ * (orientation > 0 ? 1 : -1);
        const double w0 = sign * (log_t > 0.0 ? 1.0 : std::exp(log_t));
        const double w1 = log_t > 0.0 ? std::exp(-log_t) : 1.0;
        return detail::multiply(target_inv_, {w0 * source_[0], w0 * source_[1], w1 * source_[2], w1 * source_[3]});
    }

    int frame_sign() const { return frame_sign_; }

private:
    std::array<double, 4> source_;
    std::array<double, 4> target_inv_;
    int frame_sign_;
};

/// Family of maps with x1 -> x2 and y1 -> y2.
inline MobiusPencil mobius_two_pairs(const ProjPoint& x1, const ProjPoint& x2, const ProjPoint& y1,
                                     const ProjPoint& y2, double tol = kDefaultEqualityTol) {
    detail::require_distinct(x1, y1, tol, "source points coincide");
    detail::require_distinct(x2, y2, tol, "target points coincide");
    auto frame = [](const ProjPoint& to_zero, const ProjPoint& to_inf) {
        const auto l0 = detail::vanishing_form(to_zero);
        const auto li = detail::vanishing_form(to_inf);
        return std::array<double, 4>{l0[0], l0[1], li[0], li[1]};
    };
    return MobiusPencil(frame(x1, y1), frame(x2, y2));
}

/// Fixed points of a non-identity map: solutions of c z^2 + (d - a) z - b = 0
/// in homogeneous form. |disc| < band (disc = trace^2 - 4 det) is parabolic.
inline std::vector<ProjPoint> mobius_fixed_points(const MobiusMap& m, double band = kParabolicBand) {
    if (is_identity(m)) throw GeometryError(ErrorCode::IdentityMap, "identity map fixes every point");
    const double a = m.a(), b = m.b(), c = m.c(), d = m.d();
    const double disc = (a - d) * (a - d) + 4.0 * b * c;
    auto eigvec = [&](double lambda) {
        const double u0 = b, u1 = lambda - a;
        const double v0 = lambda - d, v1 = c;
        if (std::hypot(u0, u1) >= std::hypot(v0, v1)) return ProjPoint(u0, u1);
        return ProjPoint(v0, v1);
    };
    // rounding in disc grows with the squared entries of the normalized matrix
    const double scale = std::max(1.0, a * a + b * b + c * c + d * d);
    if (disc < -band * scale) return {};
    if (disc <= band * scale) return {eigvec(0.5 * (a + d))};
    const double sq = std::sqrt(disc);
    const double tr = a + d;
    // avoid cancellation in the smaller eigenvalue
    const double l1 = 0.5 * (tr + std::copysign(sq, tr == 0.0 ? 1.0 : tr));
    const double l2 = (a * d - b * c) / l1;
    return {eigvec(l1), eigvec(l2)};
}

}  // namespace torus_planes
