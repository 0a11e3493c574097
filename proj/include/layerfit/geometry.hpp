#pragma once

/**
 * @brief Boundary representation and boundary-fitted coordinates.
 *
 * A closed curve gamma(t) = (phi(t), psi(t)), t in [0, T), carries a local
 * orthogonal frame (r, t): x = phi(t) + r n1(t), y = psi(t) + r n2(t) with
 * (n1, n2) the inward unit normal. The flow direction is +x throughout, so
 * a boundary point is outflow where n1 < 0 and characteristic where n1 = 0.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "layerfit/error.hpp"
#include "layerfit/vec2.hpp"

namespace layerfit {

enum class Orientation : int { Anticlockwise = 1, Clockwise = -1 };

struct BoundingBox {
    double min_x, max_x, min_y, max_y;
};

/// Closed parametric curve with first and second derivatives.
///
/// Evaluation wraps t periodically into [0, T). The object is immutable and
/// cheap to copy; the sampled polygon used by contains() is built once at
/// construction and shared between copies.
class ParametricBoundary {
  public:
    using CurveFn = std::function<Vec2(double)>;

    static constexpr std::size_t polygon_vertices = 8192;

    ParametricBoundary(double period, CurveFn eval, CurveFn deriv1, CurveFn deriv2,
                       Orientation orientation, std::string label = {})
        : impl_(std::make_shared<Impl>()) {
        if (!(period > 0.0) || !std::isfinite(period))
            throw Error("boundary period must be positive");
        impl_->period = period;
        impl_->eval = std::move(eval);
        impl_->d1 = std::move(deriv1);
        impl_->d2 = std::move(deriv2);
        impl_->orientation = orientation;
        impl_->label = std::move(label);
        build_polygon();
    }

    /// Curve given by position only; derivatives use centered differences
    /// with step 1e-6 T.
    static ParametricBoundary from_curve(double period, CurveFn eval, Orientation orientation,
                                         std::string label = {}) {
        const double h = 1e-6 * period;
        auto d1 = [eval, h](double t) { return (eval(t + h) - eval(t - h)) * (0.5 / h); };
        auto d2 = [eval, h](double t) {
            return (eval(t + h) - 2.0 * eval(t) + eval(t - h)) * (1.0 / (h * h));
        };
        return ParametricBoundary(period, eval, d1, d2, orientation, std::move(label));
    }

    double period() const { return impl_->period; }
    Orientation orientation() const { return impl_->orientation; }
    double orientation_sign() const { return static_cast<double>(impl_->orientation); }
    const std::string& label() const { return impl_->label; }

    double wrap(double t) const {
        const double T = impl_->period;
        if (t >= 0.0 && t < T)
            return t;
        double w = t - T * std::floor(t / T);
        if (w >= T || w < 0.0)
            w = 0.0;
        return w;
    }

    Vec2 eval(double t) const { return impl_->eval(wrap(t)); }
    Vec2 deriv1(double t) const { return impl_->d1(wrap(t)); }
    Vec2 deriv2(double t) const { return impl_->d2(wrap(t)); }

    /// Closed polygon through eval(k T / M), k = 0..M-1 (last edge implicit).
    const std::vector<Vec2>& polygon() const { return impl_->polygon; }
    const BoundingBox& extent() const { return impl_->box; }

  private:
    struct Impl {
        double period = 0.0;
        CurveFn eval, d1, d2;
        Orientation orientation = Orientation::Anticlockwise;
        std::string label;
        std::vector<Vec2> polygon;
        BoundingBox box{};
    };

    void build_polygon() {
        auto& p = impl_->polygon;
        p.resize(polygon_vertices);
        BoundingBox box{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        for (std::size_t k = 0; k < polygon_vertices; ++k) {
            p[k] = impl_->eval(impl_->period * static_cast<double>(k) / static_cast<double>(polygon_vertices));
            box.min_x = std::min(box.min_x, p[k].x);
            box.max_x = std::max(box.max_x, p[k].x);
            box.min_y = std::min(box.min_y, p[k].y);
            box.max_y = std::max(box.max_y, p[k].y);
        }
        impl_->box = box;
    }

    std::shared_ptr<Impl> impl_;
};

/// Differential geometry at one parameter value.
///
/// kappa is measured against the inward normal (positive where the domain
/// is locally convex), so the metric factor is eta = 1 - kappa r for either
/// orientation of the parameterization.
struct FrameSample {
    double t = 0.0;
    Vec2 point;
    Vec2 tangent; ///< unit tangent in the direction of increasing t
    double tau = 0.0;
    double kappa = 0.0;
    Vec2 normal; ///< inward unit normal (n1, n2)
};

inline FrameSample frame(const ParametricBoundary& boundary, double t) {
    const Vec2 d1 = boundary.deriv1(t);
    const Vec2 d2 = boundary.deriv2(t);
    const double tau = std::sqrt(d1.x * d1.x + d1.y * d1.y);
    if (!(tau >= 1e-14))
        throw Error("singular parameterization");
    const double s = boundary.orientation_sign();
    FrameSample f;
    f.t = t;
    f.point = boundary.eval(t);
    f.tau = tau;
    f.kappa = s * (d1.x * d2.y - d1.y * d2.x) / (tau * tau * tau);
    f.tangent = {d1.x / tau, d1.y / tau};
    f.normal = {-s * d1.y / tau, s * d1.x / tau};
    return f;
}

struct CurvilinearPoint {
    double r = 0.0; ///< distance along the inward normal
    double t = 0.0; ///< boundary parameter
};

inline Vec2 to_cartesian(const ParametricBoundary& boundary, CurvilinearPoint p) {
    const FrameSample f = frame(boundary, p.t);
    return {f.point.x + p.r * f.normal.x, f.point.y + p.r * f.normal.y};
}

/// Parameter interval [begin, end] with begin in [0, T) and end possibly
/// beyond T when the arc wraps through t = 0.
struct ParameterInterval {
    double begin = 0.0;
    double end = 0.0;

    double length() const { return end - begin; }
    double midpoint() const { return 0.5 * (begin + end); }
};

enum class CharacteristicKind { Internal, External };

struct CharacteristicPoint {
    double t = 0.0;
    Vec2 point;
    CharacteristicKind kind = CharacteristicKind::External;
    double kappa = 0.0;
};

namespace detail {

inline double n1_at(const ParametricBoundary& b, double t) { return frame(b, t).normal.x; }

// Bisection on a strict sign change of n1 over [lo, hi] (unwrapped values).
inline double refine_n1_root(const ParametricBoundary& b, double lo, double hi) {
    double flo = n1_at(b, lo);
    double fhi = n1_at(b, hi);
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const double fm = n1_at(b, mid);
        if (fm == 0.0)
            return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

} // namespace detail

/// Sign changes of n1 over a uniform sample, refined by bisection.
///
/// A point is Internal when the boundary bends away from the domain there
/// (negative curvature against the inward normal): the tangent line then
/// enters the domain. Otherwise it is External.
inline std::vector<CharacteristicPoint> find_characteristic_points(const ParametricBoundary& boundary,
                                                                   std::size_t samples = 4096) {
    if (samples < 1024)
        throw Error("characteristic point search needs at least 1024 samples");
    constexpr double zero_tol = 1e-13;
    const double T = boundary.period();
    const double dt = T / static_cast<double>(samples);
    const auto M = static_cast<std::ptrdiff_t>(samples);

    std::vector<double> value(samples);
    std::vector<int> sign(samples);
    for (std::ptrdiff_t k = 0; k < M; ++k) {
        value[k] = detail::n1_at(boundary, dt * static_cast<double>(k));
        sign[k] = std::abs(value[k]) <= zero_tol ? 0 : (value[k] < 0.0 ? -1 : 1);
    }
    auto at = [&](std::ptrdiff_t k) { return sign[((k % M) + M) % M]; };

    std::vector<double> roots;
    for (std::ptrdiff_t k = 0; k < M; ++k) {
        if (sign[k] == 0) {
            if (at(k - 1) == 0)
                continue; // interior of a zero run, handled at its start
            std::ptrdiff_t len = 1;
            while (len <= M && at(k + len) == 0)
                ++len;
            if (len > 2)
                throw Error("non-isolated characteristic points");
            if (at(k - 1) * at(k + len) < 0) {
                double t = dt * static_cast<double>(k);
                if (len == 2 && std::abs(value[(k + 1) % M]) < std::abs(value[k]))
                    t += dt;
                roots.push_back(boundary.wrap(t));
            }
        } else if (sign[k] * at(k + 1) < 0) {
            const double lo = dt * static_cast<double>(k);
            roots.push_back(boundary.wrap(detail::refine_n1_root(boundary, lo, lo + dt)));
        }
    }
    std::sort(roots.begin(), roots.end());

    std::vector<CharacteristicPoint> points;
    points.reserve(roots.size());
    for (double t : roots) {
        const FrameSample f = frame(boundary, t);
        if (std::abs(f.normal.x) > 1e-10)
            throw Error("characteristic point refinement failed");
        points.push_back({t, f.point, f.kappa < 0.0 ? CharacteristicKind::Internal : CharacteristicKind::External,
                          f.kappa});
    }
    return points;
}

/// Maximal arcs with n1 < 0, bounded by consecutive characteristic points.
inline std::vector<ParameterInterval> outflow_arcs(const ParametricBoundary& boundary,
                                                   const std::vector<CharacteristicPoint>& points) {
    if (points.size() < 2)
        throw Error("closed boundary must have at least two characteristic points");
    const double T = boundary.period();
    std::vector<ParameterInterval> arcs;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const double a = points[k].t;
        double b = points[(k + 1) % points.size()].t;
        if (b <= a)
            b += T;
        if (detail::n1_at(boundary, 0.5 * (a + b)) < 0.0)
            arcs.push_back({a, b});
    }
    return arcs;
}

inline std::vector<ParameterInterval> outflow_arcs(const ParametricBoundary& boundary) {
    return outflow_arcs(boundary, find_characteristic_points(boundary));
}

/// min |n1| over the outflow arcs with delta_trim removed from each end.
inline double theta_min(const ParametricBoundary& boundary, const std::vector<ParameterInterval>& arcs,
                        double delta_trim, std::size_t samples = 4096) {
    if (!(delta_trim > 0.0))
        throw Error("theta_min needs a positive trim");
    double theta = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& arc : arcs) {
        const double a = arc.begin + delta_trim;
        const double b = arc.end - delta_trim;
        if (!(b > a))
            continue;
        any = true;
        for (std::size_t k = 0; k <= samples; ++k) {
            const double t = k == samples ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(samples);
            theta = std::min(theta, std::abs(detail::n1_at(boundary, t)));
        }
    }
    if (!any || !(theta > 0.0))
        throw Error("strip arcs degenerate");
    return std::min(theta, 1.0);
}

inline double max_abs_curvature(const ParametricBoundary& boundary, const ParameterInterval& arc,
                                std::size_t samples = 4096) {
    double m = 0.0;
    for (std::size_t k = 0; k <= samples; ++k) {
        const double t = arc.begin + arc.length() * static_cast<double>(k) / static_cast<double>(samples);
        m = std::max(m, std::abs(frame(boundary, t).kappa));
    }
    return m;
}

/// Inverts x = gamma(t) + r n(t) over one arc and r in [0, r_max].
///
/// Feet of perpendiculars are roots of h(t) = (p - gamma(t)) . T(t); they are
/// bracketed on a fixed sample of the arc and refined by safeguarded Newton
/// steps, using h'(t) = -tau (1 - kappa r).
class ArcInverter {
  public:
    ArcInverter(const ParametricBoundary& boundary, ParameterInterval arc, double r_max,
                std::size_t samples = 512)
        : boundary_(boundary), arc_(arc), r_max_(r_max) {
        if (!(arc.length() > 0.0))
            throw Error("empty arc");
        if (!(r_max > 0.0))
            throw Error("strip width must be positive");
        t_.resize(samples + 1);
        frames_.resize(samples + 1);
        double chord = 0.0;
        box_ = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        for (std::size_t k = 0; k <= samples; ++k) {
            t_[k] = k == samples ? arc.end
                                 : arc.begin + arc.length() * static_cast<double>(k) / static_cast<double>(samples);
            frames_[k] = frame(boundary, t_[k]);
            const Vec2 p = frames_[k].point;
            for (Vec2 q : {p, p + r_max * frames_[k].normal}) {
                box_.min_x = std::min(box_.min_x, q.x);
                box_.max_x = std::max(box_.max_x, q.x);
                box_.min_y = std::min(box_.min_y, q.y);
                box_.max_y = std::max(box_.max_y, q.y);
            }
            if (k > 0)
                chord = std::max(chord, norm(p - frames_[k - 1].point));
        }
        const double pad = chord + 1e-9 * (1.0 + r_max);
        box_.min_x -= pad;
        box_.max_x += pad;
        box_.min_y -= pad;
        box_.max_y += pad;
    }

    const ParameterInterval& arc() const { return arc_; }
    double r_max() const { return r_max_; }

    /// (r, t) with t in the arc and 0 <= r <= r_max, or nullopt.
    std::optional<CurvilinearPoint> invert(Vec2 p) const {
        if (p.x < box_.min_x || p.x > box_.max_x || p.y < box_.min_y || p.y > box_.max_y)
            return std::nullopt;
        constexpr double end_tol = 1e-10;
        const std::size_t S = t_.size() - 1;
        std::vector<double> h(S + 1);
        for (std::size_t k = 0; k <= S; ++k)
            h[k] = dot(p - frames_[k].point, frames_[k].tangent);

        std::optional<CurvilinearPoint> best;
        auto consider = [&](double t) {
            const FrameSample f = frame(boundary_, t);
            const Vec2 d = p - f.point;
            double r = dot(d, f.normal);
            const double tol = 1e-12 * (1.0 + r_max_);
            if (r < -tol || r > r_max_ + tol)
                return;
            r = std::clamp(r, 0.0, r_max_);
            const Vec2 q = f.point + r * f.normal;
            if (norm(q - p) > 1e-10 * std::max(1.0, norm(p)))
                throw Error("inversion failed");
            if (!best || r < best->r)
                best = CurvilinearPoint{r, t};
        };

        if (std::abs(h[0]) <= end_tol)
            consider(t_[0]);
        if (std::abs(h[S]) <= end_tol)
            consider(t_[S]);
        for (std::size_t k = 0; k < S; ++k) {
            if (h[k] == 0.0) {
                if (k > 0)
                    consider(t_[k]);
                continue;
            }
            if ((h[k] < 0.0) != (h[k + 1] < 0.0) && h[k + 1] != 0.0)
                consider(refine(p, t_[k], t_[k + 1], h[k]));
        }
        return best;
    }

  private:
    double refine(Vec2 p, double lo, double hi, double hlo) const {
        double t = 0.5 * (lo + hi);
        for (int it = 0; it < 100; ++it) {
            const FrameSample f = frame(boundary_, t);
            const Vec2 d = p - f.point;
            const double ht = dot(d, f.tangent);
            if (ht == 0.0)
                return t;
            if ((ht < 0.0) == (hlo < 0.0))
                lo = t;
            else
                hi = t;
            const double dh = -f.tau * (1.0 - f.kappa * dot(d, f.normal));
            double next = dh != 0.0 ? t - ht / dh : 0.5 * (lo + hi);
            if (!(next > lo && next < hi))
                next = 0.5 * (lo + hi);
            if (next == t || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
                return next;
            t = next;
        }
        const FrameSample f = frame(boundary_, t);
        if (std::abs(dot(p - f.point, f.tangent)) > 1e-10)
            throw Error("inversion failed");
        return t;
    }

    ParametricBoundary boundary_;
    ParameterInterval arc_;
    double r_max_;
    std::vector<double> t_;
    std::vector<FrameSample> frames_;
    BoundingBox box_{};
};

inline std::optional<CurvilinearPoint> to_curvilinear(const ParametricBoundary& boundary, double x, double y,
                                                      const ParameterInterval& arc, double r_max) {
    return ArcInverter(boundary, arc, r_max).invert({x, y});
}

/// Strict interior test by winding number of the sampled polygon. Points
/// within 1e-12 of the polygon count as outside.
inline bool contains(const ParametricBoundary& boundary, double x, double y) {
    constexpr double on_edge = 1e-12;
    const BoundingBox& box = boundary.extent();
    if (x <= box.min_x - on_edge || x >= box.max_x + on_edge || y <= box.min_y - on_edge || y >= box.max_y + on_edge)
        return false;
    const auto& poly = boundary.polygon();
    const std::size_t n = poly.size();
    int winding = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 a = poly[k];
        const Vec2 b = poly[(k + 1) % n];
        if (x >= std::min(a.x, b.x) - on_edge && x <= std::max(a.x, b.x) + on_edge &&
            y >= std::min(a.y, b.y) - on_edge && y <= std::max(a.y, b.y) + on_edge) {
            const Vec2 ab = b - a;
            const double len2 = dot(ab, ab);
            double s = len2 > 0.0 ? dot(Vec2{x, y} - a, ab) / len2 : 0.0;
            s = std::clamp(s, 0.0, 1.0);
            if (norm(Vec2{x, y} - (a + s * ab)) <= on_edge)
                return false;
        }
        const double cross = (b.x - a.x) * (y - a.y) - (x - a.x) * (b.y - a.y);
        if (a.y <= y) {
            if (b.y > y && cross > 0.0)
                ++winding;
        } else if (b.y <= y && cross < 0.0) {
            --winding;
        }
    }
    return winding != 0;
}

/// Euclidean distance from (x, y) to the sampled polygon.
inline double polygon_distance(const ParametricBoundary& boundary, double x, double y) {
    const auto& poly = boundary.polygon();
    const std::size_t n = poly.size();
    const Vec2 p{x, y};
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 a = poly[k];
        const Vec2 ab = poly[(k + 1) % n] - a;
        const double len2 = dot(ab, ab);
        const double s = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, norm(p - (a + s * ab)));
    }
    return best;
}

} // namespace layerfit
